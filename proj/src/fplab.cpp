#include "driftwatch/fplab.hpp"

#include <cmath>
#include <stdexcept>

#include "driftwatch/simd.hpp"

namespace driftwatch::fplab {

double FpGrid::mass() const { return simd::sum(density.data(), n_cells) * dx; }

FpGrid make_grid(double x_min, double x_max, std::size_t n_cells, const ScalarField& drift,
                 const ScalarField& diffusion, const ScalarField& initial_density) {
    if (n_cells == 0) throw std::invalid_argument("fp grid: n_cells must be positive");
    if (!(x_max > x_min)) throw std::invalid_argument("fp grid: x_max must exceed x_min");

    FpGrid grid;
    grid.x_min = x_min;
    grid.x_max = x_max;
    grid.n_cells = n_cells;
    grid.dx = (x_max - x_min) / static_cast<double>(n_cells);
    grid.density.resize(n_cells);
    grid.drift.resize(n_cells);
    grid.diffusion.resize(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
        const double x = grid.cell_center(i);
        grid.density[i] = initial_density(x);
        grid.drift[i] = drift(x);
        grid.diffusion[i] = diffusion(x);
        if (!(grid.diffusion[i] > 0.0) || !std::isfinite(grid.diffusion[i]))
            throw std::invalid_argument("fp grid: diffusion must be strictly positive");
        if (!(grid.density[i] >= 0.0) || !std::isfinite(grid.density[i]))
            throw std::invalid_argument("fp grid: initial density must be nonnegative");
        if (!std::isfinite(grid.drift[i]))
            throw std::invalid_argument("fp grid: drift must be finite");
    }
    const double total = grid.mass();
    if (!(total > 0.0)) throw std::invalid_argument("fp grid: initial density has zero mass");
    for (double& p : grid.density) p /= total;
    return grid;
}

double stable_dt(const FpGrid& grid) {
    const double max_diffusion = simd::max_value(grid.diffusion.data(), grid.n_cells);
    return 0.4 * grid.dx * grid.dx / max_diffusion;
}

FpStepStats fp_step(FpGrid& grid, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("fp_step: dt must be positive");
    // small slack so dt == stable_dt(grid) is accepted despite rounding
    if (dt > stable_dt(grid) * (1.0 + 1e-12))
        throw std::invalid_argument("fp_step: dt exceeds the diffusive stability bound");

    const std::size_t n = grid.n_cells;
    std::vector<double> faces(n + 1);
    simd::face_flux(faces.data(), grid.density.data(), grid.drift.data(), grid.diffusion.data(),
                    1.0 / grid.dx, n);
    simd::flux_update(grid.density.data(), faces.data(), dt / grid.dx, n);

    FpStepStats stats;
    bool clamped = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = grid.density[i];
        if (!std::isfinite(p)) throw std::runtime_error("fp_step: state became non-finite");
        if (p < 0.0) {
            stats.clamped_mass += -p * grid.dx;
            grid.density[i] = 0.0;
            clamped = true;
        }
    }
    if (clamped) {
        const double total = grid.mass();
        if (!(total > 0.0)) throw std::runtime_error("fp_step: density vanished after clamping");
        for (double& p : grid.density) p /= total;
    }
    return stats;
}

std::vector<double> probability_current(const FpGrid& grid) {
    std::vector<double> faces(grid.n_cells + 1);
    simd::face_flux(faces.data(), grid.density.data(), grid.drift.data(), grid.diffusion.data(),
                    1.0 / grid.dx, grid.n_cells);
    return faces;
}

EntropyDiagnostics entropy_diagnostics(const FpGrid& grid, std::span<const double> q_ref) {
    const std::size_t n = grid.n_cells;
    if (q_ref.size() != n)
        throw std::invalid_argument("entropy_diagnostics: reference length mismatch");
    for (double q : q_ref)
        if (!(q > 0.0) || !std::isfinite(q))
            throw std::invalid_argument("entropy_diagnostics: reference must be strictly positive");

    // The reference is expected normalized; rescale only when it clearly is
    // not, so an exactly matching reference yields exactly zero divergence.
    const double q_mass = simd::sum(q_ref.data(), n) * grid.dx;
    const double q_scale = std::abs(q_mass - 1.0) < 1e-12 ? 1.0 : 1.0 / q_mass;
    const std::vector<double>& p = grid.density;

    // log ratios, valid only where the density is above the floor
    std::vector<double> log_ratio(n, 0.0);
    std::vector<char> live(n, 0);
    double d_kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] > kDensityFloor) {
            live[i] = 1;
            log_ratio[i] = std::log(p[i] / (q_ref[i] * q_scale));
            d_kl += p[i] * log_ratio[i];
        }
    }
    d_kl *= grid.dx;

    const std::vector<double> faces = probability_current(grid);

    // dD/dt = integral J . grad log(p/q); per interior face the gradient
    // integrates to the jump of the log ratio, so dx cancels.
    double flux_term = 0.0;
    for (std::size_t f = 1; f < n; ++f)
        if (live[f - 1] && live[f]) flux_term += faces[f] * (log_ratio[f] - log_ratio[f - 1]);

    double sigma = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!live[i]) continue;
        const double j_cell = 0.5 * (faces[i] + faces[i + 1]);
        sigma += j_cell * j_cell / (grid.diffusion[i] * p[i]);
    }
    sigma *= grid.dx;

    EntropyDiagnostics diag;
    diag.d_kl = d_kl;
    diag.dDdt_flux = flux_term;
    diag.sigma_tot = sigma;
    diag.q_hk = flux_term + sigma;
    return diag;
}

}  // namespace driftwatch::fplab
