#pragma once

// 1-D Fokker-Planck solver (explicit conservative finite volumes, zero-flux
// boundaries) and entropy-balance diagnostics.

#include <functional>
#include <span>
#include <vector>

namespace driftwatch::fplab {

// Cell-centered grid state. density integrates to 1 (sum p dx = 1) and
// diffusion is strictly positive everywhere.
struct FpGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n_cells = 0;
    double dx = 0.0;
    std::vector<double> density;
    std::vector<double> drift;
    std::vector<double> diffusion;

    double cell_center(std::size_t i) const {
        return x_min + (static_cast<double>(i) + 0.5) * dx;
    }
    double mass() const;  // sum p dx
};

using ScalarField = std::function<double(double)>;

// Builds a grid by sampling the fields at cell centers; the density is
// normalized. Throws std::invalid_argument for nonpositive diffusion,
// negative density, or zero total mass.
FpGrid make_grid(double x_min, double x_max, std::size_t n_cells, const ScalarField& drift,
                 const ScalarField& diffusion, const ScalarField& initial_density);

// Largest dt accepted by fp_step: 0.4 dx^2 / max(D).
double stable_dt(const FpGrid& grid);

struct FpStepStats {
    // Mass removed by clamping negative cells this step (0 when no cell went
    // negative; when nonzero the density was renormalized).
    double clamped_mass = 0.0;
};

// One explicit conservative update p <- p - dt (J_{i+1/2} - J_{i-1/2}) / dx
// with face currents J = a p - d(D p)/dx (centered differences, zero-flux
// boundaries). Throws when dt exceeds the stability bound or the state has
// gone non-finite.
FpStepStats fp_step(FpGrid& grid, double dt);

// Face-centered currents, size n_cells + 1; both boundary faces are 0.
std::vector<double> probability_current(const FpGrid& grid);

struct EntropyDiagnostics {
    double d_kl = 0.0;       // sum p log(p/q) dx over cells above the floor
    double dDdt_flux = 0.0;  // sum over faces of J * (log ratio jump)
    double sigma_tot = 0.0;  // sum J^2 / (D p) dx, cell-centered currents
    double q_hk = 0.0;       // dDdt_flux + sigma_tot
};

// Cells with density at or below this floor are excluded from the log-ratio
// and entropy-production sums.
inline constexpr double kDensityFloor = 1e-15;

// q_ref must be strictly positive and is normalized internally.
EntropyDiagnostics entropy_diagnostics(const FpGrid& grid, std::span<const double> q_ref);

}  // namespace driftwatch::fplab
