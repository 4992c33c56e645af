#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "driftwatch/fplab.hpp"

using namespace driftwatch;
using fplab::FpGrid;

namespace {

double gaussian(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

FpGrid ou_grid(std::size_t n_cells, double init_mean, double x_lo = -6.0, double x_hi = 6.0) {
    return fplab::make_grid(
        x_lo, x_hi, n_cells, [](double x) { return -x; }, [](double) { return 1.0; },
        [=](double x) { return gaussian(x, init_mean, 1.0); });
}

std::vector<double> stationary_reference(const FpGrid& grid) {
    std::vector<double> q(grid.n_cells);
    for (std::size_t i = 0; i < grid.n_cells; ++i) q[i] = gaussian(grid.cell_center(i), 0.0, 1.0);
    // entropy_diagnostics normalizes internally; returned raw here
    return q;
}

}  // namespace

TEST_SUITE("fplab") {

TEST_CASE("uniform density with zero drift is exactly stationary") {
    FpGrid grid = fplab::make_grid(
        0.0, 1.0, 64, [](double) { return 0.0; }, [](double) { return 0.7; },
        [](double) { return 1.0; });
    const std::vector<double> before = grid.density;
    const auto stats = fplab::fp_step(grid, fplab::stable_dt(grid));
    CHECK(stats.clamped_mass == 0.0);
    CHECK(grid.density == before);
}

TEST_CASE("mass is conserved to roundoff without renormalization") {
    FpGrid grid = ou_grid(200, 1.5);
    const double dt = fplab::stable_dt(grid);
    for (int i = 0; i < 2000; ++i) {
        const auto stats = fplab::fp_step(grid, dt);
        CHECK(stats.clamped_mass == 0.0);  // telescoping sum, no clamping on this fixture
        CHECK(std::abs(grid.mass() - 1.0) < 1e-12);
    }
}

TEST_CASE("OU relaxation converges to the analytic stationary density") {
    FpGrid grid = ou_grid(400, 2.0);
    const double dt = fplab::stable_dt(grid);
    const auto steps = static_cast<std::size_t>(std::ceil(40.0 / dt));
    double clamped_total = 0.0;
    for (std::size_t i = 0; i < steps; ++i) clamped_total += fplab::fp_step(grid, dt).clamped_mass;
    CHECK(clamped_total < 1e-9);

    double max_err = 0.0;
    for (std::size_t i = 0; i < grid.n_cells; ++i)
        max_err = std::max(max_err,
                           std::abs(grid.density[i] - gaussian(grid.cell_center(i), 0.0, 1.0)));
    CHECK(max_err < 1e-3);

    // converged state: currents vanish and the diagnostics see equilibrium
    const std::vector<double> current = fplab::probability_current(grid);
    double max_j = 0.0;
    for (double j : current) max_j = std::max(max_j, std::abs(j));
    CHECK(max_j < 1e-6);

    const auto diag = fplab::entropy_diagnostics(grid, stationary_reference(grid));
    CHECK(diag.sigma_tot < 1e-9);
    CHECK(std::abs(diag.dDdt_flux) < 1e-9);
}

TEST_CASE("analytic stationary density carries near-zero current on a fine grid") {
    // centered differences are second order: n = 400 leaves |J| ~ 7e-5, so
    // the 1e-6 level needs a finer grid
    FpGrid grid = fplab::make_grid(
        -8.0, 8.0, 4000, [](double x) { return -x; }, [](double) { return 1.0; },
        [](double x) { return gaussian(x, 0.0, 1.0); });
    const std::vector<double> current = fplab::probability_current(grid);
    double max_j = 0.0;
    for (double j : current) max_j = std::max(max_j, std::abs(j));
    CHECK(max_j < 1e-6);
}

TEST_CASE("uniform density with constant drift carries J = c p in the interior") {
    const double c = 0.8;
    FpGrid grid = fplab::make_grid(
        0.0, 2.0, 50, [=](double) { return c; }, [](double) { return 1.0; },
        [](double) { return 1.0; });
    const std::vector<double> current = fplab::probability_current(grid);
    CHECK(current.front() == 0.0);
    CHECK(current.back() == 0.0);
    for (std::size_t f = 1; f < grid.n_cells; ++f)
        CHECK(current[f] == doctest::Approx(c * grid.density[0]).epsilon(1e-12));
}

TEST_CASE("zero drift and symmetric density give an antisymmetric current") {
    const std::size_t n = 80;
    FpGrid grid = fplab::make_grid(
        -3.0, 3.0, n, [](double) { return 0.0; }, [](double) { return 1.0; },
        [](double x) { return gaussian(x, 0.0, 0.8); });
    // cell centers are not bitwise mirror images, so allow ulp-level noise
    // on currents of order 1/dx
    const std::vector<double> current = fplab::probability_current(grid);
    for (std::size_t f = 0; f <= n; ++f) CHECK(std::abs(current[f] + current[n - f]) < 1e-13);
}

TEST_CASE("step validation") {
    FpGrid grid = ou_grid(100, 1.0);
    CHECK_THROWS_AS((void)fplab::fp_step(grid, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)fplab::fp_step(grid, 10.0 * fplab::stable_dt(grid)),
                    std::invalid_argument);
    // dt exactly at the bound is accepted
    CHECK_NOTHROW((void)fplab::fp_step(grid, fplab::stable_dt(grid)));
}

TEST_CASE("grid construction validates fields") {
    CHECK_THROWS_AS((void)fplab::make_grid(0.0, 1.0, 10, [](double) { return 0.0; },
                                           [](double) { return 0.0; },  // nonpositive diffusion
                                           [](double) { return 1.0; }),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)fplab::make_grid(0.0, 1.0, 10, [](double) { return 0.0; },
                                           [](double) { return 1.0; },
                                           [](double) { return 0.0; }),  // zero mass
                    std::invalid_argument);
    CHECK_THROWS_AS((void)fplab::make_grid(1.0, 0.0, 10, [](double) { return 0.0; },
                                           [](double) { return 1.0; },
                                           [](double) { return 1.0; }),
                    std::invalid_argument);
}

TEST_CASE("identical density and reference give exactly zero divergence and flux") {
    FpGrid grid = ou_grid(150, 0.0);
    const auto diag = fplab::entropy_diagnostics(grid, grid.density);
    CHECK(diag.d_kl == 0.0);
    CHECK(diag.dDdt_flux == 0.0);
    CHECK(diag.q_hk == diag.sigma_tot);
}

TEST_CASE("entropy diagnostics reject invalid references") {
    FpGrid grid = ou_grid(50, 0.0);
    std::vector<double> bad(grid.n_cells, 1.0);
    bad[10] = 0.0;
    CHECK_THROWS_AS((void)fplab::entropy_diagnostics(grid, bad), std::invalid_argument);
    CHECK_THROWS_AS((void)fplab::entropy_diagnostics(grid, std::vector<double>(3, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("relaxation: sign, Lyapunov decay, and the Eq.-5 identity") {
    FpGrid grid = ou_grid(400, 2.0);
    const std::vector<double> reference = stationary_reference(grid);
    const double dt = fplab::stable_dt(grid);
    const auto steps = static_cast<std::size_t>(std::ceil(8.0 / dt));

    std::vector<double> d_series, flux_series;
    d_series.reserve(steps + 1);
    for (std::size_t i = 0;; ++i) {
        const auto diag = fplab::entropy_diagnostics(grid, reference);
        CHECK(diag.sigma_tot >= -1e-9);
        CHECK(diag.q_hk == diag.dDdt_flux + diag.sigma_tot);
        // relaxation toward the stationary reference: the housekeeping
        // residual is pure discretization error
        CHECK(std::abs(diag.q_hk) < 1e-5);
        d_series.push_back(diag.d_kl);
        flux_series.push_back(diag.dDdt_flux);
        if (i == steps) break;
        fplab::fp_step(grid, dt);
    }

    for (std::size_t i = 1; i < d_series.size(); ++i)
        CHECK(d_series[i] - d_series[i - 1] <= 1e-8);

    std::size_t checked = 0;
    for (std::size_t i = 1; i + 1 < d_series.size(); i += 50) {
        const double fd = (d_series[i + 1] - d_series[i - 1]) / (2.0 * dt);
        const double tolerance = std::max(0.02 * std::abs(flux_series[i]), 1e-6);
        CHECK(std::abs(fd - flux_series[i]) <= tolerance);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("eq.-5 consistency tightens under refinement") {
    auto worst_rel = [](std::size_t n_cells) {
        FpGrid grid = ou_grid(n_cells, 2.0);
        std::vector<double> reference = stationary_reference(grid);
        const double dt = fplab::stable_dt(grid);
        const auto steps = static_cast<std::size_t>(std::ceil(2.0 / dt));
        std::vector<double> d_series, flux_series;
        for (std::size_t i = 0;; ++i) {
            const auto diag = fplab::entropy_diagnostics(grid, reference);
            d_series.push_back(diag.d_kl);
            flux_series.push_back(diag.dDdt_flux);
            if (i == steps) break;
            fplab::fp_step(grid, dt);
        }
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < d_series.size(); ++i) {
            const double fd = (d_series[i + 1] - d_series[i - 1]) / (2.0 * dt);
            if (std::abs(flux_series[i]) > 1e-3)
                worst = std::max(worst, std::abs(fd - flux_series[i]) / std::abs(flux_series[i]));
        }
        return worst;
    };
    const double coarse = worst_rel(50);
    const double fine = worst_rel(400);
    CHECK(fine < coarse);
}

TEST_CASE("driven dynamics: mismatch can grow while entropy production stays nonnegative") {
    const std::size_t n = 300;
    FpGrid grid = fplab::make_grid(
        -6.0, 6.0, n, [](double x) { return -x + 1.5; }, [](double) { return 1.0; },
        [](double x) { return gaussian(x, 0.0, 1.0); });
    const std::vector<double> reference = stationary_reference(grid);

    const double dt = fplab::stable_dt(grid);
    const auto steps = static_cast<std::size_t>(std::ceil(2.0 / dt));
    double prev = fplab::entropy_diagnostics(grid, reference).d_kl;
    bool grew = false;
    for (std::size_t i = 0; i < steps; ++i) {
        fplab::fp_step(grid, dt);
        const auto diag = fplab::entropy_diagnostics(grid, reference);
        CHECK(diag.sigma_tot >= -1e-9);
        if (diag.d_kl > prev + 1e-12) grew = true;
        prev = diag.d_kl;
    }
    CHECK(grew);
}

}  // TEST_SUITE
