#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "driftwatch/csv.hpp"
#include "driftwatch/experiment.hpp"

namespace driftwatch {

namespace {

using nlohmann::json;

double gaussian_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

struct Fixture {
    std::string name;
    fplab::FpGrid grid;
    std::vector<double> reference;
    double t_end = 0.0;
    double dt = 0.0;
    bool check_lyapunov = false;
    bool check_eq5 = false;
    bool check_growth = false;
};

struct Trace {
    std::vector<double> t, d_kl, flux, sigma, q_hk, mass;
};

void append_check(std::vector<CheckResult>& checks, const Fixture& fixture,
                  const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({fixture.name, name, pass, detail});
}

void run_fixture(Fixture fixture, const std::filesystem::path& out_dir,
                 std::vector<CheckResult>& checks) {
    const std::size_t total_steps =
        static_cast<std::size_t>(std::ceil(fixture.t_end / fixture.dt));

    Trace trace;
    trace.t.reserve(total_steps + 1);
    double t = 0.0;
    for (std::size_t step = 0;; ++step) {
        const fplab::EntropyDiagnostics diag =
            fplab::entropy_diagnostics(fixture.grid, fixture.reference);
        trace.t.push_back(t);
        trace.d_kl.push_back(diag.d_kl);
        trace.flux.push_back(diag.dDdt_flux);
        trace.sigma.push_back(diag.sigma_tot);
        trace.q_hk.push_back(diag.q_hk);
        trace.mass.push_back(fixture.grid.mass());
        if (step == total_steps) break;
        fplab::fp_step(fixture.grid, fixture.dt);
        t += fixture.dt;
    }

    // diagnostics CSV, downsampled to a few hundred rows
    {
        CsvWriter out(out_dir / (fixture.name + "_diagnostics.csv"));
        out.write_row({"t", "D_kl", "dDdt_flux", "sigma_tot", "q_hk", "mass"});
        const std::size_t rows = trace.t.size();
        const std::size_t stride = std::max<std::size_t>(1, rows / 400);
        for (std::size_t i = 0; i < rows; i += stride)
            out.write_row({format_double(trace.t[i]), format_double(trace.d_kl[i]),
                           format_double(trace.flux[i]), format_double(trace.sigma[i]),
                           format_double(trace.q_hk[i]), format_double(trace.mass[i])});
        if ((rows - 1) % stride != 0)
            out.write_row({format_double(trace.t[rows - 1]), format_double(trace.d_kl[rows - 1]),
                           format_double(trace.flux[rows - 1]),
                           format_double(trace.sigma[rows - 1]),
                           format_double(trace.q_hk[rows - 1]),
                           format_double(trace.mass[rows - 1])});
    }

    double max_mass_err = 0.0;
    for (double m : trace.mass) max_mass_err = std::max(max_mass_err, std::abs(m - 1.0));
    append_check(checks, fixture, "mass_conservation", max_mass_err <= 1e-9,
                 "max |mass-1| = " + format_double(max_mass_err));

    double min_sigma = trace.sigma.empty() ? 0.0 : trace.sigma[0];
    for (double s : trace.sigma) min_sigma = std::min(min_sigma, s);
    append_check(checks, fixture, "sigma_nonnegative", min_sigma >= -1e-9,
                 "min sigma_tot = " + format_double(min_sigma));

    if (fixture.check_lyapunov) {
        double max_increase = 0.0;
        for (std::size_t i = 1; i < trace.d_kl.size(); ++i)
            max_increase = std::max(max_increase, trace.d_kl[i] - trace.d_kl[i - 1]);
        append_check(checks, fixture, "lyapunov_decay", max_increase <= 1e-8,
                     "max per-step D_kl increase = " + format_double(max_increase));
    }

    if (fixture.check_eq5) {
        // central finite difference of D_kl against the flux integral
        double worst = 0.0;
        bool pass = true;
        for (std::size_t i = 1; i + 1 < trace.d_kl.size(); ++i) {
            const double fd = (trace.d_kl[i + 1] - trace.d_kl[i - 1]) / (2.0 * fixture.dt);
            const double err = std::abs(fd - trace.flux[i]);
            const double allowed = std::max(0.02 * std::abs(trace.flux[i]), 1e-6);
            worst = std::max(worst, err - allowed);
            if (err > allowed) pass = false;
        }
        append_check(checks, fixture, "eq5_consistency", pass,
                     "worst excess above tolerance = " + format_double(std::max(worst, 0.0)));
    }

    if (fixture.check_growth) {
        bool increased = false;
        for (std::size_t i = 1; i < trace.d_kl.size(); ++i)
            if (trace.d_kl[i] > trace.d_kl[i - 1] + 1e-12) increased = true;
        append_check(checks, fixture, "mismatch_growth", increased,
                     "final D_kl = " + format_double(trace.d_kl.back()));
    }
}

std::vector<double> sampled_reference(const fplab::FpGrid& grid, double mean, double sd) {
    std::vector<double> q(grid.n_cells);
    for (std::size_t i = 0; i < grid.n_cells; ++i)
        q[i] = gaussian_pdf(grid.cell_center(i), mean, sd);
    return q;
}

Fixture build_preset(const EntropyLabConfig& cfg, const std::string& preset,
                     const std::string& name) {
    Fixture fixture;
    fixture.name = name;
    fixture.t_end = cfg.t_end;

    if (preset == "custom") {
        if (cfg.drift_table.size() != cfg.n_cells || cfg.diffusion_table.size() != cfg.n_cells ||
            cfg.initial_table.size() != cfg.n_cells || cfg.reference_table.size() != cfg.n_cells)
            throw ConfigError("config.tables",
                              "custom preset requires drift/diffusion/initial/reference tables "
                              "of length n_cells");
        // tables are indexed by cell; recover the index from the sampled center
        const double dx = (cfg.x_max - cfg.x_min) / static_cast<double>(cfg.n_cells);
        auto cell_of = [dx, &cfg](double x) {
            const double raw = (x - cfg.x_min) / dx - 0.5;
            return static_cast<std::size_t>(
                std::clamp(std::lround(raw), 0L, static_cast<long>(cfg.n_cells - 1)));
        };
        fixture.grid = fplab::make_grid(
            cfg.x_min, cfg.x_max, cfg.n_cells,
            [&](double x) { return cfg.drift_table[cell_of(x)]; },
            [&](double x) { return cfg.diffusion_table[cell_of(x)]; },
            [&](double x) { return cfg.initial_table[cell_of(x)]; });
        fixture.reference = cfg.reference_table;
    } else {
        double drift_sign = -1.0;
        double drift_shift = 0.0;
        double init_mean = cfg.initial_mean;
        double init_sd = cfg.initial_std;
        if (preset == "ou_shifted") {
            drift_shift = cfg.shift;
            init_mean = 0.0;
            init_sd = 1.0;
        } else if (preset == "ou_reversed") {
            drift_sign = 1.0;
            init_mean = 0.0;
            init_sd = 1.0;
        } else if (preset != "ou") {
            throw ConfigError("config.preset", "unknown preset '" + preset + "'");
        }
        fixture.grid = fplab::make_grid(
            cfg.x_min, cfg.x_max, cfg.n_cells,
            [=](double x) { return drift_sign * x + drift_shift; }, [](double) { return 1.0; },
            [=](double x) { return gaussian_pdf(x, init_mean, init_sd); });
        fixture.reference = sampled_reference(fixture.grid, 0.0, 1.0);
    }

    fixture.dt = cfg.dt.value_or(fplab::stable_dt(fixture.grid));
    fixture.check_lyapunov = true;
    fixture.check_eq5 = true;
    return fixture;
}

}  // namespace

bool EntropyLabReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

EntropyLabConfig parse_entropy_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "expected an object");
    for (const auto& item : j.items()) {
        static const std::set<std::string> allowed = {
            "preset",       "x_min",         "x_max",        "n_cells",
            "t_end",        "dt",            "shift",        "initial_mean",
            "initial_std",  "drift_table",   "diffusion_table",
            "initial_table", "reference_table"};
        if (allowed.find(item.key()) == allowed.end())
            throw ConfigError("config." + item.key(), "unknown field");
    }

    EntropyLabConfig cfg;
    auto num = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_number()) throw ConfigError(std::string("config.") + key, "expected a number");
        return j.at(key).get<double>();
    };
    if (j.contains("preset")) {
        if (!j.at("preset").is_string()) throw ConfigError("config.preset", "expected a string");
        cfg.preset = j.at("preset").get<std::string>();
    }
    cfg.x_min = num("x_min", cfg.x_min);
    cfg.x_max = num("x_max", cfg.x_max);
    if (j.contains("n_cells")) {
        const json& v = j.at("n_cells");
        if (!v.is_number_integer() || v.get<long long>() <= 0)
            throw ConfigError("config.n_cells", "expected a positive integer");
        cfg.n_cells = v.get<std::size_t>();
    }
    cfg.t_end = num("t_end", cfg.t_end);
    if (!(cfg.t_end > 0.0)) throw ConfigError("config.t_end", "must be positive");
    if (j.contains("dt")) cfg.dt = num("dt", 0.0);
    cfg.shift = num("shift", cfg.shift);
    cfg.initial_mean = num("initial_mean", cfg.initial_mean);
    cfg.initial_std = num("initial_std", cfg.initial_std);
    if (!(cfg.initial_std > 0.0)) throw ConfigError("config.initial_std", "must be positive");

    auto load_table = [&](const char* key, std::vector<double>& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_array()) throw ConfigError(std::string("config.") + key, "expected an array");
        out.clear();
        for (const json& e : v) {
            if (!e.is_number())
                throw ConfigError(std::string("config.") + key, "expected numeric entries");
            out.push_back(e.get<double>());
        }
    };
    load_table("drift_table", cfg.drift_table);
    load_table("diffusion_table", cfg.diffusion_table);
    load_table("initial_table", cfg.initial_table);
    load_table("reference_table", cfg.reference_table);
    return cfg;
}

EntropyLabConfig load_entropy_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_entropy_config(j);
}

EntropyLabReport verify_entropy(const EntropyLabConfig& config,
                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    EntropyLabReport report;

    Fixture main_fixture = build_preset(config, config.preset, "relaxation");
    if (config.preset == "ou_shifted" || config.preset == "ou_reversed")
        main_fixture.name = "nonequilibrium";
    run_fixture(std::move(main_fixture), out_dir, report.checks);

    // The relaxation preset carries a driven companion so a single run
    // exercises both the decaying and the growing regime.
    if (config.preset == "ou") {
        EntropyLabConfig companion_cfg = config;
        companion_cfg.t_end = std::min(config.t_end, 3.0);
        Fixture companion = build_preset(companion_cfg, "ou_shifted", "nonequilibrium");
        companion.check_lyapunov = false;
        companion.check_eq5 = false;
        companion.check_growth = true;
        companion.t_end = companion_cfg.t_end;
        run_fixture(std::move(companion), out_dir, report.checks);
    }

    return report;
}

}  // namespace driftwatch
