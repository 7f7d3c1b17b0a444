// commands.cpp: CLI subcommand implementations writing CSV tables

#include "dho/commands.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>

#include "dho/errors.hpp"
#include "dho/exact.hpp"
#include "dho/master_equation.hpp"

namespace dho {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool model_stable(const ModelParams& p) {
    return p.coupling == 0.0 || physical_omega_sq(p) > reorganisation(p);
}

double fidelity_or_nan(const GaussianState& a, const GaussianState& b) {
    try {
        return fidelity(a, b);
    } catch (const Error&) {
        return kNaN;
    }
}

double steady_fidelity_or_nan(const GaussianState& exact, const ModelParams& p, double bath_tol) {
    try {
        return fidelity(exact, steady_state(p, bath_tol));
    } catch (const Error&) {
        return kNaN;
    }
}

Trajectory run_variant(const RunConfig& cfg, const VariantSpec& v, const GaussianState& initial,
                       const std::vector<double>& grid) {
    if (v.method == Method::exact) return transient_covariance(cfg.model, initial, grid, cfg.tol);
    const ModelParams p = v.apply(cfg.model);
    const auto coeffs = coefficients(p, cfg.bath_tol);
    // The uncoupled generator is only marginally stable but its flow is bounded.
    if (!cfg.allow_unstable && p.coupling > 0.0 && !variant_generator(p, coeffs).is_hurwitz())
        throw UnstableError(v.label() + ": generator has an eigenvalue with Re >= 0 (use --allow-unstable)");
    return evolve(p, coeffs, initial, grid, {cfg.tol, cfg.tol * 1e-3});
}

} // namespace

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

CsvTable cmd_coefficients(const RunConfig& cfg) {
    cfg.validate();
    const auto& p = cfg.model;
    const auto c = coefficients(p, cfg.bath_tol);
    const double s_zero = p.coupling == 0.0 ? 0.0 : lamb_shift(0.0, p, cfg.bath_tol);

    CsvTable t;
    t.header = {"omega_bohr", "gamma_plus", "gamma_minus", "S_plus", "S_minus", "Delta", "Sigma",
                "Sigma_prime", "Delta_prime", "reorganisation", "S_zero", "stable"};
    t.add_row({c.bohr, c.gamma_plus, c.gamma_minus, c.s_plus, c.s_minus, c.delta, c.sigma, c.sigma_prime,
               c.delta_prime, c.reorg, s_zero, model_stable(p) ? 1.0 : 0.0});
    return t;
}

CsvTable cmd_dynamics(const RunConfig& cfg) {
    cfg.validate();
    const auto grid = linear_grid(cfg.t_max, cfg.n_points);
    const auto initial = cfg.initial.build(cfg.model);

    std::vector<Trajectory> runs(cfg.variants.size());
    parallel_for(runs.size(), cfg.threads, [&](std::size_t i) { runs[i] = run_variant(cfg, cfg.variants[i], initial, grid); });

    CsvTable t;
    t.header.push_back("t");
    for (const auto& v : cfg.variants)
        for (const char* q : {"_xx", "_pp", "_xp"}) t.header.push_back(v.label() + q);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> row{grid[k]};
        for (const auto& run : runs) {
            const auto g = run.gaussian(k);
            row.insert(row.end(), {g.xx(), g.pp(), g.xp()});
        }
        t.add_row(std::move(row));
    }
    return t;
}

CsvTable cmd_steady(const RunConfig& cfg) {
    cfg.validate();
    const auto exact = steady_covariance(cfg.model, cfg.tol);

    CsvTable t;
    t.label_header = "variant";
    t.header = {"xx", "pp", "xp", "fidelity", "stable"};
    std::vector<std::vector<double>> rows(cfg.variants.size());
    parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
        const auto& v = cfg.variants[i];
        if (v.method == Method::exact) {
            rows[i] = {exact.xx(), exact.pp(), exact.xp(), 1.0, 1.0};
            return;
        }
        try {
            const auto s = steady_state(v.apply(cfg.model), cfg.bath_tol);
            rows[i] = {s.xx(), s.pp(), s.xp(), fidelity_or_nan(exact, s), 1.0};
        } catch (const UnstableError&) {
            rows[i] = {kNaN, kNaN, kNaN, kNaN, 0.0};
        } catch (const UnconfinedError&) {
            rows[i] = {kNaN, kNaN, kNaN, kNaN, 0.0};
        }
    });
    for (std::size_t i = 0; i < rows.size(); ++i) t.add_row(cfg.variants[i].label(), std::move(rows[i]));
    return t;
}

CsvTable cmd_fidelity_map(const RunConfig& cfg) {
    cfg.validate();
    const auto temps = cfg.temperature.values();
    const auto lambdas = cfg.coupling.values();
    const VariantSpec redfield{Method::redfield, true, false};
    const VariantSpec gkls{Method::gkls, true, false};
    const VariantSpec recipe{Method::redfield, false, true};

    std::vector<std::vector<double>> rows(temps.size() * lambdas.size());
    parallel_for(rows.size(), cfg.threads, [&](std::size_t k) {
        ModelParams p = cfg.model;
        p.temperature = temps[k / lambdas.size()];
        p.coupling = lambdas[k % lambdas.size()];
        auto& row = rows[k];
        row = {p.temperature, p.coupling, kNaN, kNaN, kNaN, 0.0};
        if (!model_stable(p)) return;
        row[5] = 1.0;
        GaussianState exact;
        try {
            exact = steady_covariance(p, cfg.tol);
        } catch (const Error&) {
            return;
        }
        row[2] = steady_fidelity_or_nan(exact, redfield.apply(p), cfg.bath_tol);
        row[3] = steady_fidelity_or_nan(exact, gkls.apply(p), cfg.bath_tol);
        row[4] = steady_fidelity_or_nan(exact, recipe.apply(p), cfg.bath_tol);
    });

    CsvTable t;
    t.header = {"T", "lambda", "fidelity_redfield_LS", "fidelity_gkls", "fidelity_shifted_noLS", "stable"};
    for (auto& r : rows) t.add_row(std::move(r));
    return t;
}

} // namespace dho
