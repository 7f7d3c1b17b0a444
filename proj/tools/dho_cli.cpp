// dho_cli.cpp: command-line front end (coefficients, dynamics, steady, fidelity-map)

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dho/commands.hpp"
#include "dho/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
    std::string config;
    std::string out;
    std::optional<double> tol, t_max, omega0, lambda, cutoff, temperature;
    std::optional<std::size_t> n_points, threads;
    std::optional<bool> counter_term, lamb_shift, secular, shifted, allow_unstable;
    std::optional<std::string> method;
    std::optional<std::string> variants;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output CSV path (default: stdout)");
    cmd->add_option("--tol", o.tol, "relative tolerance of integrators and quadratures");
    cmd->add_option("--omega0", o.omega0, "bare trap frequency");
    cmd->add_option("--lambda", o.lambda, "coupling strength");
    cmd->add_option("--cutoff", o.cutoff, "bath cutoff frequency");
    cmd->add_option("--temperature,-T", o.temperature, "bath temperature");
    cmd->add_flag("--counter-term,!--no-counter-term", o.counter_term, "add the counter term to the physical Hamiltonian");
    cmd->add_flag("--lamb-shift,!--no-lamb-shift", o.lamb_shift, "keep Lamb-shift terms in the master equation");
    cmd->add_flag("--secular,!--no-secular", o.secular, "secular (GKLS) master equation");
    cmd->add_flag("--shifted,!--no-shifted", o.shifted, "derive the master equation from the shifted Hamiltonian");
    cmd->add_option("--method", o.method, "single variant: exact, redfield or gkls")
        ->check(CLI::IsMember({"exact", "redfield", "gkls"}));
    cmd->add_option("--variants", o.variants, "comma-separated variant list, e.g. exact,redfield_shifted_noLS");
    cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
}

dho::RunConfig build_config(const Overrides& o) {
    dho::RunConfig cfg;
    if (!o.config.empty()) cfg = dho::load_config(o.config);
    auto& m = cfg.model;
    if (o.omega0) m.omega0 = *o.omega0;
    if (o.lambda) m.coupling = *o.lambda;
    if (o.cutoff) m.cutoff = *o.cutoff;
    if (o.temperature) m.temperature = *o.temperature;
    if (o.counter_term) m.counter_term = *o.counter_term;
    if (o.tol) cfg.tol = *o.tol;
    if (o.t_max) cfg.t_max = *o.t_max;
    if (o.n_points) cfg.n_points = *o.n_points;
    if (o.threads) cfg.threads = *o.threads;
    if (o.allow_unstable) cfg.allow_unstable = *o.allow_unstable;

    // The master-equation flags also select the frequency the coefficients are evaluated at.
    if (o.lamb_shift) m.lamb_shift = *o.lamb_shift;
    if (o.secular) m.secular = *o.secular;
    if (o.shifted) m.shifted = *o.shifted;

    if (o.variants) {
        cfg.variants.clear();
        std::stringstream ss(*o.variants);
        for (std::string tok; std::getline(ss, tok, ',');)
            if (!tok.empty()) cfg.variants.push_back(dho::VariantSpec::parse(tok));
    }
    if (o.method || o.secular || o.lamb_shift || o.shifted) {
        dho::VariantSpec v;
        const std::string method = o.method.value_or(m.secular ? "gkls" : "redfield");
        v.method = method == "exact" ? dho::Method::exact : method == "gkls" ? dho::Method::gkls : dho::Method::redfield;
        if (o.secular && *o.secular && v.method == dho::Method::redfield) v.method = dho::Method::gkls;
        v.lamb_shift = m.lamb_shift;
        v.shifted = m.shifted;
        cfg.variants = {v};
    }
    cfg.validate();
    return cfg;
}

void emit(const dho::CsvTable& table, const std::string& out) {
    if (out.empty()) dho::write_csv(std::cout, table);
    else dho::write_csv(out, table);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped harmonic oscillator: master equations versus exact dynamics"};
    app.require_subcommand(1);

    Overrides o;
    auto* coeffs = app.add_subcommand("coefficients", "master-equation coefficients at the Bohr frequency");
    auto* dynamics = app.add_subcommand("dynamics", "covariance dynamics of each variant on a time grid");
    auto* steady = app.add_subcommand("steady", "steady states and their fidelity with the exact one");
    auto* map = app.add_subcommand("fidelity-map", "steady-state fidelity over a (T, lambda) grid");
    for (auto* cmd : {coeffs, dynamics, steady, map}) add_common(cmd, o);
    for (auto* cmd : {dynamics}) {
        cmd->add_option("--t-max", o.t_max, "final time");
        cmd->add_option("--n-points", o.n_points, "number of output times (including t = 0)");
        cmd->add_flag("--allow-unstable", o.allow_unstable, "integrate master-equation variants even if unstable");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const auto cfg = build_config(o);
        if (coeffs->parsed()) {
            const auto table = dho::cmd_coefficients(cfg);
            if (table.rows.front().back() == 0.0)
                std::cerr << "stability: unstable (omega^2 <= lambda * cutoff in the physical Hamiltonian)\n";
            emit(table, o.out);
        } else if (dynamics->parsed()) {
            emit(dho::cmd_dynamics(cfg), o.out);
        } else if (steady->parsed()) {
            emit(dho::cmd_steady(cfg), o.out);
        } else {
            emit(dho::cmd_fidelity_map(cfg), o.out);
        }
    } catch (const dho::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const dho::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
