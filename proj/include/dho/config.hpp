// config.hpp: run configuration for the dho command-line tool
//
// Flat key = value text with [sections]; '#' starts a comment.
//
//   [model]     omega0, lambda, cutoff, temperature, counter_term
//   [time]      t_max, n_points
//   [sweep]     T_min, T_max, T_points, T_scale (log|linear), and the same for lambda_*
//   [variants]  list = exact, redfield_LS, gkls_LS, ...; allow_unstable
//   [initial]   state = thermal|vacuum|custom; x, p, xx, pp, xp (custom only)
//   [numerics]  tol, bath_tol, threads
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "dho/bath.hpp"
#include "dho/gaussian.hpp"

namespace dho {

enum class Method { exact, redfield, gkls };

struct VariantSpec {
    Method method{Method::exact};
    bool lamb_shift{true};
    bool shifted{false};

    // "exact", "redfield_LS", "gkls_shifted_noLS", ...
    std::string label() const;
    // Master-equation parameters of this variant on top of the physical model.
    ModelParams apply(const ModelParams& base) const;
    // Inverse of label(); the LS suffix is optional and defaults to LS.
    static VariantSpec parse(const std::string& text);
};

// exact, redfield_LS, gkls_LS, redfield_shifted_noLS, gkls_shifted_noLS
std::vector<VariantSpec> default_variants();

struct AxisSpec {
    double min{1.0};
    double max{1.0};
    std::size_t points{1};
    bool log{true};
    std::vector<double> values() const;
};

struct InitialSpec {
    enum class Kind { thermal, vacuum, custom };
    Kind kind{Kind::thermal};
    double x{0.0}, p{0.0};
    double xx{0.5}, pp{0.5}, xp{0.0};
    // thermal/vacuum refer to the physical system Hamiltonian of the model.
    GaussianState build(const ModelParams& model) const;
};

struct RunConfig {
    ModelParams model;
    std::vector<VariantSpec> variants{default_variants()};
    double t_max{200.0};
    std::size_t n_points{401};
    AxisSpec temperature{0.1, 10.0, 25, true};
    AxisSpec coupling{1e-4, 0.2, 25, true};
    InitialSpec initial;
    double tol{1e-9};
    double bath_tol{kDefaultBathTol};
    bool allow_unstable{false};
    std::size_t threads{0};  // 0: hardware concurrency

    // Throws ConfigError naming the offending key.
    void validate() const;
};

// Throws ConfigError with the line number and key on any malformed or unknown entry.
RunConfig parse_config(std::istream& is, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

bool parse_bool(const std::string& text, int line = 0, const std::string& key = {});
double parse_number(const std::string& text, int line = 0, const std::string& key = {});

} // namespace dho
