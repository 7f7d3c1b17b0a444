// config.cpp: INI-style run configuration parsing and validation

#include "dho/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dho/errors.hpp"

namespace dho {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::size_t parse_count(const std::string& text, int line, const std::string& key) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ConfigError("expected a non-negative integer, got '" + text + "'", line, key);
    return v;
}

bool parse_scale(const std::string& text, int line, const std::string& key) {
    const auto t = lower(text);
    if (t == "log") return true;
    if (t == "linear" || t == "lin") return false;
    throw ConfigError("expected 'log' or 'linear', got '" + text + "'", line, key);
}

void check_axis(const AxisSpec& a, const std::string& name) {
    // A linear axis may start at 0 (e.g. the uncoupled column); a log axis may not.
    if (!(a.log ? a.min > 0.0 : a.min >= 0.0) || !std::isfinite(a.max))
        throw ConfigError(a.log ? "log range must be positive and finite" : "range must be non-negative and finite", 0,
                          name);
    if (a.points == 0) throw ConfigError("need at least one grid point", 0, name + "_points");
    if (a.points > 1 && !(a.max > a.min)) throw ConfigError("range must be ordered (min < max)", 0, name);
    if (a.points == 1 && a.max != a.min) throw ConfigError("a single point needs min == max", 0, name);
}

} // namespace

std::string VariantSpec::label() const {
    if (method == Method::exact) return "exact";
    std::string s = method == Method::gkls ? "gkls" : "redfield";
    if (shifted) s += "_shifted";
    s += lamb_shift ? "_LS" : "_noLS";
    return s;
}

ModelParams VariantSpec::apply(const ModelParams& base) const {
    ModelParams p = base;
    p.secular = method == Method::gkls;
    p.lamb_shift = lamb_shift;
    p.shifted = shifted;
    return p;
}

VariantSpec VariantSpec::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(trim(text));
    for (std::string tok; std::getline(ss, tok, '_');) parts.push_back(tok);
    if (parts.empty()) throw ConfigError("empty variant name");

    VariantSpec v;
    const auto head = lower(parts[0]);
    if (head == "exact") {
        if (parts.size() != 1) throw ConfigError("the exact variant takes no modifiers: '" + text + "'");
        return v;
    }
    if (head == "redfield") v.method = Method::redfield;
    else if (head == "gkls" || head == "secular") v.method = Method::gkls;
    else throw ConfigError("unknown method in variant '" + text + "' (exact, redfield, gkls)");

    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto& m = parts[i];
        if (lower(m) == "shifted") v.shifted = true;
        else if (m == "LS" || lower(m) == "ls") v.lamb_shift = true;
        else if (lower(m) == "nols") v.lamb_shift = false;
        else throw ConfigError("unknown modifier '" + m + "' in variant '" + text + "'");
    }
    return v;
}

std::vector<VariantSpec> default_variants() {
    return {
        {Method::exact, true, false},
        {Method::redfield, true, false},
        {Method::gkls, true, false},
        {Method::redfield, false, true},
        {Method::gkls, false, true},
    };
}

std::vector<double> AxisSpec::values() const {
    std::vector<double> v(points);
    if (points == 1) {
        v[0] = min;
        return v;
    }
    for (std::size_t i = 0; i < points; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(points - 1);
        v[i] = log ? min * std::pow(max / min, u) : min + (max - min) * u;
    }
    v.back() = max;
    return v;
}

GaussianState InitialSpec::build(const ModelParams& model) const {
    switch (kind) {
    case Kind::thermal: return thermal_state(physical_omega_sq(model), model.temperature);
    case Kind::vacuum: return thermal_state(physical_omega_sq(model), 0.0);
    case Kind::custom: break;
    }
    auto s = GaussianState::from_covariance(xx, pp, xp, Eigen::Vector2d(x, p));
    if (!is_physical(s).physical) throw ConfigError("initial covariance violates the uncertainty relation", 0, "xx");
    return s;
}

void RunConfig::validate() const {
    try {
        model.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), 0, "model");
    }
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("must be positive", 0, "t_max");
    if (n_points < 2) throw ConfigError("need at least 2 points", 0, "n_points");
    if (variants.empty()) throw ConfigError("no variants selected", 0, "list");
    if (!(tol > 0.0) || tol >= 1.0) throw ConfigError("must lie in (0, 1)", 0, "tol");
    if (!(bath_tol > 0.0)) throw ConfigError("must be positive", 0, "bath_tol");
    check_axis(temperature, "T");
    check_axis(coupling, "lambda");
}

bool parse_bool(const std::string& text, int line, const std::string& key) {
    const auto t = lower(trim(text));
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError("expected a boolean, got '" + text + "'", line, key);
}

double parse_number(const std::string& text, int line, const std::string& key) {
    const auto t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
        throw ConfigError("expected a finite number, got '" + text + "'", line, key);
    return v;
}

RunConfig parse_config(std::istream& is, RunConfig cfg) {
    std::string section;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const auto text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;

        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError("malformed section header", line);
            section = lower(trim(text.substr(1, text.size() - 2)));
            static const std::vector<std::string> known{"model", "time", "sweep", "variants", "initial", "numerics"};
            if (std::find(known.begin(), known.end(), section) == known.end())
                throw ConfigError("unknown section [" + section + "]", line);
            continue;
        }

        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line);
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key", line);
        if (section.empty()) throw ConfigError("entry outside any section", line, key);
        if (value.empty()) throw ConfigError("missing value", line, key);

        auto num = [&] { return parse_number(value, line, key); };
        auto unknown = [&] { return ConfigError("unknown key in [" + section + "]", line, key); };

        if (section == "model") {
            if (key == "omega0") cfg.model.omega0 = num();
            else if (key == "lambda" || key == "coupling") cfg.model.coupling = num();
            else if (key == "cutoff") cfg.model.cutoff = num();
            else if (key == "temperature" || key == "T") cfg.model.temperature = num();
            else if (key == "counter_term") cfg.model.counter_term = parse_bool(value, line, key);
            else throw unknown();
        } else if (section == "time") {
            if (key == "t_max") cfg.t_max = num();
            else if (key == "n_points") cfg.n_points = parse_count(value, line, key);
            else throw unknown();
        } else if (section == "sweep") {
            const auto us = key.find('_');
            const auto axis_name = key.substr(0, us);
            AxisSpec* axis = axis_name == "T" || axis_name == "temperature" ? &cfg.temperature
                             : axis_name == "lambda"                         ? &cfg.coupling
                                                                             : nullptr;
            const auto field = us == std::string::npos ? std::string{} : key.substr(us + 1);
            if (!axis) throw unknown();
            if (field == "min") axis->min = num();
            else if (field == "max") axis->max = num();
            else if (field == "points") axis->points = parse_count(value, line, key);
            else if (field == "scale") axis->log = parse_scale(value, line, key);
            else throw unknown();
        } else if (section == "variants") {
            if (key == "list") {
                cfg.variants.clear();
                std::stringstream ss(value);
                for (std::string tok; std::getline(ss, tok, ',');) {
                    if (trim(tok).empty()) continue;
                    try {
                        cfg.variants.push_back(VariantSpec::parse(tok));
                    } catch (const ConfigError& e) {
                        throw ConfigError(e.what(), line, key);
                    }
                }
            } else if (key == "allow_unstable") {
                cfg.allow_unstable = parse_bool(value, line, key);
            } else {
                throw unknown();
            }
        } else if (section == "initial") {
            auto& init = cfg.initial;
            if (key == "state") {
                const auto v = lower(value);
                if (v == "thermal") init.kind = InitialSpec::Kind::thermal;
                else if (v == "vacuum") init.kind = InitialSpec::Kind::vacuum;
                else if (v == "custom") init.kind = InitialSpec::Kind::custom;
                else throw ConfigError("expected thermal, vacuum or custom", line, key);
            } else if (key == "x") init.x = num();
            else if (key == "p") init.p = num();
            else if (key == "xx") init.xx = num();
            else if (key == "pp") init.pp = num();
            else if (key == "xp") init.xp = num();
            else throw unknown();
        } else if (section == "numerics") {
            if (key == "tol") cfg.tol = num();
            else if (key == "bath_tol") cfg.bath_tol = num();
            else if (key == "threads") cfg.threads = parse_count(value, line, key);
            else throw unknown();
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(is, std::move(base));
}

} // namespace dho
