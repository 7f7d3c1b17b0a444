// bath.cpp: spectral density, thermal factors, principal-value transforms and bath coefficients

#include "dho/bath.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "dho/errors.hpp"
#include "dho/quadrature.hpp"

namespace dho {

namespace {

// Above this value of w/2T, coth is 1 to better than 1e-34.
constexpr double kCothSaturation = 40.0;

double lorentz_factor(double omega, const ModelParams& p) {
    const double r = omega / p.cutoff;
    return p.coupling / (1.0 + r * r);
}

} // namespace

void ModelParams::validate() const {
    const bool finite = std::isfinite(omega0) && std::isfinite(coupling) && std::isfinite(cutoff) &&
                        std::isfinite(temperature);
    if (!finite) throw DomainError("model parameters must be finite");
    if (omega0 <= 0.0) throw DomainError("omega0 must be > 0");
    if (cutoff <= 0.0) throw DomainError("cutoff must be > 0");
    if (coupling < 0.0) throw DomainError("coupling must be >= 0");
    if (temperature < 0.0) throw DomainError("temperature must be >= 0");
}

double reorganisation(const ModelParams& p) { return p.coupling * p.cutoff; }

double reorganisation_quadrature(const ModelParams& p, double tol) {
    if (p.coupling == 0.0) return 0.0;
    // J(w)/w is even, so integrate twice the half line.
    auto f = [&](double w) { return lorentz_factor(w, p); };
    const double upper = 50.0 * p.cutoff;
    const quad::Options opts{0.25 * std::numbers::pi * tol, 0.0, 4000};
    const std::array<double, 3> pts{0.0, p.cutoff, upper};
    const auto body = quad::integrate(f, pts, opts);
    const auto tail = quad::integrate_upper_tail(f, upper, upper, opts);
    if (!body.converged || !tail.converged)
        throw QuadratureError("reorganisation integral did not converge", body.error + tail.error);
    return 2.0 * (body.value[0] + tail.value[0]) / std::numbers::pi;
}

double physical_omega_sq(const ModelParams& p) {
    return p.omega0 * p.omega0 + (p.counter_term ? reorganisation(p) : 0.0);
}

double bohr_omega_sq(const ModelParams& p) { return physical_omega_sq(p) - (p.shifted ? reorganisation(p) : 0.0); }

double spectral_density(double omega, const ModelParams& p) { return lorentz_factor(omega, p) * omega; }

double bose_occupation(double omega, double temperature) {
    if (omega == 0.0) throw DomainError("bose_occupation: pole at omega = 0");
    if (temperature == 0.0) return omega > 0.0 ? 0.0 : -1.0;
    return 1.0 / std::expm1(omega / temperature);
}

double thermal_coth(double omega, double temperature) {
    if (omega == 0.0) throw DomainError("thermal_coth: pole at omega = 0");
    const double sign = omega > 0.0 ? 1.0 : -1.0;
    if (temperature == 0.0) return sign;
    const double x = omega / (2.0 * temperature);
    if (std::abs(x) > kCothSaturation) return sign;
    return 1.0 / std::tanh(x);
}

double emission_weight(double omega, const ModelParams& p) {
    const double T = p.temperature;
    if (T == 0.0) return omega > 0.0 ? spectral_density(omega, p) : 0.0;
    // J(w)(n+1) = [J(w)/w] * T * x / (1 - e^{-x}),  x = w/T
    const double x = omega / T;
    const double w = x == 0.0 ? 1.0 : x / -std::expm1(-x);
    return lorentz_factor(omega, p) * T * w;
}

double symmetrised_weight(double omega, const ModelParams& p) {
    const double T = p.temperature;
    if (T == 0.0) return lorentz_factor(omega, p) * std::abs(omega);
    const double x = omega / (2.0 * T);
    double x_coth;
    if (x == 0.0)
        x_coth = 1.0;
    else if (std::abs(x) > kCothSaturation)
        x_coth = std::abs(x);
    else
        x_coth = x / std::tanh(x);
    return lorentz_factor(omega, p) * 2.0 * T * x_coth;
}

double decay_rate(double omega, const ModelParams& p) {
    if (omega == 0.0) throw DomainError("decay_rate: omega = 0 is excluded");
    const double T = p.temperature;
    if (T == 0.0) return omega > 0.0 ? 2.0 * spectral_density(omega, p) : 0.0;
    // 1 + n(w) = -1/expm1(-w/T), accurate for both signs.
    return -2.0 * spectral_density(omega, p) / std::expm1(-omega / T);
}

PvResult hilbert_pv(const std::function<double(double)>& f, double omega0, const PvOptions& opts) {
    if (!(opts.window > 0.0)) throw DomainError("hilbert_pv: window must be > 0");
    const double a = opts.window;
    const double reach = 50.0 * std::max(opts.scale, std::abs(omega0) + a);

    // Four independent pieces share the budget; results are divided by pi at the end.
    const quad::Options qopts{0.25 * std::numbers::pi * opts.tol, 0.0, 20000};

    const double f0 = f(omega0);
    auto subtracted = [&](double nu) { return nu == omega0 ? 0.0 : (f(nu) - f0) / (nu - omega0); };
    auto plain = [&](double nu) { return f(nu) / (nu - omega0); };
    auto mirrored = [&](double u) { return f(-u) / (-u - omega0); };

    auto with_breaks = [&](double lo, double hi) {
        std::vector<double> pts{lo, hi};
        for (double b : {0.0, -opts.scale, opts.scale})
            if (b > lo && b < hi) pts.push_back(b);
        std::sort(pts.begin(), pts.end());
        return pts;
    };

    const std::array<double, 3> window_pts{omega0 - a, omega0, omega0 + a};
    const auto inner = quad::integrate(subtracted, window_pts, qopts);
    const auto upper_pts = with_breaks(omega0 + a, reach);
    const auto lower_pts = with_breaks(-reach, omega0 - a);
    auto outer = quad::integrate(plain, upper_pts, qopts);
    const auto outer_low = quad::integrate(plain, lower_pts, qopts);
    const auto tail_hi = quad::integrate_upper_tail(plain, reach, reach, qopts);
    const auto tail_lo = quad::integrate_upper_tail(mirrored, reach, reach, qopts);

    const double total = inner.value[0] + outer.value[0] + outer_low.value[0] + tail_hi.value[0] + tail_lo.value[0];
    const double err = (inner.error + outer.error + outer_low.error + tail_hi.error + tail_lo.error) / std::numbers::pi;
    if (!std::isfinite(total) || err > opts.tol)
        throw QuadratureError("hilbert_pv: adaptive refinement exceeded its budget", err);
    return {total / std::numbers::pi, err};
}

double lamb_shift(double omega, const ModelParams& p, double tol) {
    if (p.coupling == 0.0) return 0.0;
    const double half_width = omega == 0.0 ? 0.5 * p.cutoff : 0.5 * std::min(std::abs(omega), p.cutoff);
    const PvOptions opts{half_width, std::max({p.cutoff, std::abs(omega), p.temperature}), tol};
    return -hilbert_pv([&](double nu) { return emission_weight(nu, p); }, omega, opts).value;
}

double sigma_prime_closed_form(double omega, const ModelParams& p) {
    const double r = omega / p.cutoff;
    return p.coupling * p.cutoff / (1.0 + r * r);
}

BathCoefficients coefficients(const ModelParams& p, double tol) {
    p.validate();
    const double w2 = bohr_omega_sq(p);
    if (!(w2 > 0.0)) throw UnconfinedError("coefficients: Bohr frequency squared must be > 0");
    BathCoefficients c;
    c.bohr = std::sqrt(w2);
    c.reorg = reorganisation(p);
    if (p.coupling == 0.0) return c;

    c.gamma_plus = decay_rate(c.bohr, p);
    c.gamma_minus = decay_rate(-c.bohr, p);
    c.s_plus = lamb_shift(c.bohr, p, tol);
    c.s_minus = lamb_shift(-c.bohr, p, tol);
    c.delta = c.gamma_minus - c.gamma_plus;
    c.sigma = -c.gamma_minus - c.gamma_plus;
    c.sigma_prime = -c.s_minus - c.s_plus;
    c.delta_prime = c.s_minus - c.s_plus;
    return c;
}

BathCoefficients without_lamb_shift(BathCoefficients c) {
    c.s_plus = 0.0;
    c.s_minus = 0.0;
    c.sigma_prime = 0.0;
    c.delta_prime = 0.0;
    return c;
}

} // namespace dho
