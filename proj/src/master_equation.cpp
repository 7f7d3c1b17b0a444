// master_equation.cpp: Redfield and GKLS moment equations, evolution and steady states

#include "dho/master_equation.hpp"

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "dho/errors.hpp"

namespace dho {

namespace odeint = boost::numeric::odeint;

MomentState MomentState::from_gaussian(const GaussianState& g) {
    MomentState s;
    s.first = g.mean;
    const double x = g.mean(0);
    const double p = g.mean(1);
    s.second << g.xx() + x * x, g.pp() + p * p, 2.0 * (g.xp() + x * p);
    return s;
}

GaussianState MomentState::to_gaussian() const {
    const double x = first(0);
    const double p = first(1);
    return GaussianState::from_covariance(second(0) - x * x, second(1) - p * p, 0.5 * second(2) - x * p, first);
}

std::vector<double> linear_grid(double t_max, std::size_t n) {
    if (!(t_max > 0.0)) throw DomainError("time grid: t_max must be > 0");
    if (n < 2) throw DomainError("time grid: need at least 2 points");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    t.back() = t_max;
    return t;
}

MomentState redfield_rhs(const MomentState& s, const BathCoefficients& c, double omega_sq) {
    const double w = std::sqrt(omega_sq);
    const double k = omega_sq - c.sigma_prime;
    const double x = s.first(0), p = s.first(1);
    const double xx = s.second(0), pp = s.second(1), xp = s.second(2);

    MomentState d;
    d.first << p, -k * x + c.delta / (2.0 * w) * p;
    d.second << xp,
        c.delta / w * pp - k * xp - 0.5 * c.sigma,
        -2.0 * k * xx + 2.0 * pp + c.delta / (2.0 * w) * xp - c.delta_prime / w;
    return d;
}

MomentState gkls_rhs(const MomentState& s, const BathCoefficients& c, double omega_sq) {
    const double w = std::sqrt(omega_sq);
    const double k = omega_sq - 0.5 * c.sigma_prime;
    const double damp = c.delta / (4.0 * w);
    const double x = s.first(0), p = s.first(1);
    const double xx = s.second(0), pp = s.second(1), xp = s.second(2);

    MomentState d;
    d.first << damp * x + k / omega_sq * p, -k * x + damp * p;
    d.second << 2.0 * damp * xx + k / omega_sq * xp - c.sigma / (4.0 * omega_sq),
        2.0 * damp * pp - k * xp - 0.25 * c.sigma,
        -2.0 * k * xx + 2.0 * k / omega_sq * pp + 2.0 * damp * xp;
    return d;
}

MomentState MomentGenerator::apply(const MomentState& s) const {
    MomentState d;
    d.first = first_block * s.first;
    d.second = second_block * s.second + source;
    return d;
}

double MomentGenerator::spectral_abscissa() const {
    const double a = Eigen::EigenSolver<Eigen::Matrix2d>(first_block, false).eigenvalues().real().maxCoeff();
    const double b = Eigen::EigenSolver<Eigen::Matrix3d>(second_block, false).eigenvalues().real().maxCoeff();
    return std::max(a, b);
}

MomentGenerator redfield_generator(const BathCoefficients& c, double omega_sq) {
    const double w = std::sqrt(omega_sq);
    const double k = omega_sq - c.sigma_prime;
    MomentGenerator g;
    g.first_block << 0.0, 1.0,
                     -k, c.delta / (2.0 * w);
    g.second_block << 0.0, 0.0, 1.0,
                      0.0, c.delta / w, -k,
                      -2.0 * k, 2.0, c.delta / (2.0 * w);
    g.source << 0.0, -0.5 * c.sigma, -c.delta_prime / w;
    return g;
}

MomentGenerator gkls_generator(const BathCoefficients& c, double omega_sq) {
    const double w = std::sqrt(omega_sq);
    const double k = omega_sq - 0.5 * c.sigma_prime;
    const double damp = c.delta / (4.0 * w);
    MomentGenerator g;
    g.first_block << damp, k / omega_sq,
                     -k, damp;
    g.second_block << 2.0 * damp, 0.0, k / omega_sq,
                      0.0, 2.0 * damp, -k,
                      -2.0 * k, 2.0 * k / omega_sq, 2.0 * damp;
    g.source << -c.sigma / (4.0 * omega_sq), -0.25 * c.sigma, 0.0;
    return g;
}

namespace {

BathCoefficients effective(const ModelParams& p, const BathCoefficients& c) {
    return p.lamb_shift ? c : without_lamb_shift(c);
}

double checked_bohr_sq(const ModelParams& p) {
    const double w2 = bohr_omega_sq(p);
    if (!(w2 > 0.0)) throw UnconfinedError("master equation: Bohr frequency squared must be > 0");
    return w2;
}

using Vec5 = std::array<double, 5>;

Vec5 pack(const MomentState& s) { return {s.first(0), s.first(1), s.second(0), s.second(1), s.second(2)}; }

MomentState unpack(const Vec5& v) {
    MomentState s;
    s.first << v[0], v[1];
    s.second << v[2], v[3], v[4];
    return s;
}

void check_grid(std::span<const double> t_grid) {
    if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("time grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
}

} // namespace

std::string variant_label(const ModelParams& p) {
    std::string s = p.secular ? "gkls" : "redfield";
    if (p.shifted) s += "_shifted";
    s += p.lamb_shift ? "_LS" : "_noLS";
    return s;
}

MomentGenerator variant_generator(const ModelParams& p, const BathCoefficients& coeffs) {
    const double w2 = checked_bohr_sq(p);
    const auto c = effective(p, coeffs);
    return p.secular ? gkls_generator(c, w2) : redfield_generator(c, w2);
}

Trajectory evolve(const ModelParams& p, const GaussianState& initial, std::span<const double> t_grid,
                  const EvolveOptions& opts, double bath_tol) {
    return evolve(p, coefficients(p, bath_tol), initial, t_grid, opts);
}

Trajectory evolve(const ModelParams& p, const BathCoefficients& coeffs, const GaussianState& initial,
                  std::span<const double> t_grid, const EvolveOptions& opts) {
    check_grid(t_grid);
    const double w2 = checked_bohr_sq(p);
    const auto c = effective(p, coeffs);
    auto rhs = p.secular ? &gkls_rhs : &redfield_rhs;

    auto system = [&](const Vec5& y, Vec5& dy, double) { dy = pack(rhs(unpack(y), c, w2)); };

    Trajectory traj;
    traj.label = variant_label(p);
    traj.times.reserve(t_grid.size());
    traj.states.reserve(t_grid.size());
    auto observer = [&](const Vec5& y, double t) {
        for (double v : y)
            if (!std::isfinite(v))
                throw IntegrationError("moment equations diverged", traj.times.empty() ? 0.0 : traj.times.back());
        traj.times.push_back(t);
        traj.states.push_back(unpack(y));
    };

    Vec5 y = pack(MomentState::from_gaussian(initial));
    if (t_grid.size() == 1) {
        observer(y, 0.0);
        return traj;
    }
    const double dt0 = std::min(1e-3, t_grid[1]);
    auto stepper = odeint::make_dense_output(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<Vec5>());
    try {
        odeint::integrate_times(stepper, system, y, t_grid.begin(), t_grid.end(), dt0, observer,
                                odeint::max_step_checker(static_cast<int>(opts.max_steps_between_outputs)));
    } catch (const IntegrationError&) {
        throw;
    } catch (const std::exception& e) {
        throw IntegrationError(std::string("integrator failure: ") + e.what(),
                               traj.times.empty() ? 0.0 : traj.times.back());
    }
    return traj;
}

Trajectory propagate_exponential(const MomentGenerator& gen, const MomentState& initial,
                                 std::span<const double> t_grid) {
    check_grid(t_grid);
    // Affine second-moment system via the augmented 4x4 generator [[A, b], [0, 0]].
    Eigen::Matrix4d aug = Eigen::Matrix4d::Zero();
    aug.topLeftCorner<3, 3>() = gen.second_block;
    aug.topRightCorner<3, 1>() = gen.source;
    Eigen::Vector4d y0;
    y0 << initial.second, 1.0;

    Trajectory traj;
    for (double t : t_grid) {
        MomentState s;
        const Eigen::Matrix2d e1 = (gen.first_block * t).exp();
        const Eigen::Matrix4d e2 = (aug * t).exp();
        s.first = e1 * initial.first;
        s.second = (e2 * y0).head<3>();
        traj.times.push_back(t);
        traj.states.push_back(s);
    }
    return traj;
}

GaussianState steady_state(const ModelParams& p, double bath_tol) {
    return steady_state(p, coefficients(p, bath_tol));
}

GaussianState steady_state(const ModelParams& p, const BathCoefficients& coeffs) {
    const double w2 = checked_bohr_sq(p);
    if (p.coupling == 0.0) return thermal_state(w2, p.temperature);
    if (!variant_generator(p, coeffs).is_hurwitz())
        throw UnstableError("steady_state: " + variant_label(p) + " generator has an eigenvalue with Re >= 0");
    if (p.secular || !p.lamb_shift) return thermal_state(w2, p.temperature);

    const double w = std::sqrt(w2);
    const double c = thermal_coth(w, p.temperature);
    const double k = w2 - coeffs.sigma_prime;
    const double xx = w / (2.0 * k) * (c - coeffs.delta_prime / w2);
    if (!(k > 0.0) || !(xx > 0.0)) throw UnstableError("steady_state: Redfield position variance is not positive");
    return GaussianState::from_covariance(xx, 0.5 * w * c);
}

} // namespace dho
