// exact.cpp: characteristic cubic, propagator and exact Gaussian covariances

#include "dho/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/expint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "dho/errors.hpp"
#include "dho/quadrature.hpp"

namespace dho {

namespace {

constexpr cdouble kI{0.0, 1.0};

double cubic_value(double a2, double a1, double a0, double s) { return ((s + a2) * s + a1) * s + a0; }

cdouble newton_step(double a2, double a1, double a0, cdouble s) {
    const cdouble value = ((s + a2) * s + a1) * s + a0;
    const cdouble slope = (3.0 * s + 2.0 * a2) * s + a1;
    if (std::abs(slope) == 0.0) return s;
    return s - value / slope;
}

// (e^{z t} - 1) / z without cancellation for small |z t|.
cdouble exp_ratio(cdouble z, double t) {
    const cdouble zt = z * t;
    if (std::abs(zt) < 1e-4) return t * (1.0 + zt / 2.0 + zt * zt / 6.0 + zt * zt * zt / 24.0);
    return (std::exp(zt) - 1.0) / z;
}

double relative_gap(cdouble a, cdouble b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

} // namespace

std::array<cdouble, 3> solve_monic_cubic(double a2, double a1, double a0) {
    const double shift = a2 / 3.0;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    double real_root;
    if (disc > 0.0) {
        // One real root (Cardano), using the larger cube root to avoid cancellation.
        const double u = std::cbrt(-0.5 * q - std::copysign(std::sqrt(disc), q));
        const double v = u != 0.0 ? -p / (3.0 * u) : 0.0;
        real_root = u + v - shift;
    } else if (p == 0.0) {
        real_root = -shift;
    } else {
        // Three real roots (trigonometric form); keep the largest in magnitude for deflation.
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        real_root = m * std::cos(theta) - shift;
        for (int k = 1; k < 3; ++k) {
            const double r = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift;
            if (std::abs(r) > std::abs(real_root)) real_root = r;
        }
    }

    for (int it = 0; it < 4; ++it) {
        const double slope = (3.0 * real_root + 2.0 * a2) * real_root + a1;
        if (slope == 0.0) break;
        const double next = real_root - cubic_value(a2, a1, a0, real_root) / slope;
        if (std::abs(cubic_value(a2, a1, a0, next)) >= std::abs(cubic_value(a2, a1, a0, real_root))) break;
        real_root = next;
    }

    // Deflate: P(s) = (s - r)(s^2 + b s + c).
    const double b = a2 + real_root;
    const double c = a1 + b * real_root;
    const double qd = b * b - 4.0 * c;
    cdouble r1, r2;
    if (qd >= 0.0) {
        const double h = -0.5 * (b + std::copysign(std::sqrt(qd), b));
        r1 = h;
        r2 = h != 0.0 ? c / h : 0.0;
    } else {
        const double im = 0.5 * std::sqrt(-qd);
        r1 = cdouble(-0.5 * b, im);
        r2 = cdouble(-0.5 * b, -im);
    }
    r1 = newton_step(a2, a1, a0, r1);
    r2 = newton_step(a2, a1, a0, r2);
    if (qd < 0.0) r2 = std::conj(r1);  // keep the pair exactly conjugate
    return {cdouble(real_root, 0.0), r1, r2};
}

Propagator::Propagator(double omega_sq, double coupling, double cutoff)
    : omega_sq_(omega_sq), coupling_(coupling), cutoff_(cutoff) {
    if (!(cutoff > 0.0) || coupling < 0.0) throw DomainError("propagator: need cutoff > 0 and coupling >= 0");
    roots_ = solve_monic_cubic(cutoff, omega_sq, cutoff * (omega_sq - coupling * cutoff));

    double min_gap = 1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) min_gap = std::min(min_gap, relative_gap(roots_[i], roots_[j]));
    if (min_gap < kDegenerateRootSeparation)
        throw DegenerateRootsError("characteristic cubic has a repeated root");
    stabilised_ = min_gap < kNearDegenerateRootSeparation;

    for (int k = 0; k < 3; ++k) {
        cdouble denom = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != k) denom *= roots_[k] - roots_[j];
        residues_[k] = (roots_[k] + cutoff_) / denom;
    }

    if (!stabilised_) {
        cdouble sum0 = 0.0, sum1 = 0.0;
        double mag0 = 0.0, mag1 = 0.0;
        for (int k = 0; k < 3; ++k) {
            sum0 += residues_[k];
            sum1 += residues_[k] * roots_[k];
            mag0 += std::abs(residues_[k]);
            mag1 += std::abs(residues_[k] * roots_[k]);
        }
        if (std::abs(sum0) > 1e-10 * std::max(1.0, mag0) || std::abs(sum1 - 1.0) > 1e-10 * std::max(1.0, mag1))
            throw DegenerateRootsError("propagator residues violate g(0) = 0, g'(0) = 1");
    }
}

double Propagator::max_real_part() const {
    return std::max({roots_[0].real(), roots_[1].real(), roots_[2].real()});
}

double Propagator::slowest_rate() const {
    return std::min({std::abs(roots_[0].real()), std::abs(roots_[1].real()), std::abs(roots_[2].real())});
}

Eigen::Matrix3d Propagator::state_matrix() const {
    // (x, p, y) with y = int chi(t - tau) x(tau) dtau.
    Eigen::Matrix3d a;
    a << 0.0, 1.0, 0.0,
         -omega_sq_, 0.0, 1.0,
         coupling_ * cutoff_ * cutoff_, 0.0, -cutoff_;
    return a;
}

std::array<double, 3> Propagator::g_derivatives(double t) const {
    if (stabilised_) {
        const Eigen::Vector3d z = (state_matrix() * t).exp().col(1);
        return {z(0), z(1), -omega_sq_ * z(0) + z(2)};
    }
    cdouble g0 = 0.0, g1 = 0.0, g2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        const cdouble term = residues_[k] * std::exp(roots_[k] * t);
        g0 += term;
        g1 += term * roots_[k];
        g2 += term * roots_[k] * roots_[k];
    }
    return {g0.real(), g1.real(), g2.real()};
}

Eigen::Matrix2d Propagator::matrix(double t) const {
    const auto d = g_derivatives(t);
    Eigen::Matrix2d m;
    m << d[1], d[0],
         d[2], d[1];
    return m;
}

cdouble Propagator::g_hat(double omega) const {
    const cdouble s = kI * omega;
    return 1.0 / (s * s + omega_sq_ - coupling_ * cutoff_ * cutoff_ / (s + cutoff_));
}

cdouble Propagator::g_hat_residues(double omega) const {
    cdouble sum = 0.0;
    for (int k = 0; k < 3; ++k) sum += residues_[k] / (kI * omega - roots_[k]);
    return sum;
}

Propagator::MemorySlice::MemorySlice(const Propagator& prop, double t) : prop_(prop), t_(t) {
    if (prop.stabilised_) {
        state_ = (prop.state_matrix() * t).exp().col(1);
    } else {
        for (int k = 0; k < 3; ++k) exp_st_[k] = std::exp(prop.roots_[k] * t);
    }
}

std::pair<cdouble, cdouble> Propagator::MemorySlice::operator()(double omega) const {
    if (prop_.stabilised_) {
        // int_0^t e^{(A + i w) u} b du = (A + i w)^{-1} (e^{i w t} e^{At} b - b)
        const Eigen::Matrix3cd shifted = prop_.state_matrix().cast<cdouble>() + kI * omega * Eigen::Matrix3cd::Identity();
        Eigen::Vector3cd rhs = std::exp(kI * omega * t_) * state_.cast<cdouble>();
        rhs(1) -= 1.0;
        const Eigen::Vector3cd v = shifted.partialPivLu().solve(rhs);
        return {v(0), v(1)};
    }
    cdouble h = 0.0, hp = 0.0;
    const cdouble phase = std::exp(kI * omega * t_);
    for (int k = 0; k < 3; ++k) {
        const cdouble z = prop_.roots_[k] + kI * omega;
        // (e^{z t} - 1)/z, using the cached e^{s_k t} unless z t is tiny.
        const cdouble ratio = std::abs(z * t_) < 1e-4 ? exp_ratio(z, t_) : (exp_st_[k] * phase - 1.0) / z;
        h += prop_.residues_[k] * ratio;
        hp += prop_.residues_[k] * prop_.roots_[k] * ratio;
    }
    return {h, hp};
}

Propagator::MemorySlice::Parts Propagator::MemorySlice::parts(double omega) const {
    Parts out{};
    if (prop_.stabilised_) {
        const Eigen::Matrix3cd shifted = prop_.state_matrix().cast<cdouble>() + kI * omega * Eigen::Matrix3cd::Identity();
        const auto lu = shifted.partialPivLu();
        const Eigen::Vector3cd va = lu.solve(state_.cast<cdouble>());
        const Eigen::Vector3cd vb = lu.solve(Eigen::Vector3cd(0.0, 1.0, 0.0));
        return {va(0), va(1), vb(0), vb(1)};
    }
    for (int k = 0; k < 3; ++k) {
        const cdouble inv = 1.0 / (prop_.roots_[k] + kI * omega);
        const cdouble c = prop_.residues_[k];
        const cdouble cs = c * prop_.roots_[k];
        out.a += c * exp_st_[k] * inv;
        out.a_p += cs * exp_st_[k] * inv;
        out.b += c * inv;
        out.b_p += cs * inv;
    }
    return out;
}

Propagator characteristic_roots(double omega_sq, double coupling, double cutoff) {
    return Propagator(omega_sq, coupling, cutoff);
}

Propagator model_propagator(const ModelParams& p) {
    p.validate();
    return Propagator(physical_omega_sq(p), p.coupling, p.cutoff);
}

double noise_spectrum(double omega, const ModelParams& p) {
    return 2.0 / std::numbers::pi * symmetrised_weight(omega, p);
}

double noise_kernel(double t, const ModelParams& p, double tol) {
    if (!(t > 0.0)) throw DomainError("noise_kernel: defined for t > 0 only");
    if (p.coupling == 0.0) return 0.0;

    // Vacuum part (2/pi) int J cos, in closed form:
    //   int_0^inf x cos(a x) / (x^2 + b^2) dx = -1/2 [e^{-ab} Ei(ab) - e^{ab} E1(ab)]
    const double x = p.cutoff * t;
    double bracket;
    if (x > 40.0) {
        // Asymptotic: 2 sum_{k odd} k! / x^{k+1}
        bracket = 0.0;
        double term = 1.0 / (x * x);
        for (int k = 1; k < 30; k += 2) {
            bracket += 2.0 * term;
            term *= static_cast<double>((k + 1) * (k + 2)) / (x * x);
            if (term < 1e-18 * bracket) break;
        }
    } else {
        bracket = std::exp(-x) * boost::math::expint(x) - std::exp(x) * boost::math::expint(1, x);
    }
    double mu = -p.coupling * p.cutoff * p.cutoff / std::numbers::pi * bracket;

    // Thermal part (4/pi) int J n cos, exponentially localised on the scale T.
    if (p.temperature > 0.0) {
        auto f = [&](double w) { return (emission_weight(w, p) - spectral_density(w, p)) * std::cos(w * t); };
        const double top = 60.0 * p.temperature;
        std::vector<double> pts{0.0, top};
        const double period = 2.0 * std::numbers::pi / t;
        for (double w = period; w < top && pts.size() < 2000; w += period) pts.push_back(w);
        std::sort(pts.begin(), pts.end());
        const auto r = quad::integrate(f, pts, {0.25 * std::numbers::pi * tol, 0.0, 20000});
        if (!r.converged) throw QuadratureError("noise_kernel: thermal part did not converge", r.error);
        mu += 4.0 / std::numbers::pi * r.value[0];
    }
    return mu;
}

namespace {

// Breakpoints that resolve the resonances of |g(i w)|^2.
std::vector<double> resonance_points(const Propagator& prop, double reach) {
    std::vector<double> pts{0.0, reach};
    auto add = [&](double w) {
        if (w > 0.0 && w < reach) pts.push_back(w);
    };
    add(prop.cutoff());
    for (const auto& s : prop.roots()) {
        if (s.imag() > 0.0) {
            const double width = std::max(std::abs(s.real()), 1e-12 * s.imag());
            add(s.imag());
            for (double m : {1.0, 4.0, 16.0, 64.0}) {
                add(s.imag() - m * width);
                add(s.imag() + m * width);
            }
        } else {
            add(std::abs(s));
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double integration_reach(const ModelParams& p) {
    return 10.0 * std::max({std::sqrt(physical_omega_sq(p)), p.cutoff, p.temperature});
}

void require_stable(const Propagator& prop, const ModelParams& p) {
    if (p.coupling > 0.0 && !prop.stable())
        throw UnstableError("exact dynamics: w^2 <= lambda Lambda, the renormalised potential is not confining");
}

} // namespace

GaussianState steady_covariance(const ModelParams& p, double rel_tol) {
    const auto prop = model_propagator(p);
    if (p.coupling == 0.0) return thermal_state(physical_omega_sq(p), p.temperature);
    require_stable(prop, p);

    quad::Integrand<2> f = [&](double w) {
        const double weight = 0.5 * std::norm(prop.g_hat(w)) * noise_spectrum(w, p);
        return std::array<double, 2>{weight, w * w * weight};
    };
    const double reach = integration_reach(p);
    const auto pts = resonance_points(prop, reach);
    const quad::Options opts{1e-300, rel_tol, 20000};
    const auto body = quad::integrate<2>(f, pts, opts);
    const auto tail = quad::integrate_upper_tail<2>(f, reach, reach, opts);
    if (!body.converged || !tail.converged)
        throw QuadratureError("steady_covariance: quadrature did not converge", body.error + tail.error);
    return GaussianState::from_covariance(body.value[0] + tail.value[0], body.value[1] + tail.value[1]);
}

namespace {

using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cdouble, 3>;

// The memory-integral integrand nu * (|h|^2, |h_p|^2, Re h conj h_p) / 2 written as
// smooth(w) + Re(e^{i w t} osc(w)), with both parts free of the fast oscillation.
struct MemoryIntegrand {
    const Propagator::MemorySlice& slice;
    const ModelParams& p;

    Vec3 full(double w) const {
        const auto [h, hp] = slice(w);
        const double nu = noise_spectrum(w, p);
        return {0.5 * nu * std::norm(h), 0.5 * nu * std::norm(hp), 0.5 * nu * (h * std::conj(hp)).real()};
    }
    Vec3 smooth(double w) const {
        const auto q = slice.parts(w);
        const double nu = noise_spectrum(w, p);
        return {0.5 * nu * (std::norm(q.a) + std::norm(q.b)), 0.5 * nu * (std::norm(q.a_p) + std::norm(q.b_p)),
                0.5 * nu * (q.a * std::conj(q.a_p) + q.b * std::conj(q.b_p)).real()};
    }
    CVec3 osc(double w) const {
        const auto q = slice.parts(w);
        const double nu = noise_spectrum(w, p);
        return {-nu * q.a * std::conj(q.b), -nu * q.a_p * std::conj(q.b_p),
                -0.5 * nu * (q.a * std::conj(q.b_p) + q.a_p * std::conj(q.b))};
    }
};

struct OscTail {
    Vec3 value{};
    double error{0.0};
    bool asymptotic{false};
};

// Re int_r^inf e^{i w t} q(w) dw by repeated integration by parts,
//   -e^{i r t} [q/(it) - q'/(it)^2 + q''/(it)^3 - ...],
// keeping two terms and reporting the third as the error. Derivatives by central differences
// on the scale of r, where q varies like a rational function.
OscTail oscillating_tail(const MemoryIntegrand& f, double r, double t) {
    const double step = 1e-3 * r;
    const CVec3 q0 = f.osc(r), qp = f.osc(r + step), qm = f.osc(r - step);
    const CVec3 qp2 = f.osc(r + 2.0 * step), qm2 = f.osc(r - 2.0 * step);
    const cdouble it = kI * t;
    const cdouble phase = std::exp(kI * r * t);
    OscTail out;
    out.asymptotic = true;
    for (int c = 0; c < 3; ++c) {
        const cdouble d1 = (qp[c] - qm[c]) / (2.0 * step);
        const cdouble d2 = (qp[c] - 2.0 * q0[c] + qm[c]) / (step * step);
        const cdouble d3 = (qp2[c] - 2.0 * qp[c] + 2.0 * qm[c] - qm2[c]) / (2.0 * step * step * step);
        const double t0 = std::abs(q0[c] / it), t1 = std::abs(d1 / (it * it)), t2 = std::abs(d2 / (it * it * it));
        const double t3 = std::abs(d3 / (it * it * it * it));
        out.value[c] = (-phase * (q0[c] / it - d1 / (it * it) + d2 / (it * it * it))).real();
        out.error = std::max(out.error, t3);
        if (!(t1 <= t0 || t0 == 0.0) || !(t2 <= std::max(t1, 1e-300) || t1 == 0.0)) out.asymptotic = false;
    }
    return out;
}

} // namespace

Trajectory transient_covariance(const ModelParams& p, const GaussianState& initial, std::span<const double> t_grid,
                                double rel_tol) {
    if (t_grid.empty() || t_grid.front() != 0.0) throw DomainError("time grid must start at 0");
    const auto prop = model_propagator(p);
    require_stable(prop, p);

    const double reach = integration_reach(p);
    const auto pts = resonance_points(prop, reach);
    // Past the last resonance the oscillating part is a smooth function times e^{i w t}.
    double floor = 0.0;
    for (const auto& s : prop.roots())
        if (s.imag() != 0.0) floor = std::max(floor, std::abs(s.imag()) + 64.0 * std::abs(s.real()));
    floor = std::min(floor, reach);

    double abs_tol = 0.0;
    if (p.coupling > 0.0) {
        const auto steady = steady_covariance(p, 1e-8);
        abs_tol = rel_tol * std::max(steady.xx(), steady.pp());
    }
    const quad::Options opts{0.25 * abs_tol, 0.0, 50000};

    Trajectory traj;
    traj.label = "exact";
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        if (i > 0 && !(t > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
        const Eigen::Matrix2d G = prop.matrix(t);
        Eigen::Matrix2d cov = G * initial.cov * G.transpose();

        if (p.coupling > 0.0 && t > 0.0) {
            const Propagator::MemorySlice slice(prop, t);
            const MemoryIntegrand mi{slice, p};

            // Split point for the oscillating part: far enough that the asymptotic tail holds.
            double split = std::max(floor, 20.0 / t);
            OscTail osc = oscillating_tail(mi, split, t);
            while (!(osc.asymptotic && osc.error <= 0.25 * abs_tol)) {
                split *= 2.0;
                if (split > 1e6 * reach)
                    throw QuadratureError("transient_covariance: no asymptotic tail at t = " + std::to_string(t),
                                          osc.error);
                osc = oscillating_tail(mi, split, t);
            }

            std::vector<double> body_pts;
            for (double w : pts)
                if (w < split) body_pts.push_back(w);
            body_pts.push_back(split);
            const auto body = quad::integrate<3>([&](double w) { return mi.full(w); }, body_pts, opts);

            quad::Integrand<3> smooth = [&](double w) { return mi.smooth(w); };
            quad::Result<3> tail;
            if (split < reach) {
                std::vector<double> mid{split};
                for (double w : pts)
                    if (w > split) mid.push_back(w);
                const auto a = quad::integrate<3>(smooth, mid, opts);
                const auto b = quad::integrate_upper_tail<3>(smooth, reach, reach, opts);
                tail = a;
                for (int c = 0; c < 3; ++c) tail.value[c] += b.value[c];
                tail.error += b.error;
                tail.converged = a.converged && b.converged;
            } else {
                tail = quad::integrate_upper_tail<3>(smooth, split, split, opts);
            }

            if (!body.converged || !tail.converged)
                throw QuadratureError("transient_covariance: memory integral did not converge at t = " +
                                          std::to_string(t),
                                      body.error + tail.error + osc.error);
            Vec3 sum{};
            for (int c = 0; c < 3; ++c) sum[c] = body.value[c] + tail.value[c] + osc.value[c];
            cov(0, 0) += sum[0];
            cov(1, 1) += sum[1];
            cov(0, 1) += sum[2];
            cov(1, 0) = cov(0, 1);
        }
        GaussianState g;
        g.mean = G * initial.mean;
        g.cov = cov;
        traj.times.push_back(t);
        traj.states.push_back(MomentState::from_gaussian(g));
    }
    return traj;
}

} // namespace dho
