// exact.hpp: exact Gaussian dynamics of the damped oscillator (quantum Langevin equation)
//
// With chi(s) = lambda Lambda^2 / (s + Lambda), the response function
//   g(s) = 1 / (s^2 + w^2 - chi(s)) = (s + Lambda) / P(s),
//   P(s) = s^3 + Lambda s^2 + w^2 s + Lambda (w^2 - lambda Lambda),
// is inverted through the three roots of P and their residues.

#pragma once

#include <array>
#include <complex>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "dho/bath.hpp"
#include "dho/gaussian.hpp"
#include "dho/master_equation.hpp"

namespace dho {

using cdouble = std::complex<double>;

inline constexpr double kDegenerateRootSeparation = 1e-9;
inline constexpr double kNearDegenerateRootSeparation = 1e-6;
inline constexpr double kDefaultExactTol = 1e-10;

// Roots of s^3 + a2 s^2 + a1 s + a0 with real coefficients. The real root found first
// is polished, deflated, and the remaining pair polished by one Newton step each.
std::array<cdouble, 3> solve_monic_cubic(double a2, double a1, double a0);

class Propagator {
public:
    Propagator(double omega_sq, double coupling, double cutoff);

    const std::array<cdouble, 3>& roots() const { return roots_; }
    const std::array<cdouble, 3>& residues() const { return residues_; }
    double omega_sq() const { return omega_sq_; }
    double coupling() const { return coupling_; }
    double cutoff() const { return cutoff_; }
    // True when two roots are closer than kNearDegenerateRootSeparation (relative) and the
    // time-domain functions are evaluated through the state-space embedding instead.
    bool stabilised() const { return stabilised_; }

    double max_real_part() const;
    // Smallest decay rate min_k |Re s_k|.
    double slowest_rate() const;
    bool stable() const { return max_real_part() < 0.0; }

    // g(t), g'(t), g''(t) for t >= 0.
    std::array<double, 3> g_derivatives(double t) const;
    double g(double t) const { return g_derivatives(t)[0]; }
    // G(t) = [[g', g], [g'', g']].
    Eigen::Matrix2d matrix(double t) const;

    // g(i w) evaluated from the defining expression.
    cdouble g_hat(double omega) const;
    // Same quantity from the partial fractions sum_k c_k / (i w - s_k).
    cdouble g_hat_residues(double omega) const;

    // Time integrals at fixed t, for many frequencies:
    //   h(t, w)   = int_0^t g(u)  e^{i w u} du
    //   h_p(t, w) = int_0^t g'(u) e^{i w u} du
    class MemorySlice {
    public:
        MemorySlice(const Propagator& prop, double t);
        std::pair<cdouble, cdouble> operator()(double omega) const;

        // h = e^{i w t} a - b and h_p = e^{i w t} a_p - b_p, with a, a_p, b, b_p free of
        // the oscillating factor. Used to split off the oscillating part at large w.
        struct Parts {
            cdouble a, a_p, b, b_p;
        };
        Parts parts(double omega) const;
        double time() const { return t_; }

    private:
        const Propagator& prop_;
        double t_;
        std::array<cdouble, 3> exp_st_{};
        Eigen::Vector3d state_{};  // e^{At} b, stabilised path only
    };

private:
    Eigen::Matrix3d state_matrix() const;

    double omega_sq_;
    double coupling_;
    double cutoff_;
    std::array<cdouble, 3> roots_{};
    std::array<cdouble, 3> residues_{};
    bool stabilised_{false};
};

// Throws DegenerateRootsError if two roots coincide to kDegenerateRootSeparation.
Propagator characteristic_roots(double omega_sq, double coupling, double cutoff);

// Propagator of the physical Hamiltonian of p.
Propagator model_propagator(const ModelParams& p);

// nu(w) = (2/pi) J(w) coth(w/2T), with the w -> 0 limit 4 lambda T / pi.
double noise_spectrum(double omega, const ModelParams& p);

// mu(t) = int_0^inf nu(w) cos(w t) dw for t > 0 (log-divergent at t = 0). Diagnostic only.
double noise_kernel(double t, const ModelParams& p, double tol = kDefaultBathTol);

// Exact steady state (mean-force Gibbs covariances). rel_tol applies to each entry.
// Throws UnstableError unless w^2 > lambda Lambda. At lambda = 0 returns the
// lambda -> 0+ limit thermal_state(physical_omega_sq(p), T).
GaussianState steady_covariance(const ModelParams& p, double rel_tol = kDefaultExactTol);

// Exact covariance dynamics from a factorised initial state. Means follow G(t).
Trajectory transient_covariance(const ModelParams& p, const GaussianState& initial,
                                std::span<const double> t_grid, double rel_tol = 1e-9);

} // namespace dho
