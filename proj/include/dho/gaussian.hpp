// gaussian.hpp: single-mode Gaussian states, reference steady states and fidelity

#pragma once

#include <Eigen/Dense>

#include "dho/bath.hpp"

namespace dho {

// Mean (<x>, <p>) and symmetric covariance
//   [ <x^2> - <x>^2            1/2<{x,p}> - <x><p> ]
//   [ 1/2<{x,p}> - <x><p>      <p^2> - <p>^2       ]
struct GaussianState {
    Eigen::Vector2d mean{Eigen::Vector2d::Zero()};
    Eigen::Matrix2d cov{Eigen::Matrix2d::Identity() * 0.5};

    static GaussianState from_covariance(double xx, double pp, double xp = 0.0,
                                         Eigen::Vector2d mean = Eigen::Vector2d::Zero());

    double xx() const { return cov(0, 0); }
    double pp() const { return cov(1, 1); }
    double xp() const { return cov(0, 1); }
};

struct Physicality {
    bool physical{false};
    double margin{0.0};  // det(cov) - 1/4
};

inline constexpr double kPhysicalityTol = 1e-12;
inline constexpr double kFidelityDetTol = 1e-10;

// Thermal state of 1/2 (omega_sq x^2 + p^2) at temperature T.
// Throws UnconfinedError if omega_sq <= 0.
GaussianState thermal_state(double omega_sq, double temperature);

// Classical limit of the mean-force Gibbs state: thermal in the potential
// renormalised by -dw^2, i.e. thermal_state(physical_omega_sq(p) - dw^2, T).
GaussianState mean_force_classical(const ModelParams& p);

// Uhlmann fidelity (squared convention) of two undisplaced single-mode states:
//   F = 2 / (sqrt(kappa + Y) - sqrt(Y)),  kappa = 4 det(S1 + S2),  Y = (4 det S1 - 1)(4 det S2 - 1).
// Throws DomainError for displaced or unphysical inputs.
double fidelity(const GaussianState& a, const GaussianState& b);

Physicality is_physical(const GaussianState& s);

} // namespace dho
