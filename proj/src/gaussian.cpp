// gaussian.cpp: single-mode Gaussian states, thermal states and fidelity

#include "dho/gaussian.hpp"

#include <cmath>

#include "dho/errors.hpp"

namespace dho {

GaussianState GaussianState::from_covariance(double xx, double pp, double xp, Eigen::Vector2d mean) {
    GaussianState s;
    s.mean = mean;
    s.cov << xx, xp, xp, pp;
    return s;
}

GaussianState thermal_state(double omega_sq, double temperature) {
    if (!(omega_sq > 0.0)) throw UnconfinedError("thermal_state: squared frequency must be > 0");
    if (temperature < 0.0) throw DomainError("thermal_state: temperature must be >= 0");
    const double w = std::sqrt(omega_sq);
    const double c = thermal_coth(w, temperature);
    return GaussianState::from_covariance(c / (2.0 * w), 0.5 * w * c);
}

GaussianState mean_force_classical(const ModelParams& p) {
    const double renormalised = physical_omega_sq(p) - reorganisation(p);
    if (!(renormalised > 0.0))
        throw UnconfinedError("mean_force_classical: renormalised potential is not confining");
    return thermal_state(renormalised, p.temperature);
}

Physicality is_physical(const GaussianState& s) {
    const double det = s.cov.determinant();
    const bool symmetric = s.cov(0, 1) == s.cov(1, 0);
    const bool positive = s.cov(0, 0) > 0.0 && det > 0.0;
    return {symmetric && positive && det >= 0.25 - kPhysicalityTol, det - 0.25};
}

double fidelity(const GaussianState& a, const GaussianState& b) {
    if (a.mean.cwiseAbs().maxCoeff() > 0.0 || b.mean.cwiseAbs().maxCoeff() > 0.0)
        throw DomainError("fidelity: displaced states are not supported");
    const double det_a = a.cov.determinant();
    const double det_b = b.cov.determinant();
    if (!(det_a >= 0.25 - kFidelityDetTol) || !(det_b >= 0.25 - kFidelityDetTol) || a.cov(0, 0) <= 0.0 ||
        b.cov(0, 0) <= 0.0)
        throw DomainError("fidelity: covariance violates the uncertainty principle");

    const double kappa = 4.0 * (a.cov + b.cov).determinant();
    const double upsilon = std::max(0.0, (4.0 * det_a - 1.0) * (4.0 * det_b - 1.0));
    // sqrt(k + Y) - sqrt(Y) = k / (sqrt(k + Y) + sqrt(Y)), without the cancellation at high T.
    return 2.0 * (std::sqrt(kappa + upsilon) + std::sqrt(upsilon)) / kappa;
}

} // namespace dho
