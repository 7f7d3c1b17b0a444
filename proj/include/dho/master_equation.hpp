// master_equation.hpp: Redfield and secular GKLS dynamics as linear moment equations

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dho/bath.hpp"
#include "dho/gaussian.hpp"

namespace dho {

// Raw moments: first = (<x>, <p>), second = (<x^2>, <p^2>, <{x,p}>).
struct MomentState {
    Eigen::Vector2d first{Eigen::Vector2d::Zero()};
    Eigen::Vector3d second{Eigen::Vector3d::Zero()};

    static MomentState from_gaussian(const GaussianState& g);
    GaussianState to_gaussian() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<MomentState> states;
    std::string label;

    std::size_t size() const { return times.size(); }
    GaussianState gaussian(std::size_t i) const { return states.at(i).to_gaussian(); }
};

// n points from 0 to t_max inclusive. Throws DomainError on t_max <= 0 or n < 2.
std::vector<double> linear_grid(double t_max, std::size_t n);

// Right-hand sides of the moment equations with w^2 = omega_sq. The caller
// zeroes the Lamb-shift entries of coeffs when the variant suppresses them.
MomentState redfield_rhs(const MomentState& s, const BathCoefficients& coeffs, double omega_sq);
MomentState gkls_rhs(const MomentState& s, const BathCoefficients& coeffs, double omega_sq);

// d first/dt = first_block * first;  d second/dt = second_block * second + source.
struct MomentGenerator {
    Eigen::Matrix2d first_block{Eigen::Matrix2d::Zero()};
    Eigen::Matrix3d second_block{Eigen::Matrix3d::Zero()};
    Eigen::Vector3d source{Eigen::Vector3d::Zero()};

    MomentState apply(const MomentState& s) const;
    // Largest real part over the eigenvalues of both blocks.
    double spectral_abscissa() const;
    bool is_hurwitz() const { return spectral_abscissa() < 0.0; }
};

MomentGenerator redfield_generator(const BathCoefficients& coeffs, double omega_sq);
MomentGenerator gkls_generator(const BathCoefficients& coeffs, double omega_sq);

// "redfield_LS", "gkls_shifted_noLS", ...
std::string variant_label(const ModelParams& p);

// Generator of the variant selected by p.secular / p.lamb_shift, evaluated at bohr_omega_sq(p).
MomentGenerator variant_generator(const ModelParams& p, const BathCoefficients& coeffs);

struct EvolveOptions {
    double rel_tol{1e-9};
    double abs_tol{1e-12};
    std::size_t max_steps_between_outputs{200000};
};

// Integrates the variant's moment equations with an adaptive Dormand-Prince 5(4) scheme.
// Throws IntegrationError if the step size collapses or the state leaves the finite range.
Trajectory evolve(const ModelParams& p, const GaussianState& initial, std::span<const double> t_grid,
                  const EvolveOptions& opts = {}, double bath_tol = kDefaultBathTol);
Trajectory evolve(const ModelParams& p, const BathCoefficients& coeffs, const GaussianState& initial,
                  std::span<const double> t_grid, const EvolveOptions& opts = {});

// Closed-form solution exp(A t) of the same linear system.
Trajectory propagate_exponential(const MomentGenerator& gen, const MomentState& initial,
                                 std::span<const double> t_grid);

// Analytic fixed point of the variant. Throws UnstableError if the generator is not Hurwitz
// or the Redfield position variance would be negative.
GaussianState steady_state(const ModelParams& p, double bath_tol = kDefaultBathTol);
GaussianState steady_state(const ModelParams& p, const BathCoefficients& coeffs);

} // namespace dho
