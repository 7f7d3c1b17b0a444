// bath.hpp: algebraic-Ohmic bath, rates, Lamb shifts and master-equation coefficients
//
// Units: hbar = k_B = m = 1. The spectral density is J(w) = lambda w / (1 + (w/cutoff)^2),
// extended as an odd function to negative frequencies.

#pragma once

#include <functional>

namespace dho {

inline constexpr double kDefaultBathTol = 1e-8;

struct ModelParams {
    double omega0{1.0};       // bare trap frequency
    double coupling{0.1};     // lambda
    double cutoff{100.0};     // Lambda
    double temperature{1.0};  // T, may be 0
    bool counter_term{true};  // physical H_S carries +1/2 dw^2 x^2
    bool lamb_shift{true};    // keep S(w) terms in the master equation
    bool secular{false};      // GKLS instead of Redfield
    bool shifted{false};      // subtract dw^2 from H_S before deriving the master equation

    // Throws DomainError on omega0 <= 0, cutoff <= 0, coupling < 0, T < 0 or non-finite input.
    void validate() const;
};

struct BathCoefficients {
    double gamma_plus{0.0};   // gamma(w_B)
    double gamma_minus{0.0};  // gamma(-w_B)
    double s_plus{0.0};       // S(w_B)
    double s_minus{0.0};      // S(-w_B)
    double delta{0.0};        // gamma(-w_B) - gamma(w_B)
    double sigma{0.0};        // -gamma(-w_B) - gamma(w_B)
    double sigma_prime{0.0};  // -S(-w_B) - S(w_B)
    double delta_prime{0.0};  // S(-w_B) - S(w_B)
    double reorg{0.0};        // dw^2
    double bohr{0.0};         // w_B the coefficients were evaluated at
};

// Reorganisation shift dw^2 = lambda * Lambda.
double reorganisation(const ModelParams& p);

// (1/pi) int J(w)/w dw over the real line, by quadrature. Self-check for reorganisation().
double reorganisation_quadrature(const ModelParams& p, double tol = kDefaultBathTol);

// w^2 of the physical system Hamiltonian (what the exact dynamics sees).
double physical_omega_sq(const ModelParams& p);

// w^2 of the Hamiltonian the master equation is derived from.
double bohr_omega_sq(const ModelParams& p);

double spectral_density(double omega, const ModelParams& p);

// n(w) = 1/(e^{w/T} - 1). At T = 0 returns 0 for w > 0 and -1 for w < 0.
// Throws DomainError at w == 0.
double bose_occupation(double omega, double temperature);

// coth(w / 2T) with the T = 0 branch and overflow guard. Throws at w == 0.
double thermal_coth(double omega, double temperature);

// J(w) (n(w) + 1), finite everywhere (value lambda*T at w = 0).
double emission_weight(double omega, const ModelParams& p);

// J(w) coth(w / 2T), even in w, value 2 lambda T at w = 0.
double symmetrised_weight(double omega, const ModelParams& p);

// gamma(w) = 2 J(w) (1 + n(w)). Throws DomainError at w == 0.
double decay_rate(double omega, const ModelParams& p);

struct PvResult {
    double value{0.0};
    double error{0.0};
};

struct PvOptions {
    double window{0.0};  // half-width of the subtracted window, must be > 0
    double scale{1.0};   // characteristic scale of f; the finite range extends to 50 * scale
    double tol{kDefaultBathTol};
};

// Hilbert transform (1/pi) PV int f(nu) / (nu - omega0) dnu over the real line.
// f must be continuous at omega0 and f(nu)/nu integrable at +-inf.
// Throws QuadratureError if the estimated error exceeds opts.tol.
PvResult hilbert_pv(const std::function<double(double)>& f, double omega0, const PvOptions& opts);

// S(w) = -H[J (n + 1)](w).
double lamb_shift(double omega, const ModelParams& p, double tol = kDefaultBathTol);

// Closed form of H[J](w) = lambda Lambda / (1 + (w/Lambda)^2).
double sigma_prime_closed_form(double omega, const ModelParams& p);

// All coefficients at the Bohr frequency sqrt(bohr_omega_sq(p)).
// Throws UnconfinedError if bohr_omega_sq(p) <= 0.
BathCoefficients coefficients(const ModelParams& p, double tol = kDefaultBathTol);

// Copy of c with every Lamb-shift contribution (S, Sigma', Delta') set to zero.
BathCoefficients without_lamb_shift(BathCoefficients c);

} // namespace dho
