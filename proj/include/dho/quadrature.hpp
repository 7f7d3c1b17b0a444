// quadrature.hpp: globally adaptive Gauss-Kronrod integration

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dho::quad {

struct Options {
    double abs_tol{1e-10};
    double rel_tol{0.0};
    std::size_t max_intervals{4000};
};

template <std::size_t N>
struct Result {
    std::array<double, N> value{};
    double error{0.0};      // max over components
    std::size_t evaluations{0};
    bool converged{false};
};

template <std::size_t N>
using Integrand = std::function<std::array<double, N>(double)>;

// Integrate a vector-valued f over the union of [points[i], points[i+1]].
// Intervals are bisected in order of largest error until the total error
// of every component is below max(abs_tol, rel_tol * |value|).
template <std::size_t N>
Result<N> integrate(const Integrand<N>& f, std::span<const double> points, const Options& opts);

// Same, over [a, +inf) using nu = a + scale * s / (1 - s). The integrand must
// decay at least like 1/nu^2.
template <std::size_t N>
Result<N> integrate_upper_tail(const Integrand<N>& f, double a, double scale, const Options& opts);

// Scalar conveniences.
Result<1> integrate(const std::function<double(double)>& f, double a, double b, const Options& opts);
Result<1> integrate(const std::function<double(double)>& f, std::span<const double> points, const Options& opts);
Result<1> integrate_upper_tail(const std::function<double(double)>& f, double a, double scale,
                               const Options& opts);

extern template Result<1> integrate<1>(const Integrand<1>&, std::span<const double>, const Options&);
extern template Result<2> integrate<2>(const Integrand<2>&, std::span<const double>, const Options&);
extern template Result<3> integrate<3>(const Integrand<3>&, std::span<const double>, const Options&);
extern template Result<1> integrate_upper_tail<1>(const Integrand<1>&, double, double, const Options&);
extern template Result<2> integrate_upper_tail<2>(const Integrand<2>&, double, double, const Options&);
extern template Result<3> integrate_upper_tail<3>(const Integrand<3>&, double, double, const Options&);

} // namespace dho::quad
