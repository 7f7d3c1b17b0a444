// quadrature.cpp: adaptive Gauss-Kronrod integration with breakpoints and mapped tails

#include "dho/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dho::quad {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

template <std::size_t N>
struct Panel {
    double a{0.0};
    double b{0.0};
    std::array<double, N> value{};
    std::array<double, N> error{};

    double max_error() const { return *std::max_element(error.begin(), error.end()); }
    bool operator<(const Panel& other) const { return max_error() < other.max_error(); }
};

// QUADPACK-style G7/K15 panel estimate.
template <std::size_t N>
Panel<N> evaluate(const Integrand<N>& f, double a, double b) {
    static const auto& xk = Kronrod::abscissa();
    static const auto& wk = Kronrod::weights();
    static const auto& wg = Gauss::weights();

    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<std::array<double, N>, 15> fv{};
    fv[0] = f(centre);
    for (std::size_t j = 1; j < xk.size(); ++j) {
        fv[2 * j - 1] = f(centre - half * xk[j]);
        fv[2 * j] = f(centre + half * xk[j]);
    }

    Panel<N> panel{a, b, {}, {}};
    for (std::size_t c = 0; c < N; ++c) {
        double kronrod = wk[0] * fv[0][c];
        double gauss = wg[0] * fv[0][c];
        double abs_sum = std::abs(kronrod);
        for (std::size_t j = 1; j < xk.size(); ++j) {
            const double pair = fv[2 * j - 1][c] + fv[2 * j][c];
            kronrod += wk[j] * pair;
            abs_sum += wk[j] * (std::abs(fv[2 * j - 1][c]) + std::abs(fv[2 * j][c]));
            // Gauss nodes sit at the odd Kronrod indices.
            if (j % 2 == 0) gauss += wg[j / 2] * pair;
        }
        const double mean = 0.5 * kronrod;
        double asc = wk[0] * std::abs(fv[0][c] - mean);
        for (std::size_t j = 1; j < xk.size(); ++j)
            asc += wk[j] * (std::abs(fv[2 * j - 1][c] - mean) + std::abs(fv[2 * j][c] - mean));

        kronrod *= half;
        gauss *= half;
        abs_sum *= std::abs(half);
        asc *= std::abs(half);

        double err = std::abs(kronrod - gauss);
        if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
        const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum;
        panel.value[c] = kronrod;
        panel.error[c] = std::max(err, roundoff);
    }
    return panel;
}

template <std::size_t N>
bool within_tolerance(const std::array<double, N>& value, const std::array<double, N>& error, const Options& opts) {
    for (std::size_t c = 0; c < N; ++c)
        if (error[c] > std::max(opts.abs_tol, opts.rel_tol * std::abs(value[c]))) return false;
    return true;
}

} // namespace

template <std::size_t N>
Result<N> integrate(const Integrand<N>& f, std::span<const double> points, const Options& opts) {
    Result<N> result;
    std::priority_queue<Panel<N>> queue;
    std::array<double, N> total{};
    std::array<double, N> total_err{};

    auto push = [&](Panel<N> p) {
        for (std::size_t c = 0; c < N; ++c) {
            total[c] += p.value[c];
            total_err[c] += p.error[c];
        }
        result.evaluations += 15;
        queue.push(std::move(p));
    };

    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (points[i + 1] > points[i]) push(evaluate(f, points[i], points[i + 1]));

    std::size_t panels = queue.size();
    while (!queue.empty() && !within_tolerance(total, total_err, opts)) {
        if (panels >= opts.max_intervals) break;
        Panel<N> worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval cannot be split further
        queue.pop();
        for (std::size_t c = 0; c < N; ++c) {
            total[c] -= worst.value[c];
            total_err[c] -= worst.error[c];
        }
        push(evaluate(f, worst.a, mid));
        push(evaluate(f, mid, worst.b));
        ++panels;
    }

    // Re-sum from the panels to avoid drift from the running subtraction.
    total = {};
    total_err = {};
    while (!queue.empty()) {
        const auto& p = queue.top();
        for (std::size_t c = 0; c < N; ++c) {
            total[c] += p.value[c];
            total_err[c] += p.error[c];
        }
        queue.pop();
    }
    result.value = total;
    result.error = *std::max_element(total_err.begin(), total_err.end());
    result.converged = within_tolerance(total, total_err, opts);
    return result;
}

template <std::size_t N>
Result<N> integrate_upper_tail(const Integrand<N>& f, double a, double scale, const Options& opts) {
    Integrand<N> mapped = [&](double s) {
        const double one_minus = 1.0 - s;
        const double nu = a + scale * s / one_minus;
        const double jac = scale / (one_minus * one_minus);
        auto v = f(nu);
        for (auto& x : v) x = std::isfinite(nu) ? x * jac : 0.0;
        return v;
    };
    const std::array<double, 2> unit{0.0, 1.0};
    return integrate<N>(mapped, unit, opts);
}

Result<1> integrate(const std::function<double(double)>& f, std::span<const double> points, const Options& opts) {
    Integrand<1> g = [&](double x) { return std::array<double, 1>{f(x)}; };
    return integrate<1>(g, points, opts);
}

Result<1> integrate(const std::function<double(double)>& f, double a, double b, const Options& opts) {
    const std::array<double, 2> pts{a, b};
    return integrate(f, std::span<const double>(pts), opts);
}

Result<1> integrate_upper_tail(const std::function<double(double)>& f, double a, double scale, const Options& opts) {
    Integrand<1> g = [&](double x) { return std::array<double, 1>{f(x)}; };
    return integrate_upper_tail<1>(g, a, scale, opts);
}

template Result<1> integrate<1>(const Integrand<1>&, std::span<const double>, const Options&);
template Result<2> integrate<2>(const Integrand<2>&, std::span<const double>, const Options&);
template Result<3> integrate<3>(const Integrand<3>&, std::span<const double>, const Options&);
template Result<1> integrate_upper_tail<1>(const Integrand<1>&, double, double, const Options&);
template Result<2> integrate_upper_tail<2>(const Integrand<2>&, double, double, const Options&);
template Result<3> integrate_upper_tail<3>(const Integrand<3>&, double, double, const Options&);

} // namespace dho::quad
