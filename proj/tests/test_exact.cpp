// test_exact.cpp: exact propagator and covariance tests

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dho/errors.hpp"
#include "dho/exact.hpp"
#include "oracles.hpp"

using namespace dho;

namespace {

struct StableSet {
    double omega_sq, coupling, cutoff;
};

std::vector<StableSet> random_propagator_sets(std::uint64_t seed, int count, bool stable_only) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lam(0.0, 0.5), cut(0.5, 200.0), extra(-5.0, 20.0);
    std::vector<StableSet> out;
    while (static_cast<int>(out.size()) < count) {
        const double l = lam(rng), c = cut(rng);
        const double w2 = l * c + extra(rng);
        if (w2 <= 0.0) continue;
        if (stable_only && w2 <= l * c) continue;
        out.push_back({w2, l, c});
    }
    return out;
}

double cubic(const Propagator& p, std::complex<double> s) {
    return std::abs((s * s + p.omega_sq()) * (s + p.cutoff()) - p.coupling() * p.cutoff() * p.cutoff());
}

} // namespace

TEST_SUITE("exact") {

TEST_CASE("cubic solver against the companion matrix") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        const double a2 = u(rng), a1 = u(rng), a0 = u(rng);
        auto roots = solve_monic_cubic(a2, a1, a0);
        auto ref = oracle::companion_roots(a2, a1, a0);
        const double scale = 1.0 + std::abs(a2) + std::abs(a1) + std::abs(a0);
        for (const auto& r : roots) {
            double best = 1e300;
            for (const auto& q : ref) best = std::min(best, std::abs(r - q));
            CHECK(best < 1e-8 * scale);
        }
    }
    // Three real roots 1, 2, 3 and a repeated one.
    auto r = solve_monic_cubic(-6.0, 11.0, -6.0);
    std::vector<double> re{r[0].real(), r[1].real(), r[2].real()};
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(1.0));
    CHECK(re[1] == doctest::Approx(2.0));
    CHECK(re[2] == doctest::Approx(3.0));
}

TEST_CASE("zero coupling factorises the cubic") {
    const Propagator p(4.0, 0.0, 100.0);
    std::vector<std::complex<double>> r(p.roots().begin(), p.roots().end());
    std::sort(r.begin(), r.end(), [](auto a, auto b) { return a.imag() < b.imag(); });
    CHECK(std::abs(r[0] - std::complex<double>(0, -2)) < 1e-12);
    CHECK(std::abs(r[1] - std::complex<double>(-100, 0)) < 1e-10);
    CHECK(std::abs(r[2] - std::complex<double>(0, 2)) < 1e-12);
    for (double t : {0.0, 0.3, 1.7, 25.0}) CHECK(p.g(t) == doctest::Approx(std::sin(2 * t) / 2).epsilon(1e-12));
}

TEST_CASE("stability of the canonical and sub-critical sets") {
    const auto stable = characteristic_roots(11.0, 0.1, 100.0);
    CHECK(stable.stable());
    CHECK(stable.max_real_part() < 0.0);
    const auto unstable = characteristic_roots(9.0, 0.1, 100.0);
    CHECK_FALSE(unstable.stable());
    bool positive_real_root = false;
    for (const auto& s : unstable.roots()) positive_real_root |= (s.imag() == 0.0 && s.real() > 0.0);
    CHECK(positive_real_root);
    for (const auto& s : stable.roots()) {
        double best = 1e300;
        for (const auto& q : oracle::companion_roots(100.0, 11.0, 100.0 * (11.0 - 10.0))) best = std::min(best, std::abs(s - q));
        CHECK(best < 1e-10);
    }
}

TEST_CASE("residue identities and the stability criterion on random sets") {
    for (const auto& s : random_propagator_sets(100, 100, false)) {
        const Propagator p(s.omega_sq, s.coupling, s.cutoff);
        std::complex<double> sum0 = 0.0, sum1 = 0.0;
        for (int k = 0; k < 3; ++k) {
            sum0 += p.residues()[k];
            sum1 += p.residues()[k] * p.roots()[k];
            CHECK(cubic(p, p.roots()[k]) < 1e-9 * (1 + s.cutoff * s.omega_sq));
        }
        CHECK(std::abs(sum0) < 1e-10);
        CHECK(std::abs(sum1 - 1.0) < 1e-10);
        CHECK(p.stable() == (s.omega_sq > s.coupling * s.cutoff));
    }
}

TEST_CASE("propagator at t = 0 is the identity and g is real") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> tt(0.0, 100.0);
    for (const auto& s : random_propagator_sets(7, 30, true)) {
        const Propagator p(s.omega_sq, s.coupling, s.cutoff);
        const auto g0 = p.g_derivatives(0.0);
        CHECK(std::abs(g0[0]) < 1e-12);
        CHECK(std::abs(g0[1] - 1.0) < 1e-12);
        CHECK(p.matrix(0.0).isApprox(Eigen::Matrix2d::Identity(), 1e-12));
        for (int i = 0; i < 10; ++i) {
            const double t = tt(rng);
            std::complex<double> g = 0.0;
            for (int k = 0; k < 3; ++k) g += p.residues()[k] * std::exp(p.roots()[k] * t);
            CHECK(std::abs(g.imag()) < 1e-12);
        }
    }
}

TEST_CASE("g solves the integro-differential equation") {
    // g'' = -w^2 g + int_0^t chi(t-u) g(u) du with chi(t) = lambda Lambda^2 e^{-Lambda t}
    const Propagator p(11.0, 0.1, 100.0);
    const double t = 0.8, lam = 0.1, cut = 100.0;
    double conv = 0.0;
    const int n = 20000;
    const double h = t / n;
    for (int i = 0; i <= n; ++i) {
        const double u = i * h;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        conv += w * lam * cut * cut * std::exp(-cut * (t - u)) * p.g(u);
    }
    conv *= h;
    const auto d = p.g_derivatives(t);
    CHECK(d[2] == doctest::Approx(-11.0 * d[0] + conv).epsilon(1e-4));
}

TEST_CASE("frequency response: direct and partial-fraction paths agree") {
    const auto p = characteristic_roots(11.0, 0.1, 100.0);
    CHECK(std::abs(p.g_hat(0.0) - 1.0 / (11.0 - 10.0)) < 1e-14);
    for (int i = 0; i < 1000; ++i) {
        const double w = -500.0 + i;
        const auto a = p.g_hat(w), b = p.g_hat_residues(w);
        CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
    }
    const Propagator free(4.0, 0.0, 10.0);
    CHECK(std::abs(free.g_hat(1.999) * (4.0 - 1.999 * 1.999) - 1.0) < 1e-9);
}

TEST_CASE("near-degenerate roots switch to the state-space embedding") {
    // (s^2 + w^2)(s + 1) - 0.1 has a double real root near s = -0.0561 at this w^2.
    const double w2 = 0.10279621666656079;
    const Propagator near(w2 * (1.0 + 2e-15), 0.1, 1.0);
    CHECK(near.stabilised());
    const Propagator ref(w2 * (1.0 + 1e-9), 0.1, 1.0);
    CHECK_FALSE(ref.stabilised());
    CHECK(std::abs(near.g(0.0)) < 1e-14);
    CHECK(near.g_derivatives(0.0)[1] == doctest::Approx(1.0).epsilon(1e-14));
    for (double t : {0.5, 2.0, 10.0, 40.0}) {
        const auto a = near.g_derivatives(t), b = ref.g_derivatives(t);
        for (int k = 0; k < 3; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-6));
    }
    // The memory slice takes the same route.
    const Propagator::MemorySlice sa(near, 3.0), sb(ref, 3.0);
    for (double w : {0.0, 0.4, 5.0}) {
        CHECK(std::abs(sa(w).first - sb(w).first) < 1e-6);
        CHECK(std::abs(sa(w).second - sb(w).second) < 1e-6);
    }
}

TEST_CASE("embedding and residue paths agree") {
    // Force both evaluations on an ordinary set through the public interface:
    // the memory slice must give h(t, w) = int_0^t g(u) e^{i w u} du either way.
    const Propagator p(11.0, 0.1, 100.0);
    const double t = 1.3;
    const Propagator::MemorySlice slice(p, t);
    for (double w : {0.0, 0.7, 3.3, 50.0}) {
        const auto [h, hp] = slice(w);
        std::complex<double> ref = 0.0, refp = 0.0;
        const int n = 4000;
        for (int i = 0; i <= n; ++i) {
            const double u = t * i / n;
            const double wt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const auto d = p.g_derivatives(u);
            ref += wt * d[0] * std::exp(std::complex<double>(0, w * u));
            refp += wt * d[1] * std::exp(std::complex<double>(0, w * u));
        }
        ref *= t / (3.0 * n);
        refp *= t / (3.0 * n);
        CHECK(std::abs(h - ref) < 1e-9);
        CHECK(std::abs(hp - refp) < 1e-8);
        const auto parts = slice.parts(w);
        const auto phase = std::exp(std::complex<double>(0, w * t));
        CHECK(std::abs(phase * parts.a - parts.b - h) < 1e-12);
        CHECK(std::abs(phase * parts.a_p - parts.b_p - hp) < 1e-12);
    }
}

TEST_CASE("exactly repeated roots are rejected") {
    // (s + 9/8)^3: Lambda = 27/8, w^2 = 243/64, lambda = 1, all exactly representable.
    CHECK_THROWS_AS(Propagator(243.0 / 64.0, 1.0, 27.0 / 8.0), DegenerateRootsError);
}

TEST_CASE("noise spectrum") {
    ModelParams p;
    p.temperature = 2.0;
    CHECK(noise_spectrum(0.0, p) == doctest::Approx(4.0 * 0.1 * 2.0 / std::numbers::pi));
    CHECK(noise_spectrum(1e-8, p) == doctest::Approx(noise_spectrum(0.0, p)).epsilon(1e-10));
    for (double w = 0.0; w < 1e3; w += 7.3) CHECK(noise_spectrum(w, p) >= 0.0);
}

TEST_CASE("noise kernel matches a direct cosine transform") {
    ModelParams p;
    p.temperature = 1.0;
    p.cutoff = 10.0;
    const oracle::CosineMoment phi(p);
    for (double t : {0.3, 1.0, 5.0}) {
        // Phi(a) = int nu (1 - cos a w) / w^2 dw, so Phi'' = mu.
        const double h = 1e-3;
        const double ref = (phi(t + h) - 2 * phi(t) + phi(t - h)) / (h * h);
        CHECK(noise_kernel(t, p) == doctest::Approx(ref).epsilon(1e-4));
    }
    CHECK_THROWS_AS(noise_kernel(0.0, p), DomainError);
    // Large Lambda t uses the asymptotic expansion; it must join the special-function branch.
    p.temperature = 0.0;
    const double a = noise_kernel(39.999 / p.cutoff, p), b = noise_kernel(40.001 / p.cutoff, p);
    CHECK(a == doctest::Approx(b).epsilon(1e-3));
}

TEST_CASE("steady covariance limits") {
    ModelParams p;
    p.temperature = 1.0;
    p.coupling = 1e-4;
    for (double T : {0.5, 1.0, 5.0}) {
        p.temperature = T;
        const auto ex = steady_covariance(p);
        // Weak coupling with the counter term: thermal at the bare frequency, which the
        // shifted Redfield variant reproduces; the unshifted one is off at order lambda Lambda.
        ModelParams me = p;
        me.shifted = true;
        me.lamb_shift = false;
        const auto red = steady_state(me);
        CHECK(ex.xx() == doctest::Approx(red.xx()).epsilon(1e-4));
        CHECK(ex.pp() == doctest::Approx(red.pp()).epsilon(1e-4));
        const auto th = thermal_state(p.omega0 * p.omega0, T);
        CHECK(ex.xx() == doctest::Approx(th.xx()).epsilon(1e-4));
    }
    p.coupling = 0.0;
    CHECK(steady_covariance(p).xx() == doctest::Approx(thermal_state(1.0, p.temperature).xx()));

    p = ModelParams{};
    p.temperature = 100.0;
    const auto hot = steady_covariance(p);
    CHECK(hot.xx() == doctest::Approx(100.0).epsilon(1e-2));
    CHECK(hot.pp() == doctest::Approx(100.0).epsilon(1e-2));

    p.counter_term = false;
    CHECK_THROWS_AS(steady_covariance(p), UnstableError);
}

TEST_CASE("steady covariance is physical over a (T, lambda) grid") {
    ModelParams p;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            p.temperature = 0.05 * std::pow(10.0 / 0.05, i / 19.0);
            p.coupling = 1e-4 * std::pow(0.2 / 1e-4, j / 19.0);
            const auto s = steady_covariance(p, 1e-8);
            CHECK(is_physical(s).physical);
        }
}

TEST_CASE("steady covariance matches an independent infinite-range quadrature") {
    for (double T : {0.3, 1.0, 10.0}) {
        ModelParams p;
        p.temperature = T;
        const auto prop = model_propagator(p);
        auto fx = [&](double w) { return 0.5 * std::norm(prop.g_hat(w)) * noise_spectrum(w, p); };
        auto fp = [&](double w) { return w * w * fx(w); };
        // Resolve the resonance explicitly, then Boost's adaptive Gauss-Kronrod to infinity.
        double peak = 0.0, width = 1.0;
        for (const auto& s : prop.roots())
            if (s.imag() > 0.0) {
                peak = s.imag();
                width = std::abs(s.real());
            }
        using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
        auto integrate = [&](auto f) {
            double total = 0.0;
            const std::vector<double> cuts{0.0, std::max(0.5 * peak, peak - 20 * width), peak - width, peak,
                                           peak + width, peak + 20 * width, 200.0};
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += GK::integrate(f, cuts[i], cuts[i + 1], 15, 1e-12);
            return total + GK::integrate(f, 200.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
        };
        const auto s = steady_covariance(p);
        CHECK(s.xx() == doctest::Approx(integrate(fx)).epsilon(1e-8));
        CHECK(s.pp() == doctest::Approx(integrate(fp)).epsilon(1e-8));
    }
}

TEST_CASE("transient covariance starts at the initial state and relaxes") {
    ModelParams p;
    p.temperature = 10.0;
    const auto init = thermal_state(11.0, 10.0);
    const auto prop = model_propagator(p);
    const std::vector<double> grid{0.0, 10.0 / prop.slowest_rate()};
    const auto tr = transient_covariance(p, init, grid);
    CHECK(tr.gaussian(0).xx() == doctest::Approx(init.xx()).epsilon(1e-12));
    CHECK(tr.gaussian(0).pp() == doctest::Approx(init.pp()).epsilon(1e-12));
    const auto ss = steady_covariance(p);
    CHECK(tr.gaussian(1).xx() == doctest::Approx(ss.xx()).epsilon(1e-4));
    CHECK(tr.gaussian(1).pp() == doctest::Approx(ss.pp()).epsilon(1e-4));
}

TEST_CASE("transient covariance: displaced means follow G(t)") {
    ModelParams p;
    auto init = thermal_state(11.0, 1.0);
    init.mean << 1.0, -0.5;
    const std::vector<double> grid{0.0, 0.7, 3.0};
    const auto tr = transient_covariance(p, init, grid);
    const auto prop = model_propagator(p);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::Vector2d m = prop.matrix(grid[i]) * init.mean;
        CHECK(tr.gaussian(i).mean(0) == doctest::Approx(m(0)).epsilon(1e-12));
        CHECK(tr.gaussian(i).mean(1) == doctest::Approx(m(1)).epsilon(1e-12));
    }
}

TEST_CASE("memory integral matches the double time integral") {
    ModelParams p;
    p.temperature = 1.0;
    GaussianState zero;
    zero.cov.setZero();
    for (double t : {0.5, 2.0}) {
        const auto ref = oracle::double_integral_memory(p, t, 200);
        const auto tr = transient_covariance(p, zero, std::vector<double>{0.0, t});
        const auto g = tr.gaussian(1);
        CHECK(g.xx() == doctest::Approx(ref(0, 0)).epsilon(1e-3));
        CHECK(g.pp() == doctest::Approx(ref(1, 1)).epsilon(1e-3));
        CHECK(g.xp() == doctest::Approx(ref(0, 1)).epsilon(1e-3));
    }
}

TEST_CASE("transient covariance needs a stable model and a valid grid") {
    ModelParams p;
    p.counter_term = false;
    CHECK_THROWS_AS(transient_covariance(p, thermal_state(1.0, 1.0), std::vector<double>{0.0, 1.0}), UnstableError);
    p.counter_term = true;
    CHECK_THROWS_AS(transient_covariance(p, thermal_state(1.0, 1.0), std::vector<double>{1.0}), DomainError);
}

}
