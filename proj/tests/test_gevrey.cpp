#include <doctest.h>

#include <cmath>
#include <functional>

#include "zkflat/gevrey.hpp"

using namespace zkflat;

namespace {

BumpParams bp(double s = 1.6, double m = 1.0) { return BumpParams{s, m, 0.4, 1.0, 40}; }

// Richardson-extrapolated central first derivative (error ~ h^4 + eps/h).
double fd1(const std::function<double(double)>& f, double x, double h = 5e-4) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace

TEST_CASE("bump piecewise values") {
    const BumpParams p = bp();
    CHECK(bump(p, -0.3) == 1.0);
    CHECK(bump(p, 0.0) == 1.0);
    CHECK(bump(p, 1.0) == 0.0);
    CHECK(bump(p, 1.7) == 0.0);
    CHECK(bump(p, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    // symmetry oracle at rho = 1/4
    CHECK(bump(p, 0.25) + bump(p, 0.75) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("partition identity across the support") {
    const BumpParams p = bp();
    for (int m = 0; m <= 200; ++m) {
        const double rho = -0.2 + 1.4 * m / 200.0;
        CHECK(std::fabs(bump(p, rho) + bump(p, 1.0 - rho) - 1.0) <= 1e-14);
    }
}

TEST_CASE("bump derivatives vanish outside the support") {
    const BumpParams p = bp();
    for (int order : {0, 1, 2, 3, 7}) {
        if (order > 0) {
            CHECK(bump_deriv(p, -0.1, order) == 0.0);
            CHECK(bump_deriv(p, 0.0, order) == 0.0);
            CHECK(bump_deriv(p, 1.0, order) == 0.0);
            CHECK(bump_deriv(p, 1.4, order) == 0.0);
        }
    }
}

TEST_CASE("bump derivative chain against finite differences") {
    const BumpParams p = bp();
    for (int order = 1; order <= 4; ++order) {
        for (double rho : {0.2, 0.35, 0.5, 0.65, 0.8}) {
            const double jet_val = bump_deriv(p, rho, order);
            const double fd_val =
                fd1([&](double r) { return bump_deriv(p, r, order - 1); }, rho);
            CHECK(std::fabs(jet_val - fd_val) <= 1e-8 * std::max(1.0, std::fabs(jet_val)));
        }
    }
}

TEST_CASE("odd/even derivative symmetry") {
    // phi(rho) + phi(1-rho) = 1 differentiates to
    // phi^(p)(rho) = -(-1)^p phi^(p)(1-rho)
    const BumpParams p = bp();
    for (int order = 1; order <= 5; ++order) {
        const double lhs = bump_deriv(p, 0.3, order);
        const double rhs = -std::pow(-1.0, order) * bump_deriv(p, 0.7, order);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("step profile and chain-rule scaling") {
    const BumpParams p = bp();
    CHECK(step_deriv(p, 0.1, 0) == 1.0);
    for (int order = 1; order <= 6; ++order) {
        CHECK(step_deriv(p, 0.1, order) == 0.0);  // t < tau
        CHECK(step_deriv(p, 1.2, order) == 0.0);  // t > T
    }
    CHECK(step_deriv(p, 1.2, 0) == 0.0);

    // halving T - tau multiplies the order-n derivative at matched rho by 2^n
    // (rho = 0.3: even orders do not vanish there)
    BumpParams half = p;
    half.t_final = p.tau + 0.5 * (p.t_final - p.tau);
    for (int order = 1; order <= 5; ++order) {
        const double base = step_deriv(p, p.tau + 0.3 * (p.t_final - p.tau), order);
        const double scaled = step_deriv(half, p.tau + 0.3 * (half.t_final - p.tau), order);
        CHECK(scaled == doctest::Approx(std::pow(2.0, order) * base).epsilon(1e-12));
    }
}

TEST_CASE("empirical Gevrey growth of the bump is finite") {
    const BumpParams p = bp(1.6, 1.0);
    // fit log sup |phi^(p)| ~ s log p! - p log R: report-style sanity
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (int order = 4; order <= 20; ++order) {
        double sup = 0.0;
        for (int m = 1; m < 64; ++m)
            sup = std::max(sup, std::fabs(bump_deriv(p, m / 64.0, order)));
        REQUIRE(sup > 0.0);
        const double v = p.s * std::lgamma(order + 1.0) - std::log(sup);
        sx += order;
        sy += v;
        sxx += static_cast<double>(order) * order;
        sxy += order * v;
        ++cnt;
    }
    const double log_r = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(std::isfinite(log_r));
    CHECK(std::exp(log_r) > 0.0);
}

TEST_CASE("interpolant with only d_0") {
    const GevreyInterpolant f = borel_interpolate({2.5}, 0.0, 1.0, 1.0);
    CHECK(f.deriv(1.0, 0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(f.deriv(1.0, 0) == 2.5);
}

TEST_CASE("zero sequence gives the zero function") {
    const GevreyInterpolant f = borel_interpolate({0.0, 0.0, 0.0}, 1.0, 2.0, 0.0);
    for (double x : {-0.5, -0.1, 0.0, 0.2})
        for (int q = 0; q <= 2; ++q) CHECK(f.deriv(x, q) == 0.0);
}

TEST_CASE("interpolant matches a factorially growing sequence at the anchor") {
    const double h = 0.2;
    std::vector<double> d(11);
    for (int q = 0; q <= 10; ++q)
        d[q] = (q % 2 == 0 ? 1.0 : -1.0) * std::pow(h, q) * factorial(2 * q) * 0.7;
    const double h_tilde = h * std::exp(std::exp(-1.0)) * 1.25;
    const GevreyInterpolant f = borel_interpolate(d, h, h_tilde, 1.0);
    const Jet at = f.eval_jet(1.0, 10);
    for (int q = 0; q <= 10; ++q) {
        const double got = at.derivative(q);
        CHECK(std::fabs(got - d[q]) <= 1e-8 * std::max(1.0, std::fabs(d[q])));
    }
    // growth envelope is finite over samples
    std::vector<double> xs;
    for (int m = 0; m <= 100; ++m) xs.push_back(1.0 - 1.5 * m / 100.0);
    const double c = f.growth_constant(xs, 12);
    CHECK(std::isfinite(c));
    CHECK(c >= f.fitted_c() * 0.99);
}

TEST_CASE("interpolant support is bounded") {
    const GevreyInterpolant f = borel_interpolate({1.0, 0.5, 0.25}, 0.3, 0.6, 0.0);
    const double rho0 = 0.36787944117144233 / 0.6;
    for (double x : {rho0 + 0.01, 2.0, -rho0 - 0.01})
        for (int q = 0; q <= 3; ++q) CHECK(f.deriv(x, q) == 0.0);
}

TEST_CASE("interpolate rejects inconsistent growth constants") {
    CHECK_THROWS_AS(borel_interpolate({1.0, 1.0}, 1.0, 1.0, 0.0), Error); // H_tilde too small
    CHECK_THROWS_AS(borel_interpolate({1.0, 1.0}, 0.0, 1.0, 0.0), Error); // H = 0, d_1 != 0
}
