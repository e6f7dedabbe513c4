#include <doctest.h>

#include <cmath>
#include <random>

#include "zkflat/basis.hpp"

using namespace zkflat;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

Grid default_grid(int j_max = 4, int ny = 33) {
    Params p;
    p.j_max = j_max;
    p.ny = ny;
    p.nx = 32;
    p.nt = 16;
    return Grid::make(p);
}
} // namespace

TEST_CASE("eigenvalues and eigenfunctions") {
    const TransverseBasis b = make_basis(4);
    CHECK(b.lambda(1) == doctest::Approx(kPi * kPi).epsilon(1e-14));
    CHECK(b.lambda(1) == doctest::Approx(9.8696044).epsilon(1e-7));
    CHECK(b.eval(1, 0.0) == 0.0);
    CHECK(b.eval(3, 1.0) == 0.0);
    // e_2(1/4) = sqrt(2) sin(pi/2) = sqrt(2)
    CHECK(b.eval(2, 0.25) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(make_basis(0), Error);
}

TEST_CASE("basis orthonormality under grid quadrature") {
    const int j_max = 10;
    Params p;
    p.j_max = j_max;
    p.ny = 41;
    p.nx = 32;
    p.nt = 16;
    const Grid g = Grid::make(p);
    const TransverseBasis b = make_basis(j_max);
    const std::vector<double> w = quadrature_weights(g.y, AxisKind::Uniform);
    for (int j = 1; j <= j_max; ++j)
        for (int k = j; k <= j_max; ++k) {
            double acc = 0.0;
            for (int m = 0; m < g.ny(); ++m)
                acc += w[m] * b.eval(j, g.y[m]) * b.eval(k, g.y[m]);
            const double expected = (j == k) ? 1.0 : 0.0;
            CHECK(std::fabs(acc - expected) <= 1e-10);
        }
}

TEST_CASE("sine_analyze picks out modes") {
    const Grid g = default_grid();
    const TransverseBasis b = make_basis(4);
    std::vector<double> f(g.ny());
    for (int m = 0; m < g.ny(); ++m) f[m] = b.eval(3, g.y[m]);
    const std::vector<double> c = sine_analyze(f, g.y, b);
    CHECK(c[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(c[0]) <= 1e-12);
    CHECK(std::fabs(c[1]) <= 1e-12);
    CHECK(std::fabs(c[3]) <= 1e-12);

    std::fill(f.begin(), f.end(), 0.0);
    for (double v : sine_analyze(f, g.y, b)) CHECK(v == 0.0);
}

TEST_CASE("sine_analyze of y(1-y) against the exact integral") {
    // int_0^1 y(1-y) sqrt(2) sin(pi y) dy = 4 sqrt(2) / pi^3
    const Grid g = default_grid(1, 65);
    const TransverseBasis b = make_basis(1);
    std::vector<double> f(g.ny());
    for (int m = 0; m < g.ny(); ++m) f[m] = g.y[m] * (1.0 - g.y[m]);
    const std::vector<double> c = sine_analyze(f, g.y, b);
    const double exact = 4.0 * std::sqrt(2.0) / (kPi * kPi * kPi);
    CHECK(c[0] == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("sine transform round trip on band-limited data") {
    const Grid g = default_grid(6, 41);
    const TransverseBasis b = make_basis(6);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> c(6);
        for (double& v : c) v = dist(rng);
        const std::vector<double> f = sine_synthesize(c, g.y, b);
        const std::vector<double> back = sine_analyze(f, g.y, b);
        for (int j = 0; j < 6; ++j) CHECK(std::fabs(back[j] - c[j]) <= 1e-12);
    }
}

TEST_CASE("sine_analyze aliasing guard") {
    Params p;
    p.j_max = 8;
    p.ny = 15; // < 2*8+1
    p.nx = 32;
    p.nt = 16;
    p.a = 1.0;
    const TransverseBasis b = make_basis(8);
    std::vector<double> y(15), f(15, 0.0);
    for (int m = 0; m < 15; ++m) y[m] = m / 14.0;
    CHECK_THROWS_AS(sine_analyze(f, y, b), Error);
}

TEST_CASE("l2_norm basics") {
    const Grid g = default_grid();
    const TransverseBasis b = make_basis(4);

    Field zero = Field::zeros2d(g);
    CHECK(l2_norm(zero) == 0.0);

    // f(x, y) = e_1(y): ||f||^2 = int_{-1}^0 dx int_0^1 e_1^2 dy = 1
    Field f = Field::zeros2d(g);
    for (int ix = 0; ix < g.nx(); ++ix)
        for (int iy = 0; iy < g.ny(); ++iy) f.at(ix, iy) = b.eval(1, g.y[iy]);
    CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-10));

    // homogeneity and triangle inequality on random fields
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field u = Field::zeros2d(g), v = Field::zeros2d(g), sum = Field::zeros2d(g);
    for (size_t m = 0; m < u.values.size(); ++m) {
        u.values[m] = dist(rng);
        v.values[m] = dist(rng);
        sum.values[m] = u.values[m] + v.values[m];
    }
    Field scaled = u;
    for (double& x : scaled.values) x *= -2.5;
    CHECK(l2_norm(scaled) == doctest::Approx(2.5 * l2_norm(u)).epsilon(1e-12));
    CHECK(l2_norm(sum) <= l2_norm(u) + l2_norm(v) + 1e-12);
}
