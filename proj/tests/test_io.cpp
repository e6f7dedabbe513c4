#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "zkflat/expr.hpp"
#include "zkflat/io.hpp"
#include "zkflat/threads.hpp"

using namespace zkflat;
namespace fs = std::filesystem;

TEST_CASE("expression parser") {
    const Expr e = Expr::parse("x*(x+1)*sin(pi*y) + 0.5*x*(x+1)*sin(2*pi*y)");
    const double x = -0.3, y = 0.7;
    const double pi = 3.14159265358979323846;
    const double want = x * (x + 1) * std::sin(pi * y) + 0.5 * x * (x + 1) * std::sin(2 * pi * y);
    CHECK(e.eval(x, y) == doctest::Approx(want).epsilon(1e-15));

    CHECK(Expr::parse("2^3^1").eval(0, 0) == doctest::Approx(8.0));
    CHECK(Expr::parse("-x^2").eval(2, 0) == doctest::Approx(-4.0));
    CHECK(Expr::parse("exp(0)+sqrt(4)").eval(0, 0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(Expr::parse("x +"), Error);
    CHECK_THROWS_AS(Expr::parse("foo(x)"), Error);
}

TEST_CASE("fmt_double round trips") {
    for (double v : {0.0, 1.0 / 3.0, -2.5e-17, 3.14159265358979323846, 1e300, 5e-324}) {
        const std::string s = fmt_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("csv round trip with comments and LF endings") {
    const fs::path p = fs::temp_directory_path() / "zkflat_io_test.csv";
    CsvTable t;
    t.columns = {"t", "y", "h"};
    t.rows = {{0.0, 0.5, 1.0 / 3.0}, {0.1, 0.25, -2.7e-13}};
    write_csv(p.string(), t, "deadbeef");
    const std::string raw = read_text(p.string());
    CHECK(raw.find("# config_hash=deadbeef\n") == 0);
    CHECK(raw.find('\r') == std::string::npos);
    const CsvTable back = read_csv(p.string());
    CHECK(back.columns == t.columns);
    REQUIRE(back.rows.size() == t.rows.size());
    for (size_t r = 0; r < t.rows.size(); ++r)
        for (size_t c = 0; c < 3; ++c) CHECK(back.rows[r][c] == t.rows[r][c]);
    fs::remove(p);
}

TEST_CASE("config file parsing") {
    const fs::path p = fs::temp_directory_path() / "zkflat_cfg_test.ini";
    write_text(p.string(), "# comment\n[params]\na = 2.5\nnx = 48 # trailing\n[run]\nu0 = x*x\n");
    const auto kv = read_config_file(p.string());
    CHECK(kv.at("params.a") == "2.5");
    CHECK(kv.at("params.nx") == "48");
    CHECK(kv.at("run.u0") == "x*x");
    fs::remove(p);
}

TEST_CASE("control csv round trip recovers modes") {
    Params prm;
    prm.j_max = 2;
    prm.nx = 32;
    prm.ny = 33;
    prm.nt = 16;
    const Grid g = Grid::make(prm);
    const TransverseBasis basis(2);
    ControlSignal cs;
    cs.y = g.y;
    cs.t = g.t;
    cs.j_max = 2;
    cs.synthesis_type = "reach";
    cs.samples.assign(g.t.size() * g.y.size(), 0.0);
    cs.mode_coeffs.assign(g.t.size() * 2, 0.0);
    for (size_t k = 0; k < g.t.size(); ++k) {
        const double a1 = std::sin(g.t[k]), a2 = 0.25 * g.t[k];
        cs.mode_coeffs[k * 2] = a1;
        cs.mode_coeffs[k * 2 + 1] = a2;
        for (size_t iy = 0; iy < g.y.size(); ++iy)
            cs.samples[k * g.y.size() + iy] =
                a1 * basis.eval(1, g.y[iy]) + a2 * basis.eval(2, g.y[iy]);
    }
    const CsvTable t = control_to_csv(cs);
    const ControlSignal back = control_from_csv(t, 2);
    REQUIRE(back.t.size() == cs.t.size());
    double worst = 0.0;
    for (size_t k = 0; k < cs.t.size(); ++k)
        for (int j = 1; j <= 2; ++j)
            worst = std::max(worst, std::fabs(back.mode(static_cast<int>(k), j) -
                                              cs.mode(static_cast<int>(k), j)));
    CHECK(worst <= 1e-12);
}

TEST_CASE("worker count resolution honors the environment") {
    setenv("ZKFLAT_THREADS", "3", 1);
    CHECK(resolve_threads(0) == 3);
    CHECK(resolve_threads(2) == 2); // explicit request wins
    unsetenv("ZKFLAT_THREADS");
    CHECK(resolve_threads(0) == 1);
}
