#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>

#include "zkflat/io.hpp"

#ifndef ZKFLAT_CLI_PATH
#define ZKFLAT_CLI_PATH "zkflat"
#endif

using namespace zkflat;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("zkflat_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ofstream ini(dir / "run.ini");
        ini << "[params]\n"
               "a = 1.0\nT = 0.5\ntau = 0.2\ns = 1.6\nM = 1.0\n"
               "imax = 5\njmax = 2\nnx = 32\nny = 33\nnt = 200\n"
               "[run]\n"
               "u0 = x*(x+1)*sin(pi*y)\n"
               "target = 0,1,1.0\n"
               "tol_terminal = 1e-3\n";
    }
    ~Sandbox() { fs::remove_all(dir); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(ZKFLAT_CLI_PATH) + " " + args +
                                " > " + (dir / "stdout.txt").string() + " 2>&1";
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    }
    std::string ini() const { return (dir / "run.ini").string(); }
    std::string out(const std::string& name) const { return (dir / name).string(); }
};

} // namespace

TEST_CASE("gentable emits deterministic artifacts") {
    Sandbox sb;
    REQUIRE(sb.run("gentable --config " + sb.ini() + " --out " + sb.out("t1")) == 0);
    REQUIRE(sb.run("gentable --config " + sb.ini() + " --out " + sb.out("t2")) == 0);
    CHECK(read_text(sb.out("t1/table.json")) == read_text(sb.out("t2/table.json")));
    CHECK(read_text(sb.out("t1/bound_report.json")) ==
          read_text(sb.out("t2/bound_report.json")));
}

TEST_CASE("gentable strict mode flags injected faults") {
    Sandbox sb;
    CHECK(sb.run("gentable --config " + sb.ini() + " --strict --out " + sb.out("ok")) == 0);
    CHECK(sb.run("gentable --config " + sb.ini() + " --strict --inject-fault 2,1,1e3 --out " +
                 sb.out("bad")) == 2);
}

TEST_CASE("config validation failures exit 1") {
    Sandbox sb;
    CHECK(sb.run("null --config " + sb.ini() + " --tau 0.9 --T 0.5 --out " +
                 sb.out("x")) == 1);
    CHECK(sb.run("null --config " + sb.ini() + " --u0 'x*(x+1)*sin(pi*' --out " +
                 sb.out("x")) == 1);
}

TEST_CASE("null and reach pipelines succeed and stay deterministic") {
    Sandbox sb;
    REQUIRE(sb.run("null --config " + sb.ini() + " --out " + sb.out("n1")) == 0);
    REQUIRE(sb.run("null --config " + sb.ini() + " --out " + sb.out("n2")) == 0);
    CHECK(read_text(sb.out("n1/control.csv")) == read_text(sb.out("n2/control.csv")));
    CHECK(read_text(sb.out("n1/summary.json")) == read_text(sb.out("n2/summary.json")));

    REQUIRE(sb.run("reach --config " + sb.ini() + " --out " + sb.out("r1")) == 0);

    // impossible tolerance turns into exit 3
    CHECK(sb.run("reach --config " + sb.ini() + " --tol-terminal 1e-18 --out " +
                 sb.out("r2")) == 3);
}

TEST_CASE("simulate consumes an exported control") {
    Sandbox sb;
    REQUIRE(sb.run("null --config " + sb.ini() + " --out " + sb.out("n")) == 0);
    CHECK(sb.run("simulate --config " + sb.ini() + " --control " +
                 sb.out("n/control.csv") + " --out " + sb.out("s")) == 0);
    const CsvTable t = read_csv(sb.out("s/terminal.csv"));
    CHECK(t.columns == std::vector<std::string>{"x", "y", "value"});
    CHECK(t.rows.size() == 32 * 33);
}

TEST_CASE("plotdata emits tidy views and fails on missing artifacts") {
    Sandbox sb;
    REQUIRE(sb.run("null --config " + sb.ini() + " --out " + sb.out("n")) == 0);
    CHECK(sb.run("plotdata --kind control --in " + sb.out("n/control.csv") +
                 " --out-file " + sb.out("c.csv")) == 0);
    CHECK(sb.run("plotdata --kind norms --in " + sb.out("n/summary.json") +
                 " --out-file " + sb.out("nh.csv")) == 0);
    CHECK(sb.run("plotdata --kind norms --in " + sb.out("nope.json") + " --out-file " +
                 sb.out("x.csv")) == 1);
    const CsvTable c = read_csv(sb.out("c.csv"));
    CHECK(c.columns == std::vector<std::string>{"t", "y", "h"});
}

TEST_CASE("bounds reports fitted constants with provenance") {
    Sandbox sb;
    REQUIRE(sb.run("bounds --config " + sb.ini() + " --out " + sb.out("b")) == 0);
    const std::string rep = read_text(sb.out("b/report.json"));
    CHECK(rep.find("\"provenance\": \"fitted\"") != std::string::npos);
    CHECK(rep.find("\"provenance\": \"measured\"") != std::string::npos);
    CHECK(rep.find("config_hash") != std::string::npos);
}

TEST_CASE("bounds flags a corrupted table artifact") {
    Sandbox sb;
    REQUIRE(sb.run("gentable --config " + sb.ini() + " --out " + sb.out("t")) == 0);
    nlohmann::json doc = nlohmann::json::parse(read_text(sb.out("t/table.json")));
    doc["entries"][3]["coeffs"][4] = 99999.0; // far past the sup bound
    write_text(sb.out("t/table_bad.json"), doc.dump(2) + "\n");
    CHECK(sb.run("bounds --config " + sb.ini() + " --table " + sb.out("t/table_bad.json") +
                 " --out " + sb.out("bb")) == 2);
}
