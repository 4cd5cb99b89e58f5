// End-to-end exercises of the cfwp binary: exit codes, report files, CSV
// emission, --set overrides and the CFWP_WINDOW environment variable.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#ifndef CFWP_BIN
#error "CFWP_BIN must point at the cfwp executable"
#endif
#ifndef CFWP_CONFIG_DIR
#error "CFWP_CONFIG_DIR must point at the bundled configs"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(CFWP_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) res.output.append(buf, n);
    int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

std::string config(const char* name) {
    return std::string(CFWP_CONFIG_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("check: exit codes follow the report") {
    CHECK(run("check --config " + config("iwai-katayama.json") + " --out /tmp/cli_check.json")
              .exit_code == 0);
    CHECK(slurp("/tmp/cli_check.json").find("\"holds\"") != std::string::npos);

    CHECK(run("check --config " + config("euclidean-halfslope.json")).exit_code == 2);

    std::ofstream("/tmp/cli_bad.json") << "{ not json";
    CHECK(run("check --config /tmp/cli_bad.json").exit_code == 64);
    CHECK(run("check --config /tmp/no_such_file.json").exit_code == 74);
}

TEST_CASE("solve-mode: verdict JSON and trajectory CSVs") {
    auto r = run("solve-mode --config " + config("euclidean.json") +
                 " --out /tmp/cli_mode.json --csv-dir /tmp/cli_csvs");
    CHECK(r.exit_code == 0);
    std::string verdict = slurp("/tmp/cli_mode.json");
    CHECK(verdict.find("\"no-L2\"") != std::string::npos);

    std::string csv = slurp("/tmp/cli_csvs/trajectory_0.csv");
    CHECK(csv.rfind("t,U,W\n", 0) == 0);

    // lambda = 0: no bounded direction, no CSV files.
    REQUIRE(std::system("rm -rf /tmp/cli_csvs0 && mkdir -p /tmp/cli_csvs0") == 0);
    auto r0 = run("solve-mode --config " + config("euclidean.json") +
                  " --set mode.lambda=0 --csv-dir /tmp/cli_csvs0 --out /tmp/cli_mode0.json");
    CHECK(r0.exit_code == 0);
    std::string v0 = slurp("/tmp/cli_mode0.json");
    CHECK(v0.find("\"boundedDim\": 0") != std::string::npos);
    CHECK(std::system("test -e /tmp/cli_csvs0/trajectory_0.csv") != 0);

    // missing mode block
    auto rm = run("solve-mode --config " + config("euclidean.json") +
                  " --set mode=null");
    CHECK(rm.exit_code == 64);
}

TEST_CASE("lemmas and reparam") {
    CHECK(run("lemmas --config " + config("euclidean.json")).exit_code == 0);

    auto rr = run("reparam --config " + config("iwai-katayama.json") + " --out /tmp/cli_rep.csv");
    CHECK(rr.exit_code == 0);
    std::string csv = slurp("/tmp/cli_rep.csv");
    CHECK(csv.rfind("s,alpha,beta\n", 0) == 0);

    // gamma = 1: the table reproduces the original profiles.
    std::ofstream("/tmp/cli_identity.json") << R"json({
      "geometry": {"m": 1, "alpha": "t/sqrt(2)", "beta": "t", "gamma": "1",
                   "params": {},
                   "hints": {"gamma": {"type": "power", "p": 0, "coeff": 1.0}}}
    })json";
    auto ri = run("reparam --config /tmp/cli_identity.json --out /tmp/cli_rep1.csv");
    CHECK(ri.exit_code == 0);
    std::ifstream in("/tmp/cli_rep1.csv");
    std::string line;
    std::getline(in, line);  // header
    int rows = 0;
    while (std::getline(in, line) && rows < 200) {
        double s = 0, a = 0, b = 0;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &s, &a, &b) == 3);
        REQUIRE(std::abs(a - s / std::sqrt(2.0)) <= 1e-10 * std::abs(a));
        REQUIRE(std::abs(b - s) <= 1e-10 * std::abs(b));
        ++rows;
    }
    CHECK(rows > 100);

    // reparam without a gamma profile is a config error
    CHECK(run("reparam --config " + config("euclidean.json")).exit_code == 64);
}

TEST_CASE("sweep: deterministic reports, exit code, resource guard") {
    std::string small = " --set sweep.k=[-1,1] --set \"sweep.lambda=[0.5,1.4142135623730951]\"";
    auto r1 = run("sweep --config " + config("euclidean.json") + small +
                  " --out /tmp/cli_sweep1.json --jobs 2");
    CHECK(r1.exit_code == 0);
    auto r2 = run("sweep --config " + config("euclidean.json") + small +
                  " --out /tmp/cli_sweep2.json --jobs 1");
    CHECK(r2.exit_code == 0);
    CHECK(slurp("/tmp/cli_sweep1.json") == slurp("/tmp/cli_sweep2.json"));

    auto rempty = run("sweep --config " + config("euclidean.json") +
                      " --set sweep.lambda=[]");
    CHECK(rempty.exit_code == 70);  // ResourceLimit surfaces as a generic error
}

TEST_CASE("CFWP_WINDOW environment override") {
    std::string cmd = std::string("CFWP_WINDOW=bogus ") + CFWP_BIN + " check --config " +
                      config("euclidean.json") + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 64);

    std::string ok = std::string("CFWP_WINDOW=1e-6,1e4 ") + CFWP_BIN + " check --config " +
                     config("euclidean.json") + " >/dev/null 2>&1";
    int status2 = std::system(ok.c_str());
    CHECK(WEXITSTATUS(status2) == 0);
}
