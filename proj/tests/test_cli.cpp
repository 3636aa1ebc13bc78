#include "kemeny/matrix_market.hpp"
#include "kemeny/run.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <string>

using namespace kemeny;
using namespace kemeny::testing;

namespace {

std::string temp_mtx(const std::string& stem, const SpMat& m) {
    const std::string path = std::string("/tmp/kemeny_test_") + stem + ".mtx";
    write_matrix_market(path, m);
    return path;
}

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(KEMENY_CLI_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

} // namespace

TEST_CASE("run(): uniform chain resolves to kappa = n - 1 under auto dispatch") {
    const Index n = 100;
    const std::string path = temp_mtx("uniform", uniform_chain(n).matrix());
    RunConfig cfg;
    cfg.input_path = path;
    cfg.kind = InputKind::Transition;
    cfg.method = RunMethod::Auto;
    const RunReport rep = run(cfg);
    CHECK(rep.result.kappa == doctest::Approx(99.0).epsilon(1e-10));
    CHECK(rep.n == n);
    std::remove(path.c_str());
}

TEST_CASE("run(): adjacency weights binarize unless kept") {
    // Triangle plus a pendant vertex, one heavy edge. Binarized kappa is
    // 61/24, weighted (w = 5 on the heavy edge) is 525/176; verified densely.
    SpMat a(4, 4);
    std::vector<Eigen::Triplet<double>> t{
        {0, 1, 5.0}, {1, 0, 5.0}, {1, 2, 1.0}, {2, 1, 1.0},
        {0, 2, 1.0}, {2, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}};
    a.setFromTriplets(t.begin(), t.end());
    const std::string path = temp_mtx("weights", a);

    RunConfig cfg;
    cfg.input_path = path;
    cfg.kind = InputKind::Adjacency;
    const RunReport binarized = run(cfg);

    cfg.keep_weights = true;
    const RunReport weighted = run(cfg);
    CHECK(binarized.result.kappa == doctest::Approx(61.0 / 24.0).epsilon(1e-12));
    CHECK(weighted.result.kappa == doctest::Approx(525.0 / 176.0).epsilon(1e-12));
    std::remove(path.c_str());
}

TEST_CASE("run(): reducible inputs error without the flag, recover with it") {
    SpMat a(4, 4);
    std::vector<Eigen::Triplet<double>> t{
        {0, 1, 1.0}, {1, 0, 1.0},          // component of size 2
        {2, 3, 1.0}, {3, 2, 1.0},          // another of size 2
        {0, 2, 1.0}};                      // one-way bridge: still reducible
    a.setFromTriplets(t.begin(), t.end());
    const std::string path = temp_mtx("reducible", a);

    RunConfig cfg;
    cfg.input_path = path;
    cfg.kind = InputKind::Adjacency;
    CHECK_THROWS_AS(run(cfg), ReducibleChainError);

    cfg.take_largest_scc = true;
    const RunReport rep = run(cfg);
    CHECK(rep.largest_scc_used);
    CHECK(rep.n == 2);
    CHECK(rep.original_n == 4);
    std::remove(path.c_str());
}

TEST_CASE("auto_dispatch picks structure, then size, then sparsity") {
    RunConfig cfg;

    // Bipartite zero-diagonal pattern.
    Eigen::MatrixXd bip(4, 4);
    bip.setZero();
    bip.topRightCorner(2, 2).setConstant(0.5);
    bip.bottomLeftCorner(2, 2).setConstant(0.5);
    CHECK(auto_dispatch(StochasticMatrix::from_dense(bip), cfg) == RunMethod::ClosedForm);

    // Dense-feasible generic chain.
    std::mt19937_64 rng(269);
    CHECK(auto_dispatch(random_chain(rng, 100, 0.3), cfg) == RunMethod::Direct);

    // Large asymmetric chain: divide and conquer.
    cfg.dense_limit = 64;
    CHECK(auto_dispatch(random_chain(rng, 200, 0.05), cfg) == RunMethod::Dnc);

    // Large symmetric chain with the coarse flag: hutch++.
    cfg.coarse = true;
    const StochasticMatrix grid = build_from_graph(grid_adjacency(12),
                                                   GraphNormalization::SymmetricNormalized);
    CHECK(auto_dispatch(grid, cfg) == RunMethod::HutchPP);
}

TEST_CASE("cli: deterministic serialized output for identical config and seed") {
    const StochasticMatrix grid = build_from_graph(grid_adjacency(10),
                                                   GraphNormalization::SymmetricNormalized);
    const std::string path = temp_mtx("grid", grid_adjacency(10));
    const std::string args = path + " --normalize sym --method hutchpp --seed 42 --json";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.find("\"schema_version\"") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("cli: reducible input exits nonzero with the component count") {
    SpMat a(3, 3);
    std::vector<Eigen::Triplet<double>> t{{0, 1, 1.0}, {1, 0, 1.0}, {2, 2, 1.0}};
    a.setFromTriplets(t.begin(), t.end());
    const std::string path = temp_mtx("cli_reducible", a);
    const CliResult r = run_cli(path);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("2 strongly connected components") != std::string::npos);

    const CliResult ok = run_cli(path + " --largest-scc");
    CHECK(ok.exit_code == 0);
    std::remove(path.c_str());
}

TEST_CASE("cli: method selection flows through to the report") {
    const std::string path = temp_mtx("cli_uniform", uniform_chain(60).matrix());
    const CliResult r = run_cli(path + " --kind transition --method direct --csv");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("direct") != std::string::npos);
    CHECK(r.output.find("59") != std::string::npos);
    std::remove(path.c_str());
}
