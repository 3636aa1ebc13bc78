#include "kemeny/dnc.hpp"

#include "kemeny/direct.hpp"
#include "kemeny/structured.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace kemeny;
using namespace kemeny::testing;

namespace {

ThetaGamma theta_of(const StochasticMatrix& p, Index m, DncSolver solver = DncSolver::SparseLu) {
    const StationaryDistribution sd = stationary(p);
    const CensoredPair pair = stochastic_complements(p, {m}, sd);
    DncConfig cfg;
    cfg.solver = solver;
    return theta_via_solves(p, {m}, pair, cfg);
}

} // namespace

TEST_CASE("periodic chains have theta = (3/2)d - 1 and gamma = 1/2") {
    std::mt19937_64 rng(83);
    for (const int d : {2, 3, 4, 5}) {
        std::vector<Index> sizes;
        for (int i = 0; i < d; ++i) sizes.push_back(2 + static_cast<Index>(rng() % 3));
        const StochasticMatrix p = assemble_periodic(PeriodicChain(
            random_periodic_blocks(rng, sizes)));
        const ThetaGamma tg = theta_of(p, sizes[0]);
        CHECK(tg.theta == doctest::Approx(1.5 * d - 1.0).epsilon(1e-10));
        CHECK(tg.gamma == doctest::Approx(0.5).epsilon(1e-10));
    }
}

TEST_CASE("constant-row-sum blocks give theta = (2-r1)/(1-r2)") {
    std::mt19937_64 rng(89);
    const double r1 = 0.5, r2 = 0.25;
    const StochasticMatrix p = const_rowsum_chain(rng, 5, 7, r1, r2);
    const ThetaGamma tg = theta_of(p, 5);
    CHECK(tg.theta == doctest::Approx((2 - r1) / (1 - r2)).epsilon(1e-11));
    CHECK(tg.gamma == doctest::Approx(1.0 / (2 - r1 - r2)).epsilon(1e-11));
}

TEST_CASE("the solve-based theta matches the dense resolvent definition") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 8; ++trial) {
        const Index n = 20 + static_cast<Index>(rng() % 130);
        const Index m = 1 + static_cast<Index>(rng() % (n - 1));
        const StochasticMatrix p = random_chain(rng, n, 0.1);
        const StationaryDistribution sd = stationary(p);
        const CensoredPair pair = stochastic_complements(p, {m}, sd);
        const ThetaGamma tg = theta_via_solves(p, {m}, pair);
        const auto alts = theta_alternatives(p, {m}, pair.pi_hat1, pair.pi_hat2);
        CHECK(std::abs(tg.theta - alts[0]) <= 1e-8 * (1.0 + std::abs(alts[0])));
    }
}

TEST_CASE("all four theta expressions agree") {
    std::mt19937_64 rng(101);

    // Constant-row-sum instance: every expression equals the closed form.
    const double r1 = 0.35, r2 = 0.2;
    const StochasticMatrix crs = const_rowsum_chain(rng, 6, 8, r1, r2);
    {
        const StationaryDistribution sd = stationary(crs);
        const CensoredPair pair = stochastic_complements(crs, {6}, sd);
        const auto t = theta_alternatives(crs, {6}, pair.pi_hat1, pair.pi_hat2);
        for (const double v : t)
            CHECK(v == doctest::Approx((2 - r1) / (1 - r2)).epsilon(1e-10));
    }

    // Periodic d = 3: every expression equals 3.5.
    {
        const StochasticMatrix p = assemble_periodic(PeriodicChain(
            random_periodic_blocks(rng, {3, 2, 4})));
        const StationaryDistribution sd = stationary(p);
        const CensoredPair pair = stochastic_complements(p, {3}, sd);
        const auto t = theta_alternatives(p, {3}, pair.pi_hat1, pair.pi_hat2);
        for (const double v : t) CHECK(v == doctest::Approx(3.5).epsilon(1e-10));
    }

    // Random instance: mutual agreement within 1e-8.
    {
        const StochasticMatrix p = random_chain(rng, 50, 0.15);
        const StationaryDistribution sd = stationary(p);
        const CensoredPair pair = stochastic_complements(p, {20}, sd);
        const auto t = theta_alternatives(p, {20}, pair.pi_hat1, pair.pi_hat2);
        for (const double v : t) CHECK(std::abs(v - t[0]) <= 1e-8);
    }

    CHECK_THROWS_AS(theta_alternatives(random_chain(rng, 501, 0.01), {250},
                                       Vec::Ones(250), Vec::Ones(251)),
                    std::invalid_argument);
}

TEST_CASE("gamma_resolvent is invariant under the admissible (u,v) choice") {
    std::mt19937_64 rng(103);
    const Index n = 60, m = 25;
    const StochasticMatrix p = random_chain(rng, n, 0.12);
    const StationaryDistribution sd = stationary(p);

    const double g1 = gamma_resolvent(p, sd, {m}, Vec::Ones(n), sd.pi);
    Vec u2 = Vec::Zero(n);
    u2.head(m).setOnes();
    Vec v2 = Vec::Zero(n);
    v2.head(m) = sd.pi.head(m);
    const double g2 = gamma_resolvent(p, sd, {m}, u2, v2);
    CHECK(std::abs(g1 - g2) <= 1e-9);

    // And both agree with the theta route.
    const CensoredPair pair = stochastic_complements(p, {m}, sd);
    CHECK(theta_via_solves(p, {m}, pair).gamma == doctest::Approx(g1).epsilon(1e-9));
}

TEST_CASE("gamma_resolvent equals 1/2 on periodic inputs") {
    std::mt19937_64 rng(107);
    const StochasticMatrix p = assemble_periodic(PeriodicChain(
        random_periodic_blocks(rng, {3, 3})));
    const StationaryDistribution sd = stationary(p);
    CHECK(gamma_resolvent(p, sd, {3}, Vec::Ones(6), sd.pi)
          == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("gamma matches the decomposition residue on the uniform chain") {
    const Index n = 12;
    const StochasticMatrix p = uniform_chain(n);
    const StationaryDistribution sd = stationary(p);
    for (const Index m : {1, 4, 6, 11}) {
        const CensoredPair pair = stochastic_complements(p, {m}, sd);
        const double residue = kemeny_direct(p).kappa - kemeny_direct(pair.p1).kappa
                             - kemeny_direct(pair.p2).kappa;
        CHECK(gamma_resolvent(p, sd, {m}, Vec::Ones(n), sd.pi)
              == doctest::Approx(residue).epsilon(1e-9));
    }
}

TEST_CASE("gamma_resolvent validates its preconditions") {
    const StochasticMatrix p = uniform_chain(6);
    const StationaryDistribution sd = stationary(p);
    CHECK_THROWS_AS(gamma_resolvent(p, sd, {3}, Vec::Ones(6), Vec::Zero(6)),
                    std::invalid_argument);
    CHECK_THROWS_AS(gamma_resolvent(p, sd, {3}, Vec::Zero(6), sd.pi),
                    std::invalid_argument);
}

TEST_CASE("decomposition identity over many random splits") {
    std::mt19937_64 rng(109);
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 30 + static_cast<Index>(rng() % 270);
        const StochasticMatrix p = random_chain(rng, n, 0.05);
        const StationaryDistribution sd = stationary(p);
        const double kp = kemeny_direct(p).kappa;
        for (int s = 0; s < 3; ++s) {
            const Index m = 1 + static_cast<Index>(rng() % (n - 1));
            const CensoredPair pair = stochastic_complements(p, {m}, sd);
            const ThetaGamma tg = theta_via_solves(p, {m}, pair);
            DirectOptions opts;
            const double lhs = kemeny_direct(pair.p1, opts).kappa
                             + kemeny_direct(pair.p2, opts).kappa + tg.gamma;
            CHECK(std::abs(kp - lhs) <= 1e-8 * (1.0 + kp));
        }
    }
}

TEST_CASE("below the base size dnc equals the direct formula") {
    std::mt19937_64 rng(113);
    const StochasticMatrix p = random_chain(rng, 40, 0.2);
    const StationaryDistribution sd = stationary(p);
    DncConfig cfg;
    cfg.base_size = 512;
    const KemenyResult r = kemeny_dnc(p, sd, cfg);
    CHECK(r.kappa == doctest::Approx(kemeny_direct(p).kappa).epsilon(1e-14));
    CHECK(r.diagnostics.recursion_depth == 0);
}

TEST_CASE("dnc matches direct at n = 1000 with forced recursion") {
    std::mt19937_64 rng(127);
    const StochasticMatrix p = random_chain(rng, 1000, 0.01);
    const StationaryDistribution sd = stationary(p);
    DncConfig cfg;
    cfg.base_size = 64;
    const KemenyResult r = kemeny_dnc(p, sd, cfg);
    DirectOptions opts;
    const double kd = kemeny_direct(p, opts).kappa;
    CHECK(std::abs(r.kappa - kd) / std::abs(kd) <= 1e-6);
    CHECK(r.diagnostics.recursion_depth >= 3);
    CHECK(r.diagnostics.peak_bytes > 0);
}

TEST_CASE("dnc on the K_{2,3} random walk gives n - 3/2") {
    // Complete bipartite K_{2,3}: a periodic (d = 2) chain with uniform blocks.
    Eigen::MatrixXd p(5, 5);
    p.setZero();
    p.topRightCorner(2, 3).setConstant(1.0 / 3.0);
    p.bottomLeftCorner(3, 2).setConstant(0.5);
    const StochasticMatrix chain = StochasticMatrix::from_dense(p);
    const StationaryDistribution sd = stationary(chain);
    DncConfig cfg;
    cfg.base_size = 2;
    CHECK(kemeny_dnc(chain, sd, cfg).kappa == doctest::Approx(3.5).epsilon(1e-10));
}

TEST_CASE("split strategy and recursion depth do not change the value") {
    std::mt19937_64 rng(131);
    const StochasticMatrix p = random_chain(rng, 300, 0.03);
    const StationaryDistribution sd = stationary(p);

    DncConfig half;
    half.base_size = 32;
    DncConfig nd = half;
    nd.split = SplitStrategy::NestedDissectionGuided;
    DncConfig shallow;
    shallow.base_size = 301;  // no recursion
    DncConfig deep;
    deep.base_size = 2;       // maximal recursion

    const double k_half = kemeny_dnc(p, sd, half).kappa;
    const double k_nd = kemeny_dnc(p, sd, nd).kappa;
    const double k_shallow = kemeny_dnc(p, sd, shallow).kappa;
    const double k_deep = kemeny_dnc(p, sd, deep).kappa;

    CHECK(std::abs(k_half - k_nd) <= 1e-6 * std::abs(k_half));
    CHECK(std::abs(k_shallow - k_deep) <= 1e-6 * std::abs(k_shallow));
    CHECK(std::abs(k_half - k_shallow) <= 1e-6 * std::abs(k_half));
}

TEST_CASE("krylov solver variants agree with the sparse LU route") {
    std::mt19937_64 rng(137);
    const StochasticMatrix p = random_chain(rng, 400, 0.02);
    const StationaryDistribution sd = stationary(p);

    DncConfig lu;
    lu.base_size = 64;
    DncConfig gm = lu;
    gm.solver = DncSolver::GmresIlu0;
    gm.solver_tol = 1e-10;
    DncConfig bi = lu;
    bi.solver = DncSolver::BicgstabIlu0;
    bi.solver_tol = 1e-10;

    const double k_lu = kemeny_dnc(p, sd, lu).kappa;
    CHECK(std::abs(kemeny_dnc(p, sd, gm).kappa - k_lu) <= 1e-6 * std::abs(k_lu));
    CHECK(std::abs(kemeny_dnc(p, sd, bi).kappa - k_lu) <= 1e-6 * std::abs(k_lu));

    // The theta solves agree route by route as well.
    const ThetaGamma a = theta_of(p, 200, DncSolver::SparseLu);
    const ThetaGamma b = theta_of(p, 200, DncSolver::GmresIlu0);
    CHECK(std::abs(a.theta - b.theta) <= 1e-6 * (1.0 + std::abs(a.theta)));
}

TEST_CASE("dnc validates its configuration") {
    const StochasticMatrix p = uniform_chain(8);
    const StationaryDistribution sd = stationary(p);
    DncConfig cfg;
    cfg.base_size = 1;
    CHECK_THROWS_AS(kemeny_dnc(p, sd, cfg), std::invalid_argument);
    cfg.base_size = 64;
    cfg.solver_tol = 0.0;
    CHECK_THROWS_AS(kemeny_dnc(p, sd, cfg), std::invalid_argument);
}
