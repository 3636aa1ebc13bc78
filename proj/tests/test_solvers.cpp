#include "kemeny/solvers.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace kemeny;
using namespace kemeny::testing;

namespace {

SpMat eye_minus(const SpMat& a) {
    SpMat id(a.rows(), a.cols());
    id.setIdentity();
    return SpMat(id - a);
}

Index off_diagonal_nnz(const SpMat& m, Index split) {
    Index count = 0;
    for (Index i = 0; i < m.rows(); ++i)
        for (SpMat::InnerIterator it(m, i); it; ++it)
            if ((i < split) != (it.col() < split)) ++count;
    return count;
}

} // namespace

TEST_CASE("sparse LU solves M-matrix systems to the residual contract") {
    std::mt19937_64 rng(11);
    const StochasticMatrix p = random_chain(rng, 120, 0.1);
    const Index m = 50;
    const SpMat p22 = p.matrix().bottomRightCorner(p.size() - m, p.size() - m);
    const SpMat a = eye_minus(p22);
    SparseLuFactor lu(a);
    const Vec b = Vec::Ones(a.rows());
    const Vec x = lu.solve(b);
    CHECK((a * x - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("sparse LU on the identity and a hand-solved 2x2") {
    SpMat id(4, 4);
    id.setIdentity();
    SparseLuFactor lu(id);
    Vec b(4);
    b << 1, 2, 3, 4;
    CHECK((lu.solve(b) - b).norm() == doctest::Approx(0.0));

    Eigen::MatrixXd a(2, 2);
    a << 2, -1, -1, 2;
    SparseLuFactor lu2(SpMat(a.sparseView()));
    Vec rhs(2);
    rhs << 1, 1;
    const Vec x = lu2.solve(rhs);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));
}

TEST_CASE("sparse LU rejects singular input") {
    SpMat z(3, 3);
    std::vector<Eigen::Triplet<double>> t{{0, 0, 1.0}, {1, 1, 1.0}};
    z.setFromTriplets(t.begin(), t.end());
    CHECK_THROWS_AS(SparseLuFactor{z}, SolverError);
}

TEST_CASE("ilu0 equals exact LU when the pattern admits no fill") {
    // Tridiagonal M-matrix: elimination creates no fill, so ILU(0) is exact.
    const Index n = 12;
    std::vector<Eigen::Triplet<double>> t;
    for (Index i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.5);
        if (i > 0) t.emplace_back(i, i - 1, -1.0);
        if (i + 1 < n) t.emplace_back(i, i + 1, -1.0);
    }
    SpMat a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    const Ilu0 f = Ilu0::compute(a);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    Vec b(n);
    for (Index i = 0; i < n; ++i) b[i] = u(rng);
    const Vec x = f.solve(b);
    const Vec exact = Eigen::MatrixXd(a).fullPivLu().solve(b);
    CHECK((x - exact).norm() <= 1e-12 * exact.norm());
}

TEST_CASE("ilu0 equals LU on a dense-pattern 3x3 M-matrix") {
    Eigen::MatrixXd a(3, 3);
    a << 4, -1, -1, -1, 4, -1, -1, -1, 4;
    const Ilu0 f = Ilu0::compute(SpMat(a.sparseView()));
    Vec b(3);
    b << 1, 2, 3;
    CHECK((f.solve(b) - a.fullPivLu().solve(b)).norm() <= 1e-13);
}

TEST_CASE("ilu0 reports breakdown on a nonpositive pivot") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 2, 1;  // elimination drives the second pivot negative
    CHECK_THROWS_AS(Ilu0::compute(SpMat(a.sparseView())), BreakdownError);
}

TEST_CASE("ilu0/ic0 factor patterns stay inside the input pattern") {
    std::mt19937_64 rng(5);
    const StochasticMatrix p = random_chain(rng, 80, 0.08);
    const SpMat a = eye_minus(p.matrix());
    const Ilu0 f = Ilu0::compute(a);
    CHECK(f.nnz() <= a.nonZeros() + a.rows());

    const StochasticMatrix g = build_from_graph(grid_adjacency(8),
                                                GraphNormalization::SymmetricNormalized);
    SpMat sym = eye_minus(g.symmetric_form());
    const Ic0 c = Ic0::compute(SpMatCol(sym), 1e-8);
    CHECK(c.nnz() <= sym.nonZeros() + sym.rows());
}

TEST_CASE("ic0 preconditioned CG converges on a grid chain") {
    const StochasticMatrix g = build_from_graph(grid_adjacency(10),
                                                GraphNormalization::SymmetricNormalized);
    const Index n = g.size();
    SpMat a = eye_minus(g.symmetric_form());
    const Ic0 c = Ic0::compute(SpMatCol(a), 1e-6);
    const LinOp op = [&](const Vec& v) {
        Vec r = a * v;
        r.array() += v.sum() / static_cast<double>(n);
        return r;
    };
    const LinOp pre = [&](const Vec& v) { return c.solve(v); };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    Vec b(n);
    for (Index i = 0; i < n; ++i) b[i] = u(rng);
    const SolveStatus st = cg(op, b, pre, 1e-10, 500);
    CHECK(st.converged);
    CHECK((op(st.x) - b).norm() <= 1e-9 * b.norm());
}

TEST_CASE("ic0 rejects indefinite input") {
    Eigen::MatrixXd a(2, 2);
    a << 1, 3, 3, 1;
    CHECK_THROWS_AS(Ic0::compute(SpMatCol(a.sparseView())), BreakdownError);
}

TEST_CASE("gmres solves the identity in one iteration") {
    const LinOp op = [](const Vec& v) { return v; };
    Vec b(5);
    b << 1, 2, 3, 4, 5;
    const SolveStatus st = gmres(op, b, identity_precond(), 1e-12);
    CHECK(st.converged);
    CHECK(st.iterations == 1);
    CHECK((st.x - b).norm() <= 1e-12);
}

TEST_CASE("ilu0-preconditioned Krylov solves (I-P22)x = 1 at n = 500") {
    std::mt19937_64 rng(17);
    const StochasticMatrix p = random_chain(rng, 1000, 0.01);
    const Index m = 500;
    const SpMat p22 = p.matrix().bottomRightCorner(m, m);
    const SpMat a = eye_minus(p22);
    auto f = Ilu0::compute(a);
    const LinOp op = [&](const Vec& v) { return Vec(a * v); };
    const LinOp pre = [&](const Vec& v) { return f.solve(v); };
    const Vec b = Vec::Ones(m);

    const SolveStatus sg = gmres(op, b, pre, 1e-8);
    CHECK(sg.converged);
    CHECK((a * sg.x - b).norm() <= 1e-8 * b.norm());

    const SolveStatus sb = bicgstab(op, b, pre, 1e-8);
    CHECK(sb.converged);
    CHECK((a * sb.x - b).norm() <= 1e-7 * b.norm());
}

TEST_CASE("krylov solutions satisfy the residual contract on random M-matrices") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const Index n = 100 + 150 * trial;
        const StochasticMatrix p = random_chain(rng, n, 0.05);
        const SpMat a = eye_minus(SpMat(p.matrix() * 0.9));
        const LinOp op = [&](const Vec& v) { return Vec(a * v); };
        Vec b(n);
        std::uniform_real_distribution<double> u(-1, 1);
        for (Index i = 0; i < n; ++i) b[i] = u(rng);
        const SolveStatus st = gmres(op, b, identity_precond(), 1e-9);
        REQUIRE(st.converged);
        CHECK((a * st.x - b).norm() <= 1e-9 * b.norm());
    }
}

TEST_CASE("nested dissection on a path graph uses singleton separators") {
    const Ordering ord = nested_dissection(path_adjacency(64));
    CHECK(ord.method == OrderingMethod::NestedDissection);
    CHECK(ord.separator_size <= 2);
    CHECK(ord.split_point > 16);
    CHECK(ord.split_point < 48);
}

TEST_CASE("nested dissection separates a grid with about k vertices") {
    const Index k = 12;
    const Ordering ord = nested_dissection(grid_adjacency(k));
    CHECK(ord.separator_size >= k / 2);
    CHECK(ord.separator_size <= 2 * k);
}

TEST_CASE("orderings are permutations; components stay contiguous") {
    // Two disjoint paths.
    const Index n = 40;
    std::vector<Eigen::Triplet<double>> t;
    for (Index i = 0; i + 1 < n / 2; ++i) {
        t.emplace_back(i, i + 1, 1.0);
        t.emplace_back(i + 1, i, 1.0);
        t.emplace_back(n / 2 + i, n / 2 + i + 1, 1.0);
        t.emplace_back(n / 2 + i + 1, n / 2 + i, 1.0);
    }
    SpMat a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    const Ordering ord = nested_dissection(a);

    std::vector<int> sorted = ord.perm;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(sorted == expect);

    // Each half must occupy a contiguous run of the ordering.
    std::vector<int> side(n);
    for (Index i = 0; i < n; ++i) side[i] = ord.perm[i] < static_cast<int>(n / 2) ? 0 : 1;
    int switches = 0;
    for (Index i = 1; i < n; ++i) switches += side[i] != side[i - 1];
    CHECK(switches == 1);
}

TEST_CASE("nd split cuts no more coupling than halving on grids and paths") {
    for (const SpMat& a : {grid_adjacency(10), path_adjacency(100)}) {
        const Ordering ord = nested_dissection(a);
        std::vector<Index> inv(a.rows());
        for (Index pos = 0; pos < a.rows(); ++pos) inv[ord.perm[pos]] = pos;
        std::vector<Eigen::Triplet<double>> t;
        for (Index i = 0; i < a.rows(); ++i)
            for (SpMat::InnerIterator it(a, i); it; ++it)
                t.emplace_back(inv[i], inv[it.col()], it.value());
        SpMat permuted(a.rows(), a.cols());
        permuted.setFromTriplets(t.begin(), t.end());
        CHECK(off_diagonal_nnz(permuted, ord.split_point)
              <= off_diagonal_nnz(a, a.rows() / 2));
    }
}
