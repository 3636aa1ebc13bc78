#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/core.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace kemeny::testing {

// ---------------------------------------------------------------------------
// Independent dense oracles, written from the definitions. These do not call
// the library's computation paths.
// ---------------------------------------------------------------------------

/// kappa = Tr((I - P + 1 1^T/n)^{-1}) - 1 via full-pivot dense LU.
inline double oracle_kappa(const Eigen::MatrixXd& p) {
    const Index n = p.rows();
    Eigen::MatrixXd a = -p;
    a.diagonal().array() += 1.0;
    a.array() += 1.0 / static_cast<double>(n);
    return Eigen::FullPivLU<Eigen::MatrixXd>(a).inverse().trace() - 1.0;
}

/// Stationary vector from the dense eigendecomposition of P^T.
inline Vec oracle_stationary(const Eigen::MatrixXd& p) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(p.transpose());
    Index best = 0;
    double gap = std::abs(es.eigenvalues()[0] - std::complex<double>(1, 0));
    for (Index i = 1; i < p.rows(); ++i) {
        const double g = std::abs(es.eigenvalues()[i] - std::complex<double>(1, 0));
        if (g < gap) { gap = g; best = i; }
    }
    Vec v = es.eigenvectors().col(best).real();
    if (v.sum() < 0) v = -v;
    return v / v.sum();
}

// ---------------------------------------------------------------------------
// Instance generators
// ---------------------------------------------------------------------------

/// Random irreducible sparse chain: density-controlled random entries plus a
/// directed Hamiltonian cycle so irreducibility always holds.
inline StochasticMatrix random_chain(std::mt19937_64& rng, Index n, double density) {
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    std::bernoulli_distribution keep(density);
    std::vector<Eigen::Triplet<double>> trip;
    for (Index i = 0; i < n; ++i) {
        trip.emplace_back(i, (i + 1) % n, unif(rng));
        for (Index j = 0; j < n; ++j)
            if (keep(rng)) trip.emplace_back(i, j, unif(rng));
    }
    SpMat m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    Vec sums = m * Vec::Ones(n);
    for (Index i = 0; i < n; ++i)
        for (SpMat::InnerIterator it(m, i); it; ++it)
            it.valueRef() /= sums[i];
    return StochasticMatrix::from_sparse(std::move(m));
}

/// Random dense row-stochastic rectangular factor.
inline Eigen::MatrixXd random_rect_stochastic(std::mt19937_64& rng, Index rows, Index cols) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = unif(rng);
        m.row(i) /= m.row(i).sum();
    }
    return m;
}

/// Random periodic block family: blocks[i] = A_{i+1} sized n_{i+2} x n_{i+1}
/// (1-based classes mod d).
inline std::vector<Eigen::MatrixXd> random_periodic_blocks(std::mt19937_64& rng,
                                                           const std::vector<Index>& sizes) {
    const int d = static_cast<int>(sizes.size());
    std::vector<Eigen::MatrixXd> blocks(d);
    for (int i = 0; i < d; ++i)
        blocks[i] = random_rect_stochastic(rng, sizes[(i + 1) % d], sizes[i]);
    return blocks;
}

/// Undirected k x k grid adjacency (0/1 weights).
inline SpMat grid_adjacency(Index k) {
    const Index n = k * k;
    auto id = [k](Index r, Index c) { return r * k + c; };
    std::vector<Eigen::Triplet<double>> trip;
    for (Index r = 0; r < k; ++r)
        for (Index c = 0; c < k; ++c) {
            if (r + 1 < k) {
                trip.emplace_back(id(r, c), id(r + 1, c), 1.0);
                trip.emplace_back(id(r + 1, c), id(r, c), 1.0);
            }
            if (c + 1 < k) {
                trip.emplace_back(id(r, c), id(r, c + 1), 1.0);
                trip.emplace_back(id(r, c + 1), id(r, c), 1.0);
            }
        }
    SpMat m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

/// Undirected path graph adjacency on n vertices.
inline SpMat path_adjacency(Index n) {
    std::vector<Eigen::Triplet<double>> trip;
    for (Index i = 0; i + 1 < n; ++i) {
        trip.emplace_back(i, i + 1, 1.0);
        trip.emplace_back(i + 1, i, 1.0);
    }
    SpMat m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

/// Directed m-cycle chain (permutation matrix).
inline StochasticMatrix cycle_chain(Index m) {
    std::vector<Eigen::Triplet<double>> trip;
    for (Index i = 0; i < m; ++i) trip.emplace_back(i, (i + 1) % m, 1.0);
    SpMat p(m, m);
    p.setFromTriplets(trip.begin(), trip.end());
    return StochasticMatrix::from_sparse(std::move(p));
}

/// Uniform chain: all entries 1/n.
inline StochasticMatrix uniform_chain(Index n) {
    return StochasticMatrix::from_dense(
        Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n)));
}

/// Blocks with constant row sums r1 (top-left, m x m) and r2 (bottom-right).
inline StochasticMatrix const_rowsum_chain(std::mt19937_64& rng, Index m, Index q,
                                           double r1, double r2) {
    auto rows = [&](Index nr, Index nc, double target) {
        Eigen::MatrixXd b = random_rect_stochastic(rng, nr, nc);
        return Eigen::MatrixXd(b * target);
    };
    Eigen::MatrixXd p(m + q, m + q);
    p.topLeftCorner(m, m) = rows(m, m, r1);
    p.topRightCorner(m, q) = rows(m, q, 1.0 - r1);
    p.bottomLeftCorner(q, m) = rows(q, m, 1.0 - r2);
    p.bottomRightCorner(q, q) = rows(q, q, r2);
    return StochasticMatrix::from_dense(p);
}

/// Zero-row-sum perturbation with pattern inside P and ||E||_inf <= 1;
/// P + eps*E stays stochastic for eps below roughly 1/2.
inline SpMat random_perturbation(std::mt19937_64& rng, const StochasticMatrix& p) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const SpMat& m = p.matrix();
    SpMat e = m;
    for (Index i = 0; i < e.rows(); ++i) {
        double s = 0.0;
        std::vector<double> r;
        for (SpMat::InnerIterator it(m, i); it; ++it) {
            r.push_back(unif(rng));
            s += it.value() * r.back();
        }
        Index k = 0;
        for (SpMat::InnerIterator it(e, i); it; ++it, ++k)
            it.valueRef() = it.value() * (r[k] - s);
    }
    double norm = 0.0;
    for (Index i = 0; i < e.rows(); ++i) {
        double s = 0.0;
        for (SpMat::InnerIterator it(e, i); it; ++it) s += std::abs(it.value());
        norm = std::max(norm, s);
    }
    if (norm > 0) e *= 1.0 / norm;
    return e;
}

} // namespace kemeny::testing
