#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/core.hpp"

#include <optional>
#include <vector>

namespace kemeny {

/// Period-d chain given by its cyclic-class blocks: block i (0-based) is the
/// rectangular row-stochastic matrix of transitions from class i+1 into class
/// i (classes cycle 1 -> d -> d-1 -> ... -> 1), sized n_{i+2} x n_{i+1} in
/// 1-based class indices taken modulo d.
class PeriodicChain {
public:
    explicit PeriodicChain(std::vector<Eigen::MatrixXd> blocks);

    int period() const { return static_cast<int>(blocks_.size()); }
    const std::vector<Eigen::MatrixXd>& blocks() const { return blocks_; }
    const std::vector<Index>& class_sizes() const { return sizes_; }
    Index size() const { return total_; }

    /// A_d * A_{d-1} * ... * A_1, square of order class_sizes()[0].
    Eigen::MatrixXd cycle_product() const;

private:
    std::vector<Eigen::MatrixXd> blocks_;
    std::vector<Index> sizes_;
    Index total_ = 0;
};

/// Block-cyclic transition matrix with the classes laid out contiguously.
StochasticMatrix assemble_periodic(const PeriodicChain& chain);

/// Closed form kappa(P) = d*kappa(A_d...A_1) + n - d*n_1 + (d-1)/2
/// (equal class sizes reduce to d*kappa(A_d...A_1) + (d-1)/2).
KemenyResult kemeny_periodic(const PeriodicChain& chain);

struct PeriodicDecomposition {
    double kappa_p = 0.0;
    double kappa_p1 = 0.0;   // kappa of the cycle product
    double kappa_p2 = 0.0;   // kappa of the (d-1)-cyclic complement
    double gamma = 0.0;      // computed via the theta solves; equals 1/2
};

/// Decomposition of the assembled periodic chain at the first class boundary;
/// the complements take the explicit block-cyclic forms.
PeriodicDecomposition kemeny_periodic_decomposition_check(const PeriodicChain& chain);

/// kappa(A (x) B) by the block partition separating the first row of blocks,
/// with the correction in closed form from A alone:
/// gamma = (e_1^T (I - A + 1 x^T)^{-1} e_1 - x_1) / (1 - x_1).
KemenyResult kemeny_kronecker(const StochasticMatrix& a, const StochasticMatrix& b);

struct ConstRowSumResult {
    KemenyResult result;
    double r1 = 0.0;
    double r2 = 0.0;
    double alpha1 = 0.0;     // ||pi_1|| = (1-r2)/(2-r1-r2)
    double alpha2 = 0.0;
};

/// Closed form for diagonal blocks with constant row sums r1, r2:
/// kappa(P) = kappa(P1) + kappa(P2) + 1/(2-r1-r2).
ConstRowSumResult kemeny_constant_rowsum(const StochasticMatrix& p, BlockPartition split);

/// The extremal periodic chain attaining kappa = n - (d*n_1 + 1)/2: each
/// cyclic class is partitioned into n_1 subsets (contiguous, balanced) and
/// transitions are uniform within matched subsets, so the cycle product is
/// the adjacency matrix of a directed n_1-cycle. Requires n_1 <= n_i.
PeriodicChain extremal_periodic(int d, const std::vector<Index>& sizes);

/// Pattern-based period of an irreducible chain: gcd of closed-walk lengths
/// via BFS levels. Validation helper; returns nullopt on an empty pattern.
std::optional<int> detect_period(const StochasticMatrix& p);

} // namespace kemeny
