#pragma once

#include "kemeny/core.hpp"
#include "kemeny/solvers.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace kemeny {

/// Row-stochastic sparse transition matrix. Entries are validated nonnegative
/// and rows summing to 1 within row_sum_tol are renormalized exactly at
/// construction; worse violations are rejected.
///
/// Chains built from an undirected graph with symmetric normalization carry
/// the similarity scale s = sqrt(degrees): the symmetric form
/// D^{1/2} P D^{-1/2} has entries P(i,j)*s_i/s_j and the same spectrum.
class StochasticMatrix {
public:
    static constexpr double row_sum_tol = 1e-8;

    static StochasticMatrix from_sparse(SpMat m, Vec symmetric_scale = Vec());
    static StochasticMatrix from_dense(const Eigen::MatrixXd& m);

    Index size() const { return mat_.rows(); }
    Index nonzeros() const { return mat_.nonZeros(); }
    const SpMat& matrix() const { return mat_; }

    bool has_symmetric_form() const;
    const Vec& symmetric_scale() const { return scale_; }
    /// The symmetric similar matrix D^{1/2} P D^{-1/2} (requires a scale or a
    /// symmetric P, in which case it is P itself).
    SpMat symmetric_form() const;

    std::uint64_t byte_estimate() const {
        return static_cast<std::uint64_t>(mat_.nonZeros()) * (sizeof(double) + sizeof(int))
             + (mat_.rows() + 1) * sizeof(int);
    }

    /// Empty placeholder; only the factories produce validated chains.
    StochasticMatrix() = default;

private:
    SpMat mat_;
    Vec scale_;
};

struct StationaryDistribution {
    Vec pi;
    double residual = 0.0;  // ||pi^T P - pi^T||_1 achieved
};

enum class GraphNormalization { RowStochastic, SymmetricNormalized };

/// Random-walk chain of a graph. Row mode normalizes the given weights:
/// P = D^{-1} A with D = diag(A 1). Symmetric mode requires a symmetric
/// pattern, binarizes it, and additionally records the similarity scale of
/// D^{-1/2} A D^{-1/2} for use by the randomized trace estimator.
StochasticMatrix build_from_graph(const SpMat& adjacency, GraphNormalization mode);

enum class StationaryMethod { Auto, DirectNullSpace, PowerIteration };

/// Stationary distribution of an irreducible chain. Direct path solves the
/// bordered null-space system by sparse LU; power iteration is the fallback
/// above direct_size_limit states (and selectable explicitly).
StationaryDistribution stationary(const StochasticMatrix& p,
                                  StationaryMethod method = StationaryMethod::Auto,
                                  double tol = 1e-10);

constexpr Index stationary_direct_size_limit = 50000;

struct IrreducibilityCertificate {
    bool irreducible = false;
    int component_count = 0;            // condensation size
    std::vector<int> component_of;      // vertex -> component id
    Index largest_component_size = 0;
    int largest_component_id = 0;
};

IrreducibilityCertificate check_irreducible(const StochasticMatrix& p);
IrreducibilityCertificate strongly_connected_components(const SpMat& pattern);

struct AggregatedMatrix {
    Eigen::Matrix2d s;
};

// Cached factorizations of I - P11 and I - P22, reusable by the theta solves.
struct ComplementFactors {
    std::shared_ptr<const SparseLuFactor> f11;  // I - P11
    std::shared_ptr<const SparseLuFactor> f22;  // I - P22
};

/// Stochastic complements of a block split, their censored stationary
/// vectors, and block masses. theta/gamma are filled by divide-and-conquer.
struct CensoredPair {
    StochasticMatrix p1;
    StochasticMatrix p2;
    Vec pi_hat1;
    Vec pi_hat2;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double theta = std::numeric_limits<double>::quiet_NaN();
    double gamma = std::numeric_limits<double>::quiet_NaN();
    ComplementFactors factors;
};

/// P1 = P11 + P12 (I-P22)^{-1} P21 and P2 = P22 + P21 (I-P11)^{-1} P12,
/// with pi_hat_i = pi_i / ||pi_i||. drop_tol prunes complement entries with
/// magnitude <= drop_tol (default 0: exact).
CensoredPair stochastic_complements(const StochasticMatrix& p, BlockPartition split,
                                    const StationaryDistribution& pi,
                                    double drop_tol = 0.0);

/// 2x2 aggregated matrix S of block-to-block transition masses; its
/// stationary vector is (alpha1, alpha2).
AggregatedMatrix aggregated(const StochasticMatrix& p, BlockPartition split,
                            const Vec& pi_hat1, const Vec& pi_hat2);

/// Principal submatrix on the given vertex subset, rows renormalized.
/// Used for largest-strongly-connected-component extraction.
SpMat restrict_pattern(const SpMat& m, const std::vector<int>& component_of, int keep_id);

} // namespace kemeny
