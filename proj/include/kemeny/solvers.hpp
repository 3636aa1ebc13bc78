#pragma once

#include "kemeny/core.hpp"

#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <vector>

namespace kemeny {

// ---------------------------------------------------------------------------
// Sparse direct factorization (pivoted LU with COLAMD column ordering)
// ---------------------------------------------------------------------------

class SparseLuFactor {
public:
    explicit SparseLuFactor(const SpMatCol& a);
    explicit SparseLuFactor(const SpMat& a) : SparseLuFactor(SpMatCol(a)) {}

    Vec solve(const Vec& b) const;
    Eigen::MatrixXd solve_many(const Eigen::MatrixXd& b) const;
    /// Solve with the transposed matrix.
    Vec solve_transposed(const Vec& b) const;

    Index rows() const { return n_; }
    std::uint64_t factor_nonzeros() const { return factor_nnz_; }
    std::uint64_t byte_estimate() const;

private:
    // mutable: Eigen's transposed-solve adaptor is a non-const member even
    // though solving does not change the factorization.
    mutable Eigen::SparseLU<SpMatCol, Eigen::COLAMDOrdering<int>> lu_;
    Index n_ = 0;
    std::uint64_t factor_nnz_ = 0;
};

// ---------------------------------------------------------------------------
// Level-0 incomplete factorizations (factor pattern == pattern of A)
// ---------------------------------------------------------------------------

/// Incomplete LU with zero fill. No pivoting: intended for non-singular
/// M-matrices, where elimination with dropping cannot break down.
/// Throws BreakdownError on a zero or negative pivot.
class Ilu0 {
public:
    static Ilu0 compute(const SpMat& a);
    Vec solve(const Vec& b) const;       // (LU)^{-1} b
    Index nnz() const { return lu_.nonZeros(); }
    Index rows() const { return lu_.rows(); }

private:
    SpMat lu_;                           // L (unit diagonal, strict lower) and U packed together
};

/// Incomplete Cholesky with zero fill for symmetric positive definite input.
/// An optional diagonal shift factors A + shift*diag(A) instead; solve() still
/// targets the shifted matrix.
class Ic0 {
public:
    static Ic0 compute(const SpMatCol& a, double shift = 0.0);
    Vec solve(const Vec& b) const;       // (L L^T)^{-1} b
    Vec lower_solve(const Vec& b) const; // L^{-1} b
    Vec upper_solve(const Vec& b) const; // L^{-T} b
    Index nnz() const { return l_.nonZeros(); }
    Index rows() const { return l_.rows(); }
    /// min/max pivot of the factor; a tiny ratio flags near-singular input
    /// (exact factorization of a singular matrix can complete numerically).
    double pivot_ratio() const;

private:
    SpMatCol l_;                         // lower triangular factor
};

// ---------------------------------------------------------------------------
// Krylov solvers (matrix-free)
// ---------------------------------------------------------------------------

using LinOp = std::function<Vec(const Vec&)>;

struct SolveStatus {
    Vec x;
    int iterations = 0;
    double residual = 0.0;               // relative to ||b||
    bool converged = false;
};

inline LinOp identity_precond() {
    return [](const Vec& v) { return v; };
}

/// Restarted GMRES with left preconditioning.
SolveStatus gmres(const LinOp& op, const Vec& b, const LinOp& precond,
                  double tol, int restart = 50, int maxit = 1000);

SolveStatus bicgstab(const LinOp& op, const Vec& b, const LinOp& precond,
                     double tol, int maxit = 1000);

/// Preconditioned conjugate gradient; op and precond must be symmetric
/// positive (semi)definite on the relevant subspace.
SolveStatus cg(const LinOp& op, const Vec& b, const LinOp& precond,
               double tol, int maxit = 1000);

// ---------------------------------------------------------------------------
// Fill-reducing / separator ordering
// ---------------------------------------------------------------------------

enum class OrderingMethod { NestedDissection, Natural };

struct Ordering {
    std::vector<int> perm;               // perm[new_index] = old_index
    OrderingMethod method = OrderingMethod::Natural;
    Index split_point = 0;               // size of the first diagonal block
    Index separator_size = 0;            // top-level separator cardinality
};

/// Recursive separator bisection on the symmetrized sparsity pattern.
/// The permuted matrix is quasi block-diagonal: indices [0, split_point) and
/// [split_point, n) are coupled only through the separator, which is ordered
/// at the tail of the second block.
Ordering nested_dissection(const SpMat& pattern);

} // namespace kemeny
