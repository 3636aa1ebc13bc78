#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/core.hpp"
#include "kemeny/solvers.hpp"

namespace kemeny {

struct HutchConfig {
    double delta = 0.25;        // failure probability
    double epsilon = 0.1;       // relative accuracy on the trace
    int samples = 0;            // total matvec budget; 0 derives it from (delta, epsilon)
    std::uint64_t rng_seed = 0;
    double inner_tol = 1e-3;    // CG tolerance for the oracle solves
};

/// Query budget for the (delta, epsilon) guarantee. The theorem gives
/// l = O(sqrt(log(1/delta))/epsilon + log(1/delta)) without a constant; this
/// implementation uses l = 3k+1 with k = ceil(sqrt(ln(1/delta))/(3 epsilon))
/// (l = 3 when k = 1), calibrated to reproduce l = 13 at (1/4, 1e-1).
/// The budget splits as k sketch columns, k deflation matvecs, and l - 2k
/// Hutchinson probes (13 = 4 + 4 + 5).
int sample_count(double delta, double epsilon);

/// Solve (I - S + 1 1^T/n) y = x by CG, where S is the symmetric form of the
/// chain. Preconditioned by IC0 of I - S with the rank-one deflation folded
/// in by the Sherman-Morrison identity. Requires a chain with a symmetric
/// form (undirected graph, symmetric normalization). Throws SolverError on
/// CG non-convergence.
class ResolventOracle {
public:
    ResolventOracle(const StochasticMatrix& p, double inner_tol = 1e-3);
    Vec solve(const Vec& x) const;
    double last_residual() const { return last_residual_; }
    int last_iterations() const { return last_iterations_; }
    Index size() const { return n_; }

private:
    Index n_ = 0;
    double inner_tol_ = 1e-3;
    SpMat sym_;                 // I - S
    Ic0 ic_;
    Vec ic_inv_ones_;           // (L L^T)^{-1} 1
    double sm_denominator_ = 1.0;
    mutable double last_residual_ = 0.0;
    mutable int last_iterations_ = 0;
};

/// One-shot convenience wrapper around ResolventOracle.
Vec resolvent_oracle(const StochasticMatrix& p, const Vec& x, double inner_tol = 1e-3);

/// Hutch++ estimate of kappa = Tr((I - S + 1 1^T/n)^{-1}) - 1 for chains with
/// a symmetric positive definite deflated resolvent. Deterministic per seed.
/// Refuses chains without a symmetric form (use kemeny_dnc for those).
KemenyResult kemeny_hutchpp(const StochasticMatrix& p, const HutchConfig& cfg = {});

} // namespace kemeny
