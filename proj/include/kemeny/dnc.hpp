#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/core.hpp"

#include <array>

namespace kemeny {

enum class DncSolver {
    SparseLu,        // reuse the complement LU factors for the theta solves
    GmresIlu0,       // ILU(0)-preconditioned GMRES
    BicgstabIlu0,    // ILU(0)-preconditioned BiCGstab
};

enum class SplitStrategy { Halving, NestedDissectionGuided };

struct DncConfig {
    Index base_size = 512;                       // dense base-case threshold
    SplitStrategy split = SplitStrategy::Halving;
    DncSolver solver = DncSolver::SparseLu;
    double solver_tol = 1e-8;
    int max_depth = 64;
};

enum class ThetaExpression { Theta2, Theta3, Theta4, Theta5, GammaResolvent };

struct ThetaGamma {
    double theta = 0.0;
    double gamma = 0.0;                          // alpha1*theta - alpha2
    ThetaExpression expression_used = ThetaExpression::Theta4;
    double residual = 0.0;                       // worst solve residual
    bool krylov_fallback = false;                // fell back to sparse LU
};

/// Correction scalars by the three-solve sequence
///   x = (I-P22)^{-1} 1
///   y = (I-P1 + 1 pihat1^T)^{-1} (P12 x)
///   y = (I-P22)^{-1} (P21 y)
///   theta = pihat2^T (x + y),  gamma = alpha1*theta - alpha2.
/// The two I-P22 solves reuse the complement factorization; the deflated
/// system is solved per cfg.solver, falling back to sparse LU on Krylov
/// non-convergence.
ThetaGamma theta_via_solves(const StochasticMatrix& p, BlockPartition split,
                            const CensoredPair& pair, const DncConfig& cfg = {});

/// All four equivalent theta expressions, evaluated densely. Validation-only;
/// requires n <= 500.
std::array<double, 4> theta_alternatives(const StochasticMatrix& p, BlockPartition split,
                                         const Vec& pi_hat1, const Vec& pi_hat2);

/// gamma = [pihat1^T, -pihat2^T] (I-P+u v^T)^{-1} [alpha2*1; -alpha1*1],
/// invariant under the admissible choice v^T 1 != 0, pi^T u != 0.
double gamma_resolvent(const StochasticMatrix& p, const StationaryDistribution& pi,
                       BlockPartition split, const Vec& u, const Vec& v);

/// Recursive divide-and-conquer computation of Kemeny's constant:
/// below base_size the dense deflated trace is used; otherwise the chain is
/// split, the correction gamma is computed from the censored pair, and the
/// two complements recurse with their censored stationary vectors.
/// Respects KEMENY_THREADS (0 = auto) for parallel branch execution.
KemenyResult kemeny_dnc(const StochasticMatrix& p, const StationaryDistribution& pi,
                        const DncConfig& cfg = {});

} // namespace kemeny
