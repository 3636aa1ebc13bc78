#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/core.hpp"

#include <optional>

namespace kemeny {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool trivial = false;    // preconditions failed, [0,1] returned
    bool estimated = false;  // an inverse norm was estimated, not exact
};

/// Computable enclosure of the first block mass:
/// (1-||P22||)/(1-||P22||+||P12||) <= ||pi_1|| <= ||P21||/(1-||P11||+||P21||)
/// (infinity norms). Requires ||P11||, ||P22|| < 1; otherwise returns the
/// trivial interval [0,1] with the flag set.
Interval pi1_bounds(const StochasticMatrix& p, BlockPartition split);

/// theta <= ||(I-P22)^{-1}|| (1 + ||P12|| ||(I-P1+1 pihat1^T)^{-1}||).
/// The M-matrix inverse norm is exact (single solve); the deflated resolvent
/// norm is exact up to n = 2000 and estimated above (flag in the result).
struct ThetaBound {
    double value = 0.0;
    bool estimated = false;
};
ThetaBound theta_upper_bound(const StochasticMatrix& p, BlockPartition split,
                             const Vec& pi_hat1);

/// Interval guaranteed to contain gamma = (1+theta)||pi_1|| - 1, handling
/// both signs of 1+theta, intersected with the resolvent-norm bound
/// |gamma| <= 2 ||(I-P+1 pi^T)^{-1}|| max(||pi_1||, 1-||pi_1||) when the
/// dense resolvent is feasible. theta should be exact for a two-sided
/// enclosure; with an upper bound only the upper endpoint is certified by the
/// display and the lower endpoint falls back to -(1 - lo(||pi_1||)).
Interval gamma_bounds(const StochasticMatrix& p, BlockPartition split,
                      std::optional<double> theta = std::nullopt);

/// Zero-row-sum perturbation direction E with ||E||_inf <= 1 and magnitude
/// eps such that P + eps*E stays stochastic.
struct PerturbationSpec {
    SpMat e;
    double eps = 0.0;
    static PerturbationSpec validated(SpMat e, double eps, const StochasticMatrix& p);
};

struct PerturbationBound {
    double first_order_bound = 0.0;     // eps ||(I-P+1h^T)^{-2}||_F ||E||_F
    double first_order_estimate = 0.0;  // eps Tr((I-P+1h^T)^{-2} E)
};

/// First-order perturbation bound and estimate for kappa(P + eps*E) - kappa(P)
/// (dense-feasible sizes; diagnostic tool).
PerturbationBound perturbation_bound(const StochasticMatrix& p, const PerturbationSpec& spec,
                                     const Vec& h);

} // namespace kemeny
