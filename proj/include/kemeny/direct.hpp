#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/core.hpp"

namespace kemeny {

struct DirectOptions {
    /// Largest n for which the dense deflated matrix is materialized.
    Index dense_limit = 4096;
};

/// Kemeny's constant by the dense deflated-inverse trace with the default
/// deflation (g = 1, h = 1/n): kappa = Tr((I - P + 1 1^T/n)^{-1}) - 1.
KemenyResult kemeny_direct(const StochasticMatrix& p, const DirectOptions& opts = {});

/// General admissible deflation: requires h^T g = 1, h^T 1 != 0, pi^T g != 0;
/// kappa = Tr(Z) - pi^T Z 1 with Z = (I - P + g h^T)^{-1}. The result does not
/// depend on the admissible choice. g = 1 is the well-conditioned default.
KemenyResult kemeny_direct(const StochasticMatrix& p, const Vec& g, const Vec& h,
                           const DirectOptions& opts = {});

/// Kemeny's constant by eigenvalue summation over the full complex spectrum,
/// kappa = sum_{i>=2} 1/(1 - lambda_i). The imaginary residue of the sum must
/// cancel below 1e-8 and is discarded.
KemenyResult kemeny_eig(const StochasticMatrix& p, const DirectOptions& opts = {});

struct ProductKemeny {
    double kappa_ab = 0.0;
    double kappa_ba = 0.0;
};

/// Kemeny's constants of both products of rectangular row-stochastic factors
/// a (m x n) and b (n x m). Square case: kappa(AB) = kappa(BA); rectangular
/// (n > m): kappa(BA) = kappa(AB) + n - m.
ProductKemeny kemeny_product_identity_check(const Eigen::MatrixXd& a,
                                            const Eigen::MatrixXd& b);

} // namespace kemeny
