#include "kemeny/bounds.hpp"

#include <Eigen/LU>

#include <cmath>

namespace kemeny {

namespace {

double inf_norm(const SpMat& m) {
    double best = 0.0;
    for (Index i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (SpMat::InnerIterator it(m, i); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

constexpr Index dense_norm_limit = 2000;

// ||(I - P1 + 1 pihat1^T)^{-1}||_inf: exact through the dense inverse up to
// dense_norm_limit, otherwise a power-iteration estimate of the inverse norm
// on |Z| directions (reported as an estimate).
std::pair<double, bool> deflated_resolvent_norm(const SpMat& p1, const Vec& pi_hat1) {
    const Index m = p1.rows();
    if (m <= dense_norm_limit) {
        Eigen::MatrixXd a = Eigen::MatrixXd(p1) * -1.0;
        a.diagonal().array() += 1.0;
        a.noalias() += Vec::Ones(m) * pi_hat1.transpose();
        const Eigen::MatrixXd z = a.partialPivLu().inverse();
        return {z.cwiseAbs().rowwise().sum().maxCoeff(), false};
    }
    // Hager-style estimate of ||Z||_inf = ||Z^T||_1 using solves with the
    // deflated matrix and its transpose.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(p1.nonZeros() + 2 * m);
    for (Index i = 0; i < m; ++i)
        for (SpMat::InnerIterator it(p1, i); it; ++it)
            trip.emplace_back(i, it.col(), -it.value());
    for (Index i = 0; i < m; ++i) trip.emplace_back(i, i, 1.0);
    for (Index i = 0; i < m; ++i) trip.emplace_back(i, 0, 1.0);
    SpMatCol msys(m, m);
    msys.setFromTriplets(trip.begin(), trip.end());
    SparseLuFactor lu(msys);
    const Vec correction = pi_hat1 - Vec::Unit(m, 0);

    auto solve_z = [&](const Vec& b) {          // Z b
        Vec t = lu.solve(b);
        t.array() -= correction.dot(t);
        return t;
    };
    auto solve_zt = [&](const Vec& b) {         // Z^T b
        Vec rhs = b - correction * b.sum();
        return lu.solve_transposed(rhs);
    };

    // Estimate ||Z^T||_1 = ||Z||_inf by Hager's method on B = Z^T.
    Vec x = Vec::Constant(m, 1.0 / static_cast<double>(m));
    double est = 0.0;
    for (int it = 0; it < 8; ++it) {
        Vec y = solve_zt(x);
        est = y.lpNorm<1>();
        Vec xi(m);
        for (Index i = 0; i < m; ++i) xi[i] = y[i] >= 0 ? 1.0 : -1.0;
        Vec z = solve_z(xi);                    // B^T xi
        Index j;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= z.dot(x)) break;
        x.setZero();
        x[j] = 1.0;
    }
    return {est, true};
}

} // namespace

Interval pi1_bounds(const StochasticMatrix& p, BlockPartition split) {
    const Index n = p.size();
    split.validate(n);
    const Index m = split.m;
    const SpMat& mat = p.matrix();
    const double n11 = inf_norm(SpMat(mat.topLeftCorner(m, m)));
    const double n12 = inf_norm(SpMat(mat.topRightCorner(m, n - m)));
    const double n21 = inf_norm(SpMat(mat.bottomLeftCorner(n - m, m)));
    const double n22 = inf_norm(SpMat(mat.bottomRightCorner(n - m, n - m)));

    Interval iv;
    if (n11 >= 1.0 || n22 >= 1.0) {
        iv.lo = 0.0;
        iv.hi = 1.0;
        iv.trivial = true;
        return iv;
    }
    iv.lo = (1.0 - n22) / (1.0 - n22 + n12);
    iv.hi = n21 / (1.0 - n11 + n21);
    return iv;
}

ThetaBound theta_upper_bound(const StochasticMatrix& p, BlockPartition split,
                             const Vec& pi_hat1) {
    const Index n = p.size();
    split.validate(n);
    const Index m = split.m;
    const SpMat& mat = p.matrix();
    const SpMat p12 = mat.topRightCorner(m, n - m);
    const SpMat p22 = mat.bottomRightCorner(n - m, n - m);

    // (I-P22)^{-1} is nonnegative (M-matrix), so its row sums are
    // (I-P22)^{-1} 1 and the norm needs a single solve.
    SpMatCol a22 = SpMatCol(p22) * -1.0;
    {
        SpMatCol id(n - m, n - m);
        id.setIdentity();
        a22 = SpMatCol(id + a22);
    }
    const SparseLuFactor lu22(a22);
    const double inv22_norm = lu22.solve(Vec::Ones(n - m)).maxCoeff();

    // Build the complement P1 to measure the deflated resolvent norm.
    const SpMat p11 = mat.topLeftCorner(m, m);
    const SpMat p21 = mat.bottomLeftCorner(n - m, m);
    Eigen::MatrixXd x = lu22.solve_many(Eigen::MatrixXd(p21));
    Eigen::MatrixXd c1 = Eigen::MatrixXd(p11) + p12 * x;
    const SpMat p1 = c1.sparseView();

    const auto [z_norm, estimated] = deflated_resolvent_norm(p1, pi_hat1);

    ThetaBound b;
    b.value = inv22_norm * (1.0 + inf_norm(p12) * z_norm);
    b.estimated = estimated;
    return b;
}

Interval gamma_bounds(const StochasticMatrix& p, BlockPartition split,
                      std::optional<double> theta) {
    const Index n = p.size();
    split.validate(n);
    const Interval mass = pi1_bounds(p, split);

    double theta_value;
    bool theta_exact = theta.has_value();
    bool estimated = false;
    if (theta_exact) {
        theta_value = *theta;
    } else {
        StationaryDistribution sd = stationary(p);
        const Vec pi_hat1 = sd.pi.head(split.m) / sd.pi.head(split.m).sum();
        const ThetaBound tb = theta_upper_bound(p, split, pi_hat1);
        theta_value = tb.value;
        estimated = tb.estimated;
    }

    Interval iv;
    iv.estimated = estimated;
    const double t1 = 1.0 + theta_value;
    if (theta_exact) {
        // gamma = (1+theta)||pi_1|| - 1 is monotone in ||pi_1||; the sign of
        // 1+theta decides which endpoint of the mass interval is which.
        if (t1 >= 0.0) {
            iv.lo = t1 * mass.lo - 1.0;
            iv.hi = t1 * mass.hi - 1.0;
        } else {
            iv.lo = t1 * mass.hi - 1.0;
            iv.hi = t1 * mass.lo - 1.0;
        }
    } else {
        // theta is an upper bound; theta >= theta_1 >= 1 > 0 always holds for
        // the M-matrix term, so only the upper endpoint is certified.
        iv.hi = t1 * mass.hi - 1.0;
        iv.lo = -(1.0 - mass.lo);
    }

    if (n <= dense_norm_limit) {
        // Resolvent bound |gamma| <= 2||(I-P+1 pi^T)^{-1}|| max(mass, 1-mass).
        const StationaryDistribution sd = stationary(p);
        Eigen::MatrixXd a = Eigen::MatrixXd(p.matrix()) * -1.0;
        a.diagonal().array() += 1.0;
        a.noalias() += Vec::Ones(n) * sd.pi.transpose();
        const Eigen::MatrixXd z = a.partialPivLu().inverse();
        const double zn = z.cwiseAbs().rowwise().sum().maxCoeff();
        const double mass_max = std::max(mass.hi, 1.0 - mass.lo);
        const double r = 2.0 * zn * mass_max;
        iv.lo = std::max(iv.lo, -r);
        iv.hi = std::min(iv.hi, r);
    }
    return iv;
}

PerturbationSpec PerturbationSpec::validated(SpMat e, double eps, const StochasticMatrix& p) {
    if (e.rows() != p.size() || e.cols() != p.size())
        throw std::invalid_argument("perturbation must match the chain dimension");
    if (eps < 0.0)
        throw std::invalid_argument("perturbation magnitude must be nonnegative");
    const Vec row_sums = e * Vec::Ones(e.cols());
    if (row_sums.cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("perturbation rows must sum to zero");
    if (inf_norm(e) > 1.0 + 1e-12)
        throw std::invalid_argument("perturbation must satisfy ||E||_inf <= 1");
    // P + eps E must stay entrywise nonnegative.
    Eigen::MatrixXd sum = Eigen::MatrixXd(p.matrix()) + eps * Eigen::MatrixXd(e);
    if ((sum.array() < -1e-15).any())
        throw std::invalid_argument("P + eps*E leaves the stochastic simplex");
    PerturbationSpec spec;
    spec.e = std::move(e);
    spec.eps = eps;
    return spec;
}

PerturbationBound perturbation_bound(const StochasticMatrix& p, const PerturbationSpec& spec,
                                     const Vec& h) {
    const Index n = p.size();
    if (h.size() != n || std::abs(h.sum() - 1.0) > 1e-10)
        throw std::invalid_argument("h must satisfy h^T 1 = 1");

    Eigen::MatrixXd a = Eigen::MatrixXd(p.matrix()) * -1.0;
    a.diagonal().array() += 1.0;
    a.noalias() += Vec::Ones(n) * h.transpose();
    const Eigen::MatrixXd z = a.partialPivLu().inverse();
    const Eigen::MatrixXd z2 = z * z;

    PerturbationBound out;
    const double e_frob = Eigen::MatrixXd(spec.e).norm();
    out.first_order_bound = spec.eps * z2.norm() * e_frob;

    // Tr(Z^2 E) accumulated over the sparse perturbation pattern.
    double tr = 0.0;
    for (Index i = 0; i < spec.e.rows(); ++i)
        for (SpMat::InnerIterator it(spec.e, i); it; ++it)
            tr += z2(it.col(), i) * it.value();
    out.first_order_estimate = spec.eps * tr;
    return out;
}

} // namespace kemeny
