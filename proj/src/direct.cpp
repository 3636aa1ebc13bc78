#include "kemeny/direct.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <complex>

namespace kemeny {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_dense_feasible(Index n, const DirectOptions& opts, const char* what) {
    if (n > opts.dense_limit)
        throw std::invalid_argument(std::string(what) + ": n = " + std::to_string(n)
                                    + " exceeds the dense size limit "
                                    + std::to_string(opts.dense_limit)
                                    + "; use dnc or hutchpp, or raise the limit");
}

double dense_kemeny_default(const Eigen::MatrixXd& p) {
    const Index n = p.rows();
    Eigen::MatrixXd a = -p;
    a.diagonal().array() += 1.0;
    a.array() += 1.0 / static_cast<double>(n);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    // Oracle-grade path: full inverse plus a first-order trace refinement,
    // Tr(A^{-1}) ~= Tr(Z) + Tr(Z (I - A Z)), which squares the LU error.
    const Eigen::MatrixXd z = lu.inverse();
    Eigen::MatrixXd r = -a * z;
    r.diagonal().array() += 1.0;
    const double correction = z.cwiseProduct(r.transpose()).sum();
    return z.trace() + correction - 1.0;
}

} // namespace

KemenyResult kemeny_direct(const StochasticMatrix& p, const DirectOptions& opts) {
    const auto t0 = Clock::now();
    check_dense_feasible(p.size(), opts, "kemeny_direct");
    KemenyResult r;
    r.kappa = dense_kemeny_default(Eigen::MatrixXd(p.matrix()));
    r.method = Method::Direct;
    r.diagnostics.elapsed_seconds = seconds_since(t0);
    if (!std::isfinite(r.kappa))
        throw SolverError("deflated matrix is numerically singular",
                          std::numeric_limits<double>::infinity(), 0);
    return r;
}

KemenyResult kemeny_direct(const StochasticMatrix& p, const Vec& g, const Vec& h,
                           const DirectOptions& opts) {
    const auto t0 = Clock::now();
    const Index n = p.size();
    check_dense_feasible(n, opts, "kemeny_direct");
    if (g.size() != n || h.size() != n)
        throw std::invalid_argument("deflation vectors must have length n");
    if (std::abs(h.dot(g) - 1.0) > 1e-10)
        throw std::invalid_argument("deflation requires h^T g = 1");
    if (std::abs(h.sum()) < 1e-14)
        throw std::invalid_argument("deflation requires h^T 1 != 0");

    Eigen::MatrixXd a = Eigen::MatrixXd(p.matrix()) * -1.0;
    a.diagonal().array() += 1.0;
    a.noalias() += g * h.transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::MatrixXd z = lu.inverse();
    if (!z.allFinite())
        throw SolverError("I - P + g h^T is numerically singular (violated preconditions)",
                          std::numeric_limits<double>::infinity(), 0);

    const StationaryDistribution sd = stationary(p);
    if (std::abs(sd.pi.dot(g)) < 1e-14)
        throw std::invalid_argument("deflation requires pi^T g != 0");

    // First-order refinement of both the trace and the weighted term.
    Eigen::MatrixXd resid = -a * z;
    resid.diagonal().array() += 1.0;
    const double trace = z.trace() + z.cwiseProduct(resid.transpose()).sum();
    const Vec z_ones = z * Vec::Ones(n) + z * (resid * Vec::Ones(n));

    KemenyResult r;
    r.kappa = trace - sd.pi.dot(z_ones);
    r.method = Method::Direct;
    r.diagnostics.max_residual = sd.residual;
    r.diagnostics.elapsed_seconds = seconds_since(t0);
    return r;
}

KemenyResult kemeny_eig(const StochasticMatrix& p, const DirectOptions& opts) {
    const auto t0 = Clock::now();
    const Index n = p.size();
    check_dense_feasible(n, opts, "kemeny_eig");

    Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(p.matrix()), false);
    if (es.info() != Eigen::Success)
        throw SolverError("eigensolver did not converge",
                          std::numeric_limits<double>::infinity(), 0);
    const auto& lambda = es.eigenvalues();

    // The Perron eigenvalue 1 is simple for an irreducible chain; exclude the
    // eigenvalue closest to 1 and sum the resolvent terms of the rest.
    Index perron = 0;
    double best = std::abs(lambda[0] - std::complex<double>(1.0, 0.0));
    for (Index i = 1; i < n; ++i) {
        const double d = std::abs(lambda[i] - std::complex<double>(1.0, 0.0));
        if (d < best) { best = d; perron = i; }
    }
    std::complex<double> sum(0.0, 0.0);
    for (Index i = 0; i < n; ++i) {
        if (i == perron) continue;
        sum += 1.0 / (std::complex<double>(1.0, 0.0) - lambda[i]);
    }
    if (std::abs(sum.imag()) > 1e-8 * (1.0 + std::abs(sum.real())))
        throw SolverError("imaginary residue of the eigenvalue sum did not cancel",
                          std::abs(sum.imag()), 0);

    KemenyResult r;
    r.kappa = sum.real();
    r.method = Method::Eig;
    r.diagnostics.max_residual = best;
    r.diagnostics.elapsed_seconds = seconds_since(t0);
    return r;
}

ProductKemeny kemeny_product_identity_check(const Eigen::MatrixXd& a,
                                            const Eigen::MatrixXd& b) {
    if (a.rows() != b.cols() || a.cols() != b.rows())
        throw std::invalid_argument("factor shapes must be m x n and n x m");
    for (Index i = 0; i < a.rows(); ++i)
        if (std::abs(a.row(i).sum() - 1.0) > 1e-8 || (a.row(i).array() < 0).any())
            throw std::invalid_argument("first factor is not row-stochastic");
    for (Index i = 0; i < b.rows(); ++i)
        if (std::abs(b.row(i).sum() - 1.0) > 1e-8 || (b.row(i).array() < 0).any())
            throw std::invalid_argument("second factor is not row-stochastic");

    const StochasticMatrix ab = StochasticMatrix::from_dense(a * b);
    const StochasticMatrix ba = StochasticMatrix::from_dense(b * a);
    if (!check_irreducible(ab).irreducible || !check_irreducible(ba).irreducible)
        throw std::invalid_argument("a factor product is reducible");

    ProductKemeny r;
    r.kappa_ab = kemeny_direct(ab).kappa;
    r.kappa_ba = kemeny_direct(ba).kappa;
    return r;
}

} // namespace kemeny
