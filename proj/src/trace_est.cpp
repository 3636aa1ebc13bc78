#include "kemeny/trace_est.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <random>

namespace kemeny {

int sample_count(double delta, double epsilon) {
    if (!(delta > 0.0 && delta < 1.0) || !(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("sample_count requires 0 < delta < 1 and 0 < epsilon < 1");
    const double raw = std::sqrt(std::log(1.0 / delta)) / epsilon;
    const int k = static_cast<int>(std::ceil(raw / 3.0));
    return k > 1 ? 3 * k + 1 : 3;
}

// ---------------------------------------------------------------------------
// ResolventOracle
// ---------------------------------------------------------------------------

namespace {

Ic0 ic0_with_shift_retry(const SpMatCol& a) {
    // I - S is symmetric positive semidefinite. On patterns where IC(0) is
    // the exact factorization the singular tail either breaks down or leaves
    // a uselessly tiny last pivot, so retry with growing diagonal shifts
    // until the factor is comfortably nonsingular.
    double shift = 0.0;
    for (int attempt = 0; attempt < 10; ++attempt) {
        try {
            Ic0 f = Ic0::compute(a, shift);
            if (f.pivot_ratio() >= 1e-6) return f;
        } catch (const BreakdownError&) {
        }
        shift = shift == 0.0 ? 1e-8 : shift * 100.0;
    }
    return Ic0::compute(a, 1e-2);
}

} // namespace

ResolventOracle::ResolventOracle(const StochasticMatrix& p, double inner_tol)
    : n_(p.size()), inner_tol_(inner_tol) {
    if (!p.has_symmetric_form())
        throw std::invalid_argument("the resolvent oracle needs a chain with a symmetric "
                                    "form (build the graph with symmetric normalization); "
                                    "use kemeny_dnc for general chains");
    SpMat s = p.symmetric_form();
    const Index n = n_;
    SpMat id(n, n);
    id.setIdentity();
    sym_ = SpMat(id - s);
    sym_.makeCompressed();

    ic_ = ic0_with_shift_retry(SpMatCol(sym_));
    ic_inv_ones_ = ic_.solve(Vec::Ones(n));
    sm_denominator_ = 1.0 + ic_inv_ones_.sum() / static_cast<double>(n);
}

Vec ResolventOracle::solve(const Vec& x) const {
    const Index n = n_;
    const LinOp op = [&](const Vec& v) {
        Vec r = sym_ * v;
        r.array() += v.sum() / static_cast<double>(n);
        return r;
    };
    // Sherman-Morrison corrected IC0: approximates (I - S + 1 1^T/n)^{-1}.
    const LinOp pre = [&](const Vec& v) {
        Vec t = ic_.solve(v);
        t -= ic_inv_ones_ * (t.sum() / static_cast<double>(n) / sm_denominator_);
        return t;
    };
    SolveStatus st = cg(op, x, pre, inner_tol_, 2000);
    if (!st.converged)
        throw SolverError("oracle CG did not converge", st.residual, st.iterations);
    last_residual_ = st.residual;
    last_iterations_ = st.iterations;
    return std::move(st.x);
}

Vec resolvent_oracle(const StochasticMatrix& p, const Vec& x, double inner_tol) {
    return ResolventOracle(p, inner_tol).solve(x);
}

// ---------------------------------------------------------------------------
// Hutch++
// ---------------------------------------------------------------------------

KemenyResult kemeny_hutchpp(const StochasticMatrix& p, const HutchConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const Index n = p.size();
    if (cfg.samples != 0 && cfg.samples < 3)
        throw std::invalid_argument("hutch++ needs at least 3 queries");
    if (!(cfg.inner_tol > 0.0))
        throw std::invalid_argument("inner_tol must be positive");

    const int l = cfg.samples != 0 ? cfg.samples : sample_count(cfg.delta, cfg.epsilon);
    const int k = std::max(1, l / 3);            // sketch columns == deflation matvecs
    const int probes = l - 2 * k;                // Hutchinson queries

    const ResolventOracle oracle(p, cfg.inner_tol);

    // All random draws come from one seeded stream in a fixed order, so a
    // seed determines the estimate bit-for-bit.
    std::mt19937_64 rng(cfg.rng_seed);
    auto rademacher = [&rng](Index len) {
        Vec v(len);
        for (Index i = 0; i < len; ++i) v[i] = (rng() & 1ull) ? 1.0 : -1.0;
        return v;
    };

    double max_resid = 0.0;

    // Low-rank sketch: Q = orth(A * S).
    Eigen::MatrixXd y(n, k);
    for (int j = 0; j < k; ++j) {
        y.col(j) = oracle.solve(rademacher(n));
        max_resid = std::max(max_resid, oracle.last_residual());
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);

    // Deflated trace part: Tr(Q^T A Q).
    double trace_low = 0.0;
    for (int j = 0; j < k; ++j) {
        const Vec aq = oracle.solve(q.col(j));
        max_resid = std::max(max_resid, oracle.last_residual());
        trace_low += q.col(j).dot(aq);
    }

    // Hutchinson on the deflated remainder (I-QQ^T) A (I-QQ^T).
    double trace_rand = 0.0;
    for (int j = 0; j < probes; ++j) {
        Vec g = rademacher(n);
        g -= q * (q.transpose() * g);
        const Vec ag = oracle.solve(g);
        max_resid = std::max(max_resid, oracle.last_residual());
        trace_rand += g.dot(ag);
    }
    if (probes > 0) trace_rand /= static_cast<double>(probes);

    KemenyResult r;
    r.kappa = trace_low + trace_rand - 1.0;
    r.method = Method::HutchPP;
    r.diagnostics.sample_count = l;
    r.diagnostics.max_residual = max_resid;
    r.diagnostics.rng_seed = cfg.rng_seed;
    r.diagnostics.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace kemeny
