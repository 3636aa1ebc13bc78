#include "kemeny/dnc.hpp"

#include "kemeny/direct.hpp"

#include <Eigen/LU>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <future>
#include <thread>

namespace kemeny {

namespace {

SpMat eye_minus_sp(const SpMat& block) {
    const Index n = block.rows();
    SpMat id(n, n);
    id.setIdentity();
    return SpMat(id - block);
}

// Solve (I - P1 + 1 pihat1^T) y = b exactly through the sparse factorization
// of M = I - P1 + 1 e0^T:  M^{-1}1 = 1 and the Sherman-Morrison denominator
// is 1, so y = t - 1 * ((pihat1 - e0)^T t) with t = M^{-1} b.
class DeflatedComplementSolver {
public:
    DeflatedComplementSolver(const StochasticMatrix& p1, const Vec& pi_hat1)
        : pi_hat1_(pi_hat1) {
        const Index m = p1.size();
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(p1.nonzeros() + 2 * m);
        const SpMat& mat = p1.matrix();
        for (Index i = 0; i < m; ++i)
            for (SpMat::InnerIterator it(mat, i); it; ++it)
                trip.emplace_back(i, it.col(), -it.value());
        for (Index i = 0; i < m; ++i) trip.emplace_back(i, i, 1.0);
        for (Index i = 0; i < m; ++i) trip.emplace_back(i, 0, 1.0);
        SpMatCol msys(m, m);
        msys.setFromTriplets(trip.begin(), trip.end());
        lu_ = std::make_unique<SparseLuFactor>(msys);
    }

    Vec solve(const Vec& b) const {
        Vec t = lu_->solve(b);
        double c = pi_hat1_.dot(t) - t[0];
        t.array() -= c;
        return t;
    }

    std::uint64_t byte_estimate() const { return lu_->byte_estimate(); }

private:
    Vec pi_hat1_;
    std::unique_ptr<SparseLuFactor> lu_;
};

double deflated_residual(const SpMat& p1, const Vec& pi_hat1, const Vec& y, const Vec& b) {
    Vec r = y - p1 * y;
    r.array() += pi_hat1.dot(y);
    r -= b;
    const double bn = b.norm();
    return bn > 0 ? r.norm() / bn : r.norm();
}

// ILU(0) preconditioner for the deflated complement system, built on the
// sparse approximation I - P11 - P12 diag(I-P22)^{-1} P21; falls back to
// I - P11 if the approximation breaks down.
Ilu0 theta_preconditioner(const SpMat& p11, const SpMat& p12, const SpMat& p21,
                          const SpMat& p22) {
    const Index q = p22.rows();
    Vec dinv(q);
    for (Index i = 0; i < q; ++i) dinv[i] = 1.0;
    for (Index i = 0; i < q; ++i)
        for (SpMat::InnerIterator it(p22, i); it; ++it)
            if (it.col() == i) dinv[i] = 1.0 - it.value();
    for (Index i = 0; i < q; ++i) dinv[i] = 1.0 / dinv[i];

    try {
        SpMat mid = p21;
        for (Index i = 0; i < q; ++i)
            for (SpMat::InnerIterator it(mid, i); it; ++it)
                it.valueRef() *= dinv[i];
        SpMat approx = eye_minus_sp(p11) - SpMat(p12 * mid);
        approx.prune(0.0, 0.0);
        return Ilu0::compute(approx);
    } catch (const BreakdownError&) {
        return Ilu0::compute(eye_minus_sp(p11));
    }
}

} // namespace

ThetaGamma theta_via_solves(const StochasticMatrix& p, BlockPartition split,
                            const CensoredPair& pair, const DncConfig& cfg) {
    const Index n = p.size();
    split.validate(n);
    const Index m = split.m;
    const Index q = n - m;
    const SpMat& mat = p.matrix();
    const SpMat p11 = mat.topLeftCorner(m, m);
    const SpMat p12 = mat.topRightCorner(m, q);
    const SpMat p21 = mat.bottomLeftCorner(q, m);
    const SpMat p22 = mat.bottomRightCorner(q, q);

    std::shared_ptr<const SparseLuFactor> f22 = pair.factors.f22;
    if (!f22) f22 = std::make_shared<SparseLuFactor>(SpMatCol(eye_minus_sp(p22)));

    ThetaGamma tg;
    const Vec ones_q = Vec::Ones(q);
    const SpMat& p1m = pair.p1.matrix();

    Vec x, y1, y2;
    const bool use_krylov = cfg.solver != DncSolver::SparseLu;
    bool krylov_ok = false;

    if (use_krylov) {
        // Recursive variant: ILU(0)-preconditioned Krylov for all three solves.
        const SpMat a22 = eye_minus_sp(p22);
        const LinOp op22 = [&](const Vec& v) { return Vec(a22 * v); };
        LinOp pre22 = identity_precond();
        try {
            auto ilu22 = std::make_shared<Ilu0>(Ilu0::compute(a22));
            pre22 = [ilu22](const Vec& v) { return ilu22->solve(v); };
        } catch (const BreakdownError&) {
            // unpreconditioned Krylov still converges for well-behaved blocks
        }
        auto pre1_fac = std::make_shared<Ilu0>(theta_preconditioner(p11, p12, p21, p22));
        const LinOp pre1 = [pre1_fac](const Vec& v) { return pre1_fac->solve(v); };
        const Vec pi_hat1 = pair.pi_hat1;
        const LinOp op1 = [&](const Vec& v) {
            Vec r = v - p1m * v;
            r.array() += pi_hat1.dot(v);
            return r;
        };

        auto run = [&](const LinOp& op, const Vec& b, const LinOp& pre) {
            return cfg.solver == DncSolver::GmresIlu0
                       ? gmres(op, b, pre, cfg.solver_tol)
                       : bicgstab(op, b, pre, cfg.solver_tol);
        };

        const SolveStatus sx = run(op22, ones_q, pre22);
        if (sx.converged) {
            const SolveStatus sy1 = run(op1, Vec(p12 * sx.x), pre1);
            if (sy1.converged) {
                const SolveStatus sy2 = run(op22, Vec(p21 * sy1.x), pre22);
                if (sy2.converged) {
                    x = sx.x;
                    y1 = sy1.x;
                    y2 = sy2.x;
                    tg.residual = std::max({sx.residual, sy1.residual, sy2.residual});
                    krylov_ok = true;
                }
            }
        }
        if (!krylov_ok) tg.krylov_fallback = true;
    }

    if (!krylov_ok) {
        x = f22->solve(ones_q);
        const DeflatedComplementSolver def(pair.p1, pair.pi_hat1);
        const Vec rhs = p12 * x;
        y1 = def.solve(rhs);
        y2 = f22->solve(Vec(p21 * y1));
        tg.residual = deflated_residual(p1m, pair.pi_hat1, y1, rhs);
    }

    tg.theta = pair.pi_hat2.dot(x + y2);
    tg.gamma = pair.alpha1 * tg.theta - pair.alpha2;
    tg.expression_used = ThetaExpression::Theta4;
    return tg;
}

std::array<double, 4> theta_alternatives(const StochasticMatrix& p, BlockPartition split,
                                         const Vec& pi_hat1, const Vec& pi_hat2) {
    const Index n = p.size();
    if (n > 500)
        throw std::invalid_argument("theta_alternatives is a dense validation path (n <= 500)");
    split.validate(n);
    const Index m = split.m;
    const Index q = n - m;

    const Eigen::MatrixXd pd = Eigen::MatrixXd(p.matrix());
    const Eigen::MatrixXd p11 = pd.topLeftCorner(m, m);
    const Eigen::MatrixXd p12 = pd.topRightCorner(m, q);
    const Eigen::MatrixXd p21 = pd.bottomLeftCorner(q, m);
    const Eigen::MatrixXd p22 = pd.bottomRightCorner(q, q);
    const Eigen::MatrixXd im = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd iq = Eigen::MatrixXd::Identity(q, q);
    const Vec ones_m = Vec::Ones(m);
    const Vec ones_q = Vec::Ones(q);

    const Eigen::MatrixXd inv22 = (iq - p22).partialPivLu().inverse();
    const Eigen::MatrixXd inv11 = (im - p11).partialPivLu().inverse();
    const Eigen::MatrixXd c1 = p11 + p12 * inv22 * p21;   // complement P1
    const Eigen::MatrixXd c2 = p22 + p21 * inv11 * p12;   // complement P2

    std::array<double, 4> t{};

    // theta2: resolvent of the full matrix deflated by [1;0][pihat1^T, 0^T]
    {
        Eigen::MatrixXd a = -pd;
        a.diagonal().array() += 1.0;
        a.topLeftCorner(m, m).noalias() += ones_m * pi_hat1.transpose();
        Vec rhs = Vec::Zero(n);
        rhs.tail(q).setOnes();
        const Vec sol = a.partialPivLu().solve(rhs);
        t[0] = pi_hat2.dot(sol.tail(q));
    }
    // theta3: Schur-form with the deflated diagonal block I - P11 + 1 pihat1^T
    {
        const Eigen::MatrixXd d11 = (im - p11 + ones_m * pi_hat1.transpose())
                                        .partialPivLu().inverse();
        const Eigen::MatrixXd a = iq - p22 - p21 * d11 * p12;
        t[1] = pi_hat2.dot(a.partialPivLu().solve(ones_q));
    }
    // theta4: the three-solve form over the complement P1
    {
        const Eigen::MatrixXd d1 = (im - c1 + ones_m * pi_hat1.transpose())
                                       .partialPivLu().inverse();
        t[2] = pi_hat2.dot((iq + inv22 * p21 * d1 * p12) * (inv22 * ones_q));
    }
    // theta5: rank-one-corrected complement P2 with S = (I - P11)^{-1}
    {
        const Vec s_one = inv11 * ones_m;
        const double denom = 1.0 + pi_hat1.dot(s_one);
        const Vec left = p21 * s_one;
        const Vec right = (pi_hat1.transpose() * inv11 * p12).transpose();
        const Eigen::MatrixXd a = iq - c2 + (left * right.transpose()) / denom;
        t[3] = pi_hat2.dot(a.partialPivLu().solve(ones_q));
    }
    return t;
}

double gamma_resolvent(const StochasticMatrix& p, const StationaryDistribution& pi,
                       BlockPartition split, const Vec& u, const Vec& v) {
    const Index n = p.size();
    split.validate(n);
    if (u.size() != n || v.size() != n)
        throw std::invalid_argument("u and v must have length n");
    if (std::abs(v.sum()) < 1e-14)
        throw std::invalid_argument("gamma_resolvent requires v^T 1 != 0");
    if (std::abs(pi.pi.dot(u)) < 1e-14)
        throw std::invalid_argument("gamma_resolvent requires pi^T u != 0");

    const Index m = split.m;
    const double alpha1 = pi.pi.head(m).sum();
    const double alpha2 = pi.pi.tail(n - m).sum();

    Eigen::MatrixXd a = Eigen::MatrixXd(p.matrix()) * -1.0;
    a.diagonal().array() += 1.0;
    a.noalias() += u * v.transpose();

    Vec rhs(n);
    rhs.head(m).setConstant(alpha2);
    rhs.tail(n - m).setConstant(-alpha1);
    const Vec sol = a.partialPivLu().solve(rhs);
    if (!sol.allFinite())
        throw SolverError("I - P + u v^T is numerically singular",
                          std::numeric_limits<double>::infinity(), 0);

    Vec lhs(n);
    lhs.head(m) = pi.pi.head(m) / alpha1;
    lhs.tail(n - m) = -pi.pi.tail(n - m) / alpha2;
    return lhs.dot(sol);
}

// ---------------------------------------------------------------------------
// Recursive driver
// ---------------------------------------------------------------------------

namespace {

int thread_budget() {
    if (const char* env = std::getenv("KEMENY_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v == 0) return static_cast<int>(std::thread::hardware_concurrency());
        if (v > 0) return static_cast<int>(v);
    }
    return static_cast<int>(std::thread::hardware_concurrency());
}

struct MemoryAccountant {
    std::atomic<std::int64_t> current{0};
    std::atomic<std::int64_t> peak{0};
    void add(std::int64_t b) {
        const std::int64_t now = current.fetch_add(b) + b;
        std::int64_t old = peak.load();
        while (now > old && !peak.compare_exchange_weak(old, now)) {}
    }
    void sub(std::int64_t b) { current.fetch_sub(b); }
};

struct DncState {
    explicit DncState(const DncConfig& c) : cfg(c) {}
    const DncConfig& cfg;
    MemoryAccountant mem;
    std::atomic<int> max_depth{0};
    std::atomic<int> fallbacks{0};
    std::atomic<double> max_residual{0.0};
    std::atomic<int> live_threads{1};
    int thread_cap = 1;

    void note_residual(double r) {
        double old = max_residual.load();
        while (r > old && !max_residual.compare_exchange_weak(old, r)) {}
    }
};

struct PermutedChain {
    StochasticMatrix chain;
    Vec pi_hat;
};

PermutedChain apply_ordering(const StochasticMatrix& p, const Vec& pi_hat,
                             const std::vector<int>& perm) {
    const Index n = p.size();
    std::vector<Index> inv(n);
    for (Index a = 0; a < n; ++a) inv[perm[a]] = a;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(p.nonzeros());
    const SpMat& m = p.matrix();
    for (Index i = 0; i < n; ++i)
        for (SpMat::InnerIterator it(m, i); it; ++it)
            trip.emplace_back(inv[i], inv[it.col()], it.value());
    SpMat out(n, n);
    out.setFromTriplets(trip.begin(), trip.end());
    Vec ph(n);
    for (Index a = 0; a < n; ++a) ph[a] = pi_hat[perm[a]];
    return {StochasticMatrix::from_sparse(std::move(out)), std::move(ph)};
}

double dnc_recurse(DncState& st, const StochasticMatrix& chain, const Vec& pi_hat,
                   int depth, std::string path) {
    const Index n = chain.size();
    {
        int old = st.max_depth.load();
        while (depth > old && !st.max_depth.compare_exchange_weak(old, depth)) {}
    }
    if (depth > st.cfg.max_depth)
        throw SolverError("dnc recursion exceeded max_depth at path " + path, 0.0, depth);

    if (n < st.cfg.base_size || n <= 2) {
        DirectOptions opts;
        opts.dense_limit = std::max<Index>(n, 1);
        return kemeny_direct(chain, opts).kappa;
    }

    try {
        const StochasticMatrix* work = &chain;
        const Vec* ph = &pi_hat;
        PermutedChain permuted;
        Index m = n / 2;
        if (st.cfg.split == SplitStrategy::NestedDissectionGuided) {
            const Ordering ord = nested_dissection(chain.matrix());
            permuted = apply_ordering(chain, pi_hat, ord.perm);
            work = &permuted.chain;
            ph = &permuted.pi_hat;
            m = std::clamp<Index>(ord.split_point, 1, n - 1);
        }

        StationaryDistribution sd;
        sd.pi = *ph;
        CensoredPair pair = stochastic_complements(*work, {m}, sd);
        const ThetaGamma tg = theta_via_solves(*work, {m}, pair, st.cfg);
        st.note_residual(tg.residual);
        if (tg.krylov_fallback) st.fallbacks.fetch_add(1);

        const std::int64_t factor_bytes =
            static_cast<std::int64_t>(pair.factors.f11->byte_estimate()
                                      + pair.factors.f22->byte_estimate());
        st.mem.add(factor_bytes);
        pair.factors.f11.reset();
        pair.factors.f22.reset();
        st.mem.sub(factor_bytes);

        const std::int64_t held =
            static_cast<std::int64_t>(pair.p1.byte_estimate() + pair.p2.byte_estimate());
        st.mem.add(held);

        double k1, k2;
        const bool fork = depth < 3 && st.live_threads.load() < st.thread_cap;
        if (fork) {
            st.live_threads.fetch_add(1);
            auto fut = std::async(std::launch::async, [&] {
                const double r = dnc_recurse(st, pair.p1, pair.pi_hat1, depth + 1, path + "L");
                st.live_threads.fetch_sub(1);
                return r;
            });
            k2 = dnc_recurse(st, pair.p2, pair.pi_hat2, depth + 1, path + "R");
            k1 = fut.get();
        } else {
            k1 = dnc_recurse(st, pair.p1, pair.pi_hat1, depth + 1, path + "L");
            k2 = dnc_recurse(st, pair.p2, pair.pi_hat2, depth + 1, path + "R");
        }
        st.mem.sub(held);
        // Fixed summation order keeps the result deterministic.
        return k1 + k2 + tg.gamma;
    } catch (SolverError& e) {
        throw SolverError(std::string(e.what()) + " [recursion path " +
                              (path.empty() ? "root" : path) + "]",
                          e.residual, e.iterations);
    }
}

} // namespace

KemenyResult kemeny_dnc(const StochasticMatrix& p, const StationaryDistribution& pi,
                        const DncConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (pi.pi.size() != p.size())
        throw std::invalid_argument("stationary vector length mismatch");
    if (cfg.base_size < 2)
        throw std::invalid_argument("base_size must be at least 2");
    if (!(cfg.solver_tol > 0))
        throw std::invalid_argument("solver_tol must be positive");

    DncState st(cfg);
    st.thread_cap = std::max(1, thread_budget());
    st.mem.add(static_cast<std::int64_t>(p.byte_estimate()));

    KemenyResult r;
    r.kappa = dnc_recurse(st, p, pi.pi, 0, "");
    r.method = Method::Dnc;
    r.diagnostics.recursion_depth = st.max_depth.load();
    r.diagnostics.max_residual = std::max(st.max_residual.load(), pi.residual);
    r.diagnostics.krylov_fallbacks = st.fallbacks.load();
    r.diagnostics.peak_bytes = static_cast<std::uint64_t>(st.mem.peak.load());
    r.diagnostics.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace kemeny
