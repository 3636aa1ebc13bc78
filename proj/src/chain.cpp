#include "kemeny/chain.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace kemeny {

// ---------------------------------------------------------------------------
// StochasticMatrix
// ---------------------------------------------------------------------------

StochasticMatrix StochasticMatrix::from_sparse(SpMat m, Vec symmetric_scale) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("stochastic matrix must be square");
    if (symmetric_scale.size() > 0 && symmetric_scale.size() != m.rows())
        throw std::invalid_argument("symmetric scale length mismatch");
    m.prune(0.0, 0.0);
    m.makeCompressed();
    const Index n = m.rows();
    for (Index i = 0; i < n; ++i) {
        double sum = 0.0;
        for (SpMat::InnerIterator it(m, i); it; ++it) {
            if (it.value() < 0.0)
                throw std::invalid_argument("stochastic matrix has a negative entry at row "
                                            + std::to_string(i));
            sum += it.value();
        }
        if (std::abs(sum - 1.0) > row_sum_tol)
            throw std::invalid_argument("row " + std::to_string(i) + " sums to "
                                        + std::to_string(sum) + ", outside tolerance");
        if (sum != 1.0) {
            for (SpMat::InnerIterator it(m, i); it; ++it)
                it.valueRef() /= sum;
        }
    }
    StochasticMatrix p;
    p.mat_ = std::move(m);
    p.scale_ = std::move(symmetric_scale);
    return p;
}

StochasticMatrix StochasticMatrix::from_dense(const Eigen::MatrixXd& m) {
    return from_sparse(m.sparseView());
}

bool StochasticMatrix::has_symmetric_form() const {
    if (scale_.size() > 0) return true;
    // A symmetric row-stochastic matrix is its own symmetric form.
    SpMat d = SpMat(mat_ - SpMat(mat_.transpose()));
    d.prune(1e-12, 1.0);
    return d.nonZeros() == 0;
}

SpMat StochasticMatrix::symmetric_form() const {
    if (scale_.size() == 0) {
        if (!has_symmetric_form())
            throw std::invalid_argument("chain has no symmetric form; build it with "
                                        "symmetric normalization or use an undirected graph");
        return mat_;
    }
    SpMat s = mat_;
    for (Index i = 0; i < s.rows(); ++i)
        for (SpMat::InnerIterator it(s, i); it; ++it)
            it.valueRef() *= scale_[i] / scale_[it.col()];
    return s;
}

// ---------------------------------------------------------------------------
// Graph -> chain
// ---------------------------------------------------------------------------

StochasticMatrix build_from_graph(const SpMat& adjacency, GraphNormalization mode) {
    if (adjacency.rows() != adjacency.cols())
        throw std::invalid_argument("adjacency matrix must be square");
    const Index n = adjacency.rows();
    SpMat a = adjacency;
    a.prune(0.0, 0.0);
    for (Index i = 0; i < n; ++i)
        for (SpMat::InnerIterator it(a, i); it; ++it)
            if (it.value() < 0.0)
                throw std::invalid_argument("adjacency weights must be nonnegative");

    if (mode == GraphNormalization::SymmetricNormalized) {
        // 0/1 pattern, symmetric by contract.
        SpMat pat = a;
        for (Index i = 0; i < n; ++i)
            for (SpMat::InnerIterator it(pat, i); it; ++it)
                it.valueRef() = 1.0;
        SpMat d = SpMat(pat - SpMat(pat.transpose()));
        d.prune(1e-12, 1.0);
        if (d.nonZeros() != 0)
            throw std::invalid_argument("symmetric normalization requires a symmetric pattern");
        Vec deg = pat * Vec::Ones(n);
        for (Index i = 0; i < n; ++i)
            if (deg[i] == 0.0)
                throw std::invalid_argument("vertex " + std::to_string(i) + " has zero degree");
        for (Index i = 0; i < n; ++i)
            for (SpMat::InnerIterator it(pat, i); it; ++it)
                it.valueRef() /= deg[i];
        return StochasticMatrix::from_sparse(std::move(pat), deg.cwiseSqrt());
    }

    Vec deg = a * Vec::Ones(n);
    for (Index i = 0; i < n; ++i)
        if (deg[i] == 0.0)
            throw std::invalid_argument("vertex " + std::to_string(i) + " has zero out-degree");
    for (Index i = 0; i < n; ++i)
        for (SpMat::InnerIterator it(a, i); it; ++it)
            it.valueRef() /= deg[i];
    return StochasticMatrix::from_sparse(std::move(a));
}

// ---------------------------------------------------------------------------
// Stationary distribution
// ---------------------------------------------------------------------------

namespace {

double stationary_residual(const SpMat& p, const Vec& pi) {
    Vec r = p.transpose() * pi - pi;
    return r.lpNorm<1>();
}

StationaryDistribution stationary_direct(const StochasticMatrix& p, double tol) {
    const Index n = p.size();
    const SpMat& m = p.matrix();
    // Solve (I - P^T + 1 e_0^T) x = 1; the unique solution is proportional
    // to pi. The rank-one term adds a single dense column, which the fill
    // reducing ordering places last.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(m.nonZeros() + 2 * n);
    for (Index i = 0; i < n; ++i)
        for (SpMat::InnerIterator it(m, i); it; ++it)
            trip.emplace_back(it.col(), i, -it.value());
    for (Index i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0);
    for (Index i = 0; i < n; ++i) trip.emplace_back(i, 0, 1.0);
    SpMatCol b(n, n);
    b.setFromTriplets(trip.begin(), trip.end());

    SparseLuFactor lu(b);
    const Vec rhs = Vec::Ones(n);
    Vec x = lu.solve(rhs);
    const double total = x.sum();
    if (!(total > 0.0) || !x.allFinite())
        throw SolverError("stationary null-space solve produced an invalid vector",
                          std::numeric_limits<double>::infinity(), 0);
    Vec pi = x / total;

    StationaryDistribution sd;
    sd.residual = stationary_residual(m, pi);
    if (sd.residual > tol)
        throw SolverError("stationary distribution residual above tolerance", sd.residual, 0);
    if ((pi.array() <= 0.0).any())
        throw SolverError("stationary distribution has nonpositive components "
                          "(chain may be reducible)", sd.residual, 0);
    sd.pi = std::move(pi);
    return sd;
}

StationaryDistribution stationary_power(const StochasticMatrix& p, double tol) {
    const Index n = p.size();
    const SpMat& m = p.matrix();
    Vec x = Vec::Constant(n, 1.0 / static_cast<double>(n));
    const int maxit = 200000;
    double resid = 1.0;
    for (int it = 0; it < maxit; ++it) {
        // Damped step avoids stalling on periodic chains.
        Vec y = 0.5 * (m.transpose() * x) + 0.5 * x;
        y /= y.sum();
        resid = (y - x).lpNorm<1>();
        x = std::move(y);
        if (resid <= tol * 0.5) {
            const double true_resid = stationary_residual(m, x);
            if (true_resid <= tol) {
                StationaryDistribution sd;
                sd.pi = std::move(x);
                sd.residual = true_resid;
                if ((sd.pi.array() <= 0.0).any())
                    throw SolverError("stationary distribution has nonpositive components",
                                      true_resid, it);
                return sd;
            }
        }
    }
    throw SolverError("power iteration did not converge", stationary_residual(m, x), maxit);
}

} // namespace

StationaryDistribution stationary(const StochasticMatrix& p, StationaryMethod method,
                                  double tol) {
    switch (method) {
        case StationaryMethod::DirectNullSpace:
            return stationary_direct(p, tol);
        case StationaryMethod::PowerIteration:
            return stationary_power(p, tol);
        case StationaryMethod::Auto:
        default:
            return p.size() <= stationary_direct_size_limit ? stationary_direct(p, tol)
                                                            : stationary_power(p, tol);
    }
}

// ---------------------------------------------------------------------------
// Strongly connected components (iterative Tarjan)
// ---------------------------------------------------------------------------

IrreducibilityCertificate strongly_connected_components(const SpMat& pattern) {
    const Index n = pattern.rows();
    IrreducibilityCertificate cert;
    cert.component_of.assign(n, -1);

    std::vector<int> index(n, -1), lowlink(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0, comp_count = 0;

    // Explicit DFS stack: (vertex, next edge position).
    const int* rowptr = pattern.outerIndexPtr();
    const int* colind = pattern.innerIndexPtr();
    std::vector<std::pair<int, int>> dfs;
    for (Index root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        dfs.emplace_back(static_cast<int>(root), rowptr[root]);
        index[root] = lowlink[root] = next_index++;
        stack.push_back(static_cast<int>(root));
        on_stack[root] = 1;
        while (!dfs.empty()) {
            auto& [u, pos] = dfs.back();
            if (pos < rowptr[u + 1]) {
                const int v = colind[pos++];
                if (index[v] < 0) {
                    index[v] = lowlink[v] = next_index++;
                    stack.push_back(v);
                    on_stack[v] = 1;
                    dfs.emplace_back(v, rowptr[v]);
                } else if (on_stack[v]) {
                    lowlink[u] = std::min(lowlink[u], index[v]);
                }
            } else {
                if (lowlink[u] == index[u]) {
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        cert.component_of[w] = comp_count;
                    } while (w != u);
                    ++comp_count;
                }
                const int done = u;
                dfs.pop_back();
                if (!dfs.empty())
                    lowlink[dfs.back().first] =
                        std::min(lowlink[dfs.back().first], lowlink[done]);
            }
        }
    }

    cert.component_count = comp_count;
    cert.irreducible = (comp_count == 1);
    std::vector<Index> sizes(comp_count, 0);
    for (Index i = 0; i < n; ++i) ++sizes[cert.component_of[i]];
    const auto it = std::max_element(sizes.begin(), sizes.end());
    cert.largest_component_size = *it;
    cert.largest_component_id = static_cast<int>(it - sizes.begin());
    return cert;
}

IrreducibilityCertificate check_irreducible(const StochasticMatrix& p) {
    return strongly_connected_components(p.matrix());
}

SpMat restrict_pattern(const SpMat& m, const std::vector<int>& component_of, int keep_id) {
    const Index n = m.rows();
    std::vector<Index> newid(n, -1);
    Index k = 0;
    for (Index i = 0; i < n; ++i)
        if (component_of[i] == keep_id) newid[i] = k++;
    std::vector<Eigen::Triplet<double>> trip;
    for (Index i = 0; i < n; ++i) {
        if (newid[i] < 0) continue;
        for (SpMat::InnerIterator it(m, i); it; ++it)
            if (newid[it.col()] >= 0)
                trip.emplace_back(newid[i], newid[it.col()], it.value());
    }
    SpMat out(k, k);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

// ---------------------------------------------------------------------------
// Stochastic complements and aggregation
// ---------------------------------------------------------------------------

namespace {

SpMatCol eye_minus(const SpMat& block) {
    SpMatCol m = SpMatCol(block) * -1.0;
    const Index n = block.rows();
    SpMatCol id(n, n);
    id.setIdentity();
    return SpMatCol(id + m);
}

// Complement = diag_block + coupler_left * (I - other_diag)^{-1} * coupler_right,
// computed against the prefactored LU with dense right-hand-side chunks.
SpMat complement_of(const SpMat& diag_block, const SpMat& coupler_left,
                    const SpMat& coupler_right, const SparseLuFactor& lu,
                    double drop_tol) {
    const Index m = diag_block.rows();
    Eigen::MatrixXd acc = Eigen::MatrixXd(diag_block);
    const Index chunk = 256;
    Eigen::MatrixXd rhs_dense;
    for (Index c0 = 0; c0 < m; c0 += chunk) {
        const Index w = std::min(chunk, m - c0);
        rhs_dense = Eigen::MatrixXd(coupler_right.middleCols(c0, w));
        acc.middleCols(c0, w) += coupler_left * lu.solve_many(rhs_dense);
    }
    // Roundoff can push exact zeros slightly negative; clamp tiny noise.
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < m; ++j) {
            double& v = acc(i, j);
            if (v < 0.0) {
                if (v < -1e-9)
                    throw SolverError("stochastic complement has a significantly negative "
                                      "entry; input may be reducible", -v, 0);
                v = 0.0;
            }
        }
    SpMat out = acc.sparseView(1.0, drop_tol);
    return out;
}

} // namespace

CensoredPair stochastic_complements(const StochasticMatrix& p, BlockPartition split,
                                    const StationaryDistribution& pi, double drop_tol) {
    const Index n = p.size();
    split.validate(n);
    const Index m = split.m;
    const SpMat& mat = p.matrix();

    const SpMat p11 = mat.topLeftCorner(m, m);
    const SpMat p12 = mat.topRightCorner(m, n - m);
    const SpMat p21 = mat.bottomLeftCorner(n - m, m);
    const SpMat p22 = mat.bottomRightCorner(n - m, n - m);

    auto f22 = std::make_shared<SparseLuFactor>(eye_minus(p22));
    auto f11 = std::make_shared<SparseLuFactor>(eye_minus(p11));

    CensoredPair pair;
    pair.p1 = StochasticMatrix::from_sparse(complement_of(p11, p12, p21, *f22, drop_tol));
    pair.p2 = StochasticMatrix::from_sparse(complement_of(p22, p21, p12, *f11, drop_tol));

    const Vec pi1 = pi.pi.head(m);
    const Vec pi2 = pi.pi.tail(n - m);
    pair.alpha1 = pi1.sum();
    pair.alpha2 = pi2.sum();
    pair.pi_hat1 = pi1 / pair.alpha1;
    pair.pi_hat2 = pi2 / pair.alpha2;
    pair.factors.f11 = std::move(f11);
    pair.factors.f22 = std::move(f22);

#ifndef NDEBUG
    // Closure property: complements of an irreducible chain stay irreducible.
    assert(check_irreducible(pair.p1).irreducible);
    assert(check_irreducible(pair.p2).irreducible);
#endif
    return pair;
}

AggregatedMatrix aggregated(const StochasticMatrix& p, BlockPartition split,
                            const Vec& pi_hat1, const Vec& pi_hat2) {
    const Index n = p.size();
    split.validate(n);
    const Index m = split.m;
    const SpMat& mat = p.matrix();
    const Vec ones_m = Vec::Ones(m);
    const Vec ones_q = Vec::Ones(n - m);

    AggregatedMatrix s;
    s.s(0, 0) = pi_hat1.dot(SpMat(mat.topLeftCorner(m, m)) * ones_m);
    s.s(0, 1) = pi_hat1.dot(SpMat(mat.topRightCorner(m, n - m)) * ones_q);
    s.s(1, 0) = pi_hat2.dot(SpMat(mat.bottomLeftCorner(n - m, m)) * ones_m);
    s.s(1, 1) = pi_hat2.dot(SpMat(mat.bottomRightCorner(n - m, n - m)) * ones_q);
    return s;
}

} // namespace kemeny
