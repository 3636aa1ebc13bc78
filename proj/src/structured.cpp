#include "kemeny/structured.hpp"

#include "kemeny/direct.hpp"
#include "kemeny/dnc.hpp"

#include <Eigen/LU>

#include <numeric>
#include <queue>

namespace kemeny {

// ---------------------------------------------------------------------------
// PeriodicChain
// ---------------------------------------------------------------------------

PeriodicChain::PeriodicChain(std::vector<Eigen::MatrixXd> blocks)
    : blocks_(std::move(blocks)) {
    const int d = static_cast<int>(blocks_.size());
    if (d < 2)
        throw std::invalid_argument("periodic chain needs period >= 2");
    sizes_.resize(d);
    // A_i maps class i (width n_i) into class i+1's row space: A_i is
    // n_{i+1} x n_i, cyclically. Recover sizes from the block shapes.
    for (int i = 0; i < d; ++i) sizes_[i] = blocks_[i].cols();
    for (int i = 0; i < d; ++i) {
        const Index expected_rows = sizes_[(i + 1) % d];
        if (blocks_[i].rows() != expected_rows)
            throw std::invalid_argument("block " + std::to_string(i + 1)
                                        + " has inconsistent dimensions");
        for (Index r = 0; r < blocks_[i].rows(); ++r) {
            if ((blocks_[i].row(r).array() < 0).any()
                || std::abs(blocks_[i].row(r).sum() - 1.0) > StochasticMatrix::row_sum_tol)
                throw std::invalid_argument("block " + std::to_string(i + 1)
                                            + " is not row-stochastic");
            blocks_[i].row(r) /= blocks_[i].row(r).sum();
        }
    }
    total_ = std::accumulate(sizes_.begin(), sizes_.end(), Index(0));
}

Eigen::MatrixXd PeriodicChain::cycle_product() const {
    const int d = period();
    Eigen::MatrixXd prod = blocks_[d - 1];
    for (int i = d - 2; i >= 0; --i) prod *= blocks_[i];
    return prod;
}

StochasticMatrix assemble_periodic(const PeriodicChain& chain) {
    const int d = chain.period();
    const auto& sizes = chain.class_sizes();
    const Index n = chain.size();
    std::vector<Index> offset(d + 1, 0);
    for (int i = 0; i < d; ++i) offset[i + 1] = offset[i] + sizes[i];

    std::vector<Eigen::Triplet<double>> trip;
    // Block row 1 holds A_d in the last block column; block row j+1 holds A_j
    // in block column j: the chain cycles 1 -> d -> d-1 -> ... -> 2 -> 1.
    const Eigen::MatrixXd& ad = chain.blocks()[d - 1];
    for (Index r = 0; r < ad.rows(); ++r)
        for (Index c = 0; c < ad.cols(); ++c)
            if (ad(r, c) != 0.0)
                trip.emplace_back(offset[0] + r, offset[d - 1] + c, ad(r, c));
    for (int j = 1; j < d; ++j) {
        const Eigen::MatrixXd& a = chain.blocks()[j - 1];
        for (Index r = 0; r < a.rows(); ++r)
            for (Index c = 0; c < a.cols(); ++c)
                if (a(r, c) != 0.0)
                    trip.emplace_back(offset[j] + r, offset[j - 1] + c, a(r, c));
    }
    SpMat p(n, n);
    p.setFromTriplets(trip.begin(), trip.end());
    return StochasticMatrix::from_sparse(std::move(p));
}

namespace {

double kappa_of_dense(const Eigen::MatrixXd& m) {
    const StochasticMatrix p = StochasticMatrix::from_dense(m);
    DirectOptions opts;
    opts.dense_limit = std::max<Index>(p.size(), 4096);
    return kemeny_direct(p, opts).kappa;
}

} // namespace

KemenyResult kemeny_periodic(const PeriodicChain& chain) {
    const Eigen::MatrixXd prod = chain.cycle_product();
    const StochasticMatrix p1 = StochasticMatrix::from_dense(prod);
    if (!check_irreducible(p1).irreducible)
        throw std::invalid_argument("cycle product is reducible");

    const int d = chain.period();
    const Index n = chain.size();
    const Index n1 = chain.class_sizes()[0];
    double kappa_prod;
    if (n1 <= 4096) {
        kappa_prod = kemeny_direct(p1).kappa;
    } else {
        const StationaryDistribution sd = stationary(p1);
        kappa_prod = kemeny_dnc(p1, sd).kappa;
    }

    KemenyResult r;
    r.kappa = d * kappa_prod + static_cast<double>(n - d * n1) + (d - 1) / 2.0;
    r.method = Method::ClosedForm;
    return r;
}

PeriodicDecomposition kemeny_periodic_decomposition_check(const PeriodicChain& chain) {
    const int d = chain.period();
    const StochasticMatrix p = assemble_periodic(chain);
    const Index n1 = chain.class_sizes()[0];

    PeriodicDecomposition out;
    DirectOptions opts;
    opts.dense_limit = std::max<Index>(p.size(), 4096);
    out.kappa_p = kemeny_direct(p, opts).kappa;
    out.kappa_p1 = kappa_of_dense(chain.cycle_product());

    if (d == 2) {
        // The censored second chain is the single product A_1 A_2.
        out.kappa_p2 = kappa_of_dense(chain.blocks()[0] * chain.blocks()[1]);
    } else {
        // The (d-1)-cyclic chain with blocks A_2, ..., A_{d-1}, A_1 A_d.
        std::vector<Eigen::MatrixXd> rest(chain.blocks().begin() + 1, chain.blocks().end() - 1);
        rest.push_back(chain.blocks()[0] * chain.blocks()[d - 1]);
        out.kappa_p2 = kemeny_direct(assemble_periodic(PeriodicChain(std::move(rest))), opts).kappa;
    }

    const StationaryDistribution sd = stationary(p);
    const CensoredPair pair = stochastic_complements(p, {n1}, sd);
    out.gamma = theta_via_solves(p, {n1}, pair).gamma;
    return out;
}

KemenyResult kemeny_kronecker(const StochasticMatrix& a, const StochasticMatrix& b) {
    const Index na = a.size();
    const Index nb = b.size();
    // Sparse Kronecker product.
    std::vector<Eigen::Triplet<double>> trip;
    const SpMat& am = a.matrix();
    const SpMat& bm = b.matrix();
    trip.reserve(static_cast<size_t>(am.nonZeros()) * bm.nonZeros());
    for (Index i = 0; i < na; ++i)
        for (SpMat::InnerIterator ita(am, i); ita; ++ita)
            for (Index k = 0; k < nb; ++k)
                for (SpMat::InnerIterator itb(bm, k); itb; ++itb)
                    trip.emplace_back(i * nb + k, ita.col() * nb + itb.col(),
                                      ita.value() * itb.value());
    SpMat kron(na * nb, na * nb);
    kron.setFromTriplets(trip.begin(), trip.end());
    const StochasticMatrix p = StochasticMatrix::from_sparse(std::move(kron));

    if (!check_irreducible(p).irreducible)
        throw std::invalid_argument("Kronecker product is reducible; compute the factors' "
                                    "constants directly instead");

    const StationaryDistribution sd = stationary(p);
    const CensoredPair pair = stochastic_complements(p, {nb}, sd);
    DirectOptions opts;
    opts.dense_limit = std::max<Index>(p.size(), 4096);
    const double k1 = kemeny_direct(pair.p1, opts).kappa;
    const double k2 = kemeny_direct(pair.p2, opts).kappa;

    // gamma in closed form from the first factor alone.
    const StationaryDistribution xa = stationary(a);
    const double x1 = xa.pi[0];
    Eigen::MatrixXd za = Eigen::MatrixXd(am) * -1.0;
    za.diagonal().array() += 1.0;
    za.noalias() += Vec::Ones(na) * xa.pi.transpose();
    Vec e1 = Vec::Zero(na);
    e1[0] = 1.0;
    const double z11 = e1.dot(za.partialPivLu().solve(e1));
    const double gamma = (z11 - x1) / (1.0 - x1);

    KemenyResult r;
    r.kappa = k1 + k2 + gamma;
    r.method = Method::ClosedForm;
    r.diagnostics.max_residual = std::max(sd.residual, xa.residual);
    return r;
}

ConstRowSumResult kemeny_constant_rowsum(const StochasticMatrix& p, BlockPartition split) {
    const Index n = p.size();
    split.validate(n);
    const Index m = split.m;
    const SpMat& mat = p.matrix();
    const Vec row_sums_11 = SpMat(mat.topLeftCorner(m, m)) * Vec::Ones(m);
    const Vec row_sums_22 = SpMat(mat.bottomRightCorner(n - m, n - m)) * Vec::Ones(n - m);

    const double r1 = row_sums_11.mean();
    const double r2 = row_sums_22.mean();
    if ((row_sums_11.array() - r1).abs().maxCoeff() > 1e-10
        || (row_sums_22.array() - r2).abs().maxCoeff() > 1e-10)
        throw std::invalid_argument("diagonal blocks do not have constant row sums");
    if (r1 < 0.0 || r1 >= 1.0 || r2 < 0.0 || r2 >= 1.0)
        throw std::invalid_argument("constant row sums must satisfy 0 <= r < 1");

    ConstRowSumResult out;
    out.r1 = r1;
    out.r2 = r2;
    out.alpha1 = (1.0 - r2) / (2.0 - r1 - r2);
    out.alpha2 = (1.0 - r1) / (2.0 - r1 - r2);

    // Complements still need pi_hat vectors; masses are known in closed form
    // but the censored vectors are not, so compute pi once.
    const StationaryDistribution sd = stationary(p);
    const CensoredPair pair = stochastic_complements(p, split, sd);
    DirectOptions opts;
    opts.dense_limit = std::max<Index>(n, 4096);
    out.result.kappa = kemeny_direct(pair.p1, opts).kappa
                     + kemeny_direct(pair.p2, opts).kappa
                     + 1.0 / (2.0 - r1 - r2);
    out.result.method = Method::ClosedForm;
    out.result.diagnostics.max_residual = sd.residual;
    return out;
}

PeriodicChain extremal_periodic(int d, const std::vector<Index>& sizes) {
    if (d < 2 || static_cast<int>(sizes.size()) != d)
        throw std::invalid_argument("need d >= 2 block sizes");
    const Index n1 = sizes[0];
    for (Index s : sizes)
        if (s < n1)
            throw std::invalid_argument("the first class must be smallest (n_1 <= n_i)");

    // Partition class j into n1 contiguous, balanced subsets.
    auto partition = [&](Index nj) {
        std::vector<std::pair<Index, Index>> parts;  // [begin, size)
        const Index base = nj / n1, rem = nj % n1;
        Index at = 0;
        for (Index l = 0; l < n1; ++l) {
            const Index sz = base + (l < rem ? 1 : 0);
            parts.push_back({at, sz});
            at += sz;
        }
        return parts;
    };
    std::vector<std::vector<std::pair<Index, Index>>> parts(d);
    for (int j = 0; j < d; ++j) parts[j] = partition(sizes[j]);

    // blocks[i-1] = A_i carries class i -> class i+1 edge weights laid out as
    // rows = class i+1, cols = class i (the assembled matrix places A_i in
    // block row i+1, block column i).
    std::vector<Eigen::MatrixXd> blocks(d);
    for (int i = 0; i < d; ++i)
        blocks[i] = Eigen::MatrixXd::Zero(sizes[(i + 1) % d], sizes[i]);

    // Class 1 -> class d: x in C_l^1 goes uniformly into C_l^d. These entries
    // live in block row 1 / block column d of the assembled matrix, i.e. A_d.
    for (Index l = 0; l < n1; ++l) {
        const auto [db, dsz] = parts[d - 1][l];
        const auto [ob, osz] = parts[0][l];
        for (Index x = 0; x < osz; ++x)
            for (Index y = 0; y < dsz; ++y)
                blocks[d - 1](ob + x, db + y) = 1.0 / static_cast<double>(dsz);
    }
    // Class j -> class j-1 for 3 <= j <= d: C_l^j goes uniformly into C_l^{j-1};
    // stored in A_{j-1} (block row j, block column j-1).
    for (int j = 3; j <= d; ++j) {
        for (Index l = 0; l < n1; ++l) {
            const auto [tb, tsz] = parts[j - 2][l];
            const auto [ob, osz] = parts[j - 1][l];
            for (Index x = 0; x < osz; ++x)
                for (Index y = 0; y < tsz; ++y)
                    blocks[j - 2](ob + x, tb + y) = 1.0 / static_cast<double>(tsz);
        }
    }
    // Class 2 -> class 1 shifts the subset index down cyclically; C_l^1 are
    // singletons, so these rows are unit vectors. Stored in A_1.
    for (Index l = 0; l < n1; ++l) {
        const Index target = (l == 0) ? n1 - 1 : l - 1;
        const auto [ob, osz] = parts[1][l];
        for (Index x = 0; x < osz; ++x)
            blocks[0](ob + x, parts[0][target].first) = 1.0;
    }
    return PeriodicChain(std::move(blocks));
}

std::optional<int> detect_period(const StochasticMatrix& p) {
    const SpMat& m = p.matrix();
    const Index n = m.rows();
    if (m.nonZeros() == 0) return std::nullopt;

    std::vector<int> level(n, -1);
    std::queue<int> q;
    level[0] = 0;
    q.push(0);
    long long g = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (SpMat::InnerIterator it(m, u); it; ++it) {
            const int v = static_cast<int>(it.col());
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                q.push(v);
            } else {
                g = std::gcd(g, static_cast<long long>(level[u] + 1 - level[v]));
            }
        }
    }
    for (Index i = 0; i < n; ++i)
        if (level[i] < 0) return std::nullopt;  // not reachable: reducible
    return g == 0 ? std::nullopt : std::optional<int>(static_cast<int>(std::abs(g)));
}

} // namespace kemeny
