#include "kemeny/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

namespace kemeny {

const char* method_name(Method m) {
    switch (m) {
        case Method::Direct: return "direct";
        case Method::Eig: return "eig";
        case Method::Dnc: return "dnc";
        case Method::HutchPP: return "hutchpp";
        case Method::ClosedForm: return "closed-form";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// SparseLuFactor
// ---------------------------------------------------------------------------

SparseLuFactor::SparseLuFactor(const SpMatCol& a) : n_(a.rows()) {
    lu_.analyzePattern(a);
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success)
        throw SolverError("sparse LU factorization failed (singular or structurally deficient matrix)",
                          std::numeric_limits<double>::infinity(), 0);
    factor_nnz_ = static_cast<std::uint64_t>(lu_.nnzL() + lu_.nnzU());
}

Vec SparseLuFactor::solve(const Vec& b) const {
    Vec x = lu_.solve(b);
    if (lu_.info() != Eigen::Success)
        throw SolverError("sparse LU solve failed", std::numeric_limits<double>::infinity(), 0);
    return x;
}

Eigen::MatrixXd SparseLuFactor::solve_many(const Eigen::MatrixXd& b) const {
    Eigen::MatrixXd x = lu_.solve(b);
    if (lu_.info() != Eigen::Success)
        throw SolverError("sparse LU solve failed", std::numeric_limits<double>::infinity(), 0);
    return x;
}

Vec SparseLuFactor::solve_transposed(const Vec& b) const {
    Vec x = lu_.transpose().solve(b);
    return x;
}

std::uint64_t SparseLuFactor::byte_estimate() const {
    // values + row indices of both factors, plus permutations
    return factor_nnz_ * (sizeof(double) + sizeof(int)) + 2u * n_ * sizeof(int);
}

// ---------------------------------------------------------------------------
// Ilu0
// ---------------------------------------------------------------------------

Ilu0 Ilu0::compute(const SpMat& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("ilu0 requires a square matrix");
    SpMat lu = a;
    lu.makeCompressed();
    const Index n = lu.rows();
    const int* rowptr = lu.outerIndexPtr();
    const int* colind = lu.innerIndexPtr();
    double* val = lu.valuePtr();

    std::vector<int> diag(n, -1);
    for (Index i = 0; i < n; ++i)
        for (int p = rowptr[i]; p < rowptr[i + 1]; ++p)
            if (colind[p] == i) diag[i] = p;
    for (Index i = 0; i < n; ++i)
        if (diag[i] < 0)
            throw std::invalid_argument("ilu0 requires a nonzero diagonal");

    // IKJ Gaussian elimination restricted to the pattern of A.
    std::vector<int> pos(n, -1);
    for (Index i = 0; i < n; ++i) {
        for (int p = rowptr[i]; p < rowptr[i + 1]; ++p) pos[colind[p]] = p;
        for (int p = rowptr[i]; p < rowptr[i + 1] && colind[p] < i; ++p) {
            const int k = colind[p];
            const double ukk = val[diag[k]];
            if (ukk <= 0.0)
                throw BreakdownError("ilu0 breakdown: nonpositive pivot", k);
            const double lik = val[p] / ukk;
            val[p] = lik;
            for (int q = diag[k] + 1; q < rowptr[k + 1]; ++q) {
                const int j = colind[q];
                if (pos[j] >= 0) val[pos[j]] -= lik * val[q];
            }
        }
        if (val[diag[i]] <= 0.0)
            throw BreakdownError("ilu0 breakdown: nonpositive pivot", i);
        for (int p = rowptr[i]; p < rowptr[i + 1]; ++p) pos[colind[p]] = -1;
    }

    Ilu0 f;
    f.lu_ = std::move(lu);
    return f;
}

Vec Ilu0::solve(const Vec& b) const {
    const Index n = lu_.rows();
    const int* rowptr = lu_.outerIndexPtr();
    const int* colind = lu_.innerIndexPtr();
    const double* val = lu_.valuePtr();
    Vec x = b;
    // forward: L (unit diagonal)
    for (Index i = 0; i < n; ++i) {
        double s = x[i];
        for (int p = rowptr[i]; p < rowptr[i + 1] && colind[p] < i; ++p)
            s -= val[p] * x[colind[p]];
        x[i] = s;
    }
    // backward: U
    for (Index i = n - 1; i >= 0; --i) {
        double s = x[i];
        double d = 1.0;
        for (int p = rowptr[i + 1] - 1; p >= rowptr[i]; --p) {
            const int j = colind[p];
            if (j > i) s -= val[p] * x[j];
            else if (j == i) { d = val[p]; break; }
        }
        x[i] = s / d;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Ic0
// ---------------------------------------------------------------------------

Ic0 Ic0::compute(const SpMatCol& a, double shift) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("ic0 requires a square matrix");
    const Index n = a.rows();
    SpMatCol l = a.triangularView<Eigen::Lower>();
    l.makeCompressed();
    if (shift != 0.0) {
        for (Index j = 0; j < n; ++j)
            for (SpMatCol::InnerIterator it(l, j); it; ++it)
                if (it.row() == j) it.valueRef() *= (1.0 + shift);
    }
    const int* colptr = l.outerIndexPtr();
    const int* rowind = l.innerIndexPtr();
    double* val = l.valuePtr();

    // Left-looking factorization on the fixed lower-triangle pattern.
    // row_entries[j] lists the stored positions of L(j,k), k < j.
    std::vector<std::vector<std::pair<int, int>>> row_entries(n);
    std::vector<int> pos(n, -1);
    for (Index j = 0; j < n; ++j) {
        for (int p = colptr[j]; p < colptr[j + 1]; ++p) pos[rowind[p]] = p;
        for (auto [k, pjk] : row_entries[j]) {
            const double ljk = val[pjk];
            for (int q = pjk; q < colptr[k + 1]; ++q) {
                const int i = rowind[q];
                if (pos[i] >= 0) val[pos[i]] -= ljk * val[q];
            }
        }
        const int pj = colptr[j];
        if (pj >= colptr[j + 1] || rowind[pj] != j)
            throw std::invalid_argument("ic0 requires a nonzero diagonal");
        if (val[pj] <= 0.0)
            throw BreakdownError("ic0 breakdown: nonpositive pivot", j);
        const double dj = std::sqrt(val[pj]);
        val[pj] = dj;
        for (int p = pj + 1; p < colptr[j + 1]; ++p) {
            val[p] /= dj;
            row_entries[rowind[p]].push_back({static_cast<int>(j), p});
        }
        for (int p = colptr[j]; p < colptr[j + 1]; ++p) pos[rowind[p]] = -1;
    }
    Ic0 f;
    f.l_ = std::move(l);
    return f;
}

Vec Ic0::lower_solve(const Vec& b) const {
    const Index n = l_.rows();
    const int* colptr = l_.outerIndexPtr();
    const int* rowind = l_.innerIndexPtr();
    const double* val = l_.valuePtr();
    Vec x = b;
    for (Index j = 0; j < n; ++j) {
        x[j] /= val[colptr[j]];
        const double xj = x[j];
        for (int p = colptr[j] + 1; p < colptr[j + 1]; ++p)
            x[rowind[p]] -= val[p] * xj;
    }
    return x;
}

Vec Ic0::upper_solve(const Vec& b) const {
    const Index n = l_.rows();
    const int* colptr = l_.outerIndexPtr();
    const int* rowind = l_.innerIndexPtr();
    const double* val = l_.valuePtr();
    Vec x = b;
    for (Index j = n - 1; j >= 0; --j) {
        double s = x[j];
        for (int p = colptr[j] + 1; p < colptr[j + 1]; ++p)
            s -= val[p] * x[rowind[p]];
        x[j] = s / val[colptr[j]];
    }
    return x;
}

Vec Ic0::solve(const Vec& b) const { return upper_solve(lower_solve(b)); }

double Ic0::pivot_ratio() const {
    const Index n = l_.rows();
    const int* colptr = l_.outerIndexPtr();
    const double* val = l_.valuePtr();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (Index j = 0; j < n; ++j) {
        lo = std::min(lo, val[colptr[j]]);
        hi = std::max(hi, val[colptr[j]]);
    }
    return hi > 0.0 ? lo / hi : 0.0;
}

// ---------------------------------------------------------------------------
// Krylov solvers
// ---------------------------------------------------------------------------

SolveStatus gmres(const LinOp& op, const Vec& b, const LinOp& precond,
                  double tol, int restart, int maxit) {
    const Index n = b.size();
    const double bnorm = b.norm();
    SolveStatus st;
    st.x = Vec::Zero(n);
    if (bnorm == 0.0) { st.converged = true; return st; }

    Vec x = Vec::Zero(n);
    int total_it = 0;
    double true_resid = 1.0;

    while (total_it < maxit) {
        Vec r = precond(b - op(x));
        double beta = r.norm();
        if (beta == 0.0) break;

        const int m = std::min<int>(restart, maxit - total_it);
        Eigen::MatrixXd v(n, m + 1);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
        Vec cs = Vec::Zero(m), sn = Vec::Zero(m), g = Vec::Zero(m + 1);
        v.col(0) = r / beta;
        g[0] = beta;

        int k = 0;
        bool invariant_subspace = false;
        for (; k < m; ++k) {
            Vec w = precond(op(v.col(k)));
            for (int i = 0; i <= k; ++i) {        // modified Gram-Schmidt
                h(i, k) = w.dot(v.col(i));
                w -= h(i, k) * v.col(i);
            }
            h(k + 1, k) = w.norm();
            if (h(k + 1, k) > 0.0) v.col(k + 1) = w / h(k + 1, k);
            else invariant_subspace = true;
            for (int i = 0; i < k; ++i) {         // apply stored rotations
                const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
                h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
                h(i, k) = t;
            }
            const double denom = std::hypot(h(k, k), h(k + 1, k));
            if (denom == 0.0) { ++k; break; }
            cs[k] = h(k, k) / denom;
            sn[k] = h(k + 1, k) / denom;
            h(k, k) = denom;
            h(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            ++total_it;
            if (std::abs(g[k + 1]) <= tol * beta) { ++k; break; }
        }
        // back substitution for the least-squares coefficients
        Vec y = Vec::Zero(k);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[j];
            y[i] = s / h(i, i);
        }
        x += v.leftCols(k) * y;

        true_resid = (b - op(x)).norm() / bnorm;
        if (!std::isfinite(true_resid)) break;
        if (true_resid <= tol) {
            st.x = x;
            st.iterations = total_it;
            st.residual = true_resid;
            st.converged = true;
            return st;
        }
        // Invariant subspace reached without convergence: restarting cannot
        // make progress from here.
        if (invariant_subspace) break;
    }
    st.x = x;
    st.iterations = total_it;
    st.residual = true_resid;
    st.converged = false;
    return st;
}

SolveStatus bicgstab(const LinOp& op, const Vec& b, const LinOp& precond,
                     double tol, int maxit) {
    const Index n = b.size();
    const double bnorm = b.norm();
    SolveStatus st;
    st.x = Vec::Zero(n);
    if (bnorm == 0.0) { st.converged = true; return st; }

    Vec x = Vec::Zero(n);
    Vec r = b;
    const Vec r0 = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    Vec p = Vec::Zero(n), v = Vec::Zero(n);

    for (int it = 0; it < maxit; ++it) {
        const double rho_new = r0.dot(r);
        if (!std::isfinite(rho_new) || std::abs(rho_new) < 1e-300) break;  // breakdown
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
            p = r + beta * (p - omega * v);
        }
        rho = rho_new;
        const Vec ph = precond(p);
        v = op(ph);
        const double r0v = r0.dot(v);
        if (std::abs(r0v) < 1e-300) break;
        alpha = rho / r0v;
        Vec s = r - alpha * v;
        if (s.norm() <= tol * bnorm) {
            x += alpha * ph;
            st.x = x;
            st.iterations = it + 1;
            st.residual = (b - op(x)).norm() / bnorm;
            st.converged = st.residual <= tol;
            if (st.converged) return st;
            r = b - op(x);
            continue;
        }
        const Vec sh = precond(s);
        const Vec t = op(sh);
        const double tt = t.squaredNorm();
        if (tt == 0.0) break;
        omega = t.dot(s) / tt;
        if (omega == 0.0) break;
        x += alpha * ph + omega * sh;
        r = s - omega * t;
        if (r.norm() <= tol * bnorm) {
            const double true_resid = (b - op(x)).norm() / bnorm;
            if (true_resid <= tol) {
                st.x = x;
                st.iterations = it + 1;
                st.residual = true_resid;
                st.converged = true;
                return st;
            }
        }
    }
    st.x = x;
    st.iterations = maxit;
    st.residual = (b - op(x)).norm() / bnorm;
    st.converged = st.residual <= tol;
    return st;
}

SolveStatus cg(const LinOp& op, const Vec& b, const LinOp& precond,
               double tol, int maxit) {
    const Index n = b.size();
    const double bnorm = b.norm();
    SolveStatus st;
    st.x = Vec::Zero(n);
    if (bnorm == 0.0) { st.converged = true; return st; }

    Vec x = Vec::Zero(n);
    Vec r = b;
    Vec z = precond(r);
    Vec p = z;
    double rz = r.dot(z);

    for (int it = 0; it < maxit; ++it) {
        const Vec ap = op(p);
        const double pap = p.dot(ap);
        if (!std::isfinite(pap) || pap <= 0.0) break;   // indefinite or broken operator
        const double alpha = rz / pap;
        x += alpha * p;
        r -= alpha * ap;
        if (r.norm() <= tol * bnorm) {
            st.x = x;
            st.iterations = it + 1;
            st.residual = r.norm() / bnorm;
            st.converged = true;
            return st;
        }
        z = precond(r);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    st.x = x;
    st.iterations = maxit;
    st.residual = r.norm() / bnorm;
    st.converged = st.residual <= tol;
    return st;
}

// ---------------------------------------------------------------------------
// Nested dissection
// ---------------------------------------------------------------------------

namespace {

// One connected component with local indexing: adj holds local ids, verts
// maps local id -> original vertex.
struct NdComponent {
    std::vector<int> verts;
    std::vector<std::vector<int>> adj;
};

std::vector<int> bfs_order(const NdComponent& c, int start, std::vector<int>& level) {
    level.assign(c.verts.size(), -1);
    std::vector<int> order;
    std::queue<int> q;
    level[start] = 0;
    q.push(start);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        order.push_back(u);
        for (int v : c.adj[u])
            if (level[v] < 0) {
                level[v] = level[u] + 1;
                q.push(v);
            }
    }
    return order;
}

// Bisection from BFS levels of a pseudo-peripheral vertex.
std::vector<char> bfs_bisection(const NdComponent& c) {
    std::vector<int> level;
    std::vector<int> order = bfs_order(c, 0, level);
    const int far = order.back();
    order = bfs_order(c, far, level);
    std::vector<char> side(c.verts.size(), 1);
    for (size_t i = 0; i < order.size() / 2; ++i) side[order[i]] = 0;
    return side;
}

// Bisection at the median of an approximate Fiedler vector, computed by
// power iteration on (c I - L) with the constant vector deflated.
std::vector<char> spectral_bisection(const NdComponent& c, std::uint64_t seed) {
    const Index n = static_cast<Index>(c.verts.size());
    Index max_deg = 0;
    for (const auto& nb : c.adj) max_deg = std::max<Index>(max_deg, nb.size());
    const double shift = static_cast<double>(max_deg) + 1.0;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec x(n);
    for (Index i = 0; i < n; ++i) x[i] = u(rng);
    x.array() -= x.mean();
    x.normalize();

    Vec y(n);
    for (int it = 0; it < 150; ++it) {
        for (Index i = 0; i < n; ++i) {
            double s = (shift - static_cast<double>(c.adj[i].size())) * x[i];
            for (int v : c.adj[i]) s += x[v];
            y[i] = s;
        }
        y.array() -= y.mean();
        const double norm = y.norm();
        if (norm < 1e-14) break;
        y /= norm;
        if ((y - x).norm() < 1e-8 || (y + x).norm() < 1e-8) { x = y; break; }
        x = y;
    }

    std::vector<Index> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        return x[a] != x[b] ? x[a] < x[b] : a < b;
    });
    std::vector<char> side(n, 1);
    for (Index i = 0; i < n / 2; ++i) side[idx[i]] = 0;
    return side;
}

Index cut_size(const NdComponent& c, const std::vector<char>& side) {
    Index cut = 0;
    for (size_t uu = 0; uu < c.adj.size(); ++uu)
        for (int v : c.adj[uu])
            if (static_cast<size_t>(v) > uu && side[uu] != side[v]) ++cut;
    return cut;
}

// Fiduccia-Mattheyses style refinement: tentative single-vertex moves with
// best-prefix rollback, balance kept within [0.35, 0.65].
void fm_refine(const NdComponent& c, std::vector<char>& side) {
    const int n = static_cast<int>(c.verts.size());
    const int lo = std::max(1, static_cast<int>(n * 0.35));
    const int hi = n - lo;

    for (int pass = 0; pass < 4; ++pass) {
        std::vector<char> locked(n, 0);
        std::vector<int> gain(n);
        auto compute_gain = [&](int v) {
            int g = 0;
            for (int w : c.adj[v]) g += side[w] != side[v] ? 1 : -1;
            return g;
        };
        for (int v = 0; v < n; ++v) gain[v] = compute_gain(v);
        int count0 = 0;
        for (int v = 0; v < n; ++v) count0 += side[v] == 0;

        std::vector<int> moves;
        Index best_cut = cut_size(c, side);
        const Index start_cut = best_cut;
        Index cur_cut = best_cut;
        size_t best_prefix = 0;

        const int move_budget = n;
        for (int step = 0; step < move_budget; ++step) {
            int best = -1;
            for (int v = 0; v < n; ++v) {
                if (locked[v]) continue;
                const int after0 = count0 + (side[v] == 0 ? -1 : 1);
                if (after0 < lo || after0 > hi) continue;
                if (best < 0 || gain[v] > gain[best]) best = v;
            }
            if (best < 0) break;
            cur_cut -= gain[best];
            count0 += side[best] == 0 ? -1 : 1;
            side[best] = static_cast<char>(1 - side[best]);
            locked[best] = 1;
            moves.push_back(best);
            for (int w : c.adj[best]) gain[w] = compute_gain(w);
            if (cur_cut < best_cut) {
                best_cut = cur_cut;
                best_prefix = moves.size();
            }
        }
        // Roll back past the best prefix.
        for (size_t i = moves.size(); i > best_prefix; --i)
            side[moves[i - 1]] = static_cast<char>(1 - side[moves[i - 1]]);
        if (best_cut >= start_cut) break;
    }
}

// Vertex separator from the cut: all side-1 endpoints of cut edges. Ordering
// [side-0 | side-1 minus separator | separator] makes block 0 couple to the
// rest only through the separator columns.
struct Bisection {
    std::vector<int> a, b, sep;  // local ids
    Index cut = 0;
};

Bisection finalize_bisection(const NdComponent& c, const std::vector<char>& side) {
    const int n = static_cast<int>(c.verts.size());
    std::vector<char> in_sep(n, 0);
    Bisection out;
    out.cut = cut_size(c, side);
    for (int v = 0; v < n; ++v)
        if (side[v] == 0)
            for (int w : c.adj[v])
                if (side[w] == 1) in_sep[w] = 1;
    for (int v = 0; v < n; ++v) {
        if (side[v] == 0) out.a.push_back(v);
        else if (in_sep[v]) out.sep.push_back(v);
        else out.b.push_back(v);
    }
    return out;
}

NdComponent subcomponent(const NdComponent& c, const std::vector<int>& locals) {
    NdComponent sub;
    sub.verts.reserve(locals.size());
    std::vector<int> newid(c.verts.size(), -1);
    for (size_t i = 0; i < locals.size(); ++i) {
        newid[locals[i]] = static_cast<int>(i);
        sub.verts.push_back(c.verts[locals[i]]);
    }
    sub.adj.resize(locals.size());
    for (size_t i = 0; i < locals.size(); ++i)
        for (int w : c.adj[locals[i]])
            if (newid[w] >= 0) sub.adj[i].push_back(newid[w]);
    return sub;
}

std::vector<NdComponent> split_components(const NdComponent& c) {
    std::vector<NdComponent> comps;
    std::vector<char> seen(c.verts.size(), 0);
    for (size_t s = 0; s < c.verts.size(); ++s) {
        if (seen[s]) continue;
        std::vector<int> locals;
        std::queue<int> q;
        q.push(static_cast<int>(s));
        seen[s] = 1;
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            locals.push_back(u);
            for (int v : c.adj[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    q.push(v);
                }
        }
        std::sort(locals.begin(), locals.end());
        comps.push_back(subcomponent(c, locals));
    }
    return comps;
}

// Recursively orders one component; reports the top-level split when asked.
void dissect(const NdComponent& c, std::vector<int>& out,
             Index* split_point, Index* separator_size) {
    const size_t nv = c.verts.size();
    if (nv <= 8) {
        if (split_point) {
            *split_point = static_cast<Index>(nv / 2);
            *separator_size = 0;
        }
        out.insert(out.end(), c.verts.begin(), c.verts.end());
        return;
    }

    const auto comps = split_components(c);
    if (comps.size() > 1) {
        size_t placed = 0;
        bool split_set = false;
        for (const auto& sub : comps) {
            dissect(sub, out, nullptr, nullptr);
            placed += sub.verts.size();
            if (split_point && !split_set && placed >= nv / 2) {
                *split_point = static_cast<Index>(placed);
                *separator_size = 0;
                split_set = true;
            }
        }
        return;
    }

    // Candidate bisections: spectral (two deterministic seeds) and BFS
    // levels, each cleaned up by FM refinement; keep the smallest cut.
    std::vector<char> best_side;
    Index best_cut = -1;
    for (int cand = 0; cand < 3; ++cand) {
        std::vector<char> side = cand < 2 ? spectral_bisection(c, 1234567u + cand)
                                          : bfs_bisection(c);
        fm_refine(c, side);
        const Index cut = cut_size(c, side);
        if (best_cut < 0 || cut < best_cut) {
            best_cut = cut;
            best_side = std::move(side);
        }
    }

    const Bisection bis = finalize_bisection(c, best_side);
    if (bis.a.empty() || (bis.b.empty() && bis.sep.empty())) {
        // Degenerate split; fall back to a BFS halving without a separator.
        std::vector<int> level;
        std::vector<int> order = bfs_order(c, 0, level);
        const size_t half = order.size() / 2;
        std::vector<int> a(order.begin(), order.begin() + half);
        std::vector<int> b(order.begin() + half, order.end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (split_point) {
            *split_point = static_cast<Index>(a.size());
            *separator_size = 0;
        }
        dissect(subcomponent(c, a), out, nullptr, nullptr);
        dissect(subcomponent(c, b), out, nullptr, nullptr);
        return;
    }

    if (split_point) {
        *split_point = static_cast<Index>(bis.a.size());
        *separator_size = static_cast<Index>(bis.sep.size());
    }
    dissect(subcomponent(c, bis.a), out, nullptr, nullptr);
    dissect(subcomponent(c, bis.b), out, nullptr, nullptr);
    for (int v : bis.sep) out.push_back(c.verts[v]);
}

} // namespace

Ordering nested_dissection(const SpMat& pattern) {
    const Index n = pattern.rows();
    Ordering ord;
    if (n <= 8) {
        ord.perm.resize(n);
        std::iota(ord.perm.begin(), ord.perm.end(), 0);
        ord.method = OrderingMethod::Natural;
        ord.split_point = n / 2;
        ord.separator_size = 0;
        return ord;
    }

    NdComponent root;
    root.verts.resize(n);
    std::iota(root.verts.begin(), root.verts.end(), 0);
    root.adj.resize(n);
    for (Index i = 0; i < n; ++i) {
        for (SpMat::InnerIterator it(pattern, i); it; ++it) {
            if (it.col() == i) continue;
            root.adj[i].push_back(static_cast<int>(it.col()));
            root.adj[it.col()].push_back(static_cast<int>(i));
        }
    }
    for (auto& nb : root.adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    ord.perm.reserve(n);
    ord.split_point = 0;
    dissect(root, ord.perm, &ord.split_point, &ord.separator_size);
    ord.method = OrderingMethod::NestedDissection;
    if (ord.split_point <= 0 || ord.split_point >= n) ord.split_point = n / 2;
    return ord;
}

} // namespace kemeny
