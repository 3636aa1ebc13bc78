#include "kemeny/run.hpp"

#include "kemeny/direct.hpp"
#include "kemeny/matrix_market.hpp"
#include "kemeny/structured.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace kemeny {

const char* schema_version() { return "1"; }

namespace {

const char* run_method_name(RunMethod m) {
    switch (m) {
        case RunMethod::Direct: return "direct";
        case RunMethod::Eig: return "eig";
        case RunMethod::Dnc: return "dnc";
        case RunMethod::HutchPP: return "hutchpp";
        case RunMethod::Auto: return "auto";
        case RunMethod::ClosedForm: return "closed-form";
    }
    return "unknown";
}

// Zero-diagonal 2-block pattern (the bipartite layout eq-style): diagonal
// blocks empty for some contiguous split.
std::optional<Index> bipartite_split(const SpMat& m) {
    const Index n = m.rows();
    // Candidate split: the minimum column reached from row 0. The pattern is
    // the bipartite layout iff rows [0,cand) hit only [cand,n) and vice versa.
    Index cand = n;
    for (SpMat::InnerIterator it(m, 0); it; ++it) cand = std::min(cand, it.col());
    if (cand <= 0 || cand >= n) return std::nullopt;
    for (Index i = 0; i < n; ++i) {
        for (SpMat::InnerIterator it(m, i); it; ++it) {
            const bool row_first = i < cand;
            const bool col_first = it.col() < cand;
            if (row_first == col_first) return std::nullopt;
        }
    }
    return cand;
}

std::optional<std::pair<double, double>> const_rowsum_split(const SpMat& m, Index split) {
    const Index n = m.rows();
    if (split < 1 || split >= n) return std::nullopt;
    Vec s1 = SpMat(m.topLeftCorner(split, split)) * Vec::Ones(split);
    Vec s2 = SpMat(m.bottomRightCorner(n - split, n - split)) * Vec::Ones(n - split);
    const double r1 = s1.mean(), r2 = s2.mean();
    if ((s1.array() - r1).abs().maxCoeff() > 1e-10) return std::nullopt;
    if ((s2.array() - r2).abs().maxCoeff() > 1e-10) return std::nullopt;
    if (r1 < 0 || r1 >= 1 || r2 < 0 || r2 >= 1) return std::nullopt;
    return std::make_pair(r1, r2);
}

KemenyResult dispatch(const StochasticMatrix& p, const RunConfig& cfg, RunMethod method) {
    switch (method) {
        case RunMethod::Direct: {
            DirectOptions opts;
            // An explicit request lifts the default dense cap.
            opts.dense_limit = std::max<Index>(cfg.dense_limit, p.size());
            return kemeny_direct(p, opts);
        }
        case RunMethod::Eig: {
            DirectOptions opts;
            opts.dense_limit = std::max<Index>(cfg.dense_limit, p.size());
            return kemeny_eig(p, opts);
        }
        case RunMethod::Dnc: {
            const StationaryDistribution sd = stationary(p);
            return kemeny_dnc(p, sd, cfg.dnc);
        }
        case RunMethod::HutchPP:
            return kemeny_hutchpp(p, cfg.hutch);
        case RunMethod::ClosedForm: {
            if (const auto split = bipartite_split(p.matrix())) {
                const Index m0 = *split;
                const SpMat& m = p.matrix();
                Eigen::MatrixXd p12 = Eigen::MatrixXd(SpMat(m.topRightCorner(m0, p.size() - m0)));
                Eigen::MatrixXd p21 = Eigen::MatrixXd(SpMat(m.bottomLeftCorner(p.size() - m0, m0)));
                std::vector<Eigen::MatrixXd> blocks{std::move(p21), std::move(p12)};
                return kemeny_periodic(PeriodicChain(std::move(blocks)));
            }
            const Index half = p.size() / 2;
            if (const auto rs = const_rowsum_split(p.matrix(), half))
                return kemeny_constant_rowsum(p, {half}).result;
            throw std::invalid_argument("no closed-form structure detected "
                                        "(zero-diagonal 2-block or constant row sums)");
        }
        case RunMethod::Auto:
        default:
            return dispatch(p, cfg, auto_dispatch(p, cfg));
    }
}

std::string render_human(const RunReport& rep, const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(12);
    os << "kappa: " << rep.result.kappa << "\n"
       << "method: " << method_name(rep.result.method)
       << " (requested " << rep.method_requested << ")\n"
       << "n: " << rep.n << "\nnnz: " << rep.nnz << "\n";
    if (rep.largest_scc_used)
        os << "largest-scc: extracted " << rep.n << " of " << rep.original_n << " states\n";
    const Diagnostics& d = rep.result.diagnostics;
    if (d.max_residual > 0) os << "max-residual: " << d.max_residual << "\n";
    if (d.recursion_depth > 0) os << "recursion-depth: " << d.recursion_depth << "\n";
    if (d.krylov_fallbacks > 0) os << "krylov-fallbacks: " << d.krylov_fallbacks << "\n";
    if (d.peak_bytes > 0) os << "peak-bytes: " << d.peak_bytes << "\n";
    if (rep.result.method == Method::HutchPP)
        os << "samples: " << d.sample_count << "\nseed: " << cfg.hutch.rng_seed << "\n";
    return os.str();
}

std::string render_json(const RunReport& rep, const RunConfig& cfg) {
    nlohmann::json j;
    j["schema_version"] = schema_version();
    j["kappa"] = rep.result.kappa;
    j["method"] = method_name(rep.result.method);
    j["n"] = rep.n;
    j["nnz"] = rep.nnz;
    j["largest_scc_used"] = rep.largest_scc_used;
    if (rep.largest_scc_used) j["original_n"] = rep.original_n;
    const Diagnostics& d = rep.result.diagnostics;
    // Wall time stays out of every serialized report: identical config and
    // seed must produce identical output.
    j["diagnostics"] = {
        {"max_residual", d.max_residual},
        {"recursion_depth", d.recursion_depth},
        {"sample_count", d.sample_count},
        {"peak_bytes", d.peak_bytes},
        {"krylov_fallbacks", d.krylov_fallbacks},
    };
    j["config"] = {
        {"input", cfg.input_path},
        {"kind", cfg.kind == InputKind::Adjacency ? "adjacency" : "transition"},
        {"normalize", cfg.normalization == GraphNormalization::RowStochastic ? "row" : "sym"},
        {"method", rep.method_requested},
        {"keep_weights", cfg.keep_weights},
        {"largest_scc", cfg.take_largest_scc},
        {"n0", cfg.dnc.base_size},
        {"split", cfg.dnc.split == SplitStrategy::Halving ? "half" : "nd"},
        {"solver", cfg.dnc.solver == DncSolver::SparseLu
                       ? "lu"
                       : (cfg.dnc.solver == DncSolver::GmresIlu0 ? "gmres" : "bicgstab")},
        {"tol", cfg.dnc.solver_tol},
        {"delta", cfg.hutch.delta},
        {"eps", cfg.hutch.epsilon},
        {"samples", cfg.hutch.samples},
        {"seed", cfg.hutch.rng_seed},
        {"inner_tol", cfg.hutch.inner_tol},
    };
    return j.dump(2) + "\n";
}

std::string render_csv(const RunReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "kappa,method,n,nnz,max_residual,largest_scc_used\n"
       << rep.result.kappa << ',' << method_name(rep.result.method) << ',' << rep.n << ','
       << rep.nnz << ',' << rep.result.diagnostics.max_residual << ','
       << (rep.largest_scc_used ? 1 : 0) << "\n";
    return os.str();
}

} // namespace

RunMethod auto_dispatch(const StochasticMatrix& p, const RunConfig& cfg) {
    if (bipartite_split(p.matrix()).has_value()) return RunMethod::ClosedForm;
    if (const_rowsum_split(p.matrix(), p.size() / 2).has_value()) return RunMethod::ClosedForm;
    if (p.size() <= cfg.dense_limit) return RunMethod::Direct;
    if (cfg.coarse && p.has_symmetric_form()) return RunMethod::HutchPP;
    return RunMethod::Dnc;
}

RunReport run(const RunConfig& cfg) {
    SpMat raw = read_matrix_market(cfg.input_path);
    if (raw.rows() != raw.cols())
        throw std::invalid_argument("input matrix must be square");

    if (cfg.kind == InputKind::Adjacency && !cfg.keep_weights) {
        for (Index i = 0; i < raw.rows(); ++i)
            for (SpMat::InnerIterator it(raw, i); it; ++it)
                it.valueRef() = 1.0;
    }

    RunReport rep;
    rep.original_n = raw.rows();
    rep.method_requested = run_method_name(cfg.method);

    // Irreducibility gate, optionally falling back to the largest SCC.
    const IrreducibilityCertificate cert = strongly_connected_components(raw);
    if (!cert.irreducible) {
        if (!cfg.take_largest_scc)
            throw ReducibleChainError(
                "chain is reducible (" + std::to_string(cert.component_count)
                    + " strongly connected components); pass --largest-scc to "
                      "restrict to the largest one",
                cert.component_count);
        raw = restrict_pattern(raw, cert.component_of, cert.largest_component_id);
        rep.largest_scc_used = true;
    }

    StochasticMatrix chain = [&] {
        if (cfg.kind == InputKind::Adjacency)
            return build_from_graph(raw, cfg.normalization);
        // Transition input: rows of a reducible restriction are renormalized.
        Vec sums = raw * Vec::Ones(raw.cols());
        for (Index i = 0; i < raw.rows(); ++i) {
            if (sums[i] <= 0.0)
                throw std::invalid_argument("transition row " + std::to_string(i)
                                            + " has zero mass after restriction");
            for (SpMat::InnerIterator it(raw, i); it; ++it) it.valueRef() /= sums[i];
        }
        return StochasticMatrix::from_sparse(std::move(raw));
    }();

    rep.n = chain.size();
    rep.nnz = chain.nonzeros();
    rep.result = dispatch(chain, cfg, cfg.method);

    switch (cfg.format) {
        case OutputFormat::Human: rep.rendered = render_human(rep, cfg); break;
        case OutputFormat::Json: rep.rendered = render_json(rep, cfg); break;
        case OutputFormat::Csv: rep.rendered = render_csv(rep); break;
    }
    return rep;
}

} // namespace kemeny
