#pragma once

#include "kemeny/chain.hpp"
#include "kemeny/core.hpp"
#include "kemeny/dnc.hpp"
#include "kemeny/trace_est.hpp"

#include <optional>
#include <string>

namespace kemeny {

enum class InputKind { Adjacency, Transition };
enum class OutputFormat { Human, Json, Csv };
enum class RunMethod { Direct, Eig, Dnc, HutchPP, Auto, ClosedForm };

struct RunConfig {
    std::string input_path;
    InputKind kind = InputKind::Adjacency;
    GraphNormalization normalization = GraphNormalization::RowStochastic;
    RunMethod method = RunMethod::Auto;
    bool keep_weights = false;       // default binarizes adjacency weights
    bool take_largest_scc = false;
    bool coarse = false;             // lets auto dispatch pick hutch++
    OutputFormat format = OutputFormat::Human;
    Index dense_limit = 4096;

    DncConfig dnc;
    HutchConfig hutch;
};

struct RunReport {
    KemenyResult result;
    Index n = 0;
    Index nnz = 0;
    bool largest_scc_used = false;
    Index original_n = 0;
    std::string method_requested;
    std::string rendered;            // serialized per the configured format
};

/// Detected structure dispatch: closed form for bipartite-style zero-diagonal
/// 2-block patterns or constant-row-sum blocks at the halving split; direct
/// when dense-feasible; hutch++ for symmetric chains when a coarse estimate
/// was asked for; dnc otherwise.
RunMethod auto_dispatch(const StochasticMatrix& p, const RunConfig& cfg);

class ReducibleChainError : public std::runtime_error {
public:
    ReducibleChainError(const std::string& what, int components)
        : std::runtime_error(what), components(components) {}
    int components;
};

/// Full batch pipeline: read, build the chain, check irreducibility (or
/// extract the largest strongly connected component), dispatch, render.
RunReport run(const RunConfig& cfg);

const char* schema_version();

} // namespace kemeny
