#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace kemeny {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SpMatCol = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thrown when an iterative or direct solver fails to meet its contract.
/// Carries the best residual reached so callers can report or fall back.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

/// Thrown by incomplete factorizations on a zero or negative pivot.
class BreakdownError : public std::runtime_error {
public:
    BreakdownError(const std::string& what, Index pivot_index)
        : std::runtime_error(what), pivot_index(pivot_index) {}
    Index pivot_index;
};

enum class Method { Direct, Eig, Dnc, HutchPP, ClosedForm };

const char* method_name(Method m);

struct Diagnostics {
    double max_residual = 0.0;    // worst linear-solve residual observed
    int recursion_depth = 0;      // dnc only
    int sample_count = 0;         // hutch++ only
    double elapsed_seconds = 0.0;
    std::uint64_t peak_bytes = 0; // dnc working-set accounting
    int krylov_fallbacks = 0;     // times a Krylov solve fell back to sparse LU
    std::uint64_t rng_seed = 0;   // hutch++ only
};

struct KemenyResult {
    double kappa = 0.0;
    Method method = Method::Direct;
    Diagnostics diagnostics;
};

/// Index split {0..m-1 | m..n-1}; both sides must be nonempty.
struct BlockPartition {
    Index m;
    void validate(Index n) const {
        if (m < 1 || m >= n)
            throw std::invalid_argument("block partition must leave both index sets nonempty");
    }
};

} // namespace kemeny
