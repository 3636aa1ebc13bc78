#pragma once

#include "kemeny/core.hpp"

#include <iosfwd>
#include <string>

namespace kemeny {

/// Matrix Market reader: coordinate and array formats; real, integer and
/// pattern fields; general and symmetric storage (symmetric entries are
/// mirrored, pattern entries get value 1). The banner is parsed
/// case-insensitively. Parse errors carry the offending line number; the
/// complex field is rejected as unsupported.
SpMat read_matrix_market(const std::string& path);
SpMat read_matrix_market(std::istream& in, const std::string& name = "<stream>");

/// Coordinate/real/general writer with 17 significant digits, so a
/// write-then-read round trip is entrywise exact.
void write_matrix_market(const std::string& path, const SpMat& m);
void write_matrix_market(std::ostream& out, const SpMat& m);

class MatrixMarketError : public std::runtime_error {
public:
    MatrixMarketError(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

} // namespace kemeny
