#include "kemeny/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace kemeny {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

enum class Field { Real, Integer, Pattern };
enum class Symmetry { General, Symmetric, SkewSymmetric };

} // namespace

SpMat read_matrix_market(std::istream& in, const std::string& name) {
    std::string line;
    long lineno = 0;

    if (!std::getline(in, line))
        throw MatrixMarketError(name + ": empty file", 1);
    ++lineno;

    std::istringstream banner(line);
    std::string tag, object, format_s, field_s, symmetry_s;
    banner >> tag >> object >> format_s >> field_s >> symmetry_s;
    if (lower(tag) != "%%matrixmarket")
        throw MatrixMarketError(name + ": missing %%MatrixMarket banner", lineno);
    if (lower(object) != "matrix")
        throw MatrixMarketError(name + ": unsupported object '" + object + "'", lineno);

    const std::string format = lower(format_s);
    const std::string field = lower(field_s);
    const std::string symmetry = lower(symmetry_s.empty() ? "general" : symmetry_s);
    const bool coordinate = format == "coordinate";
    if (!coordinate && format != "array")
        throw MatrixMarketError(name + ": unknown format '" + format_s + "'", lineno);

    Field f;
    if (field == "real") f = Field::Real;
    else if (field == "integer") f = Field::Integer;
    else if (field == "pattern") f = Field::Pattern;
    else if (field == "complex")
        throw MatrixMarketError(name + ": complex field is not supported", lineno);
    else
        throw MatrixMarketError(name + ": unknown field '" + field_s + "'", lineno);

    Symmetry sym;
    if (symmetry == "general") sym = Symmetry::General;
    else if (symmetry == "symmetric") sym = Symmetry::Symmetric;
    else if (symmetry == "skew-symmetric") sym = Symmetry::SkewSymmetric;
    else
        throw MatrixMarketError(name + ": unsupported symmetry '" + symmetry_s + "'", lineno);
    if (!coordinate && f == Field::Pattern)
        throw MatrixMarketError(name + ": array format cannot be pattern", lineno);

    // Skip comments and blank lines up to the size line.
    bool have_size_line = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%') continue;
        have_size_line = true;
        break;
    }
    if (!have_size_line)
        throw MatrixMarketError(name + ": missing size line", lineno);

    std::istringstream size_line(line);
    long rows = 0, cols = 0, entries = 0;
    if (coordinate) {
        if (!(size_line >> rows >> cols >> entries))
            throw MatrixMarketError(name + ": malformed coordinate size line", lineno);
    } else {
        if (!(size_line >> rows >> cols))
            throw MatrixMarketError(name + ": malformed array size line", lineno);
        entries = rows * cols;
    }
    if (rows <= 0 || cols <= 0)
        throw MatrixMarketError(name + ": non-positive dimensions", lineno);
    if (sym != Symmetry::General && rows != cols)
        throw MatrixMarketError(name + ": symmetric storage needs a square matrix", lineno);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(sym == Symmetry::General ? entries : 2 * entries);

    auto push = [&](long i, long j, double v) {
        trip.emplace_back(i, j, v);
        if (i != j) {
            if (sym == Symmetry::Symmetric) trip.emplace_back(j, i, v);
            else if (sym == Symmetry::SkewSymmetric) trip.emplace_back(j, i, -v);
        }
    };

    if (coordinate) {
        long seen = 0;
        while (seen < entries) {
            if (!std::getline(in, line))
                throw MatrixMarketError(name + ": unexpected end of file, expected "
                                            + std::to_string(entries) + " entries, got "
                                            + std::to_string(seen), lineno);
            ++lineno;
            if (line.empty() || line[0] == '%') continue;
            std::istringstream es(line);
            long i = 0, j = 0;
            double v = 1.0;
            if (!(es >> i >> j))
                throw MatrixMarketError(name + ": malformed entry", lineno);
            if (f != Field::Pattern && !(es >> v))
                throw MatrixMarketError(name + ": entry is missing its value", lineno);
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw MatrixMarketError(name + ": entry index out of range", lineno);
            push(i - 1, j - 1, v);
            ++seen;
        }
    } else {
        // Array format stores columns contiguously; symmetric storage holds
        // the lower triangle column by column.
        long count = 0;
        const auto next_index = [&](long k) -> std::pair<long, long> {
            if (sym == Symmetry::General) return {k % rows, k / rows};
            long remaining = k;
            for (long j = 0; j < cols; ++j) {
                const long len = rows - j;
                if (remaining < len) return {j + remaining, j};
                remaining -= len;
            }
            return {-1, -1};
        };
        const long total = sym == Symmetry::General ? rows * cols
                                                    : rows * (rows + 1) / 2;
        while (count < total) {
            if (!std::getline(in, line))
                throw MatrixMarketError(name + ": unexpected end of array data", lineno);
            ++lineno;
            if (line.empty() || line[0] == '%') continue;
            std::istringstream es(line);
            double v;
            while (es >> v) {
                if (count >= total)
                    throw MatrixMarketError(name + ": surplus array data", lineno);
                const auto [i, j] = next_index(count);
                if (v != 0.0) push(i, j, v);
                ++count;
            }
        }
    }

    SpMat m(rows, cols);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

SpMat read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    return read_matrix_market(in, path);
}

void write_matrix_market(std::ostream& out, const SpMat& m) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    out.precision(17);
    for (Index i = 0; i < m.rows(); ++i)
        for (SpMat::InnerIterator it(m, i); it; ++it)
            out << i + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_matrix_market(const std::string& path, const SpMat& m) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_matrix_market(out, m);
}

} // namespace kemeny
