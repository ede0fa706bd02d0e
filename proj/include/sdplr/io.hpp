#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdplr/problems.hpp"

namespace sdplr {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, int line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

inline std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

inline bool blank(const std::string& s) {
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace detail

/// Gset text format: header "n m", then m lines "u v w" with 1-based vertex
/// indices. Duplicate edges are summed, self-loops dropped.
inline Graph load_gset(const std::string& path) {
    std::ifstream in = detail::open_or_throw(path);
    std::string line;
    int lineno = 0;

    int n = 0;
    long edge_count = -1;
    std::vector<Graph::Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        std::istringstream ss(line);
        if (edge_count < 0) {
            if (!(ss >> n >> edge_count) || n < 0 || edge_count < 0)
                throw ParseError(path, lineno, "malformed Gset header, expected 'n m'");
            continue;
        }
        int u, v;
        double w;
        if (!(ss >> u >> v >> w))
            throw ParseError(path, lineno, "malformed edge line, expected 'u v w'");
        if (u < 1 || u > n || v < 1 || v > n)
            throw ParseError(path, lineno, "vertex index out of range");
        edges.push_back({u - 1, v - 1, w});
    }
    if (edge_count < 0) throw ParseError(path, lineno, "missing Gset header");
    if (static_cast<long>(edges.size()) != edge_count)
        throw ParseError(path, lineno, "edge count does not match header");
    return Graph::from_edges(n, std::move(edges));
}

inline void save_gset(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << g.n << " " << g.edges.size() << "\n";
    char buf[64];
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.weight);
        out << e.u + 1 << " " << e.v + 1 << " " << buf << "\n";
    }
}

namespace detail {

struct MmHeader {
    bool symmetric = false;
    bool pattern = false;
};

inline MmHeader parse_mm_header(const std::string& path, const std::string& line, int lineno) {
    std::istringstream ss(line);
    std::string banner, object, format, field, symmetry;
    ss >> banner >> object >> format >> field >> symmetry;
    for (auto* s : {&object, &format, &field, &symmetry})
        for (auto& c : *s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (banner != "%%MatrixMarket" || object != "matrix")
        throw ParseError(path, lineno, "not a MatrixMarket matrix file");
    if (format != "coordinate")
        throw ParseError(path, lineno, "only coordinate format is supported");
    if (field != "real" && field != "integer" && field != "pattern")
        throw ParseError(path, lineno, "unsupported field type: " + field);
    if (symmetry != "general" && symmetry != "symmetric")
        throw ParseError(path, lineno, "unsupported symmetry: " + symmetry);
    return {symmetry == "symmetric", field == "pattern"};
}

inline RectMatrix load_mm_triplets(const std::string& path, bool* symmetric_out) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line)) throw ParseError(path, 1, "empty file");
    ++lineno;
    const MmHeader header = parse_mm_header(path, line, lineno);

    int rows = 0, cols = 0;
    long nnz = -1;
    RectMatrix M;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line) || line[0] == '%') continue;
        std::istringstream ss(line);
        if (nnz < 0) {
            if (!(ss >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
                throw ParseError(path, lineno, "malformed size line, expected 'rows cols nnz'");
            M.rows = rows;
            M.cols = cols;
            continue;
        }
        int i, j;
        double v = 1.0;
        if (!(ss >> i >> j) || (!header.pattern && !(ss >> v)))
            throw ParseError(path, lineno, "malformed coordinate entry");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw ParseError(path, lineno, "coordinate out of range");
        M.entries.push_back({i - 1, j - 1, v});
    }
    if (nnz < 0) throw ParseError(path, lineno, "missing size line");
    if (static_cast<long>(M.entries.size()) != nnz)
        throw ParseError(path, lineno, "entry count does not match size line");
    if (symmetric_out) *symmetric_out = header.symmetric;
    return M;
}

}  // namespace detail

/// MatrixMarket coordinate file as a graph: must be square; both general and
/// symmetric files are symmetrized, self-loops dropped, duplicates summed.
inline Graph load_matrixmarket_graph(const std::string& path) {
    bool symmetric = false;
    RectMatrix M = detail::load_mm_triplets(path, &symmetric);
    if (M.rows != M.cols)
        throw ParseError(path, 1, "graph input must be square");
    std::vector<Graph::Edge> edges;
    edges.reserve(M.entries.size());
    for (const auto& e : M.entries) edges.push_back({e.row, e.col, e.value});
    return Graph::from_edges(M.rows, std::move(edges));
}

/// MatrixMarket coordinate file as a rectangular matrix; symmetric files are
/// expanded to their full pattern. Duplicate coordinates are summed.
inline RectMatrix load_matrixmarket_matrix(const std::string& path) {
    bool symmetric = false;
    RectMatrix M = detail::load_mm_triplets(path, &symmetric);
    std::map<std::pair<int, int>, double> acc;
    for (const auto& e : M.entries) {
        acc[{e.row, e.col}] += e.value;
        if (symmetric && e.row != e.col) acc[{e.col, e.row}] += e.value;
    }
    RectMatrix out;
    out.rows = M.rows;
    out.cols = M.cols;
    out.entries.reserve(acc.size());
    for (const auto& [key, v] : acc) out.entries.push_back({key.first, key.second, v});
    return out;
}

}  // namespace sdplr
