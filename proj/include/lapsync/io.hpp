#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lapsync/laplacian.hpp"
#include "lapsync/matrix.hpp"
#include "lapsync/sym_matrix.hpp"

namespace lapsync {

namespace detail {

/// Shortest decimal form that round-trips a double exactly (17 significant digits).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Next line that is neither blank nor a '#' comment; false at end of input.
inline bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] == '#') continue;
        return true;
    }
    return false;
}

} // namespace detail

/// Writes the dense matrix text format: header `rows cols`, then one line per
/// row with 17-significant-digit entries (exact double round trip).
inline void write_matrix(std::ostream& out, const Matrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << detail::format_double(m(i, j));
        }
        out << '\n';
    }
}

inline Matrix read_matrix(std::istream& in) {
    std::string line;
    if (!detail::next_content_line(in, line)) throw IoError("matrix file: missing header line");
    std::istringstream header(line);
    int rows = 0, cols = 0;
    if (!(header >> rows >> cols) || rows < 1 || cols < 1)
        throw IoError("matrix file: header must be `rows cols`");
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!detail::next_content_line(in, line)) throw IoError("matrix file: unexpected end of data");
        std::istringstream row(line);
        for (int j = 0; j < cols; ++j) {
            if (!(row >> m(i, j))) throw IoError("matrix file: malformed row " + std::to_string(i));
        }
    }
    return m;
}

inline void write_matrix_file(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_matrix(out, m);
    if (!out) throw IoError("write failed: " + path);
}

inline Matrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return read_matrix(in);
}

/// Graph text format: header `n <count>`, then one `i j w` line per edge with
/// 0-based endpoints; `#` starts a comment line.
inline void write_graph(std::ostream& out, const LaplacianCandidate& c) {
    out << "n " << c.node_count() << '\n';
    for (const Edge& e : c.edges())
        out << e.i << ' ' << e.j << ' ' << detail::format_double(e.weight) << '\n';
}

inline LaplacianCandidate read_graph(std::istream& in) {
    std::string line;
    if (!detail::next_content_line(in, line)) throw IoError("graph file: missing header line");
    std::istringstream header(line);
    std::string tag;
    int n = 0;
    if (!(header >> tag >> n) || tag != "n" || n < 1) throw IoError("graph file: header must be `n <count>`");
    std::vector<Edge> edges;
    while (detail::next_content_line(in, line)) {
        std::istringstream row(line);
        Edge e;
        if (!(row >> e.i >> e.j >> e.weight)) throw IoError("graph file: malformed edge line: " + line);
        edges.push_back(e);
    }
    return LaplacianCandidate(n, std::move(edges));
}

inline void write_graph_file(const std::string& path, const LaplacianCandidate& c) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_graph(out, c);
    if (!out) throw IoError("write failed: " + path);
}

inline LaplacianCandidate read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return read_graph(in);
}

} // namespace lapsync
