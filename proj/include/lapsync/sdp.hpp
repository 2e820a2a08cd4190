#pragma once

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lapsync/eig.hpp"
#include "lapsync/io.hpp"
#include "lapsync/objective.hpp"

namespace lapsync {

struct SdpLinearTerm {
    int var = 0;
    double coeff = 0.0;
};

/// One scalar constraint sum_k coeff_k x_k (<= or ==) 0.
struct SdpLinearRow {
    std::vector<SdpLinearTerm> terms;
    bool equality = false;
};

/// Contribution coeff * x_var to the (row, col) entry of the LMI block,
/// mirrored to (col, row); stored with row <= col.
struct SdpPsdTerm {
    int var = 0;
    int row = 0;
    int col = 0;
    double coeff = 0.0;
};

/// The semidefinite program equivalent to the design problem, in explicit
/// block form over the scalar variables
///   x = [ K_{i<=j} | X_{i<=j} | Y_{i<=j} ]:
///   minimize   1/2 trace(X + r K) + gamma trace(1 1^T Y)
///   subject to [ X, Q2^{1/2}; Q2^{1/2}, K + 1 1^T/n ] >= 0   (LMI block)
///              M o K <= 0 with M = 1 1^T - I                 (sign rows)
///              K 1 = 0                                        (equality rows)
///              -Y <= W o K <= Y                               (epigraph rows)
/// Assembled for export and for substitution checks; this library does not
/// solve the SDP itself.
struct SdpProblemData {
    int n = 0;
    double r = 0.0;
    double gamma = 0.0;

    int num_vars = 0;
    std::vector<double> objective;

    int lmi_dim = 0;
    Matrix lmi_constant;
    std::vector<SdpPsdTerm> lmi_terms;
    std::vector<SdpLinearRow> rows;

    int pair_index(int i, int j) const { return i * n - (i * (i - 1)) / 2 + (j - i); } // i <= j
    int k_var(int i, int j) const { return pair_index(std::min(i, j), std::max(i, j)); }
    int x_var(int i, int j) const { return n * (n + 1) / 2 + pair_index(std::min(i, j), std::max(i, j)); }
    int y_var(int i, int j) const { return n * (n + 1) + pair_index(std::min(i, j), std::max(i, j)); }
};

inline SdpProblemData assemble_sdp(const ProblemSpec& spec) {
    const int n = spec.n();
    SdpProblemData sdp;
    sdp.n = n;
    sdp.r = spec.r();
    sdp.gamma = spec.gamma();
    const int pairs = n * (n + 1) / 2;
    sdp.num_vars = 3 * pairs;
    sdp.objective.assign(sdp.num_vars, 0.0);

    for (int i = 0; i < n; ++i) {
        sdp.objective[sdp.k_var(i, i)] = 0.5 * spec.r();
        sdp.objective[sdp.x_var(i, i)] = 0.5;
        sdp.objective[sdp.y_var(i, i)] = spec.gamma();
        for (int j = i + 1; j < n; ++j) sdp.objective[sdp.y_var(i, j)] = 2.0 * spec.gamma(); // (i,j) and (j,i)
    }

    // LMI block [[X, Q2h], [Q2h, K + 1 1^T/n]].
    sdp.lmi_dim = 2 * n;
    sdp.lmi_constant = Matrix(2 * n, 2 * n);
    const SymMatrix q2h = sqrt_psd(spec.q2());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            sdp.lmi_constant(i, n + j) = q2h(i, j);
            sdp.lmi_constant(n + i, j) = q2h(i, j);
            sdp.lmi_constant(n + i, n + j) = 1.0 / n;
        }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            sdp.lmi_terms.push_back({sdp.x_var(i, j), i, j, 1.0});
            sdp.lmi_terms.push_back({sdp.k_var(i, j), n + i, n + j, 1.0});
        }

    // Sign constraints M o K <= 0, one row per ordered off-diagonal position.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            sdp.rows.push_back({{{sdp.k_var(i, j), 1.0}}, false});
        }

    // Equalities K 1 = 0, one per row of K.
    for (int i = 0; i < n; ++i) {
        SdpLinearRow row;
        row.equality = true;
        for (int j = 0; j < n; ++j) row.terms.push_back({sdp.k_var(i, j), 1.0});
        sdp.rows.push_back(std::move(row));
    }

    // l1 epigraph -Y <= W o K <= Y, two rows per position.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double wij = spec.w()(i, j);
            sdp.rows.push_back({{{sdp.k_var(i, j), wij}, {sdp.y_var(i, j), -1.0}}, false});
            sdp.rows.push_back({{{sdp.k_var(i, j), -wij}, {sdp.y_var(i, j), -1.0}}, false});
        }

    return sdp;
}

/// Flattens symmetric (K, X, Y) into the scalar variable vector.
inline std::vector<double> sdp_variable_vector(const SdpProblemData& sdp, const SymMatrix& k, const SymMatrix& x,
                                               const SymMatrix& y) {
    if (k.size() != sdp.n || x.size() != sdp.n || y.size() != sdp.n)
        throw ValidationError("sdp_variable_vector: dimension mismatch");
    std::vector<double> v(sdp.num_vars, 0.0);
    for (int i = 0; i < sdp.n; ++i)
        for (int j = i; j < sdp.n; ++j) {
            v[sdp.k_var(i, j)] = k(i, j);
            v[sdp.x_var(i, j)] = x(i, j);
            v[sdp.y_var(i, j)] = y(i, j);
        }
    return v;
}

struct SdpSubstitution {
    double lmi_min_eigenvalue = 0.0;
    double max_linear_violation = 0.0;
    double objective_value = 0.0;
};

/// Evaluates the assembled data at the point (K, X, Y): minimum eigenvalue of
/// the LMI block, worst violation over the linear rows, and the objective.
/// The evaluation reads only the assembled coefficients, so it checks what was
/// actually encoded and not the formulas it came from.
inline SdpSubstitution sdp_substitute(const SdpProblemData& sdp, const SymMatrix& k, const SymMatrix& x,
                                      const SymMatrix& y) {
    const std::vector<double> v = sdp_variable_vector(sdp, k, x, y);

    Matrix lmi = sdp.lmi_constant;
    for (const SdpPsdTerm& t : sdp.lmi_terms) {
        lmi(t.row, t.col) += t.coeff * v[t.var];
        if (t.row != t.col) lmi(t.col, t.row) += t.coeff * v[t.var];
    }

    SdpSubstitution result;
    result.lmi_min_eigenvalue = sym_eig(SymMatrix::symmetrized(lmi)).eigenvalues.front();
    for (const SdpLinearRow& row : sdp.rows) {
        double value = 0.0;
        for (const SdpLinearTerm& t : row.terms) value += t.coeff * v[t.var];
        const double viol = row.equality ? std::abs(value) : std::max(0.0, value);
        result.max_linear_violation = std::max(result.max_linear_violation, viol);
    }
    result.objective_value = dot(sdp.objective, v);
    return result;
}

/// The certificate pair completing a solved K to an SDP feasible point:
/// X = Q2^{1/2} (K + 1 1^T/n)^{-1} Q2^{1/2} and Y = |W o K|.
inline std::pair<SymMatrix, SymMatrix> sdp_certificate(const ProblemSpec& spec, const SymMatrix& k) {
    auto chol = detail::factor_shifted(k);
    if (!chol) throw ValidationError("sdp_certificate: K is not the Laplacian of a connected graph");
    const SymMatrix q2h = sqrt_psd(spec.q2());
    const SymMatrix x = SymMatrix::symmetrized(q2h.mat() * chol->solve(q2h.mat()));
    Matrix y(spec.n(), spec.n());
    for (int i = 0; i < spec.n(); ++i)
        for (int j = 0; j < spec.n(); ++j) y(i, j) = std::abs(spec.w()(i, j) * k(i, j));
    return {x, SymMatrix(std::move(y))};
}

/// Writes the sparse interchange format: block-diagonal standard form with a
/// header of block sizes and one `matno blockno i j value` line per nonzero.
/// Block 1 is the (2n)x(2n) LMI; block 2 is a diagonal block holding the
/// linear rows as slack entries, with each equality written as a +/- pair.
/// Matrix 0 carries the constant part with the standard sign convention
/// (affine constraint sum_k x_k F_k - F0 >= 0).
inline void write_sdpa_sparse(const SdpProblemData& sdp, std::ostream& out) {
    int diag_size = 0;
    for (const SdpLinearRow& row : sdp.rows) diag_size += row.equality ? 2 : 1;

    out << "* conductance network design SDP, block 1 = LMI, block 2 = linear rows\n";
    out << sdp.num_vars << " = mdim\n";
    out << 2 << " = nblocks\n";
    out << sdp.lmi_dim << " -" << diag_size << '\n';
    for (int k = 0; k < sdp.num_vars; ++k) {
        if (k) out << ' ';
        out << detail::format_double(sdp.objective[k]);
    }
    out << '\n';

    // Matrix 0: the constant matrix F0 = -(affine constant part).
    for (int i = 0; i < sdp.lmi_dim; ++i)
        for (int j = i; j < sdp.lmi_dim; ++j)
            if (sdp.lmi_constant(i, j) != 0.0)
                out << "0 1 " << i + 1 << ' ' << j + 1 << ' ' << detail::format_double(-sdp.lmi_constant(i, j))
                    << '\n';

    for (const SdpPsdTerm& t : sdp.lmi_terms)
        out << t.var + 1 << " 1 " << t.row + 1 << ' ' << t.col + 1 << ' ' << detail::format_double(t.coeff) << '\n';

    // Linear rows as diagonal slack entries: a^T x <= 0 becomes the diagonal
    // entry sum_k x_k (-a_k) >= 0; equalities contribute both orientations.
    int slot = 1;
    for (const SdpLinearRow& row : sdp.rows) {
        for (const SdpLinearTerm& t : row.terms)
            if (t.coeff != 0.0)
                out << t.var + 1 << " 2 " << slot << ' ' << slot << ' ' << detail::format_double(-t.coeff) << '\n';
        if (row.equality) {
            ++slot;
            for (const SdpLinearTerm& t : row.terms)
                if (t.coeff != 0.0)
                    out << t.var + 1 << " 2 " << slot << ' ' << slot << ' ' << detail::format_double(t.coeff)
                        << '\n';
        }
        ++slot;
    }
}

inline void write_sdpa_sparse_file(const std::string& path, const SdpProblemData& sdp) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_sdpa_sparse(sdp, out);
    if (!out) throw IoError("write failed: " + path);
}

} // namespace lapsync
