#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "lapsync/eig.hpp"
#include "lapsync/sym_matrix.hpp"

namespace lapsync {

/// One undirected weighted edge, 0-based endpoints with i < j.
struct Edge {
    int i = 0;
    int j = 0;
    double weight = 0.0;
};

/// Weighted edge list over n nodes; bijective with a conductance matrix in the
/// Laplacian cone once the positive-weight support is connected.
///
/// Construction canonicalizes the edge order (lexicographic by (i, j)) and
/// validates indices, duplicates, and weight signs.
class LaplacianCandidate {
public:
    LaplacianCandidate(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
        if (n_ < 1) throw ValidationError("LaplacianCandidate: need n >= 1");
        std::sort(edges_.begin(), edges_.end(),
                  [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const Edge& e = edges_[k];
            if (e.i < 0 || e.j >= n_ || e.i >= e.j)
                throw ValidationError("LaplacianCandidate: edge endpoints must satisfy 0 <= i < j < n");
            if (!(e.weight >= 0.0)) throw ValidationError("LaplacianCandidate: edge weights must be nonnegative");
            if (k > 0 && edges_[k - 1].i == e.i && edges_[k - 1].j == e.j)
                throw ValidationError("LaplacianCandidate: duplicate edge");
        }
    }

    int node_count() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }

private:
    int n_;
    std::vector<Edge> edges_;
};

/// Outcome of testing a matrix against the connected-Laplacian cone:
/// symmetry, zero row sums, nonpositive off-diagonals, and connectivity
/// read off the algebraic connectivity lambda2.
struct MembershipReport {
    bool is_symmetric = false;
    bool row_sums_zero = false;
    bool offdiag_nonpositive = false;
    bool connected = false;
    double lambda2 = 0.0;

    bool all() const { return is_symmetric && row_sums_zero && offdiag_nonpositive && connected; }
};

/// Builds K = sum_e w_e (e_i - e_j)(e_i - e_j)^T. The diagonal is derived as
/// the row sum of incident weights, never stored, so K 1 = 0 holds to machine
/// precision and K is PSD by construction.
inline SymMatrix to_matrix(const LaplacianCandidate& c) {
    const int n = c.node_count();
    Matrix k(n, n);
    for (const Edge& e : c.edges()) {
        k(e.i, e.i) += e.weight;
        k(e.j, e.j) += e.weight;
        k(e.i, e.j) -= e.weight;
        k(e.j, e.i) -= e.weight;
    }
    return SymMatrix(std::move(k));
}

inline double default_membership_tol(const SymMatrix& k) { return 1e-9 * (1.0 + k.max_norm()); }

/// Evaluates the four membership predicates of the Laplacian cone at
/// tolerance tol. Connectivity is lambda2 > tol, with lambda2 taken from the
/// full symmetric eigendecomposition.
inline MembershipReport check_membership(const SymMatrix& k, double tol) {
    const int n = k.size();
    MembershipReport rep;
    rep.is_symmetric = true; // structural for SymMatrix input

    std::vector<double> ones(n, 1.0);
    rep.row_sums_zero = max_abs(k.mat().matvec(ones)) <= tol;

    rep.offdiag_nonpositive = true;
    for (int i = 0; i < n && rep.offdiag_nonpositive; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && k(i, j) > tol) {
                rep.offdiag_nonpositive = false;
                break;
            }

    if (n >= 2) {
        const EigDecomp d = sym_eig(k);
        rep.lambda2 = d.eigenvalues[1];
    } else {
        rep.lambda2 = 0.0; // no second eigenvalue for n = 1; a single node is trivially disconnected from nothing
    }
    rep.connected = (n == 1) || rep.lambda2 > tol;
    return rep;
}

inline MembershipReport check_membership(const SymMatrix& k) { return check_membership(k, default_membership_tol(k)); }

/// Inverse of to_matrix: reads the off-diagonal couplings back into an edge
/// list, dropping entries with |K_ij| <= truncation. A positive off-diagonal
/// beyond the truncation level means the matrix is not a Laplacian.
inline LaplacianCandidate from_matrix(const SymMatrix& k, double truncation) {
    const int n = k.size();
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = k(i, j);
            if (std::abs(v) <= truncation) continue;
            if (v > 0.0) {
                std::ostringstream msg;
                msg << "from_matrix: positive off-diagonal entry K(" << i << "," << j << ") = " << v
                    << ", not a Laplacian";
                throw ValidationError(msg.str());
            }
            edges.push_back({i, j, -v});
        }
    }
    return LaplacianCandidate(n, std::move(edges));
}

/// Whether the positive-weight edge support spans all n nodes (breadth-first
/// search over the adjacency of edges with weight above the threshold).
inline bool support_connected(int n, const std::vector<Edge>& edges, double weight_threshold = 0.0) {
    if (n <= 1) return true;
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : edges) {
        if (e.weight > weight_threshold) {
            adj[e.i].push_back(e.j);
            adj[e.j].push_back(e.i);
        }
    }
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

} // namespace lapsync
