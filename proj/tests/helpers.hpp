#pragma once

// Shared test utilities: seeded random instance builders and the independent
// oracles (union-find connectivity, finite differences, golden-section search)
// that the library results are checked against.

#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "lapsync/lapsync.hpp"

namespace testutil {

/// Union-find connectivity over an edge list; deliberately independent of the
/// library's BFS and of the spectral lambda2 test.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    void unite(int a, int b) { parent_[find(a)] = find(b); }

    bool all_connected() {
        const int root = find(0);
        for (int i = 1; i < static_cast<int>(parent_.size()); ++i)
            if (find(i) != root) return false;
        return true;
    }

private:
    std::vector<int> parent_;
};

inline bool edges_connected(int n, const std::vector<lapsync::Edge>& edges) {
    UnionFind uf(n);
    for (const auto& e : edges)
        if (e.weight > 0.0) uf.unite(e.i, e.j);
    return uf.all_connected();
}

/// Random spanning tree plus extra edges, weights in [0.2, 2]; always connected.
inline lapsync::LaplacianCandidate random_connected_candidate(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> weight(0.2, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<lapsync::Edge> edges;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        const int u = pick(rng);
        edges.push_back({std::min(u, v), std::max(u, v), weight(rng)});
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool have = false;
            for (const auto& e : edges)
                if (e.i == i && e.j == j) have = true;
            if (!have && coin(rng) < 0.35) edges.push_back({i, j, weight(rng)});
        }
    return {n, std::move(edges)};
}

inline lapsync::SymMatrix random_connected_laplacian(int n, std::mt19937& rng) {
    return lapsync::to_matrix(random_connected_candidate(n, rng));
}

/// Random symmetric matrix with entries in [-1, 1].
inline lapsync::SymMatrix random_symmetric(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    lapsync::Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = entry(rng);
        for (int j = i + 1; j < n; ++j) {
            const double v = entry(rng);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return lapsync::SymMatrix(std::move(m));
}

/// Random PSD matrix R^T R (plus optional ridge).
inline lapsync::SymMatrix random_psd(int n, std::mt19937& rng, double ridge = 0.0) {
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    lapsync::Matrix r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = entry(rng);
    lapsync::Matrix p = r.transpose() * r;
    for (int i = 0; i < n; ++i) p(i, i) += ridge;
    return lapsync::SymMatrix::symmetrized(p);
}

/// Random matrix with zero row sums that is strictly positive definite on the
/// complement of the consensus direction (a valid state weight Q2).
inline lapsync::SymMatrix random_q2_on_perp(int n, std::mt19937& rng) {
    const lapsync::DeflationBasis basis = lapsync::make_basis(n);
    const lapsync::SymMatrix core = random_psd(n - 1, rng, 0.3);
    return lapsync::SymMatrix::symmetrized(basis.vtilde * core.mat() * basis.vtilde.transpose());
}

/// Random PSD-on-1perp matrix (semidefinite allowed), for Lyapunov forcings.
inline lapsync::SymMatrix random_psd_on_perp(int n, std::mt19937& rng) {
    const lapsync::DeflationBasis basis = lapsync::make_basis(n);
    const lapsync::SymMatrix core = random_psd(n - 1, rng);
    return lapsync::SymMatrix::symmetrized(basis.vtilde * core.mat() * basis.vtilde.transpose());
}

/// Q2 = Khat^2 for a random connected Laplacian Khat. Its PSD square root is
/// Khat itself, so the closed-form gamma = 0 solution lies inside the
/// Laplacian cone and the two solution paths must coincide. (For generic Q2
/// the square root can have positive off-diagonals, where the cone-constrained
/// optimum legitimately differs from the unconstrained stationary point.)
inline lapsync::SymMatrix random_laplacian_square_q2(int n, std::mt19937& rng) {
    const lapsync::SymMatrix khat = random_connected_laplacian(n, rng);
    return lapsync::SymMatrix::symmetrized(khat.mat() * khat.mat());
}

/// Central finite difference of f at x with step h.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Golden-section minimizer of a unimodal function on [lo, hi], finished with
/// parabolic refinement steps. Pure golden section stalls at the sqrt(eps)
/// noise floor of function comparisons; fitting a parabola through three
/// samples recovers the vertex to ~1e-10 relative on smooth convex input.
inline double golden_section_min(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iters && (b - a) > 1e-10 * (1.0 + std::abs(a) + std::abs(b)); ++k) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    for (int refine = 0; refine < 3; ++refine) {
        const double h = 1e-5 * (1.0 + std::abs(x));
        const double f_lo = f(x - h), f_mid = f(x), f_hi = f(x + h);
        const double denom = f_lo - 2.0 * f_mid + f_hi;
        if (denom <= 0.0) break;
        const double shift = 0.5 * h * (f_lo - f_hi) / denom;
        if (!std::isfinite(shift) || std::abs(shift) > h) break;
        x += shift;
    }
    return x;
}

/// The 7-node worked example: path-graph state weight, r = 1.
inline lapsync::ProblemSpec example_spec(double gamma) { return {lapsync::q2_path(7), 1.0, gamma}; }

/// Reference two-decimal tables of the worked example.
inline lapsync::Matrix table_k0() {
    lapsync::Matrix k(7, 7);
    const double rows[7][7] = {
        {0.84, -0.52, -0.13, -0.07, -0.05, -0.04, -0.03}, {-0.52, 1.23, -0.46, -0.11, -0.06, -0.04, -0.04},
        {-0.13, -0.46, 1.25, -0.45, -0.11, -0.06, -0.05}, {-0.07, -0.11, -0.45, 1.25, -0.45, -0.11, -0.07},
        {-0.05, -0.06, -0.11, -0.45, 1.25, -0.46, -0.13}, {-0.04, -0.04, -0.06, -0.11, -0.46, 1.23, -0.52},
        {-0.03, -0.04, -0.05, -0.07, -0.13, -0.52, 0.84}};
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) k(i, j) = rows[i][j];
    return k;
}

inline lapsync::Matrix table_k001() {
    lapsync::Matrix k(7, 7);
    const double rows[7][7] = {
        {0.80, -0.55, -0.14, 0.0, 0.0, 0.0, -0.11}, {-0.55, 1.19, -0.47, -0.17, 0.0, 0.0, 0.0},
        {-0.14, -0.47, 1.22, -0.45, -0.16, 0.0, 0.0}, {0.0, -0.17, -0.45, 1.24, -0.45, -0.17, 0.0},
        {0.0, 0.0, -0.16, -0.45, 1.22, -0.47, -0.14}, {0.0, 0.0, 0.0, -0.17, -0.47, 1.19, -0.55},
        {-0.11, 0.0, 0.0, 0.0, -0.14, -0.55, 0.80}};
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) k(i, j) = rows[i][j];
    return k;
}

inline lapsync::Matrix table_k01() {
    lapsync::Matrix k(7, 7);
    const double rows[7][7] = {
        {0.57, -0.57, 0.0, 0.0, 0.0, 0.0, 0.0}, {-0.57, 1.14, -0.57, 0.0, 0.0, 0.0, 0.0},
        {0.0, -0.57, 1.14, -0.57, 0.0, 0.0, 0.0}, {0.0, 0.0, -0.57, 1.14, -0.57, 0.0, 0.0},
        {0.0, 0.0, 0.0, -0.57, 1.14, -0.57, 0.0}, {0.0, 0.0, 0.0, 0.0, -0.57, 1.14, -0.57},
        {0.0, 0.0, 0.0, 0.0, 0.0, -0.57, 0.57}};
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) k(i, j) = rows[i][j];
    return k;
}

} // namespace testutil
