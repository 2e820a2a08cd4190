#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "lapsync/eig.hpp"
#include "lapsync/laplacian.hpp"
#include "lapsync/objective.hpp"
#include "lapsync/sym_matrix.hpp"

namespace lapsync {

/// Candidate coupling (i, j) with i < j; carries no weight.
struct EdgePair {
    int i = 0;
    int j = 0;
};

using EdgeSet = std::vector<EdgePair>;

inline EdgeSet complete_edge_set(int n) {
    EdgeSet edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
    return edges;
}

/// Nonnegative weights over a fixed candidate edge set. The induced
/// K = sum_e w_e b_e b_e^T always lies in the closure of the Laplacian cone;
/// membership proper additionally needs the positive-weight support connected.
struct EdgeWeightVector {
    EdgeSet edges;
    std::vector<double> w;

    SymMatrix to_matrix(int n) const {
        std::vector<Edge> list;
        list.reserve(edges.size());
        for (std::size_t e = 0; e < edges.size(); ++e) list.push_back({edges[e].i, edges[e].j, w[e]});
        return lapsync::to_matrix(LaplacianCandidate(n, std::move(list)));
    }
};

enum class Termination { gradient_tol, step_tol, max_iter };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::gradient_tol: return "gradient_tol";
        case Termination::step_tol: return "step_tol";
        case Termination::max_iter: return "max_iter";
    }
    return "unknown";
}

struct IterRecord {
    double objective = 0.0;
    double step_size = 0.0;
};

/// Result of one solve: the optimal conductance matrix, the objective split,
/// the iteration trace, and sparsity statistics. The objective column of
/// `history` is nonincreasing (monotone accepted steps). For reweighting runs
/// the outer-loop fields record per-iteration sparsity and the delta/epsilon
/// actually used, so a run can be reproduced from its report alone.
struct SolveReport {
    SymMatrix k_opt;
    ObjectiveValue objective{};
    int iterations = 0;
    Termination termination = Termination::max_iter;
    std::vector<IterRecord> history{};
    int nnz_offdiag = 0;

    int outer_iterations = 0;
    std::vector<int> outer_nnz{};
    double delta_used = 0.0;
    double epsilon_used = 0.0;
};

/// Reporting threshold for sparsity counts: 1e-3 times the largest
/// off-diagonal magnitude (comparable to two-decimal table rounding).
inline double sparsity_truncation(const SymMatrix& k) {
    double m = 0.0;
    for (int i = 0; i < k.size(); ++i)
        for (int j = 0; j < k.size(); ++j)
            if (i != j) m = std::max(m, std::abs(k(i, j)));
    return 1e-3 * m;
}

/// Number of off-diagonal positions with |K_ij| above the truncation level.
inline int count_nnz_offdiag(const SymMatrix& k, double truncation) {
    int count = 0;
    for (int i = 0; i < k.size(); ++i)
        for (int j = 0; j < k.size(); ++j)
            if (i != j && std::abs(k(i, j)) > truncation) ++count;
    return count;
}

inline int count_nnz_offdiag(const SymMatrix& k) { return count_nnz_offdiag(k, sparsity_truncation(k)); }

namespace detail {

/// Exact per-edge coefficient of the l1 term on the nonnegative orthant:
/// raising w_e moves K_ij and K_ji by -w_e and both diagonals by +w_e, so the
/// penalty is linear with slope gamma (2 W_ij + W_ii + W_jj), or gamma 2 W_ij
/// when the diagonal is excluded from the norm.
inline std::vector<double> l1_edge_coefficients(const ProblemSpec& spec, const EdgeSet& edges) {
    std::vector<double> c(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [i, j] = edges[e];
        double coeff = 2.0 * spec.w()(i, j);
        if (!spec.offdiag_only_l1()) coeff += spec.w()(i, i) + spec.w()(j, j);
        c[e] = spec.gamma() * coeff;
    }
    return c;
}

/// Directional derivatives of the smooth part along the edge generators:
/// g_e = b_e^T (grad J) b_e = G_ii + G_jj - 2 G_ij.
inline std::vector<double> edge_gradient(const SymMatrix& grad, const EdgeSet& edges) {
    std::vector<double> g(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [i, j] = edges[e];
        g[e] = grad(i, i) + grad(j, j) - 2.0 * grad(i, j);
    }
    return g;
}

/// Smooth part of the objective as a function of edge weights; +infinity when
/// the induced graph is disconnected (the barrier that keeps iterates feasible).
inline double smooth_value(const ProblemSpec& spec, const EdgeSet& edges, const std::vector<double>& w) {
    std::vector<Edge> list;
    list.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) list.push_back({edges[e].i, edges[e].j, w[e]});
    const SymMatrix k = to_matrix(LaplacianCandidate(spec.n(), std::move(list)));
    auto chol = factor_shifted(k);
    if (!chol) return std::numeric_limits<double>::infinity();
    return 0.5 * chol->solve(spec.q2().mat()).trace() + 0.5 * spec.r() * k.trace();
}

inline void validate_edge_set(int n, const EdgeSet& edges) {
    std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
    for (const EdgePair& e : edges) {
        if (e.i < 0 || e.j >= n || e.i >= e.j) throw ValidationError("edge set: endpoints must satisfy 0 <= i < j < n");
        char& flag = seen[static_cast<std::size_t>(e.i) * n + e.j];
        if (flag) throw ValidationError("edge set: duplicate pair");
        flag = 1;
    }
    std::vector<Edge> unit;
    unit.reserve(edges.size());
    for (const EdgePair& e : edges) unit.push_back({e.i, e.j, 1.0});
    if (!support_connected(n, unit)) throw ValidationError("edge set: candidate pairs do not span a connected graph");
}

} // namespace detail

/// First-order optimality certificate for the edge-weight problem, evaluated
/// from scratch: at a minimizer every edge has |g_e + c_e| <= tol * scale when
/// w_e > 0, and g_e + c_e >= -tol * scale when w_e = 0.
struct OptimalityCheck {
    bool satisfied = false;
    double max_violation = 0.0;
    double scale = 1.0;
};

inline OptimalityCheck check_first_order(const ProblemSpec& spec, const EdgeSet& edges,
                                         const std::vector<double>& w, double tol) {
    const SymMatrix k = EdgeWeightVector{edges, w}.to_matrix(spec.n());
    const std::vector<double> g = detail::edge_gradient(grad_J(k, spec), edges);
    const std::vector<double> c = detail::l1_edge_coefficients(spec, edges);
    OptimalityCheck check;
    check.scale = 1.0 + max_abs(g) + max_abs(c);
    for (std::size_t e = 0; e < w.size(); ++e) {
        const double phi = g[e] + c[e];
        const double viol = (w[e] > 0.0) ? std::abs(phi) : std::max(0.0, -phi);
        check.max_violation = std::max(check.max_violation, viol);
    }
    check.satisfied = check.max_violation <= tol * check.scale;
    return check;
}

/// Convenience overload reading the weights back off a conductance matrix.
inline OptimalityCheck check_first_order(const ProblemSpec& spec, const EdgeSet& edges, const SymMatrix& k,
                                         double tol) {
    std::vector<double> w(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) w[e] = std::max(0.0, -k(edges[e].i, edges[e].j));
    return check_first_order(spec, edges, w, tol);
}

/// Default starting weights: the gamma = 0 closed form truncated to the edge
/// set when that support is connected, otherwise uniform weights at the
/// all-to-all optimal level (always a strictly feasible, connected start).
inline EdgeWeightVector default_init(const ProblemSpec& spec, const EdgeSet& edges) {
    EdgeWeightVector init{edges, std::vector<double>(edges.size(), 0.0)};
    const SymMatrix k0 = sqrt_psd(spec.q2()) * (1.0 / std::sqrt(spec.r()));
    std::vector<Edge> support;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        init.w[e] = std::max(0.0, -k0(edges[e].i, edges[e].j));
        support.push_back({edges[e].i, edges[e].j, init.w[e]});
    }
    if (!support_connected(spec.n(), support)) {
        const double level = std::sqrt(spec.q2().trace() / ((spec.n() - 1) * spec.r())) / spec.n();
        std::fill(init.w.begin(), init.w.end(), level);
    }
    return init;
}

/// Minimizes J_gamma over the edge-weight parameterization of the Laplacian
/// cone by a monotone accelerated projected-gradient method.
///
/// The l1 term is linear on the nonnegative orthant, so the proximal step is a
/// shifted projection w <- max(0, y - (grad + c)/L). Steps are sized by
/// backtracking from a Barzilai-Borwein curvature estimate; momentum restarts
/// whenever the extrapolation leaves the feasible cone or the objective would
/// increase, which keeps the recorded objective trace nonincreasing. The
/// problem is convex, so the first-order certificate at termination is a
/// global optimality certificate.
inline SolveReport solve_prox(const ProblemSpec& spec, const EdgeSet& edge_set, const EdgeWeightVector& w_init) {
    const int n = spec.n();
    detail::validate_edge_set(n, edge_set);
    if (w_init.w.size() != edge_set.size()) throw ValidationError("solve_prox: w_init size does not match edge set");

    std::vector<double> x = w_init.w;
    for (double& v : x) v = std::max(0.0, v);
    double fx = detail::smooth_value(spec, edge_set, x);
    if (!std::isfinite(fx)) throw ValidationError("solve_prox: initial weights do not induce a connected graph");

    const std::vector<double> c = detail::l1_edge_coefficients(spec, edge_set);
    const std::size_t m = edge_set.size();

    auto composite = [&](const std::vector<double>& w, double smooth) { return smooth + dot(c, w); };
    auto gradient_at = [&](const std::vector<double>& w) {
        return detail::edge_gradient(grad_J(EdgeWeightVector{edge_set, w}.to_matrix(n), spec), edge_set);
    };

    std::vector<double> x_prev = x;
    std::vector<double> grad_x = gradient_at(x);
    double f_total = composite(x, fx);

    double lip = 1.0;
    double t = 1.0;
    std::vector<double> bb_point, bb_grad;

    SolveReport rep{EdgeWeightVector{edge_set, x}.to_matrix(n)};
    rep.history.reserve(256);

    int stagnant = 0;
    int iter = 0;
    for (; iter < spec.max_iter(); ++iter) {
        // Optimality at the current point (the certificate, not a heuristic).
        double viol = 0.0;
        double scale = 1.0 + max_abs(grad_x) + max_abs(c);
        for (std::size_t e = 0; e < m; ++e) {
            const double phi = grad_x[e] + c[e];
            viol = std::max(viol, (x[e] > 0.0) ? std::abs(phi) : std::max(0.0, -phi));
        }
        if (viol <= spec.tol_grad() * scale) {
            rep.termination = Termination::gradient_tol;
            break;
        }
        if (stagnant >= 5) {
            rep.termination = Termination::step_tol;
            break;
        }

        // Barzilai-Borwein curvature estimate from the last accepted move.
        if (!bb_point.empty()) {
            double sy = 0.0, ss = 0.0;
            for (std::size_t e = 0; e < m; ++e) {
                const double s = x[e] - bb_point[e];
                sy += s * (grad_x[e] - bb_grad[e]);
                ss += s * s;
            }
            if (ss > 0.0 && sy > 0.0) lip = std::clamp(sy / ss, 1e-12, 1e15);
        }

        // Extrapolated point; fall back to the current iterate if it leaves
        // the connected cone.
        const double t_next_raw = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        double t_next = t_next_raw;
        std::vector<double> y(m);
        const double beta = (t - 1.0) / t_next_raw;
        for (std::size_t e = 0; e < m; ++e) y[e] = std::max(0.0, x[e] + beta * (x[e] - x_prev[e]));
        double fy = detail::smooth_value(spec, edge_set, y);
        std::vector<double> grad_y;
        if (std::isfinite(fy)) {
            grad_y = gradient_at(y);
        } else {
            y = x;
            fy = fx;
            grad_y = grad_x;
            t_next = 1.0;
        }

        auto backtrack = [&](const std::vector<double>& base, double f_base,
                             const std::vector<double>& grad_base) -> std::optional<std::pair<std::vector<double>, double>> {
            for (int bt = 0; bt < 80; ++bt) {
                std::vector<double> z(m);
                for (std::size_t e = 0; e < m; ++e) z[e] = std::max(0.0, base[e] - (grad_base[e] + c[e]) / lip);
                const double fz = detail::smooth_value(spec, edge_set, z);
                if (std::isfinite(fz)) {
                    double lin = 0.0, sq = 0.0;
                    for (std::size_t e = 0; e < m; ++e) {
                        const double d = z[e] - base[e];
                        lin += grad_base[e] * d;
                        sq += d * d;
                    }
                    if (fz <= f_base + lin + 0.5 * lip * sq + 1e-14 * (1.0 + std::abs(f_base)))
                        return std::make_pair(std::move(z), fz);
                }
                lip *= 2.0;
            }
            return std::nullopt;
        };

        auto step = backtrack(y, fy, grad_y);
        if (!step) {
            std::ostringstream msg;
            msg << "solve_prox: line search failed at iteration " << iter << " (step bound " << lip
                << ", objective " << f_total << ")";
            throw SolverError(msg.str());
        }
        double fz = step->second;
        double f_candidate = composite(step->first, fz);
        if (f_candidate > f_total + 1e-12 * (1.0 + std::abs(f_total))) {
            // Momentum overshoot: restart and take a plain projected-gradient
            // step from x, which the descent condition makes monotone.
            t_next = 1.0;
            step = backtrack(x, fx, grad_x);
            if (!step) {
                std::ostringstream msg;
                msg << "solve_prox: line search failed after restart at iteration " << iter;
                throw SolverError(msg.str());
            }
            fz = step->second;
            f_candidate = composite(step->first, fz);
        }

        bb_point = std::move(y);
        bb_grad = std::move(grad_y);

        double step_inf = 0.0;
        for (std::size_t e = 0; e < m; ++e) step_inf = std::max(step_inf, std::abs(step->first[e] - x[e]));
        stagnant = (step_inf <= spec.tol_obj() * (1.0 + max_abs(x))) ? stagnant + 1 : 0;

        x_prev = std::move(x);
        x = std::move(step->first);
        fx = fz;
        f_total = f_candidate;
        grad_x = gradient_at(x);
        t = t_next;
        rep.history.push_back({f_total, 1.0 / lip});
    }
    if (iter == spec.max_iter()) rep.termination = Termination::max_iter;

    rep.k_opt = EdgeWeightVector{edge_set, x}.to_matrix(n);
    rep.objective = eval_J(rep.k_opt, spec);
    rep.iterations = iter;
    rep.nnz_offdiag = count_nnz_offdiag(rep.k_opt);
    return rep;
}

inline SolveReport solve_prox(const ProblemSpec& spec, const EdgeSet& edge_set) {
    return solve_prox(spec, edge_set, default_init(spec, edge_set));
}

/// Closed-form solution for gamma = 0: the unconstrained stationarity
/// condition of the H2 cost gives K = Q2^{1/2} / sqrt(r), which is the optimum
/// over the Laplacian cone whenever that square root has nonpositive
/// off-diagonals (true for the worked design family).
inline SolveReport solve_gamma0(const ProblemSpec& spec) {
    if (spec.gamma() != 0.0) throw ValidationError("solve_gamma0: requires gamma == 0");
    SolveReport rep{sqrt_psd(spec.q2()) * (1.0 / std::sqrt(spec.r()))};
    rep.objective = eval_J(rep.k_opt, spec);
    rep.iterations = 0;
    rep.termination = Termination::gradient_tol;
    rep.history.push_back({rep.objective.total, 0.0});
    rep.nnz_offdiag = count_nnz_offdiag(rep.k_opt);
    return rep;
}

/// Uniform all-to-all coupling K = k (I - 1 1^T/n) with the analytically
/// optimal level k = sqrt(trace(Q2) / ((n-1) r)).
inline std::pair<double, SymMatrix> all_to_all_optimal(const ProblemSpec& spec) {
    if (spec.n() < 2) throw ValidationError("all_to_all_optimal: need n >= 2");
    const int n = spec.n();
    const double k = std::sqrt(spec.q2().trace() / ((n - 1) * spec.r()));
    const SymMatrix m = SymMatrix::identity(n) * k - SymMatrix::ones_outer(n) * k;
    return {k, m};
}

/// Best conductances for a fixed topology: the gamma = 0 problem restricted to
/// the given support.
inline SolveReport polish_on_support(const ProblemSpec& spec, const EdgeSet& support) {
    std::vector<Edge> unit;
    unit.reserve(support.size());
    for (const EdgePair& e : support) unit.push_back({e.i, e.j, 1.0});
    if (!support_connected(spec.n(), unit))
        throw ValidationError("polish_on_support: support graph is disconnected, problem infeasible");
    const ProblemSpec relaxed = spec.with_gamma(0.0);
    return solve_prox(relaxed, support, default_init(relaxed, support));
}

/// Scale-aware defaults for the reweighting loop, derived from the gamma = 0
/// closed form: delta = 1e-3 max|K_0|, epsilon = 1e-5 ||K_0||_F.
struct ReweightDefaults {
    double delta = 0.0;
    double epsilon = 0.0;
    int max_outer = 20;
};

inline ReweightDefaults reweight_defaults(const ProblemSpec& spec) {
    const SymMatrix k0 = sqrt_psd(spec.q2()) * (1.0 / std::sqrt(spec.r()));
    return {1e-3 * k0.max_norm(), 1e-5 * k0.fro_norm(), 20};
}

/// Reweighted l1 outer loop. Iteration 1 solves with the all-ones weight
/// matrix; iteration mu > 1 re-derives the coupling weights as
/// W_ij = 1 / (|K_prev,ij| + delta) for i != j, while the diagonal weights
/// stay at 1 (the reweighting targets the interconnection links; updating the
/// diagonal as well skews the penalty toward the low-degree boundary nodes).
/// Stops when ||K* - K_prev||_F < epsilon or after max_outer iterations.
/// Each inner solve warm-starts from the previous solution.
inline SolveReport reweighted_l1(const ProblemSpec& spec, double delta, double epsilon, int max_outer) {
    if (!(delta > 0.0) || !(epsilon > 0.0)) throw ValidationError("reweighted_l1: delta and epsilon must be positive");
    if (max_outer < 1) throw ValidationError("reweighted_l1: max_outer must be positive");
    const int n = spec.n();
    const EdgeSet edge_set = complete_edge_set(n);

    Matrix ones(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ones(i, j) = 1.0;

    SymMatrix k_prev = SymMatrix::zeros(n);
    ProblemSpec current = spec.with_weights(SymMatrix(ones));
    EdgeWeightVector warm = default_init(current, edge_set);

    std::vector<int> outer_nnz;
    for (int mu = 1; mu <= max_outer; ++mu) {
        if (mu > 1) {
            Matrix w(n, n);
            for (int i = 0; i < n; ++i) {
                w(i, i) = 1.0;
                for (int j = i + 1; j < n; ++j) {
                    const double v = 1.0 / (std::abs(k_prev(i, j)) + delta);
                    w(i, j) = v;
                    w(j, i) = v;
                }
            }
            current = spec.with_weights(SymMatrix(std::move(w)));
        }
        SolveReport inner = [&] {
            try {
                return solve_prox(current, edge_set, warm);
            } catch (const Error& err) {
                std::ostringstream msg;
                msg << "reweighted_l1: inner solve failed at outer iteration " << mu << ": " << err.what();
                throw SolverError(msg.str());
            }
        }();
        outer_nnz.push_back(inner.nnz_offdiag);

        const double drift = (inner.k_opt - k_prev).fro_norm();
        k_prev = inner.k_opt;
        for (std::size_t e = 0; e < edge_set.size(); ++e)
            warm.w[e] = std::max(0.0, -inner.k_opt(edge_set[e].i, edge_set[e].j));

        if (drift < epsilon || mu == max_outer) {
            inner.outer_iterations = mu;
            inner.outer_nnz = std::move(outer_nnz);
            inner.delta_used = delta;
            inner.epsilon_used = epsilon;
            return inner;
        }
    }
    throw SolverError("reweighted_l1: unreachable"); // loop always returns
}

inline SolveReport reweighted_l1(const ProblemSpec& spec) {
    const ReweightDefaults d = reweight_defaults(spec);
    return reweighted_l1(spec, d.delta, d.epsilon, d.max_outer);
}

} // namespace lapsync
