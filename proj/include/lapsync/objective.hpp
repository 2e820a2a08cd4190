#pragma once

#include <cmath>
#include <optional>
#include <sstream>

#include "lapsync/deflation.hpp"
#include "lapsync/eig.hpp"
#include "lapsync/factorizations.hpp"
#include "lapsync/laplacian.hpp"
#include "lapsync/lyapunov.hpp"
#include "lapsync/sym_matrix.hpp"

namespace lapsync {

/// One optimization instance: the state weight Q2 (zero row sums, positive
/// definite on 1-perp), control weight r, sparsity weight gamma, elementwise
/// penalty weights W, and the solver tolerances.
///
/// tol_grad scales the first-order optimality test; tol_obj is the relative
/// step/objective stagnation tolerance of the secondary stopping rule.
class ProblemSpec {
public:
    ProblemSpec(SymMatrix q2, double r, double gamma, SymMatrix w, double tol_grad = 1e-9,
                double tol_obj = 1e-13, int max_iter = 200000, bool offdiag_only_l1 = false)
        : q2_(std::move(q2)),
          w_(std::move(w)),
          r_(r),
          gamma_(gamma),
          tol_grad_(tol_grad),
          tol_obj_(tol_obj),
          max_iter_(max_iter),
          offdiag_only_l1_(offdiag_only_l1) {
        validate();
    }

    /// Convenience constructor with the all-ones weight matrix.
    ProblemSpec(SymMatrix q2, double r, double gamma)
        : q2_(std::move(q2)),
          w_(all_ones(q2_.size())),
          r_(r),
          gamma_(gamma),
          tol_grad_(1e-9),
          tol_obj_(1e-13),
          max_iter_(200000),
          offdiag_only_l1_(false) {
        validate();
    }

    int n() const { return q2_.size(); }
    const SymMatrix& q2() const { return q2_; }
    const SymMatrix& w() const { return w_; }
    double r() const { return r_; }
    double gamma() const { return gamma_; }
    double tol_grad() const { return tol_grad_; }
    double tol_obj() const { return tol_obj_; }
    int max_iter() const { return max_iter_; }
    bool offdiag_only_l1() const { return offdiag_only_l1_; }

    /// Same instance with a different sparsity weight matrix (used by the
    /// reweighting loop, which re-derives W each outer iteration).
    ProblemSpec with_weights(SymMatrix w) const {
        return ProblemSpec(q2_, r_, gamma_, std::move(w), tol_grad_, tol_obj_, max_iter_, offdiag_only_l1_);
    }

    ProblemSpec with_gamma(double gamma) const {
        return ProblemSpec(q2_, r_, gamma, w_, tol_grad_, tol_obj_, max_iter_, offdiag_only_l1_);
    }

private:
    static SymMatrix all_ones(int n) {
        Matrix w(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) w(i, j) = 1.0;
        return SymMatrix(std::move(w));
    }

    void validate() const {
        if (!(r_ > 0.0)) throw ValidationError("ProblemSpec: control weight r must be positive");
        if (!(gamma_ >= 0.0)) throw ValidationError("ProblemSpec: sparsity weight gamma must be nonnegative");
        if (!(tol_grad_ > 0.0) || !(tol_obj_ > 0.0)) throw ValidationError("ProblemSpec: tolerances must be positive");
        if (max_iter_ < 1) throw ValidationError("ProblemSpec: max_iter must be positive");
        if (w_.size() != q2_.size()) throw ValidationError("ProblemSpec: W dimension does not match Q2");
        for (int i = 0; i < w_.size(); ++i)
            for (int j = 0; j < w_.size(); ++j)
                if (!(w_(i, j) >= 0.0)) throw ValidationError("ProblemSpec: W entries must be nonnegative");

        const int n = q2_.size();
        std::vector<double> ones(n, 1.0);
        if (max_abs(q2_.mat().matvec(ones)) > 1e-10 * (1.0 + q2_.max_norm()))
            throw ValidationError("ProblemSpec: Q2 1 != 0");
        if (n >= 2) {
            const DeflationBasis basis = make_basis(n);
            const EigDecomp d = sym_eig(project_out_consensus(q2_, basis));
            if (d.eigenvalues.front() <= 1e-12 * (1.0 + q2_.max_norm()))
                throw ValidationError("ProblemSpec: Q2 is not positive definite on 1-perp");
        }
    }

    SymMatrix q2_;
    SymMatrix w_;
    double r_;
    double gamma_;
    double tol_grad_;
    double tol_obj_;
    int max_iter_;
    bool offdiag_only_l1_;
};

/// Objective split into the synchronization (H2) part and the weighted l1
/// penalty; total is their sum.
struct ObjectiveValue {
    double total = 0.0;
    double h2_part = 0.0;
    double l1_part = 0.0;
};

namespace detail {

/// Cholesky factor of K + 1 1^T/n; empty when K is not the Laplacian of a
/// connected graph (the factorization is the connectivity barrier).
inline std::optional<Cholesky> factor_shifted(const SymMatrix& k) {
    return Cholesky::factor(k.mat() + Matrix::ones_outer(k.size()));
}

inline double weighted_l1(const SymMatrix& k, const ProblemSpec& spec) {
    double acc = 0.0;
    for (int i = 0; i < k.size(); ++i)
        for (int j = 0; j < k.size(); ++j) {
            if (spec.offdiag_only_l1() && i == j) continue;
            acc += spec.w()(i, j) * std::abs(k(i, j));
        }
    return spec.gamma() * acc;
}

} // namespace detail

/// Synchronization cost of a connected conductance matrix K:
///   h2  = 1/2 trace(Q2 (K + 1 1^T/n)^{-1}) + r/2 trace(K)
///   l1  = gamma ||W o K||_l1  (diagonal included unless configured otherwise)
/// computed through a positive definite factorization solve, never an explicit
/// inverse. Throws ValidationError when K + 1 1^T/n is singular (disconnected).
inline ObjectiveValue eval_J(const SymMatrix& k, const ProblemSpec& spec) {
    if (k.size() != spec.n()) throw ValidationError("eval_J: K dimension does not match the problem");
    auto chol = detail::factor_shifted(k);
    if (!chol)
        throw ValidationError("eval_J: K + 1 1^T/n is singular; K is not the Laplacian of a connected graph");
    ObjectiveValue v;
    v.h2_part = 0.5 * chol->solve(spec.q2().mat()).trace() + 0.5 * spec.r() * k.trace();
    v.l1_part = detail::weighted_l1(k, spec);
    v.total = v.h2_part + v.l1_part;
    return v;
}

/// Gradient of the H2 part on the Laplacian cone:
///   grad J = -1/2 B^{-1} Q2 B^{-1} + r/2 (I - 1 1^T/n),  B = K + 1 1^T/n.
/// The result annihilates 1, i.e. it lives on the tangent space of the
/// constraint set. The l1 part is handled separately by the proximal step.
inline SymMatrix grad_J(const SymMatrix& k, const ProblemSpec& spec) {
    if (k.size() != spec.n()) throw ValidationError("grad_J: K dimension does not match the problem");
    const int n = k.size();
    auto chol = detail::factor_shifted(k);
    if (!chol)
        throw ValidationError("grad_J: K + 1 1^T/n is singular; K is not the Laplacian of a connected graph");
    const Matrix binv_q2 = chol->solve(spec.q2().mat());
    const Matrix sandwich = chol->solve(binv_q2.transpose());
    Matrix g = sandwich * (-0.5);
    const double c = 0.5 * spec.r();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) += c * ((i == j ? 1.0 : 0.0) - 1.0 / n);
    return SymMatrix::symmetrized(g);
}

/// Independent H2 evaluation through the closed-loop Lyapunov equation of the
/// oscillator network with uniform inductance L.
///
/// The consensus mode is removed by restricting the 2n-dimensional closed loop
/// to its invariant subspace spanned by [Vtilde, 0] and [0, Vtilde]:
///   A_cl = [ 0, I; -(1/L) I, -Ktilde ],  forcing diag(0, Qtilde + r Ktilde^2),
/// solved by the dense Lyapunov oracle; the value is the trace of the velocity
/// block and is independent of L.
inline double eval_full_lyapunov_oracle(const SymMatrix& k, double inductance, const ProblemSpec& spec) {
    const int n = k.size();
    if (n != spec.n()) throw ValidationError("oracle: K dimension does not match the problem");
    if (!(inductance > 0.0)) throw ValidationError("oracle: inductance must be positive");
    if (n > 16) throw ValidationError("oracle: dimension exceeds oracle scale (16)");
    if (n == 1) return 0.0;

    const DeflationBasis basis = make_basis(n);
    const SymMatrix ktilde = project_out_consensus(k, basis);
    const SymMatrix qtilde = project_out_consensus(spec.q2(), basis);
    const int m = n - 1;

    Matrix a_cl(2 * m, 2 * m);
    for (int i = 0; i < m; ++i) {
        a_cl(i, m + i) = 1.0;
        a_cl(m + i, i) = -1.0 / inductance;
        for (int j = 0; j < m; ++j) a_cl(m + i, m + j) = -ktilde(i, j);
    }

    const Matrix kt2 = ktilde.mat() * ktilde.mat();
    Matrix forcing(2 * m, 2 * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) forcing(m + i, m + j) = qtilde(i, j) + spec.r() * kt2(i, j);

    const SymMatrix p = solve_lyapunov_dense(a_cl, SymMatrix::symmetrized(forcing));
    double trace_p2 = 0.0;
    for (int i = 0; i < m; ++i) trace_p2 += p(m + i, m + i);
    return trace_p2;
}

/// Max-norm residuals of the three block Lyapunov equations of the closed loop
/// under uniform inductance H = (1/L) I:
///   eq1: H P0^T + P0 H = 0
///   eq2: P0 K - P1 + H P2 = 0
///   eq3: K P2 + P2 K - P0 - P0^T = Q2 + r K^2
struct LyapunovBlockResiduals {
    double eq1 = 0.0;
    double eq2 = 0.0;
    double eq3 = 0.0;
};

inline LyapunovBlockResiduals check_lyapunov_blocks(const Matrix& p0, const Matrix& p1, const Matrix& p2,
                                                    const SymMatrix& k, double inductance,
                                                    const ProblemSpec& spec) {
    const int n = k.size();
    if (n != spec.n() || p0.rows() != n || !p0.square() || p1.rows() != n || !p1.square() || p2.rows() != n ||
        !p2.square())
        throw ValidationError("check_lyapunov_blocks: dimension mismatch");
    const double h = 1.0 / inductance;
    LyapunovBlockResiduals res;
    res.eq1 = (p0.transpose() * h + p0 * h).max_norm();
    res.eq2 = (p0 * k.mat() - p1 + p2 * h).max_norm();
    const Matrix k2 = k.mat() * k.mat();
    res.eq3 = (k.mat() * p2 + p2 * k.mat() - p0 - p0.transpose() - spec.q2().mat() - k2 * spec.r()).max_norm();
    return res;
}

} // namespace lapsync
