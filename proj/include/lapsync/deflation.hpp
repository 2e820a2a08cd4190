#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "lapsync/eig.hpp"
#include "lapsync/lyapunov.hpp"
#include "lapsync/matrix.hpp"
#include "lapsync/sym_matrix.hpp"

namespace lapsync {

/// Orthonormal basis of the complement of the consensus direction: the n-1
/// columns of Vtilde span 1-perp and satisfy Vtilde^T 1 = 0, Vtilde^T Vtilde = I.
///
/// Built from the Householder reflection mapping e_1 to 1/sqrt(n): a fixed
/// algebraic construction, so every quantity derived from the basis is
/// reproducible. Any orthonormal completion of 1/sqrt(n) yields the same
/// deflated traces; this one is simply deterministic.
struct DeflationBasis {
    int n = 0;
    Matrix vtilde; // n x (n-1)
};

inline DeflationBasis make_basis(int n) {
    if (n < 2) throw ValidationError("make_basis: need n >= 2");
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    // u = e_1 - 1/sqrt(n); H = I - 2 u u^T / (u^T u) sends e_1 to 1/sqrt(n).
    std::vector<double> u(n, -inv_sqrt_n);
    u[0] += 1.0;
    const double uu = dot(u, u);
    DeflationBasis basis;
    basis.n = n;
    basis.vtilde = Matrix(n, n - 1);
    for (int col = 1; col < n; ++col) {
        const double factor = 2.0 * u[col] / uu;
        for (int row = 0; row < n; ++row)
            basis.vtilde(row, col - 1) = (row == col ? 1.0 : 0.0) - factor * u[row];
    }
    return basis;
}

/// The pair (Vtilde^T A Vtilde, Vtilde^T Q Vtilde): the input Lyapunov data
/// with the shared zero mode along 1 eliminated.
struct ReducedPair {
    SymMatrix atilde;
    SymMatrix qtilde;
};

inline SymMatrix project_out_consensus(const SymMatrix& a, const DeflationBasis& basis) {
    return SymMatrix::symmetrized(basis.vtilde.transpose() * a.mat() * basis.vtilde);
}

inline ReducedPair reduce(const SymMatrix& a, const SymMatrix& q, const DeflationBasis& basis) {
    return ReducedPair{project_out_consensus(a, basis), project_out_consensus(q, basis)};
}

namespace detail {

inline void require_zero_row_sums(const SymMatrix& m, const char* name) {
    std::vector<double> ones(m.size(), 1.0);
    if (max_abs(m.mat().matvec(ones)) > 1e-8 * (1.0 + m.max_norm())) {
        std::ostringstream msg;
        msg << name << " 1 != 0: the consensus direction is not a shared zero mode";
        throw ValidationError(msg.str());
    }
}

} // namespace detail

/// Minimum-trace solution of A^T P + P A = -Q when A and Q share the zero mode
/// along 1 and A is negative definite on 1-perp.
///
/// Deflates to (n-1) dimensions, solves the reduced equation with the dense
/// Lyapunov oracle, and lifts back as P = Vtilde Ptilde Vtilde^T. The result
/// satisfies P 1 = 0, which among all PSD solutions is the one of minimum
/// trace; the one-parameter family P + alpha 1 1^T covers the rest.
inline SymMatrix min_trace_solution(const SymMatrix& a, const SymMatrix& q) {
    const int n = a.size();
    if (q.size() != n) throw ValidationError("min_trace_solution: dimension mismatch");
    detail::require_zero_row_sums(a, "A");
    detail::require_zero_row_sums(q, "Q");
    if (n == 1) return SymMatrix::zeros(1);

    const DeflationBasis basis = make_basis(n);
    const ReducedPair red = reduce(a, q, basis);

    const EigDecomp ea = sym_eig(red.atilde);
    const double a_scale = std::max(std::abs(ea.eigenvalues.front()), std::abs(ea.eigenvalues.back()));
    if (ea.eigenvalues.back() >= -1e-12 * std::max(1.0, a_scale))
        throw SolverError("min_trace_solution: A is not negative definite on 1-perp");
    const EigDecomp eq = sym_eig(red.qtilde);
    if (eq.eigenvalues.front() < -1e-8 * (1.0 + q.max_norm()))
        throw ValidationError("min_trace_solution: Q is not positive semidefinite on 1-perp");

    const SymMatrix ptilde = solve_lyapunov_dense(red.atilde.mat(), red.qtilde);
    return SymMatrix::symmetrized(basis.vtilde * ptilde.mat() * basis.vtilde.transpose());
}

/// trace of the minimum-trace solution, evaluated through the Moore-Penrose
/// pseudoinverse: -1/2 trace(Q A^+). A^+ is computed with the Laplacian
/// shifted-inverse identity applied to -A.
inline double trace_via_pinv(const SymMatrix& a, const SymMatrix& q) {
    if (q.size() != a.size()) throw ValidationError("trace_via_pinv: dimension mismatch");
    detail::require_zero_row_sums(a, "A");
    detail::require_zero_row_sums(q, "Q");
    const SymMatrix a_pinv = laplacian_pinv(a * -1.0) * -1.0;
    return -0.5 * (q.mat() * a_pinv.mat()).trace();
}

/// Same trace through the shifted inverse: -1/2 trace(Q (A - 1 1^T/n)^{-1}).
/// Agrees with trace_via_pinv because Q 1 = 0 annihilates the rank-one shift.
inline double trace_via_shift(const SymMatrix& a, const SymMatrix& q) {
    const int n = a.size();
    if (q.size() != n) throw ValidationError("trace_via_shift: dimension mismatch");
    detail::require_zero_row_sums(a, "A");
    detail::require_zero_row_sums(q, "Q");
    // A - 1 1^T/n is symmetric negative definite here; invert via the spectrum.
    const SymMatrix shifted = a - SymMatrix::ones_outer(n);
    const EigDecomp d = sym_eig(shifted);
    const double lam_abs_max = std::max(std::abs(d.eigenvalues.front()), std::abs(d.eigenvalues.back()));
    std::vector<double> inv(n);
    for (int i = 0; i < n; ++i) {
        if (std::abs(d.eigenvalues[i]) <= 1e-14 * std::max(1.0, lam_abs_max))
            throw ValidationError("trace_via_shift: A - 1 1^T/n is singular (A not negative definite on 1-perp)");
        inv[i] = 1.0 / d.eigenvalues[i];
    }
    const SymMatrix shifted_inv = eig_apply(d, inv);
    return -0.5 * (q.mat() * shifted_inv.mat()).trace();
}

} // namespace lapsync
