#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "lapsync/eig.hpp"
#include "lapsync/factorizations.hpp"
#include "lapsync/matrix.hpp"
#include "lapsync/sym_matrix.hpp"

namespace lapsync {

namespace detail {

/// Index of the (i, j), i <= j entry in the half-vectorized symmetric layout.
inline int half_vec_index(int n, int i, int j) {
    return i * n - (i * (i - 1)) / 2 + (j - i);
}

/// Assembles the m x m system matrix of A^T P + P A over the n(n+1)/2
/// independent entries of the symmetric unknown P.
inline Matrix lyapunov_operator(const Matrix& a) {
    const int n = a.rows();
    const int m = n * (n + 1) / 2;
    Matrix sys(m, m);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const int eq = half_vec_index(n, i, j);
            for (int k = 0; k < n; ++k) {
                // (A^T P)_{ij} picks up A(k,i) * P(k,j); (P A)_{ij} picks up P(i,k) * A(k,j).
                sys(eq, half_vec_index(n, std::min(k, j), std::max(k, j))) += a(k, i);
                sys(eq, half_vec_index(n, std::min(i, k), std::max(i, k))) += a(k, j);
            }
        }
    }
    return sys;
}

inline SymMatrix unpack_half_vec(int n, const std::vector<double>& x) {
    Matrix p(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = x[half_vec_index(n, i, j)];
            p(i, j) = v;
            p(j, i) = v;
        }
    }
    return SymMatrix(std::move(p));
}

} // namespace detail

/// Solves A^T P + P A = -Q for symmetric P, with A a strictly stable (Hurwitz)
/// square matrix, by a direct linear solve over the n(n+1)/2 unknowns.
///
/// This is the oracle backend of the library: exact at small scale (n <= 64)
/// and entirely independent of the deflation identities it is used to verify.
/// Stability is certified before solving: the same factorization is applied to
/// forcing -I and the result must be positive definite, which for a nonsingular
/// Lyapunov operator holds if and only if A is Hurwitz.
inline SymMatrix solve_lyapunov_dense(const Matrix& a, const SymMatrix& q) {
    if (!a.square()) throw ValidationError("solve_lyapunov_dense: A must be square");
    const int n = a.rows();
    if (q.size() != n) throw ValidationError("solve_lyapunov_dense: Q dimension mismatch");
    if (n > 64) throw ValidationError("solve_lyapunov_dense: dimension exceeds oracle scale (64)");

    const Matrix sys = detail::lyapunov_operator(a);
    auto lu = LuFactor::factor(sys);
    if (!lu)
        throw SolverError("solve_lyapunov_dense: Lyapunov operator is singular "
                          "(A has eigenvalues summing to zero in pairs; not strictly stable)");

    const int m = n * (n + 1) / 2;
    std::vector<double> rhs_id(m, 0.0);
    for (int i = 0; i < n; ++i) rhs_id[detail::half_vec_index(n, i, i)] = -1.0;
    const SymMatrix p_id = detail::unpack_half_vec(n, lu->solve(rhs_id));
    const EigDecomp stab = sym_eig(p_id);
    if (stab.eigenvalues.front() <= 1e-12 * std::max(1.0, stab.eigenvalues.back())) {
        std::ostringstream msg;
        msg << "solve_lyapunov_dense: A is not strictly stable (Lyapunov certificate min eigenvalue "
            << stab.eigenvalues.front() << ")";
        throw SolverError(msg.str());
    }

    std::vector<double> rhs(m);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) rhs[detail::half_vec_index(n, i, j)] = -q(i, j);
    const SymMatrix p = detail::unpack_half_vec(n, lu->solve(rhs));

    const Matrix residual = a.transpose() * p.mat() + p.mat() * a + q.mat();
    const double res = residual.max_norm();
    if (res > 1e-8 * (1.0 + q.max_norm())) {
        std::ostringstream msg;
        msg << "solve_lyapunov_dense: ill-conditioned system, residual " << res;
        throw SolverError(msg.str());
    }
    return p;
}

} // namespace lapsync
