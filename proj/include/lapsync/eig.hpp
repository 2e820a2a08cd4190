#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "lapsync/matrix.hpp"
#include "lapsync/sym_matrix.hpp"

namespace lapsync {

/// Spectral decomposition A = V diag(eigenvalues) V^T.
///
/// Eigenvalues are ascending; eigenvector columns are orthonormal with the
/// first component of magnitude above 1e-12 made positive, so repeated runs
/// on identical input produce identical bits.
struct EigDecomp {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Unconditionally convergent for symmetric input. Sweeps run in a fixed
/// (p, q) order and stop when the off-diagonal Frobenius mass drops below
/// 1e-12 times the Frobenius norm of the input; the sweep cap is 100.
inline EigDecomp sym_eig(const SymMatrix& sym) {
    const int n = sym.size();
    Matrix a = sym.mat();
    Matrix v = Matrix::identity(n);

    const double fro = a.fro_norm();
    const double off_threshold = 1e-12 * fro;

    auto off_diag_fro = [&]() {
        double acc = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) acc += 2.0 * a(p, q) * a(p, q);
        return std::sqrt(acc);
    };

    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        const double off = off_diag_fro();
        if (off <= off_threshold) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Skip rotations that cannot move the off-diagonal mass.
                if (std::abs(apq) < off_threshold / (n * n)) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(p, k) = a(k, p);
                    a(k, q) = s * akp + c * akq;
                    a(q, k) = a(k, q);
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == kMaxSweeps && off_diag_fro() > off_threshold) {
        std::ostringstream msg;
        msg << "sym_eig: Jacobi sweeps did not converge, off-diagonal residual " << off_diag_fro();
        throw SolverError(msg.str());
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    EigDecomp d;
    d.eigenvalues.resize(n);
    d.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = order[j];
        d.eigenvalues[j] = a(src, src);
        double sign = 1.0;
        for (int i = 0; i < n; ++i) {
            if (std::abs(v(i, src)) > 1e-12) {
                sign = (v(i, src) > 0.0) ? 1.0 : -1.0;
                break;
            }
        }
        for (int i = 0; i < n; ++i) d.eigenvectors(i, j) = sign * v(i, src);
    }
    return d;
}

/// Rebuilds V diag(f(lambda)) V^T as a symmetric value.
inline SymMatrix eig_apply(const EigDecomp& d, const std::vector<double>& transformed) {
    const int n = d.eigenvectors.rows();
    Matrix scaled = d.eigenvectors;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) scaled(i, j) *= transformed[j];
    return SymMatrix::symmetrized(scaled * d.eigenvectors.transpose());
}

/// Symmetric PSD square root: returns S with S S = A.
///
/// Eigenvalues in [-1e-10 * ||A||, 0) are clamped to zero; anything more
/// negative means the input is not PSD and raises ValidationError.
inline SymMatrix sqrt_psd(const SymMatrix& a) {
    EigDecomp d = sym_eig(a);
    const int n = a.size();
    const double spectral = std::max(std::abs(d.eigenvalues.front()), std::abs(d.eigenvalues.back()));
    const double tol = 1e-10 * spectral;
    std::vector<double> roots(n);
    for (int i = 0; i < n; ++i) {
        double lam = d.eigenvalues[i];
        if (lam < -tol) {
            std::ostringstream msg;
            msg << "sqrt_psd: matrix is not positive semidefinite (eigenvalue " << lam << ")";
            throw ValidationError(msg.str());
        }
        roots[i] = std::sqrt(std::max(lam, 0.0));
    }
    return eig_apply(d, roots);
}

/// Moore-Penrose pseudoinverse of a connected-graph Laplacian, computed via
/// the shifted-inverse identity  K^+ = (K + 1 1^T/n)^{-1} - 1 1^T/n.
///
/// Requires K 1 = 0 (to 1e-10 * ||K||) and K + 1 1^T/n invertible; a condition
/// estimate above 1e12 is reported as a disconnected graph.
inline SymMatrix laplacian_pinv(const SymMatrix& k) {
    const int n = k.size();
    std::vector<double> ones(n, 1.0);
    const double row_sum = max_abs(k.mat().matvec(ones));
    if (row_sum > 1e-10 * std::max(1.0, k.max_norm()))
        throw ValidationError("laplacian_pinv: K 1 != 0, input is not a Laplacian");

    const SymMatrix shifted = k + SymMatrix::ones_outer(n);
    EigDecomp d = sym_eig(shifted);
    const double lam_min = d.eigenvalues.front();
    const double lam_max = d.eigenvalues.back();
    if (lam_min <= 0.0 || lam_max / lam_min > 1e12)
        throw ValidationError("laplacian_pinv: K + 1 1^T/n numerically singular, graph is disconnected");

    std::vector<double> inv(n);
    for (int i = 0; i < n; ++i) inv[i] = 1.0 / d.eigenvalues[i];
    return eig_apply(d, inv) - SymMatrix::ones_outer(n);
}

} // namespace lapsync
