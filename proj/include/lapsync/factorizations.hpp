#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "lapsync/matrix.hpp"

namespace lapsync {

/// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
///
/// Returns std::nullopt when a pivot falls below rel_tol times the largest
/// diagonal entry, which is how singular (e.g. disconnected-Laplacian) systems
/// are detected; callers translate that into their own error type.
class Cholesky {
public:
    static std::optional<Cholesky> factor(const Matrix& a, double rel_tol = 1e-13) {
        const int n = a.rows();
        Cholesky f;
        f.l_ = Matrix(n, n);
        double max_diag = 0.0;
        for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
        const double floor = rel_tol * std::max(1.0, max_diag);
        for (int j = 0; j < n; ++j) {
            double d = a(j, j);
            for (int k = 0; k < j; ++k) d -= f.l_(j, k) * f.l_(j, k);
            if (d <= floor * floor || !std::isfinite(d)) return std::nullopt;
            const double ljj = std::sqrt(d);
            f.l_(j, j) = ljj;
            for (int i = j + 1; i < n; ++i) {
                double v = a(i, j);
                for (int k = 0; k < j; ++k) v -= f.l_(i, k) * f.l_(j, k);
                f.l_(i, j) = v / ljj;
            }
        }
        return f;
    }

    std::vector<double> solve(std::vector<double> b) const {
        const int n = l_.rows();
        for (int i = 0; i < n; ++i) {
            double v = b[i];
            for (int k = 0; k < i; ++k) v -= l_(i, k) * b[k];
            b[i] = v / l_(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double v = b[i];
            for (int k = i + 1; k < n; ++k) v -= l_(k, i) * b[k];
            b[i] = v / l_(i, i);
        }
        return b;
    }

    /// Solves A X = B column by column.
    Matrix solve(const Matrix& b) const {
        const int n = l_.rows();
        Matrix x(n, b.cols());
        std::vector<double> col(n);
        for (int j = 0; j < b.cols(); ++j) {
            for (int i = 0; i < n; ++i) col[i] = b(i, j);
            col = solve(std::move(col));
            for (int i = 0; i < n; ++i) x(i, j) = col[i];
        }
        return x;
    }

    /// Smallest and largest diagonal pivot of L; their ratio squared bounds the
    /// spread of the eigenvalues and serves as a cheap conditioning probe.
    std::pair<double, double> pivot_range() const {
        double lo = l_(0, 0), hi = l_(0, 0);
        for (int i = 1; i < l_.rows(); ++i) {
            lo = std::min(lo, l_(i, i));
            hi = std::max(hi, l_(i, i));
        }
        return {lo, hi};
    }

private:
    Matrix l_;
};

/// LU factorization with partial pivoting for general square systems.
class LuFactor {
public:
    static std::optional<LuFactor> factor(Matrix a, double rel_tol = 1e-14) {
        const int n = a.rows();
        LuFactor f;
        f.perm_.resize(n);
        for (int i = 0; i < n; ++i) f.perm_[i] = i;
        const double scale = std::max(1.0, a.max_norm());
        for (int k = 0; k < n; ++k) {
            int piv = k;
            double best = std::abs(a(k, k));
            for (int i = k + 1; i < n; ++i) {
                const double v = std::abs(a(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best <= rel_tol * scale || !std::isfinite(best)) return std::nullopt;
            if (piv != k) {
                for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
                std::swap(f.perm_[k], f.perm_[piv]);
            }
            const double inv = 1.0 / a(k, k);
            for (int i = k + 1; i < n; ++i) {
                const double m = a(i, k) * inv;
                a(i, k) = m;
                for (int j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
            }
        }
        f.lu_ = std::move(a);
        return f;
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        const int n = lu_.rows();
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = b[perm_[i]];
        for (int i = 0; i < n; ++i) {
            double v = x[i];
            for (int k = 0; k < i; ++k) v -= lu_(i, k) * x[k];
            x[i] = v;
        }
        for (int i = n - 1; i >= 0; --i) {
            double v = x[i];
            for (int k = i + 1; k < n; ++k) v -= lu_(i, k) * x[k];
            x[i] = v / lu_(i, i);
        }
        return x;
    }

private:
    Matrix lu_;
    std::vector<int> perm_;
};

} // namespace lapsync
