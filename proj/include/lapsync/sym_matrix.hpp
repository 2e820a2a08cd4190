#pragma once

#include <utility>

#include "lapsync/matrix.hpp"

namespace lapsync {

/// Dense real symmetric matrix, the carrier type for every symmetric quantity
/// in the library (conductance matrices, state weights, Lyapunov solutions).
///
/// Entries satisfy a(i,j) == a(j,i) exactly; the constructor rejects anything
/// else, and `symmetrized` is the factory for numerically-symmetric products.
/// Instances are immutable after construction and safe to share across threads.
class SymMatrix {
public:
    explicit SymMatrix(Matrix m) : m_(std::move(m)) {
        if (!m_.square() || m_.rows() < 1) throw ValidationError("SymMatrix: need a square matrix with n >= 1");
        if (!m_.is_exactly_symmetric()) throw ValidationError("SymMatrix: entries are not exactly symmetric");
    }

    /// Builds (m + m^T)/2, averaging away rounding asymmetry in computed products.
    static SymMatrix symmetrized(const Matrix& m) {
        if (!m.square() || m.rows() < 1) throw ValidationError("SymMatrix: need a square matrix with n >= 1");
        Matrix s(m.rows(), m.rows());
        for (int i = 0; i < m.rows(); ++i) {
            s(i, i) = m(i, i);
            for (int j = i + 1; j < m.rows(); ++j) {
                const double v = 0.5 * (m(i, j) + m(j, i));
                s(i, j) = v;
                s(j, i) = v;
            }
        }
        return SymMatrix(std::move(s));
    }

    static SymMatrix identity(int n) { return SymMatrix(Matrix::identity(n)); }
    static SymMatrix zeros(int n) { return SymMatrix(Matrix(n, n)); }

    /// The projector complement (1 1^T)/n as a symmetric value.
    static SymMatrix ones_outer(int n) { return SymMatrix(Matrix::ones_outer(n)); }

    int size() const { return m_.rows(); }
    double operator()(int i, int j) const { return m_(i, j); }
    const Matrix& mat() const { return m_; }

    double trace() const { return m_.trace(); }
    double max_norm() const { return m_.max_norm(); }
    double fro_norm() const { return m_.fro_norm(); }

    friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) { return SymMatrix(a.m_ + b.m_); }
    friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) { return SymMatrix(a.m_ - b.m_); }
    friend SymMatrix operator*(const SymMatrix& a, double s) { return SymMatrix(a.m_ * s); }
    friend SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(a.m_ * s); }

private:
    Matrix m_;
};

} // namespace lapsync
