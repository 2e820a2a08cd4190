#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lapsync/errors.hpp"

namespace lapsync {

/// Dense real matrix with row-major storage and value semantics.
///
/// Sized for the problems this library solves (n up to a few hundred);
/// every operation is a plain O(n^2)/O(n^3) loop with no hidden state,
/// which keeps results bit-reproducible across runs.
class Matrix {
public:
    Matrix() = default;

    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw ValidationError("Matrix: negative dimension");
    }

    Matrix(int rows, int cols, std::vector<double> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows < 0 || cols < 0 || data_.size() != static_cast<std::size_t>(rows) * cols)
            throw ValidationError("Matrix: data size does not match dimensions");
    }

    static Matrix zeros(int rows, int cols) { return Matrix(rows, cols); }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// The rank-one matrix (1 1^T)/n that projects onto the consensus direction.
    static Matrix ones_outer(int n) {
        Matrix m(n, n);
        const double v = 1.0 / n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = v;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    Matrix& operator+=(const Matrix& other) {
        require_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
        return *this;
    }

    Matrix& operator-=(const Matrix& other) {
        require_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
        return *this;
    }

    Matrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw ValidationError("Matrix multiply: inner dimensions differ");
        Matrix c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i) {
            for (int k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

    std::vector<double> matvec(const std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != cols_) throw ValidationError("matvec: dimension mismatch");
        std::vector<double> y(rows_, 0.0);
        for (int i = 0; i < rows_; ++i) {
            double acc = 0.0;
            for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
            y[i] = acc;
        }
        return y;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double trace() const {
        double acc = 0.0;
        for (int i = 0; i < std::min(rows_, cols_); ++i) acc += (*this)(i, i);
        return acc;
    }

    /// Largest absolute entry.
    double max_norm() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double fro_norm() const {
        double acc = 0.0;
        for (double v : data_) acc += v * v;
        return std::sqrt(acc);
    }

    bool is_exactly_symmetric() const {
        if (!square()) return false;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

private:
    void require_same_shape(const Matrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw ValidationError("Matrix: shape mismatch in elementwise operation");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

} // namespace lapsync
