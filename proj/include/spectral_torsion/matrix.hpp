#pragma once

#include <ostream>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace spectral_torsion {

// Small dense matrix over an exact or floating scalar. Sizes here stay below
// a few dozen, so a flat row-major vector is enough.
template <Scalar S>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0) throw ShapeError("matrix: negative size");
        data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), ScalarTraits<S>::zero());
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = ScalarTraits<S>::one();
        return m;
    }
    static Matrix diagonal(const std::vector<S>& d) {
        Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    S& operator()(int r, int c) { return data_[idx(r, c)]; }
    const S& operator()(int r, int c) const { return data_[idx(r, c)]; }

    bool is_zero() const {
        for (const auto& x : data_)
            if (!ScalarTraits<S>::is_zero(x)) return false;
        return true;
    }

    Matrix& operator+=(const Matrix& o) {
        same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Matrix& operator*=(const S& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, const S& s) { return a *= s; }
    friend Matrix operator*(const S& s, Matrix a) { return a *= s; }
    friend Matrix operator-(Matrix a) {
        for (auto& x : a.data_) x = -x;
        return a;
    }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw ShapeError("matrix product: inner dimensions differ");
        Matrix out(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const S& x = a(i, k);
                if (ScalarTraits<S>::is_zero(x)) continue;
                for (int j = 0; j < b.cols_; ++j) out(i, j) += x * b(k, j);
            }
        return out;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
        for (int i = 0; i < m.rows_; ++i) {
            os << (i ? "\n[" : "[");
            for (int j = 0; j < m.cols_; ++j) os << (j ? ", " : "") << m(i, j);
            os << "]";
        }
        return os;
    }

private:
    std::size_t idx(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
    }
    void same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeError("matrix shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<S> data_;
};

template <Scalar S>
S trace(const Matrix<S>& m) {
    if (!m.square()) throw ShapeError("trace of a non-square matrix");
    S t = ScalarTraits<S>::zero();
    for (int i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

template <Scalar S>
Matrix<S> adjoint(const Matrix<S>& m) {
    Matrix<S> out(m.cols(), m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            if constexpr (ScalarTraits<S>::complex)
                out(j, i) = m(i, j).conj();
            else
                out(j, i) = m(i, j);
        }
    return out;
}

template <Scalar S>
Matrix<S> commutator(const Matrix<S>& a, const Matrix<S>& b) {
    return a * b - b * a;
}

// Kronecker product; row index of a is the slow index.
template <Scalar S>
Matrix<S> kron(const Matrix<S>& a, const Matrix<S>& b) {
    Matrix<S> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const S& x = a(i, j);
            if (ScalarTraits<S>::is_zero(x)) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = x * b(k, l);
        }
    return out;
}

template <Scalar S>
bool is_hermitian(const Matrix<S>& m) {
    return m.square() && adjoint(m) == m;
}

template <Scalar S>
bool is_antihermitian(const Matrix<S>& m) {
    return m.square() && adjoint(m) == -m;
}

template <Scalar S>
bool near(const Matrix<S>& a, const Matrix<S>& b, Tolerance tol = {}) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (!ScalarTraits<S>::near(a(i, j), b(i, j), tol)) return false;
    return true;
}

template <RealScalar R>
using CMatrix = Matrix<Gaussian<R>>;

}  // namespace spectral_torsion
