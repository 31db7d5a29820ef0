#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsclab::numerics {

using Vector = std::vector<double>;
using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Dense row-major matrix.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_) {
            throw std::invalid_argument("Matrix: entry count does not match shape");
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    const T& operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<T>& entries() const noexcept { return data_; }
    std::vector<T>& entries() noexcept { return data_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using DenseMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

template <typename T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix<T> out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

template <typename T>
std::vector<T> operator*(const Matrix<T>& a, std::span<const T> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector product: shape mismatch");
    std::vector<T> y(a.rows(), T{});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T acc{};
        const auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
    return y;
}

template <typename T>
std::vector<T> operator*(const Matrix<T>& a, const std::vector<T>& x) {
    return a * std::span<const T>(x);
}

template <typename T>
Matrix<T> operator+(Matrix<T> a, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix sum: shape mismatch");
    for (std::size_t i = 0; i < a.entries().size(); ++i) a.entries()[i] += b.entries()[i];
    return a;
}

template <typename T>
Matrix<T> operator-(Matrix<T> a, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix difference: shape mismatch");
    for (std::size_t i = 0; i < a.entries().size(); ++i) a.entries()[i] -= b.entries()[i];
    return a;
}

double norm_inf(std::span<const double> v);
double norm_inf(const DenseMatrix& m);  // max absolute row sum
bool all_finite(std::span<const double> v);

}  // namespace tsclab::numerics
