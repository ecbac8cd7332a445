#pragma once

#include <cblas.h>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "txnn/errors.hpp"

namespace txnn {

// Dense row-major matrix of doubles. The only tensor type in the library;
// a row vector is a 1xN matrix.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
        std::size_t r = 0;
        for (const auto& row : rows) {
            if (row.size() != m.cols_)
                throw ShapeError("from_rows: ragged initializer, row " + std::to_string(r) +
                                 " has " + std::to_string(row.size()) + " columns, expected " +
                                 std::to_string(m.cols_));
            std::size_t c = 0;
            for (double v : row) m(r, c++) = v;
            ++r;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    Matrix& operator+=(const Matrix& o) {
        require_same_shape(o, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    Matrix& operator-=(const Matrix& o) {
        require_same_shape(o, "-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
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

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    // Elementwise product.
    Matrix hadamard(const Matrix& o) const {
        require_same_shape(o, "hadamard");
        Matrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] * o.data_[i];
        return out;
    }

    Matrix& hadamard_inplace(const Matrix& o) {
        require_same_shape(o, "hadamard");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] *= o.data_[i];
        return *this;
    }

    template <class F>
    Matrix map(F f) const {
        Matrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = f(data_[i]);
        return out;
    }

    // Adds a 1xC row vector to every row.
    Matrix& add_row_vector(const Matrix& row) {
        if (row.rows_ != 1 || row.cols_ != cols_)
            throw ShapeError("add_row_vector: expected 1x" + std::to_string(cols_) + ", got " +
                             row.shape_str());
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) += row.data_[c];
        return *this;
    }

    // 1xC vector of column sums.
    Matrix col_sums() const {
        Matrix out(1, cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out.data_[c] += (*this)(r, c);
        return out;
    }

    Matrix col_means() const {
        Matrix out = col_sums();
        if (rows_ > 0) out *= 1.0 / static_cast<double>(rows_);
        return out;
    }

    double sum() const {
        double s = 0.0;
        for (double v : data_) s += v;
        return s;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    void require_same_shape(const Matrix& o, const char* op) const {
        if (!same_shape(o))
            throw ShapeError(std::string(op) + ": shape mismatch " + shape_str() + " vs " +
                             o.shape_str());
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline Matrix gemm(CBLAS_TRANSPOSE ta, CBLAS_TRANSPOSE tb, const Matrix& a, const Matrix& b,
                   std::size_t m, std::size_t n, std::size_t k) {
    Matrix out(m, n);
    if (m == 0 || n == 0) return out;
    cblas_dgemm(CblasRowMajor, ta, tb, static_cast<blasint>(m), static_cast<blasint>(n),
                static_cast<blasint>(k), 1.0, a.data(), static_cast<blasint>(a.cols()), b.data(),
                static_cast<blasint>(b.cols()), 0.0, out.data(), static_cast<blasint>(n));
    return out;
}

}  // namespace detail

// a (m x k) times b (k x n).
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions differ, " + a.shape_str() + " vs " +
                         b.shape_str());
    return detail::gemm(CblasNoTrans, CblasNoTrans, a, b, a.rows(), b.cols(), a.cols());
}

// a^T (k x m -> m x k transposed) times b (k x n). Avoids materializing a^T.
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw ShapeError("matmul_tn: row counts differ, " + a.shape_str() + " vs " +
                         b.shape_str());
    return detail::gemm(CblasTrans, CblasNoTrans, a, b, a.cols(), b.cols(), a.rows());
}

// a (m x k) times b^T (n x k transposed).
inline Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw ShapeError("matmul_nt: column counts differ, " + a.shape_str() + " vs " +
                         b.shape_str());
    return detail::gemm(CblasNoTrans, CblasTrans, a, b, a.rows(), b.rows(), a.cols());
}

}  // namespace txnn
