#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skewguard/error.hpp"

namespace skewguard {

// Dense row-major matrix of doubles. Covers what MCD and sampling need;
// no general linear algebra beyond that.
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

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_)
            raise(Errc::DimensionMismatch, "appended row has wrong width");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    Matrix select_rows(std::span<const std::size_t> idx) const {
        Matrix out(idx.size(), cols_);
        for (std::size_t k = 0; k < idx.size(); ++k)
            for (std::size_t j = 0; j < cols_; ++j) out(k, j) = (*this)(idx[k], j);
        return out;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Symmetric matrix for scatter/covariance use. Construction from a general
// matrix enforces symmetry to 1e-12 relative tolerance and stores the
// symmetrized average so downstream factorizations see exact symmetry.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

    static SymMatrix identity(std::size_t n) {
        SymMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static SymMatrix from_matrix(const Matrix& m, double rel_tol = 1e-12);

    std::size_t dim() const { return dim_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    // writes both (i,j) and (j,i)
    void set(std::size_t i, std::size_t j, double v) {
        data_[i * dim_ + j] = v;
        data_[j * dim_ + i] = v;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    Matrix as_matrix() const {
        Matrix m(dim_, dim_);
        m.data() = data_;
        return m;
    }

    SymMatrix scaled(double factor) const {
        SymMatrix out = *this;
        for (double& v : out.data_) v *= factor;
        return out;
    }

    bool operator==(const SymMatrix&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

}  // namespace skewguard
