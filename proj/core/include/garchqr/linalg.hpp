#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace garchqr {

/// Dense row-major matrix. Dimensions here are tiny (p+q+1 parameters,
/// sieve orders of a couple dozen), so everything is plain O(n^3) code.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> matvec(const Matrix& a, std::span<const double> x);
std::vector<double> matvec_transposed(const Matrix& a, std::span<const double> x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
double dot(std::span<const double> a, std::span<const double> b);

/// LU factorization with partial pivoting; solve/inverse for the small
/// square systems used throughout (basis systems, J-tilde, Sigma3).
class LuFactorization {
public:
    static LuFactorization compute(Matrix a);

    bool singular() const { return singular_; }
    /// |largest pivot| / |smallest pivot|, a cheap condition screen.
    double pivot_ratio() const;

    std::vector<double> solve(std::span<const double> b) const;
    Matrix solve_matrix(const Matrix& b) const;
    Matrix inverse() const;

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
    bool singular_ = false;
};

/// Cholesky of a symmetric positive definite matrix; returns false when
/// the matrix is not numerically PD (no throw: callers ridge and retry).
bool cholesky(const Matrix& a, Matrix& lower);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(Matrix a);

/// Leading eigenvector of a symmetric PSD matrix (power iteration with a
/// fixed deterministic start).
std::vector<double> leading_eigenvector(const Matrix& a);

/// Sample covariance (n-1 denominator) of observations stored as rows.
Matrix sample_covariance(const Matrix& observations);

} // namespace garchqr
