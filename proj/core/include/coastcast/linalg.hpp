#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coastcast {

// Dense row-major matrix of doubles. Just enough linear algebra for the
// pipeline; nothing here is performance-critical beyond O(n d^2) fits.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {v_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {v_.data() + r * cols_, cols_};
    }

    std::vector<double>& storage() { return v_; }
    const std::vector<double>& storage() const { return v_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

// Least squares min ||A x - y|| via Householder QR. Throws rank_deficient
// when a diagonal of R falls below rank_tol * max|R_ii|.
std::vector<double> solve_least_squares(const Matrix& a, std::span<const double> y,
                                        double rank_tol = 1e-10);

// Ridge-regularized normal equations (A^T A + lambda I) x = A^T y, solved by
// Cholesky. Well-defined for rank-deficient A when lambda > 0.
std::vector<double> solve_ridge(const Matrix& a, std::span<const double> y,
                                double lambda);

struct SymEigen {
    std::vector<double> values; // descending
    Matrix vectors;             // column j = eigenvector of values[j]
    double off_norm = 0.0;      // achieved off-diagonal Frobenius norm
    int sweeps = 0;
};

// Cyclic Jacobi rotations on a symmetric matrix until the off-diagonal
// Frobenius norm drops to `tol` (or max_sweeps). Eigenvector sign is fixed
// so the largest-magnitude component is positive.
SymEigen jacobi_eigen_sym(Matrix a, double tol = 1e-12, int max_sweeps = 100);

} // namespace coastcast
