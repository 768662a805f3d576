#pragma once

#include <cstddef>
#include <vector>

namespace winshift {

// Dense row-major matrix. Just enough surface for the samplers and the
// Mahalanobis computations; no expression templates, no views.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const { return a_.data() + static_cast<std::size_t>(i) * cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Throws NumericalError when the matrix is not positive definite.
Matrix cholesky(const Matrix& a);

// Solves A x = b given the Cholesky factor L of A.
std::vector<double> chol_solve(const Matrix& L, const std::vector<double>& b);

// Solves L^T x = z for upper-triangular back substitution.
std::vector<double> solve_lower_transpose(const Matrix& L, const std::vector<double>& z);

}  // namespace winshift
