#include "winshift/linalg.hpp"

#include <cmath>

#include "winshift/errors.hpp"

namespace winshift {

Matrix cholesky(const Matrix& a) {
  int n = a.rows();
  Matrix L(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    const double* lj = L.row(j);
    for (int k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw NumericalError("cholesky: matrix not positive definite at pivot " + std::to_string(j));
    }
    double root = std::sqrt(d);
    L(j, j) = root;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      const double* li = L.row(i);
      for (int k = 0; k < j; ++k) s -= li[k] * lj[k];
      L(i, j) = s / root;
    }
  }
  return L;
}

std::vector<double> chol_solve(const Matrix& L, const std::vector<double>& b) {
  int n = L.rows();
  std::vector<double> x(b);
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    const double* li = L.row(i);
    for (int k = 0; k < i; ++k) s -= li[k] * x[k];
    x[i] = s / li[i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= L(k, i) * x[k];
    x[i] = s / L(i, i);
  }
  return x;
}

std::vector<double> solve_lower_transpose(const Matrix& L, const std::vector<double>& z) {
  int n = L.rows();
  std::vector<double> x(z);
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int k = i + 1; k < n; ++k) s -= L(k, i) * x[k];
    x[i] = s / L(i, i);
  }
  return x;
}

}  // namespace winshift
