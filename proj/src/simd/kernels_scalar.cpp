#include <algorithm>
#include <cmath>

#include "disquo/simd/kernels.hpp"

namespace disquo::simd {
namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += x[k];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += x[k] * y[k];
  return s;
}

double sum_squares_scalar(const double* x, std::size_t n) { return dot_scalar(x, x, n); }

double abs_diff_sum_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::abs(x[k] - y[k]);
  return s;
}

double max_abs_diff_scalar(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::abs(x[k] - y[k]));
  return m;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += a * x[k];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{sum_scalar,          dot_scalar,          sum_squares_scalar,
                                 abs_diff_sum_scalar, max_abs_diff_scalar, axpy_scalar};
  return table;
}

}  // namespace disquo::simd
