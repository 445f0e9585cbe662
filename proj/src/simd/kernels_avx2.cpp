// Compiled with -mavx2 on x86-64 only; entered solely after a runtime CPU check.

#include "disquo/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace disquo::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
}

inline __m256d abs_pd(__m256d v) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, v);
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + k));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + k + 4));
  }
  for (; k + 4 <= n; k += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + k));
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; k < n; ++k) s += x[k];
  return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(_mm256_loadu_pd(x + k + 4), _mm256_loadu_pd(y + k + 4)));
  }
  for (; k + 4 <= n; k += 4)
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; k < n; ++k) s += x[k] * y[k];
  return s;
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

double abs_diff_sum_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    acc = _mm256_add_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k))));
  double s = hsum(acc);
  for (; k < n; ++k) s += std::abs(x[k] - y[k]);
  return s;
}

double max_abs_diff_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    acc = _mm256_max_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k))));
  double m = hmax(acc);
  for (; k < n; ++k) m = std::max(m, std::abs(x[k] - y[k]));
  return m;
}

// mul then add (no FMA contraction) so results match the scalar path bit for bit.
void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + k));
    _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_loadu_pd(y + k), prod));
  }
  for (; k < n; ++k) y[k] += a * x[k];
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{sum_avx2,          dot_avx2,          sum_squares_avx2,
                                 abs_diff_sum_avx2, max_abs_diff_avx2, axpy_avx2};
  return &table;
}

}  // namespace disquo::simd

#else

namespace disquo::simd {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace disquo::simd

#endif
