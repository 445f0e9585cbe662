#include <doctest.h>

#include <cmath>
#include <vector>

#include "disquo/rng.hpp"
#include "disquo/simd/kernels.hpp"

using namespace disquo;

namespace {

std::vector<double> random_vec(std::size_t n, CounterStream& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * uniform01(rng) - 1.0;
  return v;
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  const auto& k = simd::scalar_kernels();
  const std::vector<double> x{1.0, -2.0, 3.0, 0.5};
  const std::vector<double> y{0.0, 1.0, -1.0, 2.0};
  CHECK(k.sum(x.data(), x.size()) == doctest::Approx(2.5));
  CHECK(k.dot(x.data(), y.data(), x.size()) == doctest::Approx(-2.0 - 3.0 + 1.0));
  CHECK(k.sum_squares(x.data(), x.size()) == doctest::Approx(1 + 4 + 9 + 0.25));
  CHECK(k.abs_diff_sum(x.data(), y.data(), x.size()) == doctest::Approx(1 + 3 + 4 + 1.5));
  CHECK(k.max_abs_diff(x.data(), y.data(), x.size()) == 4.0);
  std::vector<double> z = y;
  k.axpy(2.0, x.data(), z.data(), z.size());
  CHECK(z == std::vector<double>{2.0, -3.0, 5.0, 3.0});
  CHECK(k.sum(nullptr, 0) == 0.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const simd::KernelTable* avx = simd::avx2_kernels();
  if (!avx) {
    MESSAGE("AVX2 not available on this machine; equivalence skipped");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  CounterStream rng(99);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto x = random_vec(n, rng), y = random_vec(n, rng);
    const double tol = 1e-13 * static_cast<double>(n + 1);
    CHECK(std::abs(avx->sum(x.data(), n) - ref.sum(x.data(), n)) <= tol);
    CHECK(std::abs(avx->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= tol);
    CHECK(std::abs(avx->sum_squares(x.data(), n) - ref.sum_squares(x.data(), n)) <= tol);
    CHECK(std::abs(avx->abs_diff_sum(x.data(), y.data(), n) - ref.abs_diff_sum(x.data(), y.data(), n)) <= tol);
    CHECK(avx->max_abs_diff(x.data(), y.data(), n) == ref.max_abs_diff(x.data(), y.data(), n));
    auto a = y, b = y;
    avx->axpy(0.37, x.data(), a.data(), n);
    ref.axpy(0.37, x.data(), b.data(), n);
    CHECK(a == b);
  }
}

TEST_CASE("dispatch can be forced to scalar and back") {
  const simd::Isa best = simd::detect_isa();
  CHECK(simd::set_isa(simd::Isa::scalar) == simd::Isa::scalar);
  const std::vector<double> v{3.0, 4.0};
  CHECK(simd::sum_squares(v) == 25.0);
  CHECK(simd::set_isa(best) == best);
  CHECK(simd::sum_squares(v) == 25.0);
  CHECK(!simd::isa_name(best).empty());
}
