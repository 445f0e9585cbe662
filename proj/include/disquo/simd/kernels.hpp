#pragma once

// Dense double-precision kernels used by the chain verifier and the metrics.
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant chosen at runtime. The scalar path is always available and is the
// oracle for the equivalence tests.

#include <cstddef>
#include <span>
#include <string_view>

namespace disquo::simd {

enum class Isa { scalar, avx2 };

/// Best ISA supported by the running CPU and compiled into this binary.
Isa detect_isa();

/// ISA currently used by the dispatching entry points below.
Isa active_isa();

/// Force a particular ISA (falls back to scalar if unsupported). Returns the ISA in effect.
Isa set_isa(Isa isa);

std::string_view isa_name(Isa isa);

struct KernelTable {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_squares)(const double*, std::size_t);
  double (*abs_diff_sum)(const double*, const double*, std::size_t);
  double (*max_abs_diff)(const double*, const double*, std::size_t);
  // y[k] += a * x[k]
  void (*axpy)(double, const double*, double*, std::size_t);
};

const KernelTable& scalar_kernels();
/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double sum_squares(std::span<const double> x);
double abs_diff_sum(std::span<const double> x, std::span<const double> y);
double max_abs_diff(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace disquo::simd
