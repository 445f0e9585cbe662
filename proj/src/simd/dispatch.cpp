#include <atomic>
#include <cstdlib>
#include <string>

#include "disquo/simd/kernels.hpp"

namespace disquo::simd {

const KernelTable* avx2_table();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* table_for(Isa isa) {
  if (isa == Isa::avx2 && cpu_has_avx2() && avx2_table() != nullptr) return avx2_table();
  return &scalar_kernels();
}

Isa initial_isa() {
  // DISQUO_SIMD=scalar pins the reference path (useful when bisecting numeric drift).
  if (const char* env = std::getenv("DISQUO_SIMD"); env != nullptr && std::string(env) == "scalar")
    return Isa::scalar;
  return detect_isa();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{table_for(initial_isa())};
  return table;
}

}  // namespace

Isa detect_isa() {
  return (cpu_has_avx2() && avx2_table() != nullptr) ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() { return current().load() == &scalar_kernels() ? Isa::scalar : Isa::avx2; }

Isa set_isa(Isa isa) {
  current().store(table_for(isa));
  return active_isa();
}

const KernelTable* avx2_kernels() { return cpu_has_avx2() ? avx2_table() : nullptr; }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double sum(std::span<const double> x) { return current().load()->sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  return current().load()->dot(x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x) {
  return current().load()->sum_squares(x.data(), x.size());
}

double abs_diff_sum(std::span<const double> x, std::span<const double> y) {
  return current().load()->abs_diff_sum(x.data(), y.data(), x.size());
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  return current().load()->max_abs_diff(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  current().load()->axpy(a, x.data(), y.data(), x.size());
}

}  // namespace disquo::simd
