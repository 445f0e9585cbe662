#pragma once

// Queue-length weights and activation probabilities for the randomized schedule.
//
//   f(x) = log(1 + x) / g(x),   g(x) = log(e + log(1 + x))
//   W    = f(Q~),  Q~ = max{ f^-1( eps/(2N^2) * f(Qmax) ), Q }
//   p    = e^W / (1 + e^W)
//
// Natural logarithms throughout.

#include <cstdint>

namespace disquo {

enum class WeightMode { exact_qmax, estimated_qmax, local };

/// log_over_g is the production weight; plain_log (g == 1) exists for analytic checks.
enum class WeightShape { log_over_g, plain_log };

struct WeightParams {
  WeightMode mode = WeightMode::local;
  double epsilon = 0.05;
  WeightShape shape = WeightShape::log_over_g;
  int n_ports = 1;
};

double g_fn(double x, WeightShape shape = WeightShape::log_over_g);
double g_prime(double x, WeightShape shape = WeightShape::log_over_g);
double f_fn(double x, WeightShape shape = WeightShape::log_over_g);
double f_prime(double x, WeightShape shape = WeightShape::log_over_g);
/// Inverse of f on [0, inf); y must be >= 0.
double f_inverse(double y, WeightShape shape = WeightShape::log_over_g);

/// Floor factor eps / (2 N^2).
double qmax_floor_factor(const WeightParams& params);

/// Q~ for a queue of length q given (an estimate of) the maximum queue length.
double qtilde(double q, double qmax, const WeightParams& params);

/// W = f(Q~) in the qmax modes and f(q) in local mode. Throws DomainError for q < 0.
double weight(double q, double qmax, const WeightParams& params);

/// Activation probability and its complement, each computed directly so that the
/// complement stays representable when p is within rounding of 1.
struct Activation {
  double p;
  double p_bar;
};

Activation activation_probability(double w);

}  // namespace disquo
