#include "disquo/weight.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "disquo/common.hpp"

namespace disquo {

double g_fn(double x, WeightShape shape) {
  if (shape == WeightShape::plain_log) return 1.0;
  return std::log(std::numbers::e + std::log1p(x));
}

double g_prime(double x, WeightShape shape) {
  if (shape == WeightShape::plain_log) return 0.0;
  return 1.0 / ((std::numbers::e + std::log1p(x)) * (1.0 + x));
}

double f_fn(double x, WeightShape shape) { return std::log1p(x) / g_fn(x, shape); }

double f_prime(double x, WeightShape shape) {
  const double g = g_fn(x, shape);
  return 1.0 / ((1.0 + x) * g) - std::log1p(x) * g_prime(x, shape) / (g * g);
}

double f_inverse(double y, WeightShape shape) {
  if (y < 0.0) throw DomainError("f_inverse: negative argument");
  if (shape == WeightShape::plain_log) return std::expm1(y);
  // Substitute t = log(1 + x): f = t / log(e + t), increasing in t.
  auto h = [](double t) { return t / std::log(std::numbers::e + t); };
  double lo = 0.0, hi = std::max(1.0, y);
  while (h(hi) < y) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < y ? lo : hi) = mid;
  }
  return std::expm1(0.5 * (lo + hi));
}

double qmax_floor_factor(const WeightParams& params) {
  const double n = params.n_ports;
  return params.epsilon / (2.0 * n * n);
}

double qtilde(double q, double qmax, const WeightParams& params) {
  if (q < 0.0) throw DomainError("qtilde: negative queue length");
  if (params.mode == WeightMode::local) return q;
  const double floor_q = f_inverse(qmax_floor_factor(params) * f_fn(std::max(qmax, 0.0), params.shape),
                                   params.shape);
  return std::max(floor_q, q);
}

double weight(double q, double qmax, const WeightParams& params) {
  if (q < 0.0) throw DomainError("weight: negative queue length");
  const double fq = f_fn(q, params.shape);
  if (params.mode == WeightMode::local) return fq;
  // f is increasing, so f(max{f^-1(c f(qmax)), q}) = max{c f(qmax), f(q)}.
  return std::max(qmax_floor_factor(params) * f_fn(std::max(qmax, 0.0), params.shape), fq);
}

Activation activation_probability(double w) {
  if (w < 0.0) throw DomainError("activation_probability: negative weight");
  return {1.0 / (1.0 + std::exp(-w)), 1.0 / (1.0 + std::exp(w))};
}

}  // namespace disquo
