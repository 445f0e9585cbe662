#include "disquo/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "disquo/simd/kernels.hpp"

namespace disquo::chain {
namespace {

std::size_t code_of(const Matching& m, int n) {
  std::size_t code = 0;
  for (int i = n - 1; i >= 0; --i) code = code * static_cast<std::size_t>(n + 1) + static_cast<std::size_t>(m[i] + 1);
  return code;
}

std::vector<Cell> cells_of(const Matching& m) {
  std::vector<Cell> c;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] >= 0) c.push_back({static_cast<Port>(i), m[i]});
  return c;
}

void check_distribution_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("distributions over different state counts");
}

}  // namespace

std::vector<Matching> enumerate_matchings(int n) {
  if (n < 1) throw ConfigError("need at least one port");
  if (n > kMaxExactPorts) throw CapacityError("exact state enumeration is limited to N <= 5");
  std::vector<Matching> out;
  Matching cur(n, -1);
  std::vector<std::uint8_t> used(n, 0);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    cur[i] = -1;
    self(self, i + 1);
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      cur[i] = j;
      self(self, i + 1);
      used[j] = 0;
    }
    cur[i] = -1;
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), [](const Matching& a, const Matching& b) {
    const auto ca = cells_of(a), cb = cells_of(b);
    if (ca.size() != cb.size()) return ca.size() < cb.size();
    return ca < cb;
  });
  return out;
}

StateSpace::StateSpace(int n) : n_(n), states_(enumerate_matchings(n)) {
  std::size_t codes = 1;
  for (int i = 0; i < n; ++i) codes *= static_cast<std::size_t>(n + 1);
  lookup_.assign(codes, -1);
  for (std::size_t k = 0; k < states_.size(); ++k) lookup_[code_of(states_[k], n)] = static_cast<std::int32_t>(k);
}

std::size_t StateSpace::index_of(const Matching& m) const {
  if (static_cast<int>(m.size()) != n_) throw DomainError("matching has the wrong port count");
  const auto k = lookup_.at(code_of(m, n_));
  if (k < 0) throw DomainError("not a matching");
  return static_cast<std::size_t>(k);
}

std::vector<Cell> StateSpace::cells(std::size_t k) const { return cells_of(states_[k]); }

double StateSpace::weight_of(std::size_t k, const Grid<double>& w) const {
  double s = 0.0;
  const Matching& m = states_[k];
  for (int i = 0; i < n_; ++i)
    if (m[i] >= 0) s += w(i, m[i]);
  return s;
}

Activation logistic(double w) {
  return {1.0 / (1.0 + std::exp(-w)), 1.0 / (1.0 + std::exp(w))};
}

TransitionMatrix transition_matrix(const Grid<double>& weights, const StateSpace& space) {
  const int n = space.n_ports();
  if (weights.size() != n) throw DomainError("weight grid does not match the state space");
  const auto size = static_cast<Eigen::Index>(space.size());
  TransitionMatrix p = TransitionMatrix::Zero(size, size);

  Grid<Activation> act(n, Activation{0.5, 0.5});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) act(i, j) = logistic(weights(i, j));

  std::vector<Port> h(n);
  double n_fact = 1.0;
  for (int k = 2; k <= n; ++k) n_fact *= k;
  const double per_perm = 1.0 / n_fact;

  std::vector<int> decide;  // inputs whose H pair is re-decided
  std::vector<std::uint8_t> col_busy(n);
  Matching next(n);
  for (std::size_t s = 0; s < space.size(); ++s) {
    const Matching& x = space.state(s);
    std::fill(col_busy.begin(), col_busy.end(), 0);
    for (int i = 0; i < n; ++i)
      if (x[i] >= 0) col_busy[x[i]] = 1;
    std::iota(h.begin(), h.end(), 0);
    do {
      decide.clear();
      for (int i = 0; i < n; ++i)
        if (x[i] == h[i] || (x[i] < 0 && !col_busy[h[i]])) decide.push_back(i);
      const auto m = decide.size();
      for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        next = x;
        double prob = per_perm;
        for (std::size_t b = 0; b < m; ++b) {
          const int i = decide[b];
          const Activation& a = act(i, h[i]);
          if (mask >> b & 1u) {
            next[i] = h[i];
            prob *= a.p;
          } else {
            next[i] = -1;
            prob *= a.p_bar;
          }
        }
        p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(space.index_of(next))) += prob;
      }
    } while (std::next_permutation(h.begin(), h.end()));
  }
  return p;
}

TransitionMatrix transition_matrix(const Grid<double>& weights) {
  return transition_matrix(weights, StateSpace(weights.size()));
}

bool strongly_connected(const TransitionMatrix& p) {
  const auto n = p.rows();
  if (n == 0) return true;
  auto reach_all = [&](bool forward) {
    std::vector<std::uint8_t> seen(n, 0);
    std::queue<Eigen::Index> q;
    q.push(0);
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (Eigen::Index v = 0; v < n; ++v) {
        const double e = forward ? p(u, v) : p(v, u);
        if (e > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++count;
          q.push(v);
        }
      }
    }
    return count == n;
  };
  return reach_all(true) && reach_all(false);
}

Distribution propagate(std::span<const double> mu, const TransitionMatrix& p) {
  const auto n = static_cast<std::size_t>(p.cols());
  if (mu.size() != static_cast<std::size_t>(p.rows())) throw DomainError("distribution size mismatch");
  Distribution out(n, 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) continue;
    simd::axpy(mu[i], std::span<const double>(p.row(static_cast<Eigen::Index>(i)).data(), n), out);
  }
  return out;
}

double stationarity_residual(const TransitionMatrix& p, std::span<const double> pi) {
  const Distribution next = propagate(pi, p);
  return simd::max_abs_diff(next, pi);
}

Distribution stationary_distribution(const TransitionMatrix& p) {
  const auto n = p.rows();
  if (n != p.cols()) throw DomainError("transition matrix must be square");
  if (!strongly_connected(p)) throw DomainError("transition matrix is reducible");
  Eigen::MatrixXd a = p.transpose();
  a -= Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd x = lu.solve(rhs);
  // One refinement step.
  x += lu.solve(rhs - a * x);
  Distribution pi(x.data(), x.data() + n);
  for (double& v : pi) v = std::max(v, 0.0);
  const double total = simd::sum(pi);
  for (double& v : pi) v /= total;
  return pi;
}

double log_partition(const Grid<double>& weights, const StateSpace& space) {
  std::vector<double> e(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) e[k] = space.weight_of(k, weights);
  const double m = *std::max_element(e.begin(), e.end());
  double s = 0.0;
  for (double v : e) s += std::exp(v - m);
  return m + std::log(s);
}

Distribution product_form(const Grid<double>& weights, const StateSpace& space, double sign) {
  std::vector<double> e(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) e[k] = sign * space.weight_of(k, weights);
  return free_energy_maximizer(e);
}

Distribution product_form(const Grid<double>& weights) {
  return product_form(weights, StateSpace(weights.size()));
}

double detailed_balance_residual(const TransitionMatrix& p, std::span<const double> pi) {
  const auto n = p.rows();
  double worst = 0.0;
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = x + 1; y < n; ++y)
      worst = std::max(worst, std::abs(pi[x] * p(x, y) - pi[y] * p(y, x)));
  return worst;
}

double tv_distance(std::span<const double> mu, std::span<const double> nu) {
  check_distribution_pair(mu, nu);
  return 0.5 * simd::abs_diff_sum(mu, nu);
}

double chi2_distance(std::span<const double> nu, std::span<const double> mu) {
  check_distribution_pair(nu, mu);
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double d = nu[i] - mu[i];
    if (mu[i] <= 0.0) {
      if (nu[i] != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    s += d * d / mu[i];
  }
  return std::sqrt(s);
}

double weighted_norm(std::span<const double> nu, std::span<const double> mu) {
  check_distribution_pair(nu, mu);
  std::vector<double> sq(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) sq[i] = nu[i] * nu[i];
  return std::sqrt(simd::dot(mu, sq));
}

double matrix_norm(const TransitionMatrix& a, std::span<const double> mu) {
  const auto n = a.rows();
  if (n != a.cols() || static_cast<std::size_t>(n) != mu.size()) throw DomainError("matrix_norm: size mismatch");
  Eigen::VectorXd root(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(mu[i] > 0.0)) throw DomainError("matrix_norm: mu must be strictly positive");
    root(i) = std::sqrt(mu[i]);
  }
  Eigen::MatrixXd m = root.asDiagonal() * Eigen::MatrixXd(a) * root.cwiseInverse().asDiagonal();
  const Eigen::VectorXd s = root.normalized();
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - s * s.transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m * proj);
  return svd.singularValues()(0);
}

double spectral_gap_emax(const TransitionMatrix& p) {
  const auto n = p.rows();
  if (n < 2) throw DomainError("spectral gap needs at least two states");
  const Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(p), false);
  const Eigen::VectorXcd ev = es.eigenvalues();
  Eigen::Index perron = 0;
  for (Eigen::Index k = 1; k < n; ++k)
    if (std::abs(ev(k) - 1.0) < std::abs(ev(perron) - 1.0)) perron = k;
  double e_max = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    if (k != perron) e_max = std::max(e_max, std::abs(ev(k)));
  if (e_max >= 1.0 - 1e-12) throw DomainError("second eigenvalue has modulus 1: chain is periodic or reducible");
  return e_max;
}

double mixing_time(const TransitionMatrix& p) { return 1.0 / (1.0 - spectral_gap_emax(p)); }

std::int64_t mixing_slots(double e_max, double pi_min, double delta) {
  if (!(e_max >= 0.0 && e_max < 1.0)) throw DomainError("mixing_slots: e_max must lie in [0, 1)");
  if (!(pi_min > 0.0 && pi_min <= 1.0)) throw DomainError("mixing_slots: pi_min must lie in (0, 1]");
  if (!(delta > 0.0)) throw DomainError("mixing_slots: delta must be positive");
  if (e_max == 0.0) return 1;
  const double t = (0.5 * std::log(1.0 / pi_min) + std::log(1.0 / delta)) / std::log(1.0 / e_max);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t)));
}

std::int64_t mixing_slots(const TransitionMatrix& p, std::span<const double> pi, double delta) {
  return mixing_slots(spectral_gap_emax(p), *std::min_element(pi.begin(), pi.end()), delta);
}

namespace {

// F(A)/pi(A) for a membership mask; negative when pi(A) > 1/2 or A is empty.
double flow_ratio(const TransitionMatrix& p, std::span<const double> pi, const std::vector<std::uint8_t>& in) {
  const auto n = p.rows();
  double mass = 0.0, flow = 0.0;
  for (Eigen::Index x = 0; x < n; ++x) {
    if (!in[x]) continue;
    mass += pi[x];
    for (Eigen::Index y = 0; y < n; ++y)
      if (!in[y]) flow += pi[x] * p(x, y);
  }
  if (mass <= 0.0 || mass > 0.5) return -1.0;
  return flow / mass;
}

}  // namespace

double conductance(const TransitionMatrix& p, std::span<const double> pi) {
  const auto n = static_cast<std::size_t>(p.rows());
  if (n > kMaxConductanceStates) throw CapacityError("exact conductance is limited to 16 states");
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> in(n);
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    for (std::size_t k = 0; k < n; ++k) in[k] = mask >> k & 1u;
    const double r = flow_ratio(p, pi, in);
    if (r >= 0.0) best = std::min(best, r);
  }
  return best;
}

ConductanceEstimate conductance_sampled(const TransitionMatrix& p, std::span<const double> pi,
                                        std::int64_t samples, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(p.rows());
  ConductanceEstimate est;
  est.upper = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> in(n);
  auto consider = [&] {
    ++est.subsets;
    const double r = flow_ratio(p, pi, in);
    if (r >= 0.0) est.upper = std::min(est.upper, r);
  };
  for (std::size_t k = 0; k < n; ++k) {
    std::fill(in.begin(), in.end(), 0);
    in[k] = 1;
    consider();
    std::fill(in.begin(), in.end(), 1);
    in[k] = 0;
    consider();
  }
  CounterStream rng(hash_key(seed, Stream::mugd, 0xC0));
  for (std::int64_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < n; ++k) in[k] = rng() >> 63;
    consider();
  }
  double min_pi = *std::min_element(pi.begin(), pi.end());
  double min_step = std::numeric_limits<double>::infinity();
  for (Eigen::Index x = 0; x < p.rows(); ++x)
    for (Eigen::Index y = 0; y < p.cols(); ++y)
      if (x != y && p(x, y) > 0.0) min_step = std::min(min_step, p(x, y));
  est.lower = 2.0 * min_pi * min_step;
  return est;
}

double mugd_mixing_bound(int n_vertices, double w_max) {
  const double log_bound = 6.0 * n_vertices * std::log(2.0) + 4.0 * n_vertices * w_max;
  if (log_bound >= std::log(std::numeric_limits<double>::max())) return std::numeric_limits<double>::infinity();
  // Power of two applied exactly; only the exponential factor rounds.
  return std::ldexp(std::exp(4.0 * n_vertices * w_max), 6 * n_vertices);
}

double free_energy(std::span<const double> mu, std::span<const double> t) {
  check_distribution_pair(mu, t);
  double entropy = 0.0;
  for (double m : mu)
    if (m > 0.0) entropy -= m * std::log(m);
  return simd::dot(mu, t) + entropy;
}

Distribution free_energy_maximizer(std::span<const double> t) {
  const double m = *std::max_element(t.begin(), t.end());
  Distribution out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) out[k] = std::exp(t[k] - m);
  const double z = simd::sum(out);
  for (double& v : out) v /= z;
  return out;
}

LowWeightMass low_weight_mass(const Grid<double>& weights, double epsilon, const StateSpace& space) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("low_weight_mass: epsilon must lie in (0, 1]");
  const Distribution pi = product_form(weights, space);
  LowWeightMass r;
  std::vector<double> w(space.size());
  for (std::size_t k = 0; k < space.size(); ++k) w[k] = space.weight_of(k, weights);
  r.w_star = *std::max_element(w.begin(), w.end());
  const double cut = (1.0 - epsilon) * r.w_star;
  const double slack = 1e-12 * std::max(1.0, std::abs(r.w_star));
  for (std::size_t k = 0; k < space.size(); ++k)
    if (w[k] <= cut + slack) r.mass += pi[k];
  if (r.w_star > 0.0) r.bound = std::log(static_cast<double>(space.size())) / (epsilon * r.w_star);
  return r;
}

double alpha_n(const Grid<double>& now, const Grid<double>& next, WeightShape shape) {
  if (now.size() != next.size()) throw DomainError("alpha_n: grid size mismatch");
  double a = 0.0;
  for (std::size_t k = 0; k < now.raw().size(); ++k) {
    if (now.raw()[k] < 0.0 || next.raw()[k] < 0.0) throw DomainError("alpha_n: queue figures must be >= 0");
    a += f_prime(now.raw()[k], shape) + f_prime(next.raw()[k], shape);
  }
  return a;
}

double alpha_n_ceiling(const Grid<double>& now, const Grid<double>& next) {
  double lo = std::numeric_limits<double>::infinity();
  for (double v : now.raw()) lo = std::min(lo, v);
  for (double v : next.raw()) lo = std::min(lo, v);
  const auto cells = static_cast<double>(now.raw().size());
  return cells * 2.0 / (1.0 + lo);
}

MugdSampler::MugdSampler(const Grid<double>& weights, std::uint64_t seed)
    : n_(weights.size()), rng_(hash_key(seed, Stream::mugd)), perm_(n_), col_busy_(n_) {
  act_.reserve(weights.raw().size());
  for (double w : weights.raw()) act_.push_back(logistic(w));
}

void MugdSampler::step(Matching& x) {
  std::iota(perm_.begin(), perm_.end(), 0);
  for (int k = n_ - 1; k > 0; --k)
    std::swap(perm_[k], perm_[bounded(rng_, static_cast<std::uint64_t>(k) + 1)]);
  std::fill(col_busy_.begin(), col_busy_.end(), 0);
  for (int i = 0; i < n_; ++i)
    if (x[i] >= 0) col_busy_[x[i]] = 1;
  for (int i = 0; i < n_; ++i) {
    const Port h = perm_[i];
    const bool in_x = x[i] == h;
    if (!in_x && (x[i] >= 0 || col_busy_[h])) continue;
    const double u = uniform01(rng_);
    x[i] = u >= act_[static_cast<std::size_t>(i) * n_ + h].p_bar ? h : -1;
  }
}

Distribution simulate_mugd(const Grid<double>& weights, const StateSpace& space, std::int64_t slots,
                           std::uint64_t seed, std::int64_t burn_in) {
  if (weights.size() != space.n_ports()) throw DomainError("weight grid does not match the state space");
  if (slots < 1) throw DomainError("simulate_mugd needs at least one slot");
  MugdSampler sampler(weights, seed);
  Matching x(space.n_ports(), -1);
  for (std::int64_t t = 0; t < burn_in; ++t) sampler.step(x);
  std::vector<std::int64_t> counts(space.size(), 0);
  for (std::int64_t t = 0; t < slots; ++t) {
    sampler.step(x);
    ++counts[space.index_of(x)];
  }
  Distribution freq(space.size());
  for (std::size_t k = 0; k < counts.size(); ++k) freq[k] = static_cast<double>(counts[k]) / static_cast<double>(slots);
  return freq;
}

}  // namespace disquo::chain
