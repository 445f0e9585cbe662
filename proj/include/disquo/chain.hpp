#pragma once

// Exact analysis of the schedule chain on small switches. The chain lives on the
// partial matchings of the N x N bipartite graph; with fixed weights W each slot
// draws a uniform permutation H and every pair (i, H(i)) is re-decided:
//   in X                      -> stays with probability p(W_ij), else leaves
//   free row and free column  -> joins with probability p(W_ij)
//   otherwise                 -> unchanged
// with p(w) = e^w / (1 + e^w). The stationary law is pi(X) ~ exp(sum_{X} W).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "disquo/common.hpp"
#include "disquo/rng.hpp"
#include "disquo/weight.hpp"

namespace disquo::chain {

using TransitionMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Distribution = std::vector<double>;

/// Matching as input -> output, -1 for an unmatched input.
using Matching = std::vector<Port>;

constexpr int kMaxExactPorts = 5;

/// All partial matchings of the N x N bipartite graph, ordered by size and then
/// lexicographically by (input, output) cell list. Throws CapacityError for N > 5.
std::vector<Matching> enumerate_matchings(int n_ports);

class StateSpace {
 public:
  explicit StateSpace(int n_ports);

  int n_ports() const { return n_; }
  std::size_t size() const { return states_.size(); }
  const Matching& state(std::size_t k) const { return states_[k]; }
  const std::vector<Matching>& states() const { return states_; }
  std::size_t index_of(const Matching& m) const;
  std::vector<Cell> cells(std::size_t k) const;
  /// Sum of W over the cells of state k.
  double weight_of(std::size_t k, const Grid<double>& w) const;

 private:
  int n_;
  std::vector<Matching> states_;
  std::vector<std::int32_t> lookup_;  // base-(N+1) code -> index
};

/// Stable logistic pair for any real w.
Activation logistic(double w);

TransitionMatrix transition_matrix(const Grid<double>& weights, const StateSpace& space);
TransitionMatrix transition_matrix(const Grid<double>& weights);

/// Strong connectivity of the digraph of positive entries.
bool strongly_connected(const TransitionMatrix& p);

/// Solves pi P = pi, sum pi = 1. Throws DomainError if P is reducible.
Distribution stationary_distribution(const TransitionMatrix& p);

/// pi(X) = exp(sign * sum_{(i,j) in X} W_ij) / Z. The sign exists for mutation testing.
Distribution product_form(const Grid<double>& weights, const StateSpace& space, double sign = 1.0);
Distribution product_form(const Grid<double>& weights);

/// log Z for the product form.
double log_partition(const Grid<double>& weights, const StateSpace& space);

double detailed_balance_residual(const TransitionMatrix& p, std::span<const double> pi);

/// ||pi P - pi||_inf
double stationarity_residual(const TransitionMatrix& p, std::span<const double> pi);

/// mu P
Distribution propagate(std::span<const double> mu, const TransitionMatrix& p);

double tv_distance(std::span<const double> mu, std::span<const double> nu);
/// ||nu/mu - 1||_{2,mu}; +infinity when nu has mass where mu has none.
double chi2_distance(std::span<const double> nu, std::span<const double> mu);
/// (sum mu_i nu_i^2)^(1/2)
double weighted_norm(std::span<const double> nu, std::span<const double> mu);

/// sup over nu with E_mu[nu] = 0 of ||A nu||_{2,mu} / ||nu||_{2,mu}, taken as the
/// largest singular value of D^(1/2) A D^(-1/2) on the complement of sqrt(mu).
double matrix_norm(const TransitionMatrix& a, std::span<const double> mu);

/// Largest |eigenvalue| after removing the Perron eigenvalue 1. Throws DomainError
/// when it equals 1 (periodic or reducible chain).
double spectral_gap_emax(const TransitionMatrix& p);
double mixing_time(const TransitionMatrix& p);
/// ceil((log(1/pi_min)/2 + log(1/delta)) / log(1/e_max)); 1 when e_max is 0.
std::int64_t mixing_slots(double e_max, double pi_min, double delta);
std::int64_t mixing_slots(const TransitionMatrix& p, std::span<const double> pi, double delta);

constexpr std::size_t kMaxConductanceStates = 16;

/// min over A with pi(A) <= 1/2 of F(A)/pi(A), F(A) = sum_{x in A, y not in A} pi(x) P(x,y).
/// Exact subset enumeration; throws CapacityError above kMaxConductanceStates states.
double conductance(const TransitionMatrix& p, std::span<const double> pi);

struct ConductanceEstimate {
  double upper = 0.0;  // min over the sampled subsets; >= the true value
  double lower = 0.0;  // 2 min_x pi(x) min_{P(x,y) > 0, x != y} P(x,y)
  std::int64_t subsets = 0;
};

/// For state spaces too large to enumerate: random subsets plus all singletons and
/// their complements.
ConductanceEstimate conductance_sampled(const TransitionMatrix& p, std::span<const double> pi,
                                        std::int64_t samples, std::uint64_t seed);

/// 2^(6 n) exp(4 n w_max), +infinity on overflow.
double mugd_mixing_bound(int n_vertices, double w_max);

/// E_mu[T] + H(mu), natural-log entropy.
double free_energy(std::span<const double> mu, std::span<const double> t);
/// exp(T)/Z
Distribution free_energy_maximizer(std::span<const double> t);

struct LowWeightMass {
  double mass = 0.0;   // pi-mass of {X : W(X) <= (1 - eps) W*}
  std::optional<double> bound;  // log|states| / (eps W*); empty when W* = 0
  double w_star = 0.0;
};

LowWeightMass low_weight_mass(const Grid<double>& weights, double epsilon, const StateSpace& space);

/// sum_ij f'(qt_now_ij) + f'(qt_next_ij)
double alpha_n(const Grid<double>& qtilde_now, const Grid<double>& qtilde_next,
               WeightShape shape = WeightShape::log_over_g);
/// sum_ij 2 / (1 + min qtilde), the ceiling alpha_n always sits under.
double alpha_n_ceiling(const Grid<double>& qtilde_now, const Grid<double>& qtilde_next);

/// The abstract chain with no buffers or queues, advanced one slot at a time.
class MugdSampler {
 public:
  MugdSampler(const Grid<double>& weights, std::uint64_t seed);
  void step(Matching& x);

 private:
  int n_;
  std::vector<Activation> act_;
  CounterStream rng_;
  std::vector<Port> perm_;
  std::vector<std::uint8_t> col_busy_;
};

/// Empirical state frequencies after `burn_in` slots, over `slots` further slots,
/// starting from the empty matching.
Distribution simulate_mugd(const Grid<double>& weights, const StateSpace& space, std::int64_t slots,
                           std::uint64_t seed, std::int64_t burn_in = 0);

}  // namespace disquo::chain
