#pragma once

// Admissible arrival-rate matrices and arrival sampling (Bernoulli and bursty).

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "disquo/common.hpp"
#include "disquo/rng.hpp"
#include "disquo/switch_core.hpp"

namespace disquo::traffic {

enum class Pattern { uniform, lin_diagonal, hot_spot };

std::string_view pattern_name(Pattern p);
std::optional<Pattern> parse_pattern(std::string_view name);

struct RateMatrix {
  Grid<double> sigma;
  double load = 0.0;
  Pattern pattern = Pattern::uniform;
  double omega = 0.0;
};

/// uniform:      sigma_ij = load / N
/// lin-diagonal: sigma_{i,(i+k) mod N} = 2 load (N - k) / (N (N + 1))
/// hot-spot:     sigma_ii = omega load, sigma_ij = (1 - omega) load / (N - 1)
/// Throws ConfigError unless 0 <= load < 1 and omega in [0, 1].
RateMatrix build_rate_matrix(Pattern pattern, int n_ports, double load, double omega = 0.5);

struct Admissibility {
  bool admissible = false;
  double slack = 0.0;  // 1 - max(row and column sums); 0 when not admissible
};

Admissibility check_admissible(const Grid<double>& rates);

/// Truncated discrete Pareto burst-length law P(l) = c / l^alpha, l = 1..l_max.
class ParetoBurst {
 public:
  ParetoBurst(double alpha, int l_max);

  double alpha() const { return alpha_; }
  int l_max() const { return l_max_; }
  double normalization() const { return c_; }
  double mean() const { return mean_; }
  double probability(int l) const;

  /// Exact inverse-CDF sample.
  template <typename Urbg>
  int sample(Urbg& rng) const {
    return sample_from_unit(to_unit(rng()));
  }
  int sample_from_unit(double u) const;

 private:
  double alpha_;
  int l_max_;
  double c_;
  double mean_;
  std::vector<double> cdf_;
};

/// Free-function form; caches the table for the last (alpha, l_max) seen on this thread.
int pareto_burst_length(std::mt19937_64& rng, double alpha, int l_max);

struct BurstModel {
  double alpha = 1.7;
  int l_max = 1000;
};

/// Per-run arrival source. Bernoulli: input i emits one cell with probability
/// sum_j sigma_ij, addressed to j with probability sigma_ij / sum_j sigma_ij.
/// Bursty: on/off per input; each burst draws a destination from the same
/// conditional law and a Pareto length, emits one cell per slot, then idles for a
/// geometric gap sized so the long-run rate of every VOQ is sigma_ij.
class ArrivalSource {
 public:
  ArrivalSource(RateMatrix rates, std::optional<BurstModel> burst, std::uint64_t seed);

  /// At most one packet per input, stamped with `slot`.
  void sample_arrivals(Slot slot, std::vector<Packet>& out);
  std::vector<Packet> sample_arrivals(Slot slot);

  const RateMatrix& rates() const { return rates_; }
  std::uint64_t bursts_started() const { return bursts_; }

 private:
  struct InputState {
    int remaining = 0;  // cells left in the current burst
    Port destination = 0;
    std::int64_t idle = 0;  // idle slots before the next burst
  };

  Port draw_destination(Port input);
  std::int64_t draw_gap(Port input);

  RateMatrix rates_;
  std::optional<ParetoBurst> burst_;
  std::mt19937_64 rng_;
  std::vector<std::vector<double>> cumulative_;  // per-input cumulative row rates
  std::vector<double> row_rate_;
  std::vector<InputState> state_;
  std::uint64_t bursts_ = 0;
};

}  // namespace disquo::traffic
