#include "disquo/traffic.hpp"

#include <algorithm>
#include <cmath>

#include "disquo/rng.hpp"

namespace disquo::traffic {

std::string_view pattern_name(Pattern p) {
  switch (p) {
    case Pattern::uniform: return "uniform";
    case Pattern::lin_diagonal: return "lin_diagonal";
    case Pattern::hot_spot: return "hot_spot";
  }
  return "?";
}

std::optional<Pattern> parse_pattern(std::string_view name) {
  if (name == "uniform") return Pattern::uniform;
  if (name == "lin_diagonal" || name == "lin-diagonal") return Pattern::lin_diagonal;
  if (name == "hot_spot" || name == "hot-spot") return Pattern::hot_spot;
  return std::nullopt;
}

RateMatrix build_rate_matrix(Pattern pattern, int n, double load, double omega) {
  if (n < 1) throw ConfigError("rate matrix needs at least one port");
  if (!(load >= 0.0 && load < 1.0)) throw ConfigError("inadmissible load: must lie in [0, 1)");
  if (pattern == Pattern::hot_spot && !(omega >= 0.0 && omega <= 1.0))
    throw ConfigError("hot-spot omega must lie in [0, 1]");

  RateMatrix r;
  r.sigma = Grid<double>(n, 0.0);
  r.load = load;
  r.pattern = pattern;
  r.omega = omega;
  const double nn = n;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const int j = (i + k) % n;
      switch (pattern) {
        case Pattern::uniform: r.sigma(i, j) = load / nn; break;
        case Pattern::lin_diagonal: r.sigma(i, j) = 2.0 * load * (nn - k) / (nn * (nn + 1.0)); break;
        case Pattern::hot_spot:
          if (n == 1) r.sigma(i, j) = load;
          else r.sigma(i, j) = (k == 0) ? omega * load : (1.0 - omega) * load / (nn - 1.0);
          break;
      }
    }
  }
  return r;
}

Admissibility check_admissible(const Grid<double>& rates) {
  const int n = rates.size();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < n; ++j) {
      row += rates(i, j);
      col += rates(j, i);
    }
    worst = std::max({worst, row, col});
  }
  if (worst < 1.0) return {true, 1.0 - worst};
  return {false, 0.0};
}

ParetoBurst::ParetoBurst(double alpha, int l_max) : alpha_(alpha), l_max_(l_max) {
  if (!(alpha > 1.0)) throw ConfigError("Pareto alpha must exceed 1");
  if (l_max < 1) throw ConfigError("Pareto l_max must be >= 1");
  double z = 0.0;
  // Sum smallest terms first.
  for (int l = l_max; l >= 1; --l) z += std::pow(static_cast<double>(l), -alpha);
  c_ = 1.0 / z;
  cdf_.resize(l_max);
  double acc = 0.0, m = 0.0;
  for (int l = 1; l <= l_max; ++l) {
    const double pl = probability(l);
    acc += pl;
    m += l * pl;
    cdf_[l - 1] = acc;
  }
  cdf_.back() = 1.0;
  mean_ = m;
}

double ParetoBurst::probability(int l) const {
  if (l < 1 || l > l_max_) return 0.0;
  return c_ * std::pow(static_cast<double>(l), -alpha_);
}

int ParetoBurst::sample_from_unit(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(), l_max_ - 1);
  return static_cast<int>(idx) + 1;
}

int pareto_burst_length(std::mt19937_64& rng, double alpha, int l_max) {
  thread_local std::optional<ParetoBurst> cache;
  if (!cache || cache->alpha() != alpha || cache->l_max() != l_max) cache.emplace(alpha, l_max);
  return cache->sample(rng);
}

ArrivalSource::ArrivalSource(RateMatrix rates, std::optional<BurstModel> burst, std::uint64_t seed)
    : rates_(std::move(rates)), rng_(hash_key(seed, Stream::traffic)) {
  const int n = rates_.sigma.size();
  if (!check_admissible(rates_.sigma).admissible) throw ConfigError("arrival rates are not admissible");
  if (burst) burst_.emplace(burst->alpha, burst->l_max);
  cumulative_.assign(n, std::vector<double>(n, 0.0));
  row_rate_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (rates_.sigma(i, j) < 0.0) throw ConfigError("negative arrival rate");
      acc += rates_.sigma(i, j);
      cumulative_[i][j] = acc;
    }
    row_rate_[i] = acc;
  }
  state_.assign(n, {});
  if (burst_)
    for (int i = 0; i < n; ++i) state_[i].idle = row_rate_[i] > 0.0 ? draw_gap(i) : 0;
}

Port ArrivalSource::draw_destination(Port i) {
  const double u = uniform01(rng_) * row_rate_[i];
  const auto& cum = cumulative_[i];
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  auto j = static_cast<Port>(it - cum.begin());
  if (j == static_cast<Port>(cum.size())) {
    // u rounded onto the row total: take the last column with a positive rate.
    j = static_cast<Port>(cum.size()) - 1;
    while (j > 0 && rates_.sigma(i, j) == 0.0) --j;
  }
  return j;
}

std::int64_t ArrivalSource::draw_gap(Port i) {
  const double r = row_rate_[i];
  const double mean_gap = burst_->mean() * (1.0 - r) / r;
  // Geometric on {0, 1, ...} with mean mean_gap.
  const double stop = 1.0 / (1.0 + mean_gap);
  if (stop >= 1.0) return 0;
  const double u = 1.0 - uniform01(rng_);  // (0, 1]
  return static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-stop)));
}

void ArrivalSource::sample_arrivals(Slot slot, std::vector<Packet>& out) {
  out.clear();
  const int n = rates_.sigma.size();
  for (Port i = 0; i < n; ++i) {
    if (row_rate_[i] <= 0.0) continue;
    if (!burst_) {
      if (uniform01(rng_) < row_rate_[i]) out.push_back({i, draw_destination(i), slot});
      continue;
    }
    auto& st = state_[i];
    if (st.remaining == 0) {
      if (st.idle > 0) {
        --st.idle;
        continue;
      }
      st.destination = draw_destination(i);
      st.remaining = burst_->sample(rng_);
      ++bursts_;
    }
    out.push_back({i, st.destination, slot});
    if (--st.remaining == 0) st.idle = draw_gap(i);
  }
}

std::vector<Packet> ArrivalSource::sample_arrivals(Slot slot) {
  std::vector<Packet> out;
  sample_arrivals(slot, out);
  return out;
}

}  // namespace disquo::traffic
