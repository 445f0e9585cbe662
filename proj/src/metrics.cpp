#include "disquo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "disquo/baselines.hpp"
#include "disquo/simd/kernels.hpp"

namespace disquo::metrics {

double queue_norm(std::span<const double> q) { return std::sqrt(simd::sum_squares(q)); }

double queue_norm(const Grid<std::int64_t>& q) {
  std::vector<double> v(q.raw().begin(), q.raw().end());
  return queue_norm(v);
}

double queue_norm(const VoqMatrix& voq) {
  const int n = voq.size();
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i) * n + j] = static_cast<double>(voq.length(i, j));
  return queue_norm(v);
}

double weight_ratio(const std::vector<Cell>& schedule, const Grid<double>& weights) {
  const double best = mwm_weight(weights);
  if (best <= 0.0) return 1.0;
  double w = 0.0;
  for (const Cell& c : schedule) w += weights(c.input, c.output);
  return std::clamp(w / best, 0.0, 1.0);
}

DelayStats::DelayStats(int batches, Slot window_begin, Slot window_end)
    : begin_(window_begin), end_(window_end) {
  if (batches < 1) throw ConfigError("delay statistics need at least one batch");
  if (window_end <= window_begin) throw ConfigError("empty delay measurement window");
  batch_sum_.assign(batches, 0.0);
  batch_count_.assign(batches, 0);
}

void DelayStats::record(Slot delay, Slot arrival_slot) {
  if (arrival_slot < begin_ || arrival_slot >= end_) return;
  const double d = static_cast<double>(delay);
  ++count_;
  const double step = d - mean_;
  mean_ += step / static_cast<double>(count_);
  m2_ += step * (d - mean_);
  const auto b = static_cast<std::size_t>((static_cast<__int128>(arrival_slot - begin_) * batches()) / (end_ - begin_));
  batch_sum_[b] += d;
  ++batch_count_[b];
}

void DelayStats::merge(const DelayStats& other) {
  if (other.begin_ != begin_ || other.end_ != end_ || other.batches() != batches())
    throw ConfigError("cannot merge delay statistics over different windows");
  if (other.count_ == 0) return;
  const double na = static_cast<double>(count_), nb = static_cast<double>(other.count_);
  const double delta = other.mean_ - mean_;
  const double n = na + nb;
  mean_ = (na * mean_ + nb * other.mean_) / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
  for (std::size_t b = 0; b < batch_sum_.size(); ++b) {
    batch_sum_[b] += other.batch_sum_[b];
    batch_count_[b] += other.batch_count_[b];
  }
}

double DelayStats::variance() const {
  return count_ < 2 ? 0.0 : m2_ / static_cast<double>(count_ - 1);
}

int DelayStats::filled_batches() const {
  return static_cast<int>(std::count_if(batch_count_.begin(), batch_count_.end(), [](auto c) { return c > 0; }));
}

std::optional<double> DelayStats::ci95() const {
  std::vector<double> means;
  for (std::size_t b = 0; b < batch_sum_.size(); ++b)
    if (batch_count_[b] > 0) means.push_back(batch_sum_[b] / static_cast<double>(batch_count_[b]));
  const auto k = means.size();
  if (k < 2) return std::nullopt;
  const double m = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(k);
  double ss = 0.0;
  for (double x : means) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(k - 1));
  const boost::math::students_t dist(static_cast<double>(k - 1));
  return boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(k));
}

void StabilityProbe::observe(Slot slot, const VoqMatrix& voq) {
  if (slot % every_ != 0) return;
  push(queue_norm(voq), voq.max_length());
}

void StabilityProbe::push(double norm, std::int64_t qmax) {
  norms_.push_back(norm);
  qmax_.push_back(qmax);
}

double StabilityProbe::max_norm() const {
  return norms_.empty() ? 0.0 : *std::max_element(norms_.begin(), norms_.end());
}

double StabilityProbe::mean_norm() const {
  return norms_.empty() ? 0.0 : simd::sum(norms_) / static_cast<double>(norms_.size());
}

bool StabilityProbe::trend_stable() const {
  const std::size_t k = norms_.size();
  if (k < 4) return true;
  const std::size_t q = k / 4;
  auto mean_of = [&](std::size_t lo, std::size_t hi) {
    return simd::sum(std::span<const double>(norms_).subspan(lo, hi - lo)) / static_cast<double>(hi - lo);
  };
  const double second = mean_of(q, 2 * q);
  const double last = mean_of(k - q, k);
  return last <= 2.0 * second;
}

RunMetrics::RunMetrics(int n, Slot begin, Slot end, int batches, Slot probe_every)
    : n_ports(n),
      measure_begin(begin),
      measure_end(end),
      delay(batches, begin, end),
      probe(probe_every),
      departures_per_output(n, 0) {}

void RunMetrics::record_departure(const Departure& d) {
  if (d.departure_slot < measure_begin || d.departure_slot >= measure_end) return;
  ++departures_per_output[d.packet.output];
  delay.record(d.departure_slot - d.packet.arrival_slot, d.packet.arrival_slot);
}

void RunMetrics::record_weight_ratio(double ratio, double epsilon) {
  ++weight_ratio_samples;
  if (ratio >= 1.0 - epsilon) ++weight_ratio_hits;
}

ExperimentReport finalize_report(const RunMetrics& m) {
  ExperimentReport r;
  r.packets_delivered = m.delay.count();
  if (m.delay.count() > 0) r.mean_delay = m.delay.mean();
  r.delay_ci95 = m.delay.ci95();
  const double slots = static_cast<double>(std::max<Slot>(m.measured_slots(), 1));
  std::int64_t total = 0;
  for (auto d : m.departures_per_output) {
    r.per_output_throughput.push_back(static_cast<double>(d) / slots);
    total += d;
  }
  r.throughput = m.n_ports > 0 ? static_cast<double>(total) / (slots * m.n_ports) : 0.0;
  r.max_qnorm = m.probe.max_norm();
  r.mean_qnorm = m.probe.mean_norm();
  r.stable = m.probe.trend_stable();
  r.divergences = m.divergences;
  if (m.weight_ratio_samples > 0)
    r.weight_ratio_frac = static_cast<double>(m.weight_ratio_hits) / static_cast<double>(m.weight_ratio_samples);
  return r;
}

}  // namespace disquo::metrics
