#pragma once

// Run instrumentation: packet delay with a batch-means confidence interval,
// queue-norm trend for the stability flag, per-output throughput, and how close
// the running schedule's weight sits to the maximum weight matching.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "disquo/common.hpp"
#include "disquo/switch_core.hpp"

namespace disquo::metrics {

/// (sum_ij Q_ij^2)^(1/2)
double queue_norm(const VoqMatrix& voq);
double queue_norm(const Grid<std::int64_t>& q);
double queue_norm(std::span<const double> q);

/// W(X) / W*, with W* the maximum weight matching value; 1 when W* is 0.
double weight_ratio(const std::vector<Cell>& schedule, const Grid<double>& weights);

/// Delay accumulator. Packets are assigned to one of `batches` equal time windows
/// by arrival slot over [window_begin, window_end); the CI is built from the window
/// means. Overall mean and variance use Welford updates.
class DelayStats {
 public:
  DelayStats(int batches, Slot window_begin, Slot window_end);
  DelayStats() : DelayStats(30, 0, 1) {}

  void record(Slot delay, Slot arrival_slot);
  /// Combine with an accumulator over the same windows. Order-independent.
  void merge(const DelayStats& other);

  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Sample variance; 0 for fewer than two packets.
  double variance() const;
  int batches() const { return static_cast<int>(batch_sum_.size()); }
  /// Number of windows that received at least one packet.
  int filled_batches() const;
  /// Half-width of the 95% Student-t interval on the window means; empty with fewer
  /// than two filled windows.
  std::optional<double> ci95() const;

 private:
  Slot begin_;
  Slot end_;
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  std::vector<double> batch_sum_;
  std::vector<std::int64_t> batch_count_;
};

/// Samples ||Q|| and Q_max every `every` slots.
class StabilityProbe {
 public:
  explicit StabilityProbe(Slot every = 1000) : every_(every < 1 ? 1 : every) {}

  /// Records a sample when slot is a multiple of the sampling period.
  void observe(Slot slot, const VoqMatrix& voq);
  void push(double norm, std::int64_t qmax);

  const std::vector<double>& norms() const { return norms_; }
  const std::vector<std::int64_t>& qmax() const { return qmax_; }
  Slot every() const { return every_; }

  double max_norm() const;
  double mean_norm() const;
  /// Mean norm over the last quarter of samples is at most twice the mean over the
  /// second quarter. Fewer than four samples counts as stable.
  bool trend_stable() const;

 private:
  Slot every_;
  std::vector<double> norms_;
  std::vector<std::int64_t> qmax_;
};

/// Everything a run feeds in; warmup exclusion is the caller's job.
struct RunMetrics {
  RunMetrics(int n_ports, Slot measure_begin, Slot measure_end, int batches, Slot probe_every);

  int n_ports;
  Slot measure_begin;
  Slot measure_end;
  DelayStats delay;
  StabilityProbe probe;
  std::vector<std::int64_t> departures_per_output;
  std::int64_t divergences = 0;
  std::int64_t weight_ratio_samples = 0;
  std::int64_t weight_ratio_hits = 0;  // samples with ratio >= 1 - epsilon

  Slot measured_slots() const { return measure_end - measure_begin; }
  void record_departure(const Departure& d);
  void record_weight_ratio(double ratio, double epsilon);
};

struct ExperimentReport {
  std::int64_t packets_delivered = 0;  // packets counted in the delay statistics
  std::optional<double> mean_delay;
  std::optional<double> delay_ci95;
  double throughput = 0.0;  // departures per output per slot, averaged over outputs
  std::vector<double> per_output_throughput;
  double max_qnorm = 0.0;
  double mean_qnorm = 0.0;
  bool stable = true;
  std::int64_t divergences = 0;
  std::optional<double> weight_ratio_frac;
  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

ExperimentReport finalize_report(const RunMetrics& m);

}  // namespace disquo::metrics
