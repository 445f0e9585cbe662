#pragma once

// Configuration-driven runs: a JSON document with switch/traffic/metrics/output
// sections, expanded into one point per (scheduler, load, omega, seed), each run
// as an isolated simulation and written as one CSV row.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "disquo/metrics.hpp"
#include "disquo/switch_core.hpp"
#include "disquo/traffic.hpp"

namespace disquo::experiment {

/// One fully specified simulation.
struct PointConfig {
  // switch.*
  int n_ports = 8;
  SchedulerKind scheduler = SchedulerKind::disquo;
  Fidelity fidelity = Fidelity::consistent;
  WeightMode weight_mode = WeightMode::local;
  double epsilon = 0.05;
  bool idle_augmentation = true;
  std::uint64_t seed = 1;
  Slot slots = 100000;
  // traffic.*
  traffic::Pattern pattern = traffic::Pattern::uniform;
  double load = 0.5;
  double omega = 0.5;
  bool bursty = false;
  double alpha = 1.7;
  int l_max = 1000;
  // metrics.*
  Slot warmup = 0;
  int batches = 30;
  Slot probe_every = 1000;
  Slot weight_ratio_every = 100;  // 0 disables sampling
  double weight_ratio_epsilon = 0.1;

  SwitchConfig switch_config() const;
  /// Throws ConfigError for anything the run could not start with.
  void validate() const;
};

/// A config document after parsing: scalar settings plus the sweep axes.
struct ExperimentConfig {
  PointConfig base;
  std::vector<SchedulerKind> schedulers;
  std::vector<double> loads;
  std::vector<double> omegas;
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> output_path;

  /// Cartesian product in (scheduler, load, omega, seed) order.
  std::vector<PointConfig> expand() const;
};

/// Parses and validates. Unknown keys, wrong types, empty lists and inadmissible
/// loads raise ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

std::string scheduler_name(SchedulerKind k);
std::optional<SchedulerKind> parse_scheduler(const std::string& name);
std::string fidelity_name(Fidelity f);
std::optional<Fidelity> parse_fidelity(const std::string& name);
std::string weight_mode_name(WeightMode m);
std::optional<WeightMode> parse_weight_mode(const std::string& name);

struct ReportRow {
  std::string scheduler;
  std::string pattern;
  int n_ports = 0;
  double load = 0.0;
  double omega = 0.0;
  bool bursty = false;
  std::uint64_t seed = 0;
  Slot slots = 0;
  std::optional<double> mean_delay;
  std::optional<double> delay_ci95;
  std::optional<double> throughput;
  std::optional<double> max_qnorm;
  std::optional<bool> stable;
  std::optional<std::int64_t> divergences;
  std::optional<double> weight_ratio_frac;
  std::optional<std::string> error;  // set when the point failed at run time
};

struct PointResult {
  ReportRow row;
  metrics::ExperimentReport report;
};

/// Runs one point to completion. Deterministic in the config.
PointResult run_point(const PointConfig& config);

/// Runs every point on up to `jobs` threads; results come back in point order.
/// A point that throws is reported through ReportRow::error.
std::vector<ReportRow> run_points(const std::vector<PointConfig>& points, int jobs);

extern const char* const kCsvHeader;
std::string format_row(const ReportRow& row);
void write_csv(std::ostream& os, const std::vector<ReportRow>& rows);

}  // namespace disquo::experiment
