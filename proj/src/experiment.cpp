#include "disquo/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "disquo/baselines.hpp"
#include "disquo/disquo.hpp"

namespace disquo::experiment {

using nlohmann::json;

std::string scheduler_name(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::disquo: return "disquo";
    case SchedulerKind::mwm: return "mwm";
    case SchedulerKind::rr_rr: return "rr_rr";
    case SchedulerKind::lqf_rr: return "lqf_rr";
    case SchedulerKind::oq_reference: return "oq";
  }
  return "?";
}

std::optional<SchedulerKind> parse_scheduler(const std::string& s) {
  if (s == "disquo") return SchedulerKind::disquo;
  if (s == "mwm") return SchedulerKind::mwm;
  if (s == "rr_rr" || s == "rr-rr") return SchedulerKind::rr_rr;
  if (s == "lqf_rr" || s == "lqf-rr") return SchedulerKind::lqf_rr;
  if (s == "oq" || s == "oq_reference") return SchedulerKind::oq_reference;
  return std::nullopt;
}

std::string fidelity_name(Fidelity f) {
  switch (f) {
    case Fidelity::literal: return "literal";
    case Fidelity::consistent: return "consistent";
    case Fidelity::oracle: return "oracle";
  }
  return "?";
}

std::optional<Fidelity> parse_fidelity(const std::string& s) {
  if (s == "literal") return Fidelity::literal;
  if (s == "consistent") return Fidelity::consistent;
  if (s == "oracle") return Fidelity::oracle;
  return std::nullopt;
}

std::string weight_mode_name(WeightMode m) {
  switch (m) {
    case WeightMode::exact_qmax: return "exact_qmax";
    case WeightMode::estimated_qmax: return "estimated_qmax";
    case WeightMode::local: return "local";
  }
  return "?";
}

std::optional<WeightMode> parse_weight_mode(const std::string& s) {
  if (s == "exact_qmax" || s == "exact") return WeightMode::exact_qmax;
  if (s == "estimated_qmax" || s == "estimated") return WeightMode::estimated_qmax;
  if (s == "local") return WeightMode::local;
  return std::nullopt;
}

SwitchConfig PointConfig::switch_config() const {
  SwitchConfig s;
  s.n_ports = n_ports;
  s.scheduler = scheduler;
  s.fidelity = fidelity;
  s.weight_mode = weight_mode;
  s.epsilon = epsilon;
  s.idle_augmentation = idle_augmentation;
  s.seed = seed;
  s.slots = slots;
  s.warmup_slots = warmup;
  return s;
}

void PointConfig::validate() const {
  switch_config().validate();
  traffic::build_rate_matrix(pattern, n_ports, load, omega);
  if (bursty) traffic::ParetoBurst(alpha, l_max);
  if (batches < 1) throw ConfigError("metrics.batches must be >= 1");
  if (probe_every < 1) throw ConfigError("metrics.probe_every must be >= 1");
  if (weight_ratio_every < 0) throw ConfigError("metrics.weight_ratio_every must be >= 0");
  if (!(weight_ratio_epsilon > 0.0 && weight_ratio_epsilon < 1.0))
    throw ConfigError("metrics.weight_ratio_epsilon must lie in (0, 1)");
}

std::vector<PointConfig> ExperimentConfig::expand() const {
  std::vector<PointConfig> out;
  for (auto s : schedulers)
    for (double l : loads)
      for (double o : omegas)
        for (auto seed : seeds) {
          PointConfig p = base;
          p.scheduler = s;
          p.load = l;
          p.omega = o;
          p.seed = seed;
          out.push_back(p);
        }
  return out;
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError(key + ": " + why);
}

void reject_unknown(const json& section, const std::string& name, const std::set<std::string>& allowed) {
  if (!section.is_object()) bad(name, "must be an object");
  for (const auto& [k, v] : section.items())
    if (!allowed.count(k)) bad(name + "." + k, "unknown key");
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

// Scalar or non-empty list.
template <typename T, typename F>
std::vector<T> as_list(const json& v, const std::string& key, F convert) {
  std::vector<T> out;
  if (v.is_array()) {
    if (v.empty()) bad(key, "list must not be empty");
    for (const auto& e : v) out.push_back(convert(e, key));
  } else {
    out.push_back(convert(v, key));
  }
  return out;
}

SchedulerKind to_scheduler(const json& v, const std::string& key) {
  const auto k = parse_scheduler(as_string(v, key));
  if (!k) bad(key, "unknown scheduler '" + v.get<std::string>() + "'");
  return *k;
}

std::uint64_t to_seed(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  bad(key, "expected a non-negative integer");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, "config", {"switch", "traffic", "metrics", "output"});

  ExperimentConfig cfg;
  PointConfig& b = cfg.base;
  cfg.schedulers = {b.scheduler};
  cfg.loads = {b.load};
  cfg.omegas = {b.omega};
  cfg.seeds = {b.seed};

  if (doc.contains("switch")) {
    const json& s = doc["switch"];
    reject_unknown(s, "switch", {"n_ports", "buffer_depth", "scheduler", "fidelity", "weight_mode", "epsilon",
                                 "idle_augmentation", "seed", "slots"});
    if (s.contains("n_ports")) b.n_ports = static_cast<int>(as_integer(s["n_ports"], "switch.n_ports"));
    if (s.contains("buffer_depth") && as_integer(s["buffer_depth"], "switch.buffer_depth") != 1)
      bad("switch.buffer_depth", "only 1 is supported");
    if (s.contains("scheduler")) cfg.schedulers = as_list<SchedulerKind>(s["scheduler"], "switch.scheduler", to_scheduler);
    if (s.contains("fidelity")) {
      const auto f = parse_fidelity(as_string(s["fidelity"], "switch.fidelity"));
      if (!f) bad("switch.fidelity", "expected literal, consistent or oracle");
      b.fidelity = *f;
    }
    if (s.contains("weight_mode")) {
      const auto m = parse_weight_mode(as_string(s["weight_mode"], "switch.weight_mode"));
      if (!m) bad("switch.weight_mode", "expected exact_qmax, estimated_qmax or local");
      b.weight_mode = *m;
    }
    if (s.contains("epsilon")) b.epsilon = as_number(s["epsilon"], "switch.epsilon");
    if (s.contains("idle_augmentation")) {
      if (!s["idle_augmentation"].is_boolean()) bad("switch.idle_augmentation", "expected true or false");
      b.idle_augmentation = s["idle_augmentation"].get<bool>();
    }
    if (s.contains("seed")) cfg.seeds = as_list<std::uint64_t>(s["seed"], "switch.seed", to_seed);
    if (s.contains("slots")) b.slots = as_integer(s["slots"], "switch.slots");
  }
  if (doc.contains("traffic")) {
    const json& t = doc["traffic"];
    reject_unknown(t, "traffic", {"pattern", "load", "omega", "bursty", "alpha", "l_max"});
    if (t.contains("pattern")) {
      const auto p = traffic::parse_pattern(as_string(t["pattern"], "traffic.pattern"));
      if (!p) bad("traffic.pattern", "expected uniform, lin_diagonal or hot_spot");
      b.pattern = *p;
    }
    if (t.contains("load")) cfg.loads = as_list<double>(t["load"], "traffic.load", as_number);
    if (t.contains("omega")) cfg.omegas = as_list<double>(t["omega"], "traffic.omega", as_number);
    if (t.contains("bursty")) {
      if (!t["bursty"].is_boolean()) bad("traffic.bursty", "expected true or false");
      b.bursty = t["bursty"].get<bool>();
    }
    if (t.contains("alpha")) b.alpha = as_number(t["alpha"], "traffic.alpha");
    if (t.contains("l_max")) b.l_max = static_cast<int>(as_integer(t["l_max"], "traffic.l_max"));
  }
  if (doc.contains("metrics")) {
    const json& m = doc["metrics"];
    reject_unknown(m, "metrics", {"warmup", "batches", "probe_every", "weight_ratio_every", "weight_ratio_epsilon"});
    if (m.contains("warmup")) b.warmup = as_integer(m["warmup"], "metrics.warmup");
    if (m.contains("batches")) b.batches = static_cast<int>(as_integer(m["batches"], "metrics.batches"));
    if (m.contains("probe_every")) b.probe_every = as_integer(m["probe_every"], "metrics.probe_every");
    if (m.contains("weight_ratio_every"))
      b.weight_ratio_every = as_integer(m["weight_ratio_every"], "metrics.weight_ratio_every");
    if (m.contains("weight_ratio_epsilon"))
      b.weight_ratio_epsilon = as_number(m["weight_ratio_epsilon"], "metrics.weight_ratio_epsilon");
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    reject_unknown(o, "output", {"path"});
    if (o.contains("path")) cfg.output_path = as_string(o["path"], "output.path");
  }

  for (const PointConfig& p : cfg.expand()) p.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::unique_ptr<Scheduler> make_scheduler(const PointConfig& c) {
  switch (c.scheduler) {
    case SchedulerKind::disquo: return std::make_unique<DisquoScheduler>(c.n_ports, disquo_options_from(c.switch_config()));
    case SchedulerKind::mwm: {
      WeightParams w;
      w.mode = c.weight_mode;
      w.epsilon = c.epsilon;
      w.n_ports = c.n_ports;
      return std::make_unique<MwmScheduler>(c.n_ports, w);
    }
    case SchedulerKind::rr_rr: return std::make_unique<RrRrScheduler>(c.n_ports);
    case SchedulerKind::lqf_rr: return std::make_unique<LqfRrScheduler>(c.n_ports);
    case SchedulerKind::oq_reference: break;
  }
  throw ConfigError("no crosspoint scheduler for this kind");
}

ReportRow row_header(const PointConfig& c) {
  ReportRow r;
  r.scheduler = scheduler_name(c.scheduler);
  r.pattern = std::string(traffic::pattern_name(c.pattern));
  r.n_ports = c.n_ports;
  r.load = c.load;
  r.omega = c.omega;
  r.bursty = c.bursty;
  r.seed = c.seed;
  r.slots = c.slots;
  return r;
}

}  // namespace

PointResult run_point(const PointConfig& c) {
  c.validate();
  const int n = c.n_ports;
  std::optional<traffic::BurstModel> burst;
  if (c.bursty) burst = traffic::BurstModel{c.alpha, c.l_max};
  traffic::ArrivalSource source(traffic::build_rate_matrix(c.pattern, n, c.load, c.omega), burst, c.seed);
  metrics::RunMetrics m(n, c.warmup, c.slots, c.batches, c.probe_every);
  std::vector<Packet> arrivals;

  if (c.scheduler == SchedulerKind::oq_reference) {
    OqState oq(n);
    std::vector<double> backlog(n);
    for (Slot t = 0; t < c.slots; ++t) {
      source.sample_arrivals(t, arrivals);
      const auto deps = oq_slot(oq, arrivals);
      if (t < c.warmup) continue;
      for (const auto& d : deps) m.record_departure(d);
      if (t % c.probe_every == 0) {
        std::int64_t longest = 0;
        for (int j = 0; j < n; ++j) {
          backlog[j] = static_cast<double>(oq.fifo[j].size());
          longest = std::max<std::int64_t>(longest, static_cast<std::int64_t>(oq.fifo[j].size()));
        }
        m.probe.push(metrics::queue_norm(backlog), longest);
      }
    }
  } else {
    const SwitchConfig sc = c.switch_config();
    SwitchState state = init_switch(sc);
    auto scheduler = make_scheduler(c);
    auto* disquo = dynamic_cast<DisquoScheduler*>(scheduler.get());
    const PermutationSource perms = default_permutation_source(sc);
    SlotReport rep;
    for (Slot t = 0; t < c.slots; ++t) {
      source.sample_arrivals(t, arrivals);
      advance_slot(state, arrivals, *scheduler, perms, rep);
      if (t < c.warmup) continue;
      for (const auto& d : rep.departed) m.record_departure(d);
      m.divergences += rep.divergence_count;
      m.probe.observe(t, state.voq);
      if (disquo && c.weight_ratio_every > 0 && (t - c.warmup) % c.weight_ratio_every == 0)
        m.record_weight_ratio(metrics::weight_ratio(state.x.input_cells(), disquo->weights(state)),
                              c.weight_ratio_epsilon);
    }
  }

  PointResult res;
  res.report = metrics::finalize_report(m);
  res.row = row_header(c);
  res.row.mean_delay = res.report.mean_delay;
  res.row.delay_ci95 = res.report.delay_ci95;
  res.row.throughput = res.report.throughput;
  res.row.max_qnorm = res.report.max_qnorm;
  res.row.stable = res.report.stable;
  if (c.scheduler == SchedulerKind::disquo) res.row.divergences = res.report.divergences;
  res.row.weight_ratio_frac = res.report.weight_ratio_frac;
  return res;
}

std::vector<ReportRow> run_points(const std::vector<PointConfig>& points, int jobs) {
  std::vector<ReportRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < points.size(); k = next++) {
      try {
        rows[k] = run_point(points[k]).row;
      } catch (const std::exception& e) {
        rows[k] = row_header(points[k]);
        rows[k].error = e.what();
      }
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, points.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

const char* const kCsvHeader =
    "scheduler,pattern,N,load,omega,bursty,seed,slots,mean_delay,delay_ci95,throughput,max_qnorm,"
    "stable_flag,divergences,weight_ratio_frac";

namespace {

std::string num(double v, const char* fmt = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string opt(const std::optional<double>& v, const char* fmt = "%.6f") { return v ? num(*v, fmt) : "NA"; }

}  // namespace

std::string format_row(const ReportRow& r) {
  std::string s;
  s += r.scheduler + ',' + r.pattern + ',' + std::to_string(r.n_ports) + ',';
  s += num(r.load, "%.4g") + ',' + num(r.omega, "%.4g") + ',' + (r.bursty ? "true" : "false") + ',';
  s += std::to_string(r.seed) + ',' + std::to_string(r.slots) + ',';
  s += opt(r.mean_delay) + ',' + opt(r.delay_ci95) + ',' + opt(r.throughput) + ',' + opt(r.max_qnorm) + ',';
  if (r.error) s += "error";
  else if (r.stable) s += *r.stable ? "true" : "false";
  else s += "NA";
  s += ',';
  s += r.divergences ? std::to_string(*r.divergences) : "NA";
  s += ',' + opt(r.weight_ratio_frac);
  return s;
}

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << format_row(r) << '\n';
}

}  // namespace disquo::experiment
