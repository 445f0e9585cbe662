// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "disquo/chain.hpp"
#include "disquo/disquo.hpp"
#include "disquo/experiment.hpp"
#include "disquo/traffic.hpp"
#include "disquo/verify.hpp"
#include "disquo/weight.hpp"

using namespace disquo;
using namespace disquo::chain;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Grid<double> random_weights(std::mt19937_64& rng, int n, double hi) {
  std::uniform_real_distribution<double> u(0.0, hi);
  Grid<double> w(n);
  for (double& x : w.raw()) x = u(rng);
  return w;
}

Distribution random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  Distribution d(n);
  double s = 0.0;
  for (double& x : d) s += (x = e(rng));
  for (double& x : d) x /= s;
  return d;
}

bool views_agree(const SlotReport& r) {
  const auto& in = r.x_input_view;
  const auto& out = r.x_output_view;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i] && out[*in[i]] != static_cast<Port>(i)) return false;
  for (std::size_t j = 0; j < out.size(); ++j)
    if (out[j] && in[*out[j]] != static_cast<Port>(j)) return false;
  return true;
}

// 1. Exact chain on the two-port switch.
Outcome exact_chain() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid<double> w(2, {{1.0, 2.0}, {0.5, 1.5}});
  const StateSpace space(2);
  const TransitionMatrix p = transition_matrix(w, space);
  double row_err = 0.0;
  for (Eigen::Index x = 0; x < p.rows(); ++x) row_err = std::max(row_err, std::abs(p.row(x).sum() - 1.0));
  const bool connected = strongly_connected(p);
  const Distribution pi = product_form(w, space);
  const double stat = stationarity_residual(p, pi);
  const double db = detailed_balance_residual(p, pi);
  const double secs = seconds_since(t0);
  return {row_err <= 1e-12 && connected && stat <= 1e-10 && db <= 1e-12 && secs < 1.0,
          fmt("row-sum err %.2e, connected %s, |piP-pi| %.2e, balance %.2e, %.3fs", row_err,
              connected ? "yes" : "no", stat, db, secs)};
}

// 2. Abstract sampler against the uniform law.
Outcome mugd_sampling() {
  const auto t0 = std::chrono::steady_clock::now();
  const Distribution d = simulate_mugd(Grid<double>(2, 0.0), StateSpace(2), 1000000, 1, 10000);
  const double tv = tv_distance(d, Distribution(7, 1.0 / 7.0));
  const double secs = seconds_since(t0);
  return {tv <= 0.02 && secs < 30.0, fmt("TV %.4f (limit 0.02), %.1fs", tv, secs)};
}

// 3. The full switch realizes the chain.
Outcome switch_realization() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid<double> w(2, {{1.0, 2.0}, {0.5, 1.5}});
  const Distribution target = product_form(w, StateSpace(2));
  const double oracle =
      tv_distance(verify::saturated_schedule_distribution(w, Fidelity::oracle, 500000, 10000, 1), target);
  const double consistent =
      tv_distance(verify::saturated_schedule_distribution(w, Fidelity::consistent, 500000, 10000, 1), target);
  const double secs = seconds_since(t0);
  return {oracle <= 0.02 && consistent <= 0.10 && secs < 60.0,
          fmt("oracle TV %.4f (limit 0.02), consistent TV %.4f (limit 0.10), %.1fs", oracle, consistent, secs)};
}

experiment::PointConfig base_point(int n, double load, Slot slots) {
  experiment::PointConfig p;
  p.n_ports = n;
  p.load = load;
  p.slots = slots;
  p.seed = 1;
  return p;
}

// 4. Hot-spot stability near saturation.
Outcome hot_spot_stability() {
  const auto t0 = std::chrono::steady_clock::now();
  experiment::PointConfig p = base_point(16, 0.95, 2000000);
  p.pattern = traffic::Pattern::hot_spot;
  p.omega = 0.5;
  p.weight_mode = WeightMode::local;
  p.weight_ratio_every = 0;
  const auto r = experiment::run_point(p).report;
  return {r.throughput >= 0.93 && r.stable,
          fmt("departure rate %.4f per port (min 0.93), trend %s, max |Q| %.1f, mean delay %.1f, %.0fs",
              r.throughput, r.stable ? "stable" : "unstable", r.max_qnorm, r.mean_delay.value_or(-1.0),
              seconds_since(t0))};
}

// 5. Delay against the output-queued switch.
Outcome oq_delay() {
  const auto t0 = std::chrono::steady_clock::now();
  experiment::PointConfig d = base_point(32, 0.9, 1000000);
  d.weight_ratio_every = 0;
  experiment::PointConfig oq = d;
  oq.scheduler = SchedulerKind::oq_reference;
  const auto rd = experiment::run_point(d).report;
  const auto ro = experiment::run_point(oq).report;
  // Reference figure with matched ports idling while their own VOQ is empty.
  experiment::PointConfig literal = d;
  literal.idle_augmentation = false;
  const auto rl = experiment::run_point(literal).report;
  const double ratio = rd.mean_delay.value_or(INFINITY) / ro.mean_delay.value_or(NAN);
  return {ratio <= 3.0,
          fmt("DISQUO %.3f vs OQ %.3f slots, ratio %.2f (limit 3); without idle augmentation %.1f (ratio %.0f), "
              "%.0fs",
              rd.mean_delay.value_or(-1.0), ro.mean_delay.value_or(-1.0), ratio, rl.mean_delay.value_or(-1.0),
              rl.mean_delay.value_or(INFINITY) / ro.mean_delay.value_or(NAN), seconds_since(t0))};
}

// 6. RR-RR saturates below full throughput under hot-spot traffic.
Outcome rr_saturation() {
  const auto t0 = std::chrono::steady_clock::now();
  experiment::PointConfig p = base_point(32, 0.99, 1000000);
  p.scheduler = SchedulerKind::rr_rr;
  p.pattern = traffic::Pattern::hot_spot;
  p.omega = 0.5;
  const auto r = experiment::run_point(p).report;
  return {r.throughput >= 0.80 && r.throughput <= 0.90,
          fmt("throughput %.4f per port (band [0.80, 0.90]), %.0fs", r.throughput, seconds_since(t0))};
}

// 7. Mean burst length of the bursty generator.
Outcome burst_length() {
  const auto t0 = std::chrono::steady_clock::now();
  traffic::ArrivalSource src(traffic::build_rate_matrix(traffic::Pattern::uniform, 1, 0.8),
                             traffic::BurstModel{1.7, 1000}, 1);
  std::int64_t cells = 0;
  std::vector<Packet> buf;
  // Run until the millionth burst starts; the cells counted belong to the bursts before it.
  for (Slot t = 0;; ++t) {
    const auto before = src.bursts_started();
    src.sample_arrivals(t, buf);
    if (src.bursts_started() > before && before == 1000000) break;
    cells += static_cast<std::int64_t>(buf.size());
  }
  const double mean = static_cast<double>(cells) / 1e6;
  return {mean >= 11.4 && mean <= 11.8,
          fmt("mean %.4f over 1e6 bursts (band [11.4, 11.8]), %.1fs", mean, seconds_since(t0))};
}

// 8. Analytic bounds over random instances.
Outcome bound_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(8);
  int instances = 0;
  std::vector<std::string> failures;
  double worst_cond = -INFINITY, worst_norm = 0.0, worst_mix = 0.0, worst_lw = 0.0, worst_fe = -INFINITY;
  for (int k = 0; k < 120; ++k) {
    const int n = k < 20 ? 1 : 2;
    const Grid<double> w = random_weights(rng, n, 3.0);
    const StateSpace space(n);
    const TransitionMatrix p = transition_matrix(w, space);
    const Distribution pi = product_form(w, space);
    ++instances;

    for (int t = 0; t < 10; ++t) {
      const Distribution a = random_distribution(rng, space.size()), b = random_distribution(rng, space.size());
      if (chi2_distance(b, a) < 2.0 * tv_distance(a, b) - 1e-15) failures.push_back("chi2>=2tv");
    }

    const double e_max = spectral_gap_emax(p);
    const double phi = conductance(p, pi);
    worst_cond = std::max(worst_cond, e_max - (1.0 - phi * phi / 2.0));
    if (e_max > 1.0 - phi * phi / 2.0 + 1e-12) failures.push_back("conductance");

    const double wmax = *std::max_element(w.raw().begin(), w.raw().end());
    const double t_mix = 1.0 / (1.0 - e_max);
    worst_mix = std::max(worst_mix, t_mix / mugd_mixing_bound(n * n, wmax));
    if (t_mix > mugd_mixing_bound(n * n, wmax)) failures.push_back("mixing");

    std::uniform_real_distribution<double> eps_u(0.01, 0.99);
    const LowWeightMass lw = low_weight_mass(w, eps_u(rng), space);
    if (lw.bound) {
      worst_lw = std::max(worst_lw, lw.mass / *lw.bound);
      if (lw.mass > *lw.bound) failures.push_back("low-weight-mass");
    }

    Distribution t_vals(space.size());
    for (std::size_t s = 0; s < space.size(); ++s) t_vals[s] = space.weight_of(s, w);
    const double best = free_energy(free_energy_maximizer(t_vals), t_vals);
    if (std::abs(best - log_partition(w, space)) > 1e-10) failures.push_back("free-energy=logZ");
    for (int m = 0; m < 100; ++m) {
      const double f = free_energy(random_distribution(rng, space.size()), t_vals);
      worst_fe = std::max(worst_fe, f - best);
      if (f > best + 1e-12) failures.push_back("free-energy-max");
    }

    const double norm_err = std::abs(matrix_norm(p, pi) - e_max);
    worst_norm = std::max(worst_norm, norm_err);
    if (norm_err > 1e-8) failures.push_back("matrix-norm");
  }
  int grid_fail = 0;
  for (double lx = -6.0; lx <= 9.0; lx += 0.01) {
    const double x = std::pow(10.0, lx);
    if (f_prime(x) > 1.0 / (1.0 + x) + 1e-9) ++grid_fail;
  }
  if (grid_fail) failures.push_back("f'-bound");
  const double secs = seconds_since(t0);
  std::string detail = fmt(
      "%d instances; worst e_max-(1-phi^2/2) %.3e, t_mix/bound %.2e, mass/bound %.3f, F-logZ %.2e, "
      "|norm-e_max| %.1e, f' grid violations %d, %.1fs",
      instances, worst_cond, worst_mix, worst_lw, worst_fe, worst_norm, grid_fail, secs);
  if (!failures.empty()) detail += "; first failure: " + failures.front();
  return {failures.empty() && instances >= 100 && secs < 300.0, detail};
}

// 9. Broadcast estimate of the largest queue.
Outcome qmax_estimator() {
  std::int64_t worst_margin = std::numeric_limits<std::int64_t>::min();  // max of |error| - 2N
  std::string worst;
  for (int n : {2, 4, 8})
    for (int card = 0; card < n; ++card)
      for (int shape = 0; shape < 2; ++shape) {
        // shape 0: one VOQ grows by one packet per slot.
        // shape 1: it grows for 3N slots, then drains one per slot, repeatedly.
        QmaxEstimatorState est(n);
        Grid<std::int64_t> q(n, 0);
        for (Slot t = 0; t < 5000; ++t) {
          std::int64_t& v = q(card, (card + 1) % n);
          if (shape == 0 || (t / (3 * n)) % 2 == 0) ++v;
          else v = std::max<std::int64_t>(v - 1, 0);
          const std::int64_t e = estimate_qmax(est, q, t);
          if (t < n) continue;
          const std::int64_t err = std::llabs(e - v);
          if (err - 2 * n > worst_margin) {
            worst_margin = err - 2 * n;
            worst = fmt("N=%d card %d shape %d slot %lld error %lld", n, card, shape, static_cast<long long>(t),
                        static_cast<long long>(err));
          }
        }
      }
  return {worst_margin <= 0, "largest error relative to 2N: " + std::to_string(worst_margin) + " (" + worst + ")"};
}

// 10. View agreement in consistent mode; divergence in literal mode.
Outcome consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(10);
  std::int64_t divergences = 0, bad_slots = 0, total_slots = 0, reverted = 0;
  for (int k = 0; k < 100; ++k) {
    experiment::PointConfig p;
    p.n_ports = std::uniform_int_distribution<int>(2, 8)(rng);
    p.pattern = static_cast<traffic::Pattern>(std::uniform_int_distribution<int>(0, 2)(rng));
    p.load = std::uniform_real_distribution<double>(0.3, 0.97)(rng);
    p.omega = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    p.bursty = std::bernoulli_distribution(0.5)(rng);
    p.weight_mode = static_cast<WeightMode>(std::uniform_int_distribution<int>(0, 2)(rng));
    p.idle_augmentation = std::bernoulli_distribution(0.5)(rng);
    p.seed = 1000 + k;
    p.fidelity = Fidelity::consistent;
    const SwitchConfig sc = p.switch_config();
    SwitchState state = init_switch(sc);
    DisquoScheduler sched(sc.n_ports, disquo_options_from(sc));
    std::optional<traffic::BurstModel> burst;
    if (p.bursty) burst = traffic::BurstModel{p.alpha, p.l_max};
    traffic::ArrivalSource src(traffic::build_rate_matrix(p.pattern, p.n_ports, p.load, p.omega), burst, p.seed);
    const PermutationSource perms = default_permutation_source(sc);
    std::vector<Packet> arrivals;
    SlotReport rep;
    for (Slot t = 0; t < 100000; ++t) {
      src.sample_arrivals(t, arrivals);
      advance_slot(state, arrivals, sched, perms, rep);
      divergences += rep.divergence_count;
      bad_slots += !views_agree(rep) || state.x.input_cells() != state.x.output_cells();
      ++total_slots;
    }
    reverted += sched.reverted_joins();
  }

  // Literal mode on the three-port stranded join: X = {(0,0)}, H = {0->1, 1->2, 2->0},
  // input 2 is free and joins (2,0) while output 0 is still with input 0.
  SwitchConfig c;
  c.n_ports = 3;
  c.fidelity = Fidelity::literal;
  SwitchState s = init_switch(c);
  s.x.input_side[0] = 0;
  s.x.output_side[0] = 0;
  s.enqueue({0, 0, 0});
  s.enqueue({2, 0, 0});
  DisquoOptions o = disquo_options_from(c);
  o.coin = [](Slot, Port i, Port j) { return (i == 2 && j == 0) ? 0.999 : 0.0; };
  DisquoScheduler literal(3, o);
  const PermutationSchedule h = PermutationSchedule::from_outputs({1, 2, 0});
  const SlotReport lit = advance_slot(s, {}, literal, [&](Slot) { return h; });

  return {divergences == 0 && bad_slots == 0 && lit.divergence_count >= 1,
          fmt("consistent: %lld slots over 100 configs, divergences %lld, disagreeing slots %lld, joins withdrawn "
              "%lld; literal scenario divergence %d, %.0fs",
              static_cast<long long>(total_slots), static_cast<long long>(divergences),
              static_cast<long long>(bad_slots), static_cast<long long>(reverted), lit.divergence_count,
              seconds_since(t0))};
}

// 11. How often the schedule's weight is near the maximum.
Outcome weight_ratio() {
  const auto t0 = std::chrono::steady_clock::now();
  experiment::PointConfig p = base_point(4, 0.9, 200000);
  p.weight_mode = WeightMode::exact_qmax;
  p.warmup = 100000;
  p.weight_ratio_every = 1;
  p.weight_ratio_epsilon = 0.1;
  const auto r = experiment::run_point(p).report;
  experiment::PointConfig literal = p;
  literal.idle_augmentation = false;
  const auto rl = experiment::run_point(literal).report;
  const double frac = r.weight_ratio_frac.value_or(0.0);
  return {frac > 0.8, fmt("fraction %.4f (needs > 0.8); without idle augmentation %.4f, %.0fs", frac,
                          rl.weight_ratio_frac.value_or(0.0), seconds_since(t0))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact chain verification, N=2", exact_chain},
      {"MUGD sampling matches the product form", mugd_sampling},
      {"full-switch Glauber realization", switch_realization},
      {"hot-spot stability at load 0.95", hot_spot_stability},
      {"delay within 3x of output queueing", oq_delay},
      {"RR-RR hot-spot saturation band", rr_saturation},
      {"bursty mean burst length", burst_length},
      {"analytic bound property suite", bound_suite},
      {"Q_max broadcast estimator bound", qmax_estimator},
      {"view consistency", consistency},
      {"weight ratio near maximum", weight_ratio},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("%s %2zu  %s: %s\n", o.passed ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
