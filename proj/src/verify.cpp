#include "disquo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "disquo/disquo.hpp"
#include "disquo/rng.hpp"
#include "disquo/weight.hpp"

namespace disquo::verify {

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Grid<double> random_weights(int n, CounterStream& rng, double hi) {
  Grid<double> w(n);
  for (double& v : w.raw()) v = hi * uniform01(rng);
  return w;
}

chain::Distribution random_distribution(std::size_t k, CounterStream& rng) {
  chain::Distribution d(k);
  double s = 0.0;
  for (double& v : d) {
    v = -std::log(1.0 - uniform01(rng));  // exponential draws give a uniform point on the simplex
    s += v;
  }
  for (double& v : d) v /= s;
  return d;
}

// Collects the worst value of a metric over many instances into one named check.
struct Worst {
  Worst(std::string n, double lim, bool up = true) : name(std::move(n)), limit(lim), upper(up) {}

  std::string name;
  double limit;
  bool upper;  // value must be <= limit
  double value = 0.0;
  bool seen = false;
  bool failed = false;
  std::string where;

  void add(double v, const std::string& instance) {
    const bool ok = upper ? v <= limit : v >= limit;
    if (!seen || (upper ? v > value : v < value)) {
      value = v;
      if (!failed) where = instance;
    }
    if (!ok && !failed) {
      failed = true;
      where = instance;
    }
    seen = true;
  }
  Check check() const {
    return {name, seen && !failed,
            fmt(upper ? "worst %.3e (limit %.1e)" : "worst %.3e (floor %.1e)", value, limit) +
                (where.empty() ? "" : " at " + where)};
  }
};

std::string describe(const Grid<double>& w) {
  std::string s = "N=" + std::to_string(w.size()) + " W=[";
  for (std::size_t k = 0; k < w.raw().size(); ++k) s += (k ? "," : "") + fmt("%.3g", w.raw()[k]);
  return s + "]";
}

}  // namespace

chain::Distribution saturated_schedule_distribution(const Grid<double>& weights, Fidelity fidelity,
                                                    std::int64_t slots, std::int64_t burn_in,
                                                    std::uint64_t seed) {
  const int n = weights.size();
  const chain::StateSpace space(n);
  SwitchConfig cfg;
  cfg.n_ports = n;
  cfg.fidelity = fidelity;
  cfg.seed = seed;
  cfg.slots = slots + burn_in + 1;
  SwitchState state = init_switch(cfg);
  DisquoOptions opt = disquo_options_from(cfg);
  opt.frozen_weights = weights;
  DisquoScheduler sched(n, opt);
  const PermutationSource perms = default_permutation_source(cfg);

  constexpr int kDepth = 2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < kDepth; ++k) state.enqueue({i, j, 0});

  std::vector<std::int64_t> counts(space.size(), 0);
  std::vector<Packet> arrivals;
  SlotReport rep;
  chain::Matching x(n);
  for (std::int64_t t = 0; t < burn_in + slots; ++t) {
    arrivals.clear();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (state.q(i, j) < kDepth) arrivals.push_back({i, j, t});
    advance_slot(state, arrivals, sched, perms, rep);
    if (t < burn_in) continue;
    for (int i = 0; i < n; ++i) x[i] = state.x.input_side[i] ? *state.x.input_side[i] : -1;
    ++counts[space.index_of(x)];
  }
  chain::Distribution freq(space.size());
  for (std::size_t k = 0; k < freq.size(); ++k) freq[k] = static_cast<double>(counts[k]) / static_cast<double>(slots);
  return freq;
}

Report run(Level level, Mutation mutation) {
  using namespace chain;
  Report report;
  auto& checks = report.checks;
  const double sign = mutation == Mutation::flip_product_form_sign ? -1.0 : 1.0;
  CounterStream rng(hash_key(2024, Stream::mugd, 0x5E));

  {
    const bool ok = StateSpace(1).size() == 2 && StateSpace(2).size() == 7 &&
                    (level == Level::fast || StateSpace(3).size() == 34);
    checks.push_back({"state-count", ok, "|states| for N=1,2" + std::string(level == Level::full ? ",3" : "")});
  }

  std::vector<Grid<double>> instances{Grid<double>(2, {{1.0, 2.0}, {0.5, 1.5}}), Grid<double>(1, 0.0),
                                      Grid<double>(2, 0.0)};
  for (int k = 0; k < 24; ++k) instances.push_back(random_weights(1 + k % 2, rng, 3.0));
  if (level == Level::full)
    for (int k = 0; k < 3; ++k) instances.push_back(random_weights(3, rng, 2.0));

  Worst row_sum{"row-sums", 1e-12}, negative{"nonnegative-entries", 0.0, false};
  Worst stationarity{"product-form-stationary", 1e-10}, solve{"solver-matches-product-form", 1e-10};
  Worst balance{"detailed-balance", 1e-12}, norm{"matrix-norm-equals-emax", 1e-8};
  Worst cheeger{"conductance-bound", 0.0}, mix_bound{"mixing-time-bound", 0.0};
  Worst low_mass{"low-weight-mass-bound", 0.0}, energy{"free-energy-maximizer", 1e-10};
  Worst energy_gap{"free-energy-upper", 1e-12};
  bool connected = true;
  std::string disconnected;

  for (const auto& w : instances) {
    const std::string tag = describe(w);
    const StateSpace space(w.size());
    const TransitionMatrix p = transition_matrix(w, space);
    const Distribution pi = product_form(w, space, sign);

    for (Eigen::Index r = 0; r < p.rows(); ++r) row_sum.add(std::abs(p.row(r).sum() - 1.0), tag);
    negative.add(p.minCoeff(), tag);
    if (!strongly_connected(p)) {
      connected = false;
      disconnected = tag;
      continue;
    }
    stationarity.add(stationarity_residual(p, pi), tag);
    const Distribution solved = stationary_distribution(p);
    double diff = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k) diff = std::max(diff, std::abs(pi[k] - solved[k]));
    solve.add(diff, tag);
    balance.add(detailed_balance_residual(p, pi), tag);

    const double e_max = spectral_gap_emax(p);
    norm.add(std::abs(matrix_norm(p, solved) - e_max), tag);
    double w_max = 0.0;
    for (double v : w.raw()) w_max = std::max(w_max, v);
    const int n = w.size();
    mix_bound.add(mixing_time(p) - mugd_mixing_bound(n * n, w_max), tag);
    if (space.size() <= kMaxConductanceStates) {
      const double phi = conductance(p, solved);
      cheeger.add(e_max - (1.0 - phi * phi / 2.0), tag);
    } else {
      const ConductanceEstimate est = conductance_sampled(p, solved, 4096, 7);
      cheeger.add(std::max(e_max - (1.0 - est.lower * est.lower / 2.0), est.lower - est.upper), tag);
    }
    for (double eps : {0.1, 0.5, 0.9}) {
      const LowWeightMass lw = low_weight_mass(w, eps, space);
      if (lw.bound) low_mass.add(lw.mass - *lw.bound, tag);
    }
    std::vector<double> t(space.size());
    for (std::size_t k = 0; k < space.size(); ++k) t[k] = space.weight_of(k, w);
    const double log_z = log_partition(w, space);
    energy.add(std::abs(free_energy(free_energy_maximizer(t), t) - log_z), tag);
    for (int s = 0; s < 100; ++s) energy_gap.add(free_energy(random_distribution(space.size(), rng), t) - log_z, tag);
  }
  checks.push_back({"irreducible", connected, connected ? "all instances strongly connected" : disconnected});
  for (const Worst* c : {&row_sum, &negative, &stationarity, &solve, &balance, &norm, &cheeger, &mix_bound,
                         &low_mass, &energy, &energy_gap})
    checks.push_back(c->check());

  {
    // The residual detector must see a 1e-3 perturbation.
    const Grid<double> w(2, {{1.0, 2.0}, {0.5, 1.5}});
    const StateSpace space(2);
    TransitionMatrix p = transition_matrix(w, space);
    const Distribution pi = product_form(w, space);
    // Perturb an off-diagonal entry in the row of the most likely state; the
    // diagonal absorbs the change so the row still sums to 1.
    const auto x = static_cast<Eigen::Index>(std::max_element(pi.begin(), pi.end()) - pi.begin());
    const Eigen::Index y = x == 0 ? 1 : 0;
    p(x, y) += 1e-3;
    p(x, x) -= 1e-3;
    const double r = detailed_balance_residual(p, pi);
    checks.push_back({"detailed-balance-sensitivity", r >= 1e-4, fmt("residual %.3e after a 1e-3 perturbation", r)});
  }
  {
    Worst chi{"chi2-dominates-tv", 0.0};
    for (int s = 0; s < 1000; ++s) {
      const Distribution mu = random_distribution(7, rng), nu = random_distribution(7, rng);
      chi.add(2.0 * tv_distance(mu, nu) - chi2_distance(nu, mu), "random pair " + std::to_string(s));
    }
    checks.push_back(chi.check());
  }
  {
    Worst fp{"weight-slope-ceiling", 1e-9};
    for (double e = -6.0; e <= 12.0; e += 0.05) {
      const double x = std::pow(10.0, e);
      fp.add(f_prime(x) - 1.0 / (1.0 + x), fmt("x=%.3g", x));
    }
    fp.add(f_prime(0.0) - 1.0, "x=0");
    checks.push_back(fp.check());
  }
  {
    const auto m = mixing_slots(0.5, 0.25, 0.01);
    checks.push_back({"mixing-slots-formula", m == 8, "e_max=0.5 pi_min=0.25 delta=0.01 -> " + std::to_string(m)});
  }

  if (level == Level::full) {
    {
      // chi2 decay from every point mass, N=2, W=0.
      const Grid<double> w(2, 0.0);
      const StateSpace space(2);
      const TransitionMatrix p = transition_matrix(w, space);
      const Distribution pi = product_form(w, space, sign);
      const double e_max = spectral_gap_emax(p);
      Worst decay{"chi2-decay", 1e-12};
      for (std::size_t s = 0; s < space.size(); ++s) {
        Distribution mu(space.size(), 0.0);
        mu[s] = 1.0;
        const double start = chi2_distance(mu, pi);
        for (int tau = 1; tau <= 50; ++tau) {
          mu = propagate(mu, p);
          decay.add(chi2_distance(mu, pi) - std::pow(e_max, tau) * start, "start state " + std::to_string(s));
        }
      }
      checks.push_back(decay.check());
    }
    {
      Worst mc{"mugd-sampler-tv", 0.02};
      std::vector<Grid<double>> ws{Grid<double>(2, 0.0), Grid<double>(2, {{1.0, 2.0}, {0.5, 1.5}}),
                                   random_weights(3, rng, 1.5)};
      std::uint64_t seed = 11;
      for (const auto& w : ws) {
        const StateSpace space(w.size());
        const Distribution emp = simulate_mugd(w, space, 1000000, seed++, 10000);
        mc.add(tv_distance(emp, product_form(w, space, sign)), describe(w));
      }
      checks.push_back(mc.check());
    }
    {
      const Grid<double> w(2, {{1.0, 2.0}, {0.5, 1.5}});
      const StateSpace space(2);
      const Distribution target = product_form(w, space, sign);
      const double oracle = tv_distance(saturated_schedule_distribution(w, Fidelity::oracle, 500000, 10000, 5), target);
      checks.push_back({"switch-oracle-tv", oracle <= 0.02, fmt("TV %.4f (limit 0.02)", oracle)});
      const double cons =
          tv_distance(saturated_schedule_distribution(w, Fidelity::consistent, 500000, 10000, 5), target);
      checks.push_back({"switch-consistent-tv", cons <= 0.10, fmt("TV %.4f (limit 0.10)", cons)});
    }
  }
  return report;
}

}  // namespace disquo::verify
