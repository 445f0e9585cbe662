#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "disquo/baselines.hpp"
#include "disquo/experiment.hpp"
#include "disquo/metrics.hpp"

using namespace disquo;
using namespace disquo::metrics;

TEST_CASE("queue norm") {
  CHECK(queue_norm(Grid<std::int64_t>(3, 0)) == 0.0);
  CHECK(queue_norm(Grid<std::int64_t>(2, {{3, 4}, {0, 0}})) == 5.0);
  CHECK(queue_norm(VoqMatrix(4)) == 0.0);

  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(0, 1000);
  for (int t = 0; t < 200; ++t) {
    Grid<std::int64_t> q(4);
    VoqMatrix voq(4);
    long double sq = 0.0L;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        q(i, j) = d(rng);
        sq += static_cast<long double>(q(i, j)) * q(i, j);
        for (int k = 0; k < q(i, j) % 7; ++k) voq.at(i, j).push_back({i, j, 0});
      }
    CHECK(std::abs(queue_norm(q) - static_cast<double>(std::sqrt(sq))) <= 1e-12 * static_cast<double>(std::sqrt(sq)));
    double small = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) small += static_cast<double>((q(i, j) % 7) * (q(i, j) % 7));
    CHECK(queue_norm(voq) == doctest::Approx(std::sqrt(small)).epsilon(1e-12));
  }
  const std::vector<double> v{1.0, 2.0, 2.0};
  CHECK(queue_norm(std::span<const double>(v)) == 3.0);
}

TEST_CASE("weight ratio") {
  const Grid<double> w(2, {{3.0, 1.0}, {2.0, 4.0}});
  CHECK(weight_ratio({{0, 0}, {1, 1}}, w) == 1.0);
  CHECK(weight_ratio({}, w) == 0.0);
  CHECK(weight_ratio({{0, 1}, {1, 0}}, w) == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
  CHECK(weight_ratio({}, Grid<double>(2, 0.0)) == 1.0);
  CHECK(weight_ratio({{1, 1}}, w) == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("delay statistics") {
  SUBCASE("mean and variance against a direct computation") {
    DelayStats s(10, 0, 1000);
    std::vector<double> xs;
    std::mt19937_64 rng(3);
    std::geometric_distribution<int> g(0.2);
    for (Slot t = 0; t < 1000; ++t) {
      const int x = g(rng);
      s.record(x, t);
      xs.push_back(x);
    }
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= xs.size() - 1;
    CHECK(s.count() == 1000);
    CHECK(s.mean() == doctest::Approx(mean).epsilon(1e-12));
    CHECK(s.variance() == doctest::Approx(var).epsilon(1e-10));
    CHECK(s.filled_batches() == 10);
    REQUIRE(s.ci95().has_value());
    CHECK(*s.ci95() > 0.0);
  }
  SUBCASE("arrivals outside the window are ignored") {
    DelayStats s(4, 100, 200);
    s.record(5, 99);
    s.record(5, 200);
    CHECK(s.count() == 0);
    CHECK(!s.ci95().has_value());
    s.record(3, 100);
    CHECK(s.count() == 1);
    CHECK(s.filled_batches() == 1);
    CHECK(!s.ci95().has_value());
  }
  SUBCASE("merge is associative and order-independent") {
    DelayStats a(6, 0, 600), b(6, 0, 600), c(6, 0, 600), all(6, 0, 600);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> d(0, 50);
    for (Slot t = 0; t < 600; ++t) {
      const int x = d(rng);
      (t % 3 == 0 ? a : t % 3 == 1 ? b : c).record(x, t);
      all.record(x, t);
    }
    DelayStats ab = a;
    ab.merge(b);
    ab.merge(c);
    DelayStats bc = b;
    bc.merge(c);
    DelayStats a_bc = a;
    a_bc.merge(bc);
    DelayStats cba = c;
    cba.merge(b);
    cba.merge(a);
    for (const DelayStats* m : {&ab, &a_bc, &cba}) {
      CHECK(m->count() == all.count());
      CHECK(m->mean() == doctest::Approx(all.mean()).epsilon(1e-12));
      CHECK(m->variance() == doctest::Approx(all.variance()).epsilon(1e-12));
      CHECK(*m->ci95() == doctest::Approx(*all.ci95()).epsilon(1e-12));
    }
    CHECK_THROWS_AS(a.merge(DelayStats(6, 0, 700)), ConfigError);
  }
  SUBCASE("interval narrows as packets accumulate") {
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> e(0.1);
    double prev = 1e300;
    for (Slot n : {300, 3000, 30000, 300000}) {
      DelayStats s(30, 0, n);
      for (Slot t = 0; t < n; ++t) s.record(static_cast<Slot>(e(rng)), t);
      REQUIRE(s.ci95().has_value());
      CHECK(*s.ci95() < prev);
      prev = *s.ci95();
    }
  }
}

TEST_CASE("stability trend test") {
  StabilityProbe p(10);
  CHECK(p.trend_stable());
  for (double v : {1.0, 1.0, 1.0}) p.push(v, 1);
  CHECK(p.trend_stable());

  StabilityProbe flat;
  for (int k = 0; k < 100; ++k) flat.push(5.0, 5);
  CHECK(flat.trend_stable());
  CHECK(flat.max_norm() == 5.0);
  CHECK(flat.mean_norm() == 5.0);

  StabilityProbe growing;
  for (int k = 0; k < 100; ++k) growing.push(static_cast<double>(k), k);
  CHECK(!growing.trend_stable());  // last quarter ~87 vs second quarter ~37

  StabilityProbe sampled(4);
  VoqMatrix voq(2);
  voq.at(0, 1).push_back({0, 1, 0});
  for (Slot t = 0; t < 10; ++t) sampled.observe(t, voq);
  CHECK(sampled.norms().size() == 3);  // slots 0, 4, 8
  CHECK(sampled.qmax() == std::vector<std::int64_t>{1, 1, 1});
}

TEST_CASE("report with no departures") {
  RunMetrics m(4, 0, 1000, 30, 100);
  const ExperimentReport r = finalize_report(m);
  CHECK(r.throughput == 0.0);
  CHECK(!r.mean_delay.has_value());
  CHECK(!r.delay_ci95.has_value());
  CHECK(r.packets_delivered == 0);
  CHECK(r.per_output_throughput == std::vector<double>(4, 0.0));
}

TEST_CASE("hand-traced two-packet run") {
  // Input 0 holds packets for outputs 0 and 1. RR-RR sends (0,0) in slot 0 and (0,1)
  // in slot 1, each drained in the slot it is sent: delays 0 and 1.
  SwitchConfig c;
  c.n_ports = 2;
  c.scheduler = SchedulerKind::rr_rr;
  SwitchState s = init_switch(c);
  RrRrScheduler rr(2);
  RunMetrics m(2, 0, 4, 2, 1);
  const std::vector<Packet> a{{0, 0, 0}, {0, 1, 0}};
  for (Slot t = 0; t < 4; ++t) {
    const SlotReport rep = advance_slot(s, t == 0 ? std::span<const Packet>(a) : std::span<const Packet>{}, rr);
    for (const auto& d : rep.departed) m.record_departure(d);
  }
  const ExperimentReport r = finalize_report(m);
  CHECK(r.packets_delivered == 2);
  REQUIRE(r.mean_delay.has_value());
  CHECK(*r.mean_delay == 0.5);
  CHECK(r.throughput == doctest::Approx(2.0 / 8.0));
  CHECK(r.per_output_throughput == std::vector<double>{0.25, 0.25});
}

TEST_CASE("weight-ratio fraction and divergences reach the report") {
  RunMetrics m(2, 0, 10, 2, 1);
  m.record_weight_ratio(1.0, 0.1);
  m.record_weight_ratio(0.95, 0.1);
  m.record_weight_ratio(0.5, 0.1);
  m.record_weight_ratio(0.9, 0.1);
  m.divergences = 3;
  const ExperimentReport r = finalize_report(m);
  REQUIRE(r.weight_ratio_frac.has_value());
  CHECK(*r.weight_ratio_frac == 0.75);
  CHECK(r.divergences == 3);
  CHECK(!finalize_report(RunMetrics(2, 0, 10, 2, 1)).weight_ratio_frac.has_value());
}

TEST_CASE("identical seeds give identical reports") {
  experiment::PointConfig p;
  p.n_ports = 4;
  p.load = 0.7;
  p.slots = 20000;
  p.seed = 42;
  p.probe_every = 100;
  for (auto k : {SchedulerKind::disquo, SchedulerKind::rr_rr, SchedulerKind::oq_reference}) {
    p.scheduler = k;
    const auto a = experiment::run_point(p).report;
    const auto b = experiment::run_point(p).report;
    CHECK(a == b);
    CHECK(a.packets_delivered > 0);
    for (double x : a.per_output_throughput) CHECK(x <= 1.0);
  }
  p.scheduler = SchedulerKind::disquo;
  const auto a = experiment::run_point(p).report;
  p.seed = 43;
  CHECK(!(experiment::run_point(p).report == a));
}
