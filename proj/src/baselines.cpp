#include "disquo/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace disquo {
namespace {

struct Hungarian {
  std::vector<Port> output_of;
  std::vector<double> u, v;  // row and column potentials: cost(i,j) - u[i] - v[j] >= 0
};

// Min-cost assignment on cost = -weight (O(N^3) shortest augmenting paths).
Hungarian solve_assignment(const Grid<double>& weights) {
  const int n = weights.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weights(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Hungarian h;
  h.output_of.assign(n, -1);
  for (int j = 1; j <= n; ++j) h.output_of[p[j] - 1] = j - 1;
  h.u.assign(u.begin() + 1, u.end());
  h.v.assign(v.begin() + 1, v.end());
  return h;
}

double matching_weight(const Grid<double>& w, const std::vector<Port>& output_of) {
  double s = 0.0;
  for (std::size_t i = 0; i < output_of.size(); ++i) s += w(static_cast<int>(i), output_of[i]);
  return s;
}

}  // namespace

double mwm_weight(const Grid<double>& weights) {
  if (weights.size() == 0) return 0.0;
  return matching_weight(weights, solve_assignment(weights).output_of);
}

AssignmentResult mwm_schedule(const Grid<double>& weights) {
  const int n = weights.size();
  AssignmentResult result;
  if (n == 0) return result;
  for (double w : weights.raw())
    if (!std::isfinite(w) || w < 0.0) throw DomainError("mwm_schedule: weights must be finite and >= 0");

  Hungarian h = solve_assignment(weights);
  double scale = 1.0;
  for (double w : weights.raw()) scale = std::max(scale, std::abs(w));
  const double tol = 1e-9 * scale * n;

  // With an optimal dual fixed, the optimal assignments are exactly the perfect
  // matchings of the tight-edge subgraph. Walk rows in order and move each one to
  // the smallest column that still admits a tight completion.
  Grid<std::uint8_t> tight(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tight(i, j) = std::abs(-weights(i, j) - h.u[i] - h.v[j]) <= tol;

  std::vector<Port>& out = h.output_of;
  std::vector<Port> in(n);
  for (int i = 0; i < n; ++i) in[out[i]] = i;
  std::vector<std::uint8_t> col_fixed(n, 0), visited(n);

  // Re-seat row r on some column other than `forbidden`, ending at column `target`.
  auto reseat = [&](auto&& self, int r, int forbidden, int target, int first_free_row) -> bool {
    for (int k = 0; k < n; ++k) {
      if (!tight(r, k) || col_fixed[k] || visited[k] || k == forbidden) continue;
      visited[k] = 1;
      if (k == target || (in[k] >= first_free_row && self(self, in[k], forbidden, target, first_free_row))) {
        out[r] = k;
        in[k] = r;
        return true;
      }
    }
    return false;
  };

  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < out[i]; ++c) {
      if (col_fixed[c] || !tight(i, c)) continue;
      const int old = out[i];
      const int holder = in[c];
      std::fill(visited.begin(), visited.end(), 0);
      visited[c] = 1;
      std::vector<Port> out_save = out, in_save = in;
      if (reseat(reseat, holder, c, old, i + 1)) {
        out[i] = c;
        in[c] = i;
        break;
      }
      out = std::move(out_save);
      in = std::move(in_save);
    }
    col_fixed[out[i]] = 1;
  }

  result.output_of = out;
  result.weight = matching_weight(weights, out);
  return result;
}

std::vector<Cell> MwmScheduler::input_phase(SwitchState& state, const SlotContext& /*ctx*/) {
  const double qmax = static_cast<double>(state.voq.max_length());
  Grid<double> w(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) w(i, j) = weight(static_cast<double>(state.q(i, j)), qmax, params_);
  const AssignmentResult m = mwm_schedule(w);
  std::vector<Cell> sends;
  for (Port i = 0; i < n_; ++i) {
    const Port j = m.output_of[i];
    if (state.q(i, j) > 0 && !state.b(i, j)) sends.push_back({i, j});
  }
  return sends;
}

std::vector<Cell> MwmScheduler::output_phase(SwitchState& state, const SlotContext& /*ctx*/) {
  std::vector<Cell> drains;
  for (Port j = 0; j < n_; ++j)
    for (Port i = 0; i < n_; ++i)
      if (state.b(i, j)) {
        drains.push_back({i, j});
        break;
      }
  return drains;
}

std::vector<Cell> rr_input_schedule(const SwitchState& state, RrPointers& ptrs) {
  const int n = state.n();
  std::vector<Cell> sends;
  for (Port i = 0; i < n; ++i) {
    for (int step = 0; step < n; ++step) {
      const Port j = (ptrs.input_ptr[i] + step) % n;
      if (state.q(i, j) > 0 && !state.b(i, j)) {
        sends.push_back({i, j});
        ptrs.input_ptr[i] = (j + 1) % n;
        break;
      }
    }
  }
  return sends;
}

std::vector<Cell> lqf_input_schedule(const SwitchState& state) {
  const int n = state.n();
  std::vector<Cell> sends;
  for (Port i = 0; i < n; ++i) {
    Port best = -1;
    std::int64_t best_len = 0;
    for (Port j = 0; j < n; ++j) {
      const std::int64_t len = state.q(i, j);
      if (len > best_len && !state.b(i, j)) {
        best = j;
        best_len = len;
      }
    }
    if (best >= 0) sends.push_back({i, best});
  }
  return sends;
}

std::vector<Cell> rr_output_schedule(const SwitchState& state, RrPointers& ptrs) {
  const int n = state.n();
  std::vector<Cell> drains;
  for (Port j = 0; j < n; ++j) {
    for (int step = 0; step < n; ++step) {
      const Port i = (ptrs.output_ptr[j] + step) % n;
      if (state.b(i, j)) {
        drains.push_back({i, j});
        ptrs.output_ptr[j] = (i + 1) % n;
        break;
      }
    }
  }
  return drains;
}

std::vector<Cell> RrRrScheduler::input_phase(SwitchState& state, const SlotContext&) {
  return rr_input_schedule(state, ptrs_);
}
std::vector<Cell> RrRrScheduler::output_phase(SwitchState& state, const SlotContext&) {
  return rr_output_schedule(state, ptrs_);
}
std::vector<Cell> LqfRrScheduler::input_phase(SwitchState& state, const SlotContext&) {
  return lqf_input_schedule(state);
}
std::vector<Cell> LqfRrScheduler::output_phase(SwitchState& state, const SlotContext&) {
  return rr_output_schedule(state, ptrs_);
}

std::int64_t OqState::backlog() const {
  std::int64_t s = 0;
  for (const auto& f : fifo) s += static_cast<std::int64_t>(f.size());
  return s;
}

std::vector<Departure> oq_slot(OqState& oq, std::span<const Packet> arrivals) {
  for (const Packet& p : arrivals) {
    if (p.output < 0 || p.output >= static_cast<Port>(oq.fifo.size()))
      throw ConfigError("packet addresses a port outside the switch");
    oq.fifo[p.output].push_back(p);
  }
  std::vector<Departure> out;
  for (auto& f : oq.fifo) {
    if (f.empty()) continue;
    out.push_back({f.front(), oq.slot});
    f.pop_front();
  }
  ++oq.slot;
  return out;
}

}  // namespace disquo
