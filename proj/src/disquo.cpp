#include "disquo/disquo.hpp"

#include <algorithm>

#include "disquo/rng.hpp"

namespace disquo {

std::int64_t estimate_qmax(QmaxEstimatorState& est, const Grid<std::int64_t>& queue_lengths, Slot slot) {
  const int n = queue_lengths.size();
  if (static_cast<int>(est.last_reported.size()) != n) est.last_reported.assign(n, 0);
  if (n == 0) return 0;
  const auto card = static_cast<int>(slot % n);
  std::int64_t local = 0;
  for (int j = 0; j < n; ++j) local = std::max(local, queue_lengths(card, j));
  est.last_reported[card] = local;
  est.slot_cursor = slot + 1;
  return *std::max_element(est.last_reported.begin(), est.last_reported.end());
}

std::int64_t estimate_qmax(QmaxEstimatorState& est, const VoqMatrix& voq, Slot slot) {
  const int n = voq.size();
  if (static_cast<int>(est.last_reported.size()) != n) est.last_reported.assign(n, 0);
  if (n == 0) return 0;
  const auto card = static_cast<int>(slot % n);
  std::int64_t local = 0;
  for (int j = 0; j < n; ++j) local = std::max(local, voq.length(card, j));
  est.last_reported[card] = local;
  est.slot_cursor = slot + 1;
  return *std::max_element(est.last_reported.begin(), est.last_reported.end());
}

DisquoOptions disquo_options_from(const SwitchConfig& config) {
  DisquoOptions o;
  o.fidelity = config.fidelity;
  o.weight.mode = config.weight_mode;
  o.weight.epsilon = config.epsilon;
  o.weight.n_ports = config.n_ports;
  o.seed = config.seed;
  o.idle_augmentation = config.idle_augmentation;
  return o;
}

DisquoScheduler::DisquoScheduler(int n_ports, DisquoOptions options)
    : n_(n_ports),
      options_(std::move(options)),
      estimator_(n_ports),
      input_ptr_(n_ports, 0),
      output_ptr_(n_ports, 0),
      joined_(n_ports, -1) {
  options_.weight.n_ports = n_ports;
  if (options_.frozen_weights && options_.frozen_weights->size() != n_ports)
    throw ConfigError("frozen weight grid does not match the switch size");
}

double DisquoScheduler::coin(Slot slot, Port i, Port j) const {
  if (options_.coin) return options_.coin(slot, i, j);
  return crosspoint_coin(options_.seed, slot, i, j);
}

double DisquoScheduler::weight_of(const SwitchState& state, Port i, Port j) const {
  if (options_.frozen_weights) return (*options_.frozen_weights)(i, j);
  return weight(static_cast<double>(state.q(i, j)), static_cast<double>(qmax_), options_.weight);
}

Grid<double> DisquoScheduler::weights(const SwitchState& state) const {
  Grid<double> w(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) w(i, j) = weight_of(state, i, j);
  return w;
}

std::vector<Cell> DisquoScheduler::input_phase(SwitchState& state, const SlotContext& ctx) {
  const Slot slot = ctx.slot();
  switch (options_.weight.mode) {
    case WeightMode::exact_qmax: qmax_ = state.voq.max_length(); break;
    case WeightMode::estimated_qmax: qmax_ = estimate_qmax(estimator_, state.voq, slot); break;
    case WeightMode::local: qmax_ = 0; break;
  }

  auto& in = state.x.input_side;
  const auto& out_prev = state.x.output_side;  // still X(n-1) from the outputs' side
  const bool oracle = options_.fidelity == Fidelity::oracle;
  std::vector<Cell> sends;

  for (Port i = 0; i < n_; ++i) {
    const Port j = ctx.h().output_of[i];
    joined_[i] = -1;

    // Schedule update for the H(n) pair; all other entries of row i carry over.
    if (in[i] == j) {
      if (state.q(i, j) == 0) {
        in[i].reset();  // nothing to signal with: leave
      } else {
        const Activation a = activation_probability(weight_of(state, i, j));
        if (coin(slot, i, j) < a.p_bar) in[i].reset();
      }
    } else if (!in[i]) {
      bool eligible = state.q(i, j) > 0;
      eligible = eligible && (oracle ? !out_prev[j].has_value() : !state.b(i, j));
      if (eligible) {
        const Activation a = activation_probability(weight_of(state, i, j));
        if (coin(slot, i, j) >= a.p_bar) {
          in[i] = j;
          joined_[i] = j;
        }
      }
    }

    // Transmission.
    if (in[i]) {
      const Port k = *in[i];
      if (state.q(i, k) > 0 && !state.b(i, k)) {
        sends.push_back({i, k});
        continue;
      }
      if (!options_.idle_augmentation) continue;
    }
    // Free input: never into CB_ij for the H(n) partner, which would read as a join.
    const Port next = ctx.h_next().output_of[i];
    if (next != j && !state.b(i, next) && state.q(i, next) > 0) {
      sends.push_back({i, next});
      continue;
    }
    for (int step = 0; step < n_; ++step) {
      const Port k = (input_ptr_[i] + step) % n_;
      if (k == j || state.b(i, k) || state.q(i, k) == 0) continue;
      sends.push_back({i, k});
      input_ptr_[i] = (k + 1) % n_;
      break;
    }
  }
  return sends;
}

std::vector<Cell> DisquoScheduler::output_phase(SwitchState& state, const SlotContext& ctx) {
  auto& out = state.x.output_side;
  const auto& in = state.x.input_side;

  if (options_.fidelity == Fidelity::oracle) {
    std::fill(out.begin(), out.end(), std::nullopt);
    for (Port i = 0; i < n_; ++i)
      if (in[i]) out[*in[i]] = i;
  } else {
    for (Port j = 0; j < n_; ++j) {
      const Port i = ctx.h().input_of[j];
      const bool arrived = ctx.sent(i, j);
      if (out[j] == i) {
        if (!arrived) out[j].reset();
      } else if (!out[j]) {
        if (arrived) out[j] = i;
      }
    }
  }

  std::vector<Cell> drains;
  for (Port j = 0; j < n_; ++j) {
    // A matched output never takes CB_hj for its H(n) partner h: a join packet left
    // there is what the input reads as a refusal.
    Port avoid = -1;
    if (out[j]) {
      if (state.b(*out[j], j)) {
        drains.push_back({*out[j], j});
        continue;
      }
      if (!options_.idle_augmentation) continue;
      avoid = ctx.h().input_of[j];
    }
    const Port next = ctx.h_next().input_of[j];
    if (next != avoid && state.b(next, j)) {
      drains.push_back({next, j});
      continue;
    }
    for (int step = 0; step < n_; ++step) {
      const Port k = (output_ptr_[j] + step) % n_;
      if (k == avoid || !state.b(k, j)) continue;
      drains.push_back({k, j});
      output_ptr_[j] = (k + 1) % n_;
      break;
    }
  }
  return drains;
}

void DisquoScheduler::end_slot(SwitchState& state, const SlotContext& /*ctx*/) {
  if (options_.fidelity != Fidelity::consistent) return;
  // Implicit NACK: a signalling packet still sitting in CB_ij means output j did not
  // accept the join.
  for (Port i = 0; i < n_; ++i) {
    const Port j = joined_[i];
    if (j >= 0 && state.b(i, j) && state.x.input_side[i] == j) {
      state.x.input_side[i].reset();
      ++reverted_;
    }
  }
}

}  // namespace disquo
