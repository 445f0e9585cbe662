#pragma once

// DISQUO: distributed Glauber-style scheduling over the crosspoint buffers.
//
// Each slot only the crosspoints in the shared permutation H(n) may join or leave
// the schedule X. Inputs decide (they own the queue lengths) and signal their
// decision to outputs implicitly: a packet written into CB_ij means "(i,j) is in
// X(n)", no packet means "(i,j) is not". Ports left unmatched by X serve any
// eligible crosspoint, preferring their H(n+1) partner. With idle_augmentation a
// matched port whose own crosspoint has nothing to move does the same, but keeps
// clear of its H(n) partner so no signal is forged or swallowed.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "disquo/common.hpp"
#include "disquo/switch_core.hpp"
#include "disquo/weight.hpp"

namespace disquo {

/// Broadcast estimate of the largest VOQ: in slot n, linecard (n mod N) publishes
/// its local maximum; the estimate is the max over the latest report of every card.
struct QmaxEstimatorState {
  std::vector<std::int64_t> last_reported;
  Slot slot_cursor = 0;

  explicit QmaxEstimatorState(int n_ports = 0) : last_reported(n_ports, 0) {}
};

std::int64_t estimate_qmax(QmaxEstimatorState& est, const Grid<std::int64_t>& queue_lengths, Slot slot);
std::int64_t estimate_qmax(QmaxEstimatorState& est, const VoqMatrix& voq, Slot slot);

struct DisquoOptions {
  Fidelity fidelity = Fidelity::consistent;
  WeightParams weight{};
  std::uint64_t seed = 1;
  /// Fixed per-crosspoint weights that replace the queue-derived ones.
  std::optional<Grid<double>> frozen_weights;
  /// Uniform [0,1) draw for crosspoint (i, j) in slot n; defaults to the shared counter-based coin.
  std::function<double(Slot, Port, Port)> coin;
  /// Let a matched port whose own crosspoint has nothing to move serve others as a
  /// free port would, avoiding the column (row) it is paired with in H(n).
  bool idle_augmentation = true;
};

DisquoOptions disquo_options_from(const SwitchConfig& config);

class DisquoScheduler final : public Scheduler {
 public:
  DisquoScheduler(int n_ports, DisquoOptions options);

  std::vector<Cell> input_phase(SwitchState& state, const SlotContext& ctx) override;
  std::vector<Cell> output_phase(SwitchState& state, const SlotContext& ctx) override;
  void end_slot(SwitchState& state, const SlotContext& ctx) override;

  const DisquoOptions& options() const { return options_; }

  /// Q_max figure used for weights in the current slot (true, estimated or unused).
  std::int64_t qmax_in_use() const { return qmax_; }

  /// W(n) for every crosspoint under the current slot's Q_max figure.
  Grid<double> weights(const SwitchState& state) const;

  /// Joins withdrawn by the implicit NACK since construction.
  std::int64_t reverted_joins() const { return reverted_; }

 private:
  double weight_of(const SwitchState& state, Port i, Port j) const;
  double coin(Slot slot, Port i, Port j) const;

  int n_;
  DisquoOptions options_;
  QmaxEstimatorState estimator_;
  std::int64_t qmax_ = 0;
  std::vector<Port> input_ptr_;
  std::vector<Port> output_ptr_;
  std::vector<Port> joined_;  // column joined this slot, or -1
  std::int64_t reverted_ = 0;
};

}  // namespace disquo
