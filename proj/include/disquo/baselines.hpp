#pragma once

// Reference schedulers: maximum weight matching (bufferless), round-robin at both
// sides (RR-RR), longest-queue-first inputs with round-robin outputs (LQF-RR), and
// an ideal output-queued switch.

#include <deque>
#include <span>
#include <vector>

#include "disquo/common.hpp"
#include "disquo/switch_core.hpp"
#include "disquo/weight.hpp"

namespace disquo {

struct AssignmentResult {
  std::vector<Port> output_of;  // perfect matching as a permutation
  double weight = 0.0;
};

/// Maximum total weight over all matchings of a square, non-negative weight grid.
/// Among optimal matchings the lexicographically smallest permutation is returned.
AssignmentResult mwm_schedule(const Grid<double>& weights);

/// Optimal value only; cheaper than mwm_schedule (no tie-break pass).
double mwm_weight(const Grid<double>& weights);

/// Bufferless crossbar MWM: every matched pair with a waiting packet crosses in one slot.
class MwmScheduler final : public Scheduler {
 public:
  MwmScheduler(int n_ports, WeightParams params) : n_(n_ports), params_(params) {}
  std::vector<Cell> input_phase(SwitchState& state, const SlotContext& ctx) override;
  std::vector<Cell> output_phase(SwitchState& state, const SlotContext& ctx) override;

 private:
  int n_;
  WeightParams params_;
};

struct RrPointers {
  std::vector<Port> input_ptr;
  std::vector<Port> output_ptr;
  explicit RrPointers(int n = 0) : input_ptr(n, 0), output_ptr(n, 0) {}
};

/// S^I for RR-RR: each input serves the first non-empty VOQ with an empty buffer at or after its pointer.
std::vector<Cell> rr_input_schedule(const SwitchState& state, RrPointers& ptrs);
/// S^I for LQF: longest VOQ with an empty buffer, ties to the lowest output index.
std::vector<Cell> lqf_input_schedule(const SwitchState& state);
/// S^O for both: each output drains the first occupied buffer at or after its pointer.
std::vector<Cell> rr_output_schedule(const SwitchState& state, RrPointers& ptrs);

class RrRrScheduler final : public Scheduler {
 public:
  explicit RrRrScheduler(int n_ports) : ptrs_(n_ports) {}
  std::vector<Cell> input_phase(SwitchState& state, const SlotContext& ctx) override;
  std::vector<Cell> output_phase(SwitchState& state, const SlotContext& ctx) override;
  const RrPointers& pointers() const { return ptrs_; }

 private:
  RrPointers ptrs_;
};

class LqfRrScheduler final : public Scheduler {
 public:
  explicit LqfRrScheduler(int n_ports) : ptrs_(n_ports) {}
  std::vector<Cell> input_phase(SwitchState& state, const SlotContext& ctx) override;
  std::vector<Cell> output_phase(SwitchState& state, const SlotContext& ctx) override;

 private:
  RrPointers ptrs_;
};

/// Output-queued reference switch: arrivals reach their output FIFO instantly and
/// every non-empty FIFO emits its head packet once per slot.
struct OqState {
  std::vector<std::deque<Packet>> fifo;
  Slot slot = 0;
  explicit OqState(int n_ports = 0) : fifo(n_ports) {}
  std::int64_t backlog() const;
};

std::vector<Departure> oq_slot(OqState& oq, std::span<const Packet> arrivals);

}  // namespace disquo
