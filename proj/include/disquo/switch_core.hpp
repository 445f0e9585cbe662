#pragma once

// Crosspoint-buffered (CICQ) switch: N x N virtual output queues at the inputs,
// a single-cell buffer at every crosspoint, and a three-phase slot engine.
//
// Slot n:
//   0. arrivals are appended to their VOQs
//   1. every port derives the shared permutation H(n)
//   2. input phase: the scheduler picks at most one VOQ per input to move into
//      an empty crosspoint buffer
//   3. output phase: the scheduler picks at most one occupied crosspoint per
//      output to drain; a drained packet departs the switch in slot n
//
// The engine re-checks every schedule it is handed and throws ProtocolViolation
// on any breach, so a buggy scheduler can never corrupt the state silently.

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "disquo/common.hpp"
#include "disquo/permutation.hpp"
#include "disquo/weight.hpp"

namespace disquo {

enum class SchedulerKind { disquo, mwm, rr_rr, lqf_rr, oq_reference };

/// How DISQUO inputs test whether a join is allowed and how the two views are kept.
///   literal    - buffer-occupancy test only; view divergence is counted, never repaired
///   consistent - literal plus an implicit NACK: a join whose signalling cell is not
///                drained in the same slot is withdrawn by the input
///   oracle     - join test reads the true output state; both views are one matching
enum class Fidelity { literal, consistent, oracle };

struct SwitchConfig {
  int n_ports = 2;
  int buffer_depth = 1;
  SchedulerKind scheduler = SchedulerKind::disquo;
  Fidelity fidelity = Fidelity::consistent;
  WeightMode weight_mode = WeightMode::local;
  double epsilon = 0.05;
  /// DISQUO only: matched ports with nothing to move on their own crosspoint serve others.
  bool idle_augmentation = true;
  std::uint64_t seed = 1;
  Slot slots = 100000;
  Slot warmup_slots = 0;

  /// Throws ConfigError.
  void validate() const;
};

struct Packet {
  Port input = 0;
  Port output = 0;
  Slot arrival_slot = 0;
  friend bool operator==(const Packet&, const Packet&) = default;
};

class VoqMatrix {
 public:
  VoqMatrix() = default;
  explicit VoqMatrix(int n) : n_(n), queues_(static_cast<std::size_t>(n) * n) {}

  int size() const { return n_; }
  std::int64_t length(Port i, Port j) const { return static_cast<std::int64_t>(at(i, j).size()); }
  std::deque<Packet>& at(Port i, Port j) { return queues_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::deque<Packet>& at(Port i, Port j) const {
    return queues_[static_cast<std::size_t>(i) * n_ + j];
  }
  std::int64_t total() const;
  std::int64_t max_length() const;
  Grid<std::int64_t> lengths() const;

 private:
  int n_ = 0;
  std::vector<std::deque<Packet>> queues_;
};

/// Unit crosspoint buffers; cell (i, j) is either empty or holds one packet.
class CrosspointGrid {
 public:
  CrosspointGrid() = default;
  explicit CrosspointGrid(int n) : cells_(n) {}

  int size() const { return cells_.size(); }
  bool occupied(Port i, Port j) const { return cells_(i, j).has_value(); }
  const std::optional<Packet>& at(Port i, Port j) const { return cells_(i, j); }
  std::optional<Packet>& at(Port i, Port j) { return cells_(i, j); }
  std::int64_t total() const;

 private:
  Grid<std::optional<Packet>> cells_;
};

/// The randomized schedule X as each side of the switch believes it to be.
struct DisquoView {
  std::vector<std::optional<Port>> input_side;   // input i -> matched output
  std::vector<std::optional<Port>> output_side;  // output j -> matched input

  explicit DisquoView(int n = 0) : input_side(n), output_side(n) {}
  bool empty() const;
  std::vector<Cell> input_cells() const;
  std::vector<Cell> output_cells() const;
  /// Number of crosspoints on which the two sides disagree.
  int divergence() const;
  friend bool operator==(const DisquoView&, const DisquoView&) = default;
};

struct SwitchState {
  SwitchConfig config;
  Slot slot = 0;
  VoqMatrix voq;
  CrosspointGrid cb;
  DisquoView x;
  std::int64_t injected = 0;
  std::int64_t departed = 0;

  int n() const { return config.n_ports; }
  std::int64_t q(Port i, Port j) const { return voq.length(i, j); }
  bool b(Port i, Port j) const { return cb.occupied(i, j); }

  /// Append a packet to its VOQ and count it as injected.
  void enqueue(const Packet& p);
};

SwitchState init_switch(const SwitchConfig& config);

using PermutationSource = std::function<PermutationSchedule(Slot)>;

/// Read-only view of the slot in progress, handed to scheduler callbacks.
class SlotContext {
 public:
  SlotContext(Slot slot, PermutationSchedule current, const PermutationSource& source, int n)
      : slot_(slot), current_(std::move(current)), source_(&source), sent_(n, 0) {}

  Slot slot() const { return slot_; }
  const PermutationSchedule& h() const { return current_; }
  /// H(n+1), computed on first use.
  const PermutationSchedule& h_next() const;
  /// True iff input i moved a packet into CB_ij during this slot's input phase.
  bool sent(Port i, Port j) const { return sent_(i, j) != 0; }

 private:
  friend struct SlotEngineAccess;
  Slot slot_;
  PermutationSchedule current_;
  const PermutationSource* source_;
  mutable std::optional<PermutationSchedule> next_;
  Grid<std::uint8_t> sent_;
};

/// Two-callback scheduler contract shared by DISQUO and the baselines.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  /// S^I as a list of crosspoints; at most one per input, each into an empty buffer.
  virtual std::vector<Cell> input_phase(SwitchState& state, const SlotContext& ctx) = 0;
  /// S^O as a list of crosspoints; at most one per output, each from an occupied buffer.
  virtual std::vector<Cell> output_phase(SwitchState& state, const SlotContext& ctx) = 0;
  /// Runs after the output phase has been applied.
  virtual void end_slot(SwitchState& /*state*/, const SlotContext& /*ctx*/) {}
};

struct Departure {
  Packet packet;
  Slot departure_slot = 0;
  friend bool operator==(const Departure&, const Departure&) = default;
};

struct SlotReport {
  Slot slot = 0;
  std::vector<Packet> injected;
  std::vector<Cell> to_buffer;
  std::vector<Departure> departed;
  std::vector<std::optional<Port>> x_input_view;
  std::vector<std::optional<Port>> x_output_view;
  int divergence_count = 0;

  /// Stable text rendering, used for byte-level determinism checks.
  std::string serialize() const;
};

/// Shared-seed permutation source used when no override is supplied.
PermutationSource default_permutation_source(const SwitchConfig& config);

/// Run one slot. Throws ProtocolViolation if the scheduler breaks the crossbar rules
/// or ConfigError if an arrival names a port out of range.
SlotReport advance_slot(SwitchState& state, std::span<const Packet> arrivals, Scheduler& scheduler,
                        const PermutationSource& permutations);
SlotReport advance_slot(SwitchState& state, std::span<const Packet> arrivals, Scheduler& scheduler);

/// In-place variant that reuses the report's buffers.
void advance_slot(SwitchState& state, std::span<const Packet> arrivals, Scheduler& scheduler,
                  const PermutationSource& permutations, SlotReport& report);

struct Violation {
  std::string kind;
  std::string detail;
};

/// Empty iff both schedule views are partial matchings, every buffered or queued
/// packet sits at its own crosspoint, and injected = queued + buffered + departed.
std::vector<Violation> validate_state(const SwitchState& state);

}  // namespace disquo
