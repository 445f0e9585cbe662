#include "disquo/switch_core.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace disquo {

struct SlotEngineAccess {
  static void mark_sent(SlotContext& ctx, Port i, Port j) { ctx.sent_(i, j) = 1; }
};

void SwitchConfig::validate() const {
  if (n_ports < 1) throw ConfigError("n_ports must be >= 1");
  if (buffer_depth != 1) throw ConfigError("buffer_depth is fixed at 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (slots < 1) throw ConfigError("slots must be positive");
  if (warmup_slots < 0) throw ConfigError("warmup_slots must be non-negative");
  if (slots <= warmup_slots) throw ConfigError("slots must exceed warmup_slots");
}

std::int64_t VoqMatrix::total() const {
  std::int64_t s = 0;
  for (const auto& q : queues_) s += static_cast<std::int64_t>(q.size());
  return s;
}

std::int64_t VoqMatrix::max_length() const {
  std::int64_t m = 0;
  for (const auto& q : queues_) m = std::max<std::int64_t>(m, static_cast<std::int64_t>(q.size()));
  return m;
}

Grid<std::int64_t> VoqMatrix::lengths() const {
  Grid<std::int64_t> g(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g(i, j) = length(i, j);
  return g;
}

std::int64_t CrosspointGrid::total() const {
  std::int64_t s = 0;
  for (const auto& c : cells_.raw()) s += c.has_value() ? 1 : 0;
  return s;
}

bool DisquoView::empty() const {
  auto none = [](const auto& v) { return !v.has_value(); };
  return std::all_of(input_side.begin(), input_side.end(), none) &&
         std::all_of(output_side.begin(), output_side.end(), none);
}

std::vector<Cell> DisquoView::input_cells() const {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < input_side.size(); ++i)
    if (input_side[i]) cells.push_back({static_cast<Port>(i), *input_side[i]});
  return cells;
}

std::vector<Cell> DisquoView::output_cells() const {
  std::vector<Cell> cells;
  for (std::size_t j = 0; j < output_side.size(); ++j)
    if (output_side[j]) cells.push_back({*output_side[j], static_cast<Port>(j)});
  std::sort(cells.begin(), cells.end());
  return cells;
}

int DisquoView::divergence() const {
  int count = 0;
  for (std::size_t i = 0; i < input_side.size(); ++i) {
    if (input_side[i]) {
      const auto j = static_cast<std::size_t>(*input_side[i]);
      if (output_side[j] != static_cast<Port>(i)) ++count;
    }
  }
  for (std::size_t j = 0; j < output_side.size(); ++j) {
    if (output_side[j]) {
      const auto i = static_cast<std::size_t>(*output_side[j]);
      if (input_side[i] != static_cast<Port>(j)) ++count;
    }
  }
  return count;
}

void SwitchState::enqueue(const Packet& p) {
  if (p.input < 0 || p.input >= n() || p.output < 0 || p.output >= n())
    throw ConfigError("packet addresses a port outside the switch");
  voq.at(p.input, p.output).push_back(p);
  ++injected;
}

SwitchState init_switch(const SwitchConfig& config) {
  config.validate();
  SwitchState s;
  s.config = config;
  s.voq = VoqMatrix(config.n_ports);
  s.cb = CrosspointGrid(config.n_ports);
  s.x = DisquoView(config.n_ports);
  return s;
}

const PermutationSchedule& SlotContext::h_next() const {
  if (!next_) next_ = (*source_)(slot_ + 1);
  return *next_;
}

PermutationSource default_permutation_source(const SwitchConfig& config) {
  return [seed = config.seed, n = config.n_ports](Slot slot) { return permutation(seed, slot, n); };
}

namespace {

std::string cell_name(Cell c) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "(%d,%d)", c.input, c.output);
  return buf;
}

}  // namespace

void advance_slot(SwitchState& state, std::span<const Packet> arrivals, Scheduler& scheduler,
                  const PermutationSource& permutations, SlotReport& report) {
  const int n = state.n();
  const Slot slot = state.slot;

  report.slot = slot;
  report.injected.clear();
  report.to_buffer.clear();
  report.departed.clear();

  for (const Packet& p : arrivals) {
    state.enqueue(p);
    report.injected.push_back(p);
  }

  SlotContext ctx(slot, permutations(slot), permutations, n);
  if (ctx.h().size() != n) throw ProtocolViolation("permutation size does not match the switch");

  // Input phase: at most one cell per input, only into empty buffers.
  const std::vector<Cell> s_in = scheduler.input_phase(state, ctx);
  std::vector<std::uint8_t> input_used(n, 0);
  for (const Cell& c : s_in) {
    if (c.input < 0 || c.input >= n || c.output < 0 || c.output >= n)
      throw ProtocolViolation("input schedule names a port outside the switch");
    if (input_used[c.input]++) throw ProtocolViolation("input " + std::to_string(c.input) + " transmits twice");
    if (state.cb.occupied(c.input, c.output))
      throw ProtocolViolation("write to occupied crosspoint buffer " + cell_name(c));
    auto& q = state.voq.at(c.input, c.output);
    if (q.empty()) throw ProtocolViolation("transmission from empty VOQ " + cell_name(c));
    state.cb.at(c.input, c.output) = q.front();
    q.pop_front();
    SlotEngineAccess::mark_sent(ctx, c.input, c.output);
    report.to_buffer.push_back(c);
  }

  // Output phase: at most one cell per output, only from occupied buffers.
  const std::vector<Cell> s_out = scheduler.output_phase(state, ctx);
  std::vector<std::uint8_t> output_used(n, 0);
  for (const Cell& c : s_out) {
    if (c.input < 0 || c.input >= n || c.output < 0 || c.output >= n)
      throw ProtocolViolation("output schedule names a port outside the switch");
    if (output_used[c.output]++)
      throw ProtocolViolation("output " + std::to_string(c.output) + " drains twice");
    auto& buffer = state.cb.at(c.input, c.output);
    if (!buffer) throw ProtocolViolation("drain of empty crosspoint buffer " + cell_name(c));
    report.departed.push_back({*buffer, slot});
    buffer.reset();
    ++state.departed;
  }

  scheduler.end_slot(state, ctx);

  report.x_input_view = state.x.input_side;
  report.x_output_view = state.x.output_side;
  report.divergence_count = state.x.divergence();
  ++state.slot;
}

SlotReport advance_slot(SwitchState& state, std::span<const Packet> arrivals, Scheduler& scheduler,
                        const PermutationSource& permutations) {
  SlotReport report;
  advance_slot(state, arrivals, scheduler, permutations, report);
  return report;
}

SlotReport advance_slot(SwitchState& state, std::span<const Packet> arrivals, Scheduler& scheduler) {
  return advance_slot(state, arrivals, scheduler, default_permutation_source(state.config));
}

std::string SlotReport::serialize() const {
  std::ostringstream os;
  auto view = [&os](const std::vector<std::optional<Port>>& v) {
    for (const auto& e : v) os << (e ? std::to_string(*e) : std::string("-")) << ',';
  };
  os << "slot " << slot << "\ninjected";
  for (const auto& p : injected) os << ' ' << p.input << '>' << p.output << '@' << p.arrival_slot;
  os << "\nto_buffer";
  for (const auto& c : to_buffer) os << ' ' << c.input << '>' << c.output;
  os << "\ndeparted";
  for (const auto& d : departed)
    os << ' ' << d.packet.input << '>' << d.packet.output << '@' << d.packet.arrival_slot << ':'
       << d.departure_slot;
  os << "\nx_in ";
  view(x_input_view);
  os << "\nx_out ";
  view(x_output_view);
  os << "\ndivergence " << divergence_count << '\n';
  return os.str();
}

std::vector<Violation> validate_state(const SwitchState& state) {
  std::vector<Violation> out;
  const int n = state.n();

  auto check_side = [&](const std::vector<std::optional<Port>>& side, const char* name) {
    if (static_cast<int>(side.size()) != n) {
      out.push_back({"view-size", std::string(name) + " view has wrong size"});
      return;
    }
    std::vector<int> hits(n, 0);
    for (int k = 0; k < n; ++k) {
      if (!side[k]) continue;
      const Port other = *side[k];
      if (other < 0 || other >= n) {
        out.push_back({"view-range", std::string(name) + " view entry out of range"});
        continue;
      }
      if (++hits[other] == 2)
        out.push_back({"matching", std::string(name) + " view: port " + std::to_string(other) +
                                       " matched more than once"});
    }
  };
  check_side(state.x.input_side, "input");
  check_side(state.x.output_side, "output");

  std::int64_t queued = 0, buffered = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (const Packet& p : state.voq.at(i, j)) {
        if (p.input != i || p.output != j)
          out.push_back({"misplaced", "packet in VOQ " + cell_name({i, j}) + " addressed elsewhere"});
      }
      queued += state.voq.length(i, j);
      if (const auto& c = state.cb.at(i, j)) {
        ++buffered;
        if (c->input != i || c->output != j)
          out.push_back({"misplaced", "packet in CB " + cell_name({i, j}) + " addressed elsewhere"});
      }
    }
  }
  if (state.injected != queued + buffered + state.departed) {
    out.push_back({"conservation", "injected " + std::to_string(state.injected) + " != queued " +
                                       std::to_string(queued) + " + buffered " + std::to_string(buffered) +
                                       " + departed " + std::to_string(state.departed)});
  }
  return out;
}

}  // namespace disquo
