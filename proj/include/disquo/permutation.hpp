#pragma once

#include <cstdint>
#include <vector>

#include "disquo/common.hpp"

namespace disquo {

/// Input/output permutation H(n): input i is paired with output_of[i].
struct PermutationSchedule {
  std::vector<Port> output_of;
  std::vector<Port> input_of;

  int size() const { return static_cast<int>(output_of.size()); }
  bool contains(Port i, Port j) const { return output_of[i] == j; }

  static PermutationSchedule from_outputs(std::vector<Port> output_of);
  static PermutationSchedule identity(int n);
  friend bool operator==(const PermutationSchedule&, const PermutationSchedule&) = default;
};

/// Uniformly random permutation, a pure function of (seed, slot, n_ports).
PermutationSchedule permutation(std::uint64_t seed, Slot slot, int n_ports);

bool is_bijection(const std::vector<Port>& output_of);

}  // namespace disquo
