#include "disquo/permutation.hpp"

#include <numeric>
#include <utility>

#include "disquo/rng.hpp"

namespace disquo {

PermutationSchedule PermutationSchedule::from_outputs(std::vector<Port> output_of) {
  if (!is_bijection(output_of)) throw ConfigError("permutation: mapping is not a bijection");
  PermutationSchedule h;
  h.input_of.assign(output_of.size(), -1);
  for (std::size_t i = 0; i < output_of.size(); ++i) h.input_of[output_of[i]] = static_cast<Port>(i);
  h.output_of = std::move(output_of);
  return h;
}

PermutationSchedule PermutationSchedule::identity(int n) {
  std::vector<Port> out(n);
  std::iota(out.begin(), out.end(), 0);
  return from_outputs(std::move(out));
}

bool is_bijection(const std::vector<Port>& output_of) {
  std::vector<bool> seen(output_of.size(), false);
  for (Port j : output_of) {
    if (j < 0 || j >= static_cast<Port>(output_of.size()) || seen[j]) return false;
    seen[j] = true;
  }
  return true;
}

PermutationSchedule permutation(std::uint64_t seed, Slot slot, int n_ports) {
  PermutationSchedule h;
  h.output_of.resize(n_ports);
  std::iota(h.output_of.begin(), h.output_of.end(), 0);
  CounterStream rng(hash_key(seed, Stream::permutation, slot));
  // Fisher-Yates
  for (int k = n_ports - 1; k > 0; --k) {
    const auto r = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(k) + 1));
    std::swap(h.output_of[k], h.output_of[r]);
  }
  h.input_of.resize(n_ports);
  for (int i = 0; i < n_ports; ++i) h.input_of[h.output_of[i]] = i;
  return h;
}

}  // namespace disquo
