#pragma once

// Self-check suite over the exact chain machinery and the switch realization of it.
// fast: N <= 2 exact checks. full: adds N = 3 and Monte Carlo comparisons.

#include <cstdint>
#include <string>
#include <vector>

#include "disquo/chain.hpp"
#include "disquo/switch_core.hpp"

namespace disquo::verify {

enum class Level { fast, full };

enum class Mutation {
  none,
  flip_product_form_sign,  // pi(X) ~ exp(-W(X)); detailed balance must then fail
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::vector<Check> checks;
  bool all_passed() const;
};

Report run(Level level, Mutation mutation = Mutation::none);

/// Empirical law of the input-side schedule of a DISQUO switch whose VOQs are kept
/// saturated (each VOQ topped back up to two packets every slot) and whose weights
/// are frozen. Frequencies are over `slots` slots after `burn_in`.
chain::Distribution saturated_schedule_distribution(const Grid<double>& weights, Fidelity fidelity,
                                                    std::int64_t slots, std::int64_t burn_in,
                                                    std::uint64_t seed);

}  // namespace disquo::verify
