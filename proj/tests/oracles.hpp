#pragma once

// Independent reference computations used by the tests. Nothing here calls into
// the library's chain code.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "disquo/common.hpp"

namespace oracle {

using disquo::Cell;
using disquo::Grid;

inline double sigmoid(double w) { return std::exp(w) / (1.0 + std::exp(w)); }

inline std::set<Cell> as_set(const std::vector<int>& m) {
  std::set<Cell> s;
  for (int i = 0; i < static_cast<int>(m.size()); ++i)
    if (m[i] >= 0) s.insert({i, m[i]});
  return s;
}

/// Sum over permutations H containing the symmetric difference of X and X', of
/// (1/N!) times: 1-p per leave, p per join, p per kept pair inside H, and 1-p per
/// H pair outside X u X' with no neighbour in X u X'.
inline double transition_probability(const Grid<double>& w, const std::vector<int>& x, const std::vector<int>& y) {
  const int n = w.size();
  const auto sx = as_set(x), sy = as_set(y);
  std::set<Cell> uni = sx;
  uni.insert(sy.begin(), sy.end());
  std::vector<int> h(n);
  std::iota(h.begin(), h.end(), 0);
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  double total = 0.0;
  do {
    std::set<Cell> hs;
    for (int i = 0; i < n; ++i) hs.insert({i, h[i]});
    bool contains = true;
    for (const Cell& c : sx)
      if (!sy.count(c) && !hs.count(c)) contains = false;
    for (const Cell& c : sy)
      if (!sx.count(c) && !hs.count(c)) contains = false;
    if (!contains) continue;
    double prod = 1.0 / fact;
    for (const Cell& c : hs) {
      const double p = sigmoid(w(c.input, c.output));
      const bool in_x = sx.count(c) > 0, in_y = sy.count(c) > 0;
      if (in_x && !in_y) prod *= 1.0 - p;
      else if (!in_x && in_y) prod *= p;
      else if (in_x && in_y) prod *= p;
      else {
        bool neighbour = false;
        for (const Cell& u : uni)
          if (u.input == c.input || u.output == c.output) neighbour = true;
        if (!neighbour) prod *= 1.0 - p;
      }
    }
    total += prod;
  } while (std::next_permutation(h.begin(), h.end()));
  return total;
}

/// Partial matchings by brute force over all 0/1 grids.
inline std::vector<std::vector<int>> all_matchings(int n) {
  std::vector<std::vector<int>> out;
  const int cells = n * n;
  for (long mask = 0; mask < (1L << cells); ++mask) {
    std::vector<int> row(n, -1);
    std::vector<int> col_used(n, 0);
    bool ok = true;
    for (int c = 0; c < cells && ok; ++c) {
      if (!(mask >> c & 1L)) continue;
      const int i = c / n, j = c % n;
      if (row[i] >= 0 || col_used[j]) ok = false;
      row[i] = j;
      col_used[j] = 1;
    }
    if (ok) out.push_back(row);
  }
  return out;
}

}  // namespace oracle
