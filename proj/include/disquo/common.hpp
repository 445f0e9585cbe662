#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace disquo {

using Port = int;
using Slot = std::int64_t;

/// Crosspoint (input, output).
struct Cell {
  Port input = 0;
  Port output = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scheduler emitted a schedule that breaks the crossbar transmission rules.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Requested state space is beyond what exact enumeration supports.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dense row-major N x N grid. Used for queue lengths, occupancy, rates and weights.
template <typename T>
class Grid {
 public:
  Grid() = default;
  explicit Grid(int n, T fill = T{}) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}
  Grid(int n, std::initializer_list<std::initializer_list<T>> rows) : Grid(n) {
    int i = 0;
    for (const auto& row : rows) {
      int j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  int size() const { return n_; }
  T& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const T& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_ = 0;
  std::vector<T> data_;
};

}  // namespace disquo
