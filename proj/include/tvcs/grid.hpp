#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace tvcs {

/// Square real matrix stored column-major: element (row, col) lives at
/// col * side + row. Indices are 0-based.
class Grid
{
public:
  Grid() = default;

  explicit Grid(std::size_t side)
    : side_(side)
    , data_(side * side, 0.0)
  {
  }

  Grid(std::size_t side, std::vector<double> values)
    : side_(side)
    , data_(std::move(values))
  {
    if (data_.size() != side_ * side_) {
      throw DomainError("grid: expected " + std::to_string(side_ * side_) + " values, got " +
                        std::to_string(data_.size()));
    }
  }

  std::size_t side() const noexcept { return side_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t row, std::size_t col) const { return data_[col * side_ + row]; }
  double &operator()(std::size_t row, std::size_t col) { return data_[col * side_ + row]; }

  double operator[](std::size_t linear) const { return data_[linear]; }
  double &operator[](std::size_t linear) { return data_[linear]; }

  std::span<double const> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  bool all_finite() const
  {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(Grid const &, Grid const &) = default;

private:
  std::size_t side_ = 0;
  std::vector<double> data_;
};

inline double dot(Grid const &a, Grid const &b)
{
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += a[k] * b[k];
  }
  return acc;
}

inline double norm(Grid const &a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(Grid const &a, Grid const &b)
{
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    m = std::max(m, std::abs(a[k] - b[k]));
  }
  return m;
}

} // namespace tvcs
