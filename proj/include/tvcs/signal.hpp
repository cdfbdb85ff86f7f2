#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace tvcs {

/// A finite, non-empty 1D sample sequence. Its length is the original
/// (pre-padding) length N0 used by every metric.
class Signal1D
{
public:
  explicit Signal1D(std::vector<double> samples)
    : samples_(std::move(samples))
  {
    if (samples_.empty()) {
      throw DomainError("signal: empty sample sequence");
    }
    for (std::size_t k = 0; k < samples_.size(); ++k) {
      if (!std::isfinite(samples_[k])) {
        throw DomainError("signal: non-finite sample at index " + std::to_string(k));
      }
    }
  }

  std::span<double const> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t k) const { return samples_[k]; }

  friend bool operator==(Signal1D const &, Signal1D const &) = default;

private:
  std::vector<double> samples_;
};

/// Square 2D embedding of a signal. source_len is the number of leading
/// column-major entries that carry real samples.
struct ImageMatrix
{
  Grid values;
  std::size_t source_len = 0;

  std::size_t side() const noexcept { return values.side(); }

  friend bool operator==(ImageMatrix const &, ImageMatrix const &) = default;
};

/// Smallest side with side * side >= n.
inline std::size_t square_side(std::size_t n)
{
  auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (side * side < n) {
    ++side;
  }
  while (side > 1 && (side - 1) * (side - 1) >= n) {
    --side;
  }
  return side;
}

/// Column-major fill into the smallest square that holds the signal; the
/// tail is zero-padded.
inline ImageMatrix reshape_to_image(Signal1D const &signal)
{
  std::size_t const n = signal.size();
  std::size_t const side = square_side(n);
  Grid grid(side);
  for (std::size_t k = 0; k < n; ++k) {
    grid[k] = signal[k];
  }
  return ImageMatrix{std::move(grid), n};
}

/// Reads the image column-major and drops the padding.
inline Signal1D flatten_to_signal(ImageMatrix const &image)
{
  if (image.source_len > image.values.size()) {
    throw DomainError("flatten: source_len " + std::to_string(image.source_len) +
                      " exceeds side^2 = " + std::to_string(image.values.size()));
  }
  auto const v = image.values.values();
  return Signal1D(std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(image.source_len)));
}

inline double mean_value(Signal1D const &signal)
{
  double acc = 0.0;
  for (double v : signal.samples()) {
    acc += v;
  }
  return acc / static_cast<double>(signal.size());
}

/// Population variance over the original samples.
inline double variance(Signal1D const &signal)
{
  double const mu = mean_value(signal);
  double acc = 0.0;
  for (double v : signal.samples()) {
    acc += (v - mu) * (v - mu);
  }
  return acc / static_cast<double>(signal.size());
}

} // namespace tvcs
