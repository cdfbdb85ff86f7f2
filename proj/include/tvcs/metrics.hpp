#pragma once

#include "errors.hpp"
#include "signal.hpp"

namespace tvcs {

/// Mean squared error over the original samples of two equal-length signals.
inline double mse(Signal1D const &a, Signal1D const &b)
{
  if (a.size() != b.size()) {
    throw DomainError("mse: length mismatch (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double const d = a[k] - b[k];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

} // namespace tvcs
