#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "errors.hpp"
#include "transform.hpp"

namespace tvcs {

/// Uniform draw in [0, range) from a 64-bit engine (Lemire's multiply-shift
/// with rejection). Used instead of std::uniform_int_distribution, whose
/// output is implementation-defined, so masks are identical across
/// standard libraries.
inline std::uint64_t bounded_draw(std::mt19937_64 &rng, std::uint64_t range)
{
  using u128 = unsigned __int128;
  std::uint64_t x = rng();
  u128 m = static_cast<u128>(x) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    std::uint64_t const threshold = (0 - range) % range;
    while (low < threshold) {
      x = rng();
      m = static_cast<u128>(x) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Which zig-zag ranks of a side x side spectrum are observed.
struct MeasurementMask
{
  std::size_t side = 0;
  double ratio = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> kept_ranks; // sorted, distinct

  friend bool operator==(MeasurementMask const &, MeasurementMask const &) = default;
};

/// Whether the DC coefficient travels with the measurements. TV is blind to
/// constant offsets, so a mask that misses rank 0 leaves the mean
/// undetermined unless it is supplied separately.
enum class DcPolicy
{
  side_info,
  none,
};

struct MeasurementSet
{
  MeasurementMask mask;
  std::vector<double> values; // values[k] is the coefficient at rank mask.kept_ranks[k]
  std::size_t source_len = 0;
  std::optional<double> dc;   // spectrum (0,0) when sent as side information
};

/// round(ratio * side^2) clamped to [1, side^2].
inline std::size_t measurement_count(std::size_t side, double ratio)
{
  std::size_t const total = side * side;
  auto const m = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(total)));
  return std::clamp<std::size_t>(m, 1, total);
}

/// Uniform selection without replacement via partial Fisher-Yates over the
/// rank indices, driven by mt19937_64 seeded with `seed`.
inline MeasurementMask draw_mask(std::size_t side, double ratio, std::uint64_t seed)
{
  if (side == 0) {
    throw DomainError("draw_mask: side must be >= 1");
  }
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw DomainError("draw_mask: ratio must lie in (0, 1]");
  }
  std::size_t const total = side * side;
  std::size_t const m = measurement_count(side, ratio);

  std::vector<std::size_t> ranks(total);
  std::iota(ranks.begin(), ranks.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < m; ++i) {
    auto const j = i + static_cast<std::size_t>(bounded_draw(rng, total - i));
    std::swap(ranks[i], ranks[j]);
  }
  ranks.resize(m);
  std::sort(ranks.begin(), ranks.end());
  return MeasurementMask{side, ratio, seed, std::move(ranks)};
}

inline void check_mask(MeasurementMask const &mask)
{
  std::size_t const total = mask.side * mask.side;
  if (mask.side == 0 || mask.kept_ranks.empty() || mask.kept_ranks.size() > total) {
    throw DomainError("mask: invalid size");
  }
  for (std::size_t k = 0; k < mask.kept_ranks.size(); ++k) {
    if (mask.kept_ranks[k] >= total || (k > 0 && mask.kept_ranks[k] <= mask.kept_ranks[k - 1])) {
      throw DomainError("mask: ranks must be sorted, distinct and < side^2");
    }
  }
}

inline MeasurementSet measure(DctSpectrum const &spectrum, MeasurementMask const &mask,
                              DcPolicy dc_policy = DcPolicy::side_info)
{
  if (spectrum.side() != mask.side) {
    throw DomainError("measure: spectrum side " + std::to_string(spectrum.side()) + " != mask side " +
                      std::to_string(mask.side));
  }
  ZigZagOrder const order(mask.side);
  std::vector<double> values;
  values.reserve(mask.kept_ranks.size());
  for (std::size_t rank : mask.kept_ranks) {
    values.push_back(spectrum.coeffs[order.linear(rank)]);
  }
  std::optional<double> dc;
  if (dc_policy == DcPolicy::side_info) {
    dc = spectrum.coeffs[0];
  }
  return MeasurementSet{mask, std::move(values), spectrum.source_len, dc};
}

/// Zero-filled spectrum holding only the measured coefficients (and the DC
/// side information, if present).
inline DctSpectrum embed(MeasurementSet const &meas)
{
  ZigZagOrder const order(meas.mask.side);
  DctSpectrum out{Grid(meas.mask.side), meas.source_len};
  if (meas.dc) {
    out.coeffs[0] = *meas.dc;
  }
  for (std::size_t k = 0; k < meas.values.size(); ++k) {
    out.coeffs[order.linear(meas.mask.kept_ranks[k])] = meas.values[k];
  }
  return out;
}

} // namespace tvcs
