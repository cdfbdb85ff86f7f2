#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "signal.hpp"

namespace tvcs {

/// 2D DCT-II coefficients (orthonormal scaling) of an image. source_len is
/// carried through so the inverse can rebuild an ImageMatrix.
struct DctSpectrum
{
  Grid coeffs;
  std::size_t source_len = 0;

  std::size_t side() const noexcept { return coeffs.side(); }
};

/// Precomputed orthonormal DCT-II basis for one side length. The 2D
/// transform is separable: Y = C X C^T, X = C^T Y C.
class DctPlan
{
public:
  explicit DctPlan(std::size_t side)
    : side_(side)
    , basis_(side * side)
    , scratch_(side * side)
  {
    if (side == 0) {
      throw DomainError("dct: side must be >= 1");
    }
    double const n = static_cast<double>(side);
    for (std::size_t k = 0; k < side; ++k) {
      double const alpha = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      for (std::size_t i = 0; i < side; ++i) {
        basis_[k * side + i] =
          alpha * std::cos(std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) * static_cast<double>(k) / (2.0 * n));
      }
    }
  }

  std::size_t side() const noexcept { return side_; }

  /// Coefficient of frequency k at sample i.
  double basis(std::size_t k, std::size_t i) const { return basis_[k * side_ + i]; }

  void forward(Grid const &in, Grid &out) const
  {
    // scratch = C * in ; out = scratch * C^T
    std::size_t const n = side_;
    for (std::size_t col = 0; col < n; ++col) {
      for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += basis_[k * n + i] * in[col * n + i];
        }
        scratch_[col * n + k] = acc;
      }
    }
    if (out.side() != n) {
      out = Grid(n);
    }
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t row = 0; row < n; ++row) {
        out[l * n + row] = 0.0;
      }
      for (std::size_t col = 0; col < n; ++col) {
        double const c = basis_[l * n + col];
        for (std::size_t row = 0; row < n; ++row) {
          out[l * n + row] += scratch_[col * n + row] * c;
        }
      }
    }
  }

  void inverse(Grid const &in, Grid &out) const
  {
    // scratch = C^T * in ; out = scratch * C
    std::size_t const n = side_;
    for (std::size_t col = 0; col < n; ++col) {
      for (std::size_t i = 0; i < n; ++i) {
        scratch_[col * n + i] = 0.0;
      }
      for (std::size_t k = 0; k < n; ++k) {
        double const y = in[col * n + k];
        for (std::size_t i = 0; i < n; ++i) {
          scratch_[col * n + i] += basis_[k * n + i] * y;
        }
      }
    }
    if (out.side() != n) {
      out = Grid(n);
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t row = 0; row < n; ++row) {
        out[j * n + row] = 0.0;
      }
      for (std::size_t l = 0; l < n; ++l) {
        double const c = basis_[l * n + j];
        for (std::size_t row = 0; row < n; ++row) {
          out[j * n + row] += scratch_[l * n + row] * c;
        }
      }
    }
  }

private:
  std::size_t side_;
  std::vector<double> basis_;
  mutable std::vector<double> scratch_;
};

inline DctSpectrum dct2_forward(ImageMatrix const &image)
{
  DctPlan const plan(image.side());
  DctSpectrum out{Grid(image.side()), image.source_len};
  plan.forward(image.values, out.coeffs);
  return out;
}

inline ImageMatrix dct2_inverse(DctSpectrum const &spectrum)
{
  DctPlan const plan(spectrum.side());
  ImageMatrix out{Grid(spectrum.side()), spectrum.source_len};
  plan.inverse(spectrum.coeffs, out.values);
  return out;
}

struct Position
{
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(Position const &, Position const &) = default;
};

/// JPEG-style zig-zag traversal: rank -> matrix position and back.
class ZigZagOrder
{
public:
  explicit ZigZagOrder(std::size_t side)
    : side_(side)
  {
    if (side == 0) {
      throw DomainError("zigzag: side must be >= 1");
    }
    order_.reserve(side * side);
    rank_.assign(side * side, 0);
    for (std::size_t d = 0; d + 1 < 2 * side; ++d) {
      std::size_t const lo = d >= side ? d - side + 1 : 0;
      std::size_t const hi = std::min(d, side - 1);
      if (d % 2 == 0) {
        // bottom-left to top-right
        for (std::size_t r = hi + 1; r-- > lo;) {
          push(r, d - r);
        }
      } else {
        for (std::size_t r = lo; r <= hi; ++r) {
          push(r, d - r);
        }
      }
    }
  }

  std::size_t side() const noexcept { return side_; }
  std::size_t size() const noexcept { return order_.size(); }
  Position position(std::size_t rank) const { return order_[rank]; }
  std::size_t rank(Position p) const { return rank_[p.col * side_ + p.row]; }
  /// Column-major linear index of the coefficient at the given rank.
  std::size_t linear(std::size_t rank) const { return order_[rank].col * side_ + order_[rank].row; }
  std::vector<Position> const &positions() const noexcept { return order_; }

private:
  void push(std::size_t r, std::size_t c)
  {
    rank_[c * side_ + r] = order_.size();
    order_.push_back({r, c});
  }

  std::size_t side_;
  std::vector<Position> order_;
  std::vector<std::size_t> rank_;
};

inline ZigZagOrder zigzag_order(std::size_t side) { return ZigZagOrder(side); }

} // namespace tvcs
