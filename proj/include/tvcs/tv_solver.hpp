#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "sampling.hpp"
#include "signal.hpp"
#include "transform.hpp"

namespace tvcs {

/// Forward differences of an image. gx runs along rows (i+1 vs i), gy along
/// columns (j+1 vs j); the last row of gx and last column of gy are zero.
struct GradientField
{
  Grid gx;
  Grid gy;
};

inline void grad_into(Grid const &x, Grid &gx, Grid &gy)
{
  std::size_t const n = x.side();
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      gx(r, c) = r + 1 < n ? x(r + 1, c) - x(r, c) : 0.0;
      gy(r, c) = c + 1 < n ? x(r, c + 1) - x(r, c) : 0.0;
    }
  }
}

/// Negative adjoint of grad_into: <grad X, P> = -<X, div P>.
inline void divergence_into(Grid const &px, Grid const &py, Grid &out)
{
  std::size_t const n = px.side();
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      double d = 0.0;
      if (r + 1 < n) d += px(r, c);
      if (r > 0) d -= px(r - 1, c);
      if (c + 1 < n) d += py(r, c);
      if (c > 0) d -= py(r, c - 1);
      out(r, c) = d;
    }
  }
}

inline GradientField grad(ImageMatrix const &image)
{
  GradientField f{Grid(image.side()), Grid(image.side())};
  grad_into(image.values, f.gx, f.gy);
  return f;
}

inline ImageMatrix divergence(GradientField const &field)
{
  if (field.gx.side() != field.gy.side()) {
    throw DomainError("divergence: component sides differ");
  }
  ImageMatrix out{Grid(field.gx.side()), field.gx.size()};
  divergence_into(field.gx, field.gy, out.values);
  return out;
}

/// Isotropic total variation, summed column by column.
inline double tv(Grid const &x)
{
  std::size_t const n = x.side();
  double acc = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      double const dx = r + 1 < n ? x(r + 1, c) - x(r, c) : 0.0;
      double const dy = c + 1 < n ? x(r, c + 1) - x(r, c) : 0.0;
      acc += std::sqrt(dx * dx + dy * dy);
    }
  }
  return acc;
}

inline double tv(ImageMatrix const &image) { return tv(image.values); }

/// Overwrites every measured coefficient with its observed value. This is
/// the Euclidean projection onto the affine measurement set.
inline DctSpectrum project_constraint(DctSpectrum const &spectrum, MeasurementSet const &meas)
{
  if (spectrum.side() != meas.mask.side) {
    throw DomainError("project_constraint: spectrum side " + std::to_string(spectrum.side()) +
                      " != measurement side " + std::to_string(meas.mask.side));
  }
  ZigZagOrder const order(meas.mask.side);
  DctSpectrum out = spectrum;
  if (meas.dc) {
    out.coeffs[0] = *meas.dc;
  }
  for (std::size_t k = 0; k < meas.values.size(); ++k) {
    out.coeffs[order.linear(meas.mask.kept_ranks[k])] = meas.values[k];
  }
  return out;
}

enum class SolverMethod
{
  admm, // exact DCT-domain primal solve; the default
  pdhg, // linearized primal step
};

struct SolverConfig
{
  SolverMethod method = SolverMethod::admm;
  std::size_t max_iters = 500;
  double tol = 1e-6;          // relative change of image and dual variable
  double penalty = 1.0;       // admm: dual ascent step / augmented-Lagrangian weight
  double step_primal = 0.35;  // pdhg
  double step_dual = 0.35;    // pdhg
  std::size_t log_every = 0;  // 0 disables the iteration log

  void validate() const
  {
    if (max_iters < 1) throw DomainError("solver: max_iters must be >= 1");
    if (!(tol > 0.0)) throw DomainError("solver: tol must be > 0");
    if (!(penalty > 0.0) || !std::isfinite(penalty)) throw DomainError("solver: penalty must be > 0");
    if (!(step_primal > 0.0) || !(step_dual > 0.0)) throw DomainError("solver: step sizes must be > 0");
    // ||grad||^2 <= 8
    if (step_primal * step_dual * 8.0 > 1.0) {
      throw DomainError("solver: step_primal * step_dual * 8 must be <= 1");
    }
  }
};

struct IterationRecord
{
  std::size_t iter = 0;
  double tv = 0.0;
  double rel_change = 0.0;
  double residual = 0.0;
};

struct ReconstructionResult
{
  ImageMatrix image;
  std::size_t iters_used = 0;
  double final_tv = 0.0;
  double constraint_residual = 0.0;
  bool converged = false;
  std::vector<IterationRecord> log;
};

namespace detail {

/// The affine feasible set {x : selected DCT coefficients of x == b}, with
/// b divided by `scale`.
class MeasurementConstraint
{
public:
  MeasurementConstraint(MeasurementSet const &meas, double scale)
    : plan_(meas.mask.side)
    , spectrum_(meas.mask.side)
    , fixed_(meas.mask.side * meas.mask.side, 0)
  {
    ZigZagOrder const order(meas.mask.side);
    auto add = [&](std::size_t linear, double value) {
      if (!fixed_[linear]) {
        linear_.push_back(linear);
        values_.push_back(value / scale);
        fixed_[linear] = 1;
      }
    };
    if (meas.dc) {
      add(0, *meas.dc);
    }
    for (std::size_t k = 0; k < meas.values.size(); ++k) {
      add(order.linear(meas.mask.kept_ranks[k]), meas.values[k]);
    }
  }

  DctPlan const &plan() const noexcept { return plan_; }

  bool is_fixed(std::size_t linear) const { return fixed_[linear] != 0; }

  /// Overwrites the measured entries of a spectrum in place.
  void impose(Grid &spectrum) const
  {
    for (std::size_t k = 0; k < linear_.size(); ++k) {
      spectrum[linear_[k]] = values_[k];
    }
  }

  void project(Grid &x)
  {
    plan_.forward(x, spectrum_);
    impose(spectrum_);
    plan_.inverse(spectrum_, x);
  }

  double residual(Grid const &x)
  {
    plan_.forward(x, spectrum_);
    double m = 0.0;
    for (std::size_t k = 0; k < linear_.size(); ++k) {
      m = std::max(m, std::abs(spectrum_[linear_[k]] - values_[k]));
    }
    return m;
  }

  /// Minimum-energy feasible point: measured coefficients, zeros elsewhere.
  Grid zero_filled()
  {
    Grid spec(plan_.side());
    impose(spec);
    Grid x(plan_.side());
    plan_.inverse(spec, x);
    return x;
  }

private:
  DctPlan plan_;
  Grid spectrum_;
  std::vector<char> fixed_;
  std::vector<std::size_t> linear_;
  std::vector<double> values_;
};

inline double value_range(Grid const &x)
{
  auto const [lo, hi] = std::minmax_element(x.values().begin(), x.values().end());
  return *hi - *lo;
}

/// Eigenvalues of grad^T grad (the Neumann Laplacian) in the DCT-II basis,
/// stored at the matching spectrum positions.
inline Grid laplacian_eigenvalues(std::size_t n)
{
  Grid lam(n);
  double const dn = static_cast<double>(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) {
      lam(r, c) = (2.0 - 2.0 * std::cos(std::numbers::pi * static_cast<double>(r) / dn)) +
                  (2.0 - 2.0 * std::cos(std::numbers::pi * static_cast<double>(c) / dn));
    }
  }
  return lam;
}

inline double relative(double diff2, double norm2) { return norm2 > 0.0 ? std::sqrt(diff2 / norm2) : std::sqrt(diff2); }

/// p <- clamp_unit_ball(p + step * (gx, gy)) per pixel. Returns the squared
/// change and squared norm of the updated p.
inline std::pair<double, double> dual_ascent(Grid &px, Grid &py, Grid const &gx, Grid const &gy, double step)
{
  double diff2 = 0.0;
  double norm2 = 0.0;
  for (std::size_t k = 0; k < px.size(); ++k) {
    double const a = px[k] + step * gx[k];
    double const b = py[k] + step * gy[k];
    double const mag = std::sqrt(a * a + b * b);
    double const shrink = mag > 1.0 ? 1.0 / mag : 1.0;
    double const dx = a * shrink - px[k];
    double const dy = b * shrink - py[k];
    diff2 += dx * dx + dy * dy;
    px[k] = a * shrink;
    py[k] = b * shrink;
    norm2 += px[k] * px[k] + py[k] * py[k];
  }
  return {diff2, norm2};
}

/// Shared driver: `step(x)` advances one iteration in place and returns the
/// relative dual change.
template <typename Step>
bool iterate(Grid &x, MeasurementConstraint &constraint, SolverConfig const &config, double scale,
             ReconstructionResult &result, Step &&step)
{
  Grid x_prev(x.side());
  for (std::size_t iter = 1; iter <= config.max_iters; ++iter) {
    x_prev = x;
    double const dual_change = step(x);

    double diff2 = 0.0;
    double norm2 = 0.0;
    bool finite = true;
    for (std::size_t k = 0; k < x.size(); ++k) {
      double const d = x[k] - x_prev[k];
      diff2 += d * d;
      norm2 += x[k] * x[k];
      finite = finite && std::isfinite(x[k]);
    }
    if (!finite || !std::isfinite(dual_change)) {
      throw SolverError("reconstruct: non-finite iterate", iter);
    }
    double const rel_change = relative(diff2, norm2);
    result.iters_used = iter;

    if (config.log_every > 0 && (iter % config.log_every == 0 || iter == 1)) {
      result.log.push_back({iter, scale * tv(x), rel_change, scale * constraint.residual(x)});
    }
    // The image alone can stall while the dual variable is still moving, so
    // both must settle.
    if (rel_change < config.tol && dual_change < config.tol) {
      return true;
    }
  }
  return false;
}

/// ADMM on min ||d||_{2,1} s.t. d = grad x, x feasible, written in terms of
/// the TV dual p (= penalty * scaled multiplier), which stays in the unit
/// ball per pixel:
///   x <- argmin_{x feasible} || grad x - (d - p/penalty) ||^2
///   p <- clamp_unit_ball(p + penalty * grad x)
///   d <- grad x + (p_old - p)/penalty
/// grad^T grad is diagonal in the DCT-II basis, so the x-step is exact: every
/// unmeasured coefficient is (DCT of grad^T v) / eigenvalue, measured ones
/// are pinned. An unmeasured DC coefficient (eigenvalue 0) keeps its value.
inline bool run_admm(Grid &x, MeasurementConstraint &constraint, SolverConfig const &config, double scale,
                     ReconstructionResult &result)
{
  std::size_t const n = x.side();
  double const rho = config.penalty;
  DctPlan const &plan = constraint.plan();
  Grid const lam = laplacian_eigenvalues(n);
  Grid spectrum(n), rhs(n), rhs_hat(n);
  Grid px(n), py(n), dx(n), dy(n), gx(n), gy(n), vx(n), vy(n);

  grad_into(x, gx, gy);
  dual_ascent(px, py, gx, gy, rho);
  for (std::size_t k = 0; k < x.size(); ++k) {
    dx[k] = gx[k] - px[k] / rho;
    dy[k] = gy[k] - py[k] / rho;
  }
  plan.forward(x, spectrum);

  return iterate(x, constraint, config, scale, result, [&](Grid &xk) {
    for (std::size_t k = 0; k < xk.size(); ++k) {
      vx[k] = dx[k] - px[k] / rho;
      vy[k] = dy[k] - py[k] / rho;
    }
    divergence_into(vx, vy, rhs); // grad^T v = -div v
    plan.forward(rhs, rhs_hat);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      if (!constraint.is_fixed(k) && lam[k] > 0.0) {
        spectrum[k] = -rhs_hat[k] / lam[k];
      }
    }
    constraint.impose(spectrum);
    plan.inverse(spectrum, xk);

    grad_into(xk, gx, gy);
    vx = px;
    vy = py;
    auto const [diff2, norm2] = dual_ascent(px, py, gx, gy, rho);
    for (std::size_t k = 0; k < xk.size(); ++k) {
      dx[k] = gx[k] + (vx[k] - px[k]) / rho;
      dy[k] = gy[k] + (vy[k] - py[k]) / rho;
    }
    return relative(diff2, norm2);
  });
}

/// First-order primal-dual iteration:
///   p     <- clamp_unit_ball(p + step_dual * grad(x_bar))
///   x+    <- project(x + step_primal * div(p))
///   x_bar <- 2 x+ - x
inline bool run_pdhg(Grid &x, MeasurementConstraint &constraint, SolverConfig const &config, double scale,
                     ReconstructionResult &result)
{
  std::size_t const n = x.side();
  Grid x_bar = x;
  Grid x_old(n), px(n), py(n), gx(n), gy(n), div(n);

  // Unit-length gradient directions of the start image (a TV subgradient).
  // Starting from p = 0 would stall: the first primal step is then a pure
  // Laplacian of a DCT-sparse image, which the projection removes entirely.
  grad_into(x, px, py);
  for (std::size_t k = 0; k < px.size(); ++k) {
    double const mag = std::sqrt(px[k] * px[k] + py[k] * py[k]);
    if (mag > 0.0) {
      px[k] /= mag;
      py[k] /= mag;
    }
  }

  return iterate(x, constraint, config, scale, result, [&](Grid &xk) {
    grad_into(x_bar, gx, gy);
    auto const [diff2, norm2] = dual_ascent(px, py, gx, gy, config.step_dual);
    x_old = xk;
    divergence_into(px, py, div);
    for (std::size_t k = 0; k < xk.size(); ++k) {
      xk[k] += config.step_primal * div[k];
    }
    constraint.project(xk);
    for (std::size_t k = 0; k < xk.size(); ++k) {
      x_bar[k] = 2.0 * xk[k] - x_old[k];
    }
    return relative(diff2, norm2);
  });
}

} // namespace detail

/// Minimizes isotropic TV subject to the measured DCT coefficients (and the
/// DC side information, when present). Starts from the zero-filled
/// spectrum; every iterate is feasible because the measurement constraint is
/// imposed last in each iteration.
///
/// The problem is solved on measurements divided by the value range of the
/// zero-filled start. TV minimization commutes with positive scaling, so
/// this only makes the default penalty/steps independent of signal units.
inline ReconstructionResult reconstruct(MeasurementSet const &meas, SolverConfig const &config = {})
{
  config.validate();
  check_mask(meas.mask);
  if (meas.values.size() != meas.mask.kept_ranks.size()) {
    throw DomainError("reconstruct: value count does not match mask");
  }
  for (double v : meas.values) {
    if (!std::isfinite(v)) throw DomainError("reconstruct: non-finite measurement");
  }
  if (meas.dc && !std::isfinite(*meas.dc)) {
    throw DomainError("reconstruct: non-finite DC side information");
  }

  double scale = 1.0;
  {
    detail::MeasurementConstraint unit(meas, 1.0);
    double const range = detail::value_range(unit.zero_filled());
    if (range > 0.0 && std::isfinite(range)) scale = range;
  }
  detail::MeasurementConstraint constraint(meas, scale);
  Grid x = constraint.zero_filled();

  ReconstructionResult result;
  result.converged = config.method == SolverMethod::admm ? detail::run_admm(x, constraint, config, scale, result)
                                                         : detail::run_pdhg(x, constraint, config, scale, result);

  // Back to physical units, then re-impose the unscaled measurements.
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] *= scale;
  }
  detail::MeasurementConstraint exact(meas, 1.0);
  exact.project(x);

  result.constraint_residual = exact.residual(x);
  result.final_tv = tv(x);
  result.image = ImageMatrix{std::move(x), meas.source_len};
  return result;
}

} // namespace tvcs
