#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "tvcs/generators.hpp"
#include "tvcs/metrics.hpp"
#include "tvcs/tv_solver.hpp"

using namespace tvcs;
using tvcs::testing::grid_from_rows;
using tvcs::testing::random_grid;

namespace {

ImageMatrix as_image(Grid g) { return ImageMatrix{g, g.size()}; }

// Direct evaluation: difference to the lower and right neighbour,
// zero past the border, Euclidean norm per pixel. Same column-by-column
// summation order as the library so the comparison can be exact.
double naive_tv(Grid const &h)
{
  std::size_t const n = h.side();
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double const down = (i + 1 < n) ? h(i + 1, j) - h(i, j) : 0.0;
      double const right = (j + 1 < n) ? h(i, j + 1) - h(i, j) : 0.0;
      total += std::sqrt(down * down + right * right);
    }
  }
  return total;
}

Grid two_halves(std::size_t n, double left, double right)
{
  Grid g(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) g(r, c) = c < n / 2 ? left : right;
  }
  return g;
}

double relative_mse(Grid const &truth, Grid const &est)
{
  double mean = 0.0;
  for (double v : truth.values()) mean += v;
  mean /= static_cast<double>(truth.size());
  double var = 0.0;
  double err = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    var += (truth[k] - mean) * (truth[k] - mean);
    err += (truth[k] - est[k]) * (truth[k] - est[k]);
  }
  return err / var;
}

} // namespace

TEST(Grad, ConstantImageHasZeroGradient)
{
  Grid g(5);
  for (auto &v : g.values()) v = -3.0;
  auto const f = grad(as_image(g));
  for (double v : f.gx.values()) EXPECT_EQ(v, 0.0);
  for (double v : f.gy.values()) EXPECT_EQ(v, 0.0);
}

TEST(Grad, TwoByTwoExample)
{
  auto const f = grad(as_image(grid_from_rows({{0, 1}, {0, 1}})));
  EXPECT_EQ(f.gx, grid_from_rows({{0, 0}, {0, 0}}));
  EXPECT_EQ(f.gy, grid_from_rows({{1, 0}, {1, 0}}));
}

TEST(Grad, SinglePixel)
{
  auto const f = grad(as_image(grid_from_rows({{4}})));
  EXPECT_EQ(f.gx(0, 0), 0.0);
  EXPECT_EQ(f.gy(0, 0), 0.0);
}

TEST(Grad, BoundaryRowAndColumnAreZero)
{
  std::mt19937_64 rng(1);
  auto const f = grad(as_image(random_grid(7, rng)));
  for (std::size_t k = 0; k < 7; ++k) {
    EXPECT_EQ(f.gx(6, k), 0.0);
    EXPECT_EQ(f.gy(k, 6), 0.0);
  }
}

TEST(Grad, SquaredOperatorNormAtMostEight)
{
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t const n = 2 + rng() % 15;
    Grid x = random_grid(n, rng);
    double const nx = norm(x);
    for (auto &v : x.values()) v /= nx;
    auto const f = grad(as_image(x));
    EXPECT_LE(dot(f.gx, f.gx) + dot(f.gy, f.gy), 8.0);
  }
  // checkerboard is the worst case and approaches 8 from below
  Grid cb(32);
  for (std::size_t c = 0; c < 32; ++c)
    for (std::size_t r = 0; r < 32; ++r) cb(r, c) = ((r + c) % 2 == 0) ? 1.0 : -1.0;
  double const e = dot(cb, cb);
  auto const f = grad(as_image(cb));
  EXPECT_LE(dot(f.gx, f.gx) + dot(f.gy, f.gy), 8.0 * e);
  EXPECT_GT(dot(f.gx, f.gx) + dot(f.gy, f.gy), 7.0 * e);
}

TEST(Divergence, ZeroFieldAndConstants)
{
  auto const z = divergence(GradientField{Grid(4), Grid(4)});
  for (double v : z.values.values()) EXPECT_EQ(v, 0.0);

  Grid g(4);
  for (auto &v : g.values()) v = 9.0;
  auto const d = divergence(grad(as_image(g)));
  for (double v : d.values.values()) EXPECT_EQ(v, 0.0);
}

TEST(Divergence, IsNegativeAdjointOfGrad)
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t const n = 2 + trial % 15;
    Grid const x = random_grid(n, rng);
    GradientField const p{random_grid(n, rng), random_grid(n, rng)};
    auto const gx = grad(as_image(x));
    double const lhs = dot(gx.gx, p.gx) + dot(gx.gy, p.gy);
    double const rhs = dot(x, divergence(p).values);
    double const scale = norm(x) * std::sqrt(dot(p.gx, p.gx) + dot(p.gy, p.gy));
    EXPECT_LE(std::abs(lhs + rhs), 1e-12 * scale) << "side " << n;
  }
}

TEST(TotalVariation, Examples)
{
  Grid c(6);
  for (auto &v : c.values()) v = 1.25;
  EXPECT_EQ(tv(c), 0.0);
  EXPECT_EQ(tv(grid_from_rows({{0, 1}, {0, 1}})), 2.0);
}

TEST(TotalVariation, MatchesNaiveEvaluationExactly)
{
  std::mt19937_64 rng(4);
  for (std::size_t n = 1; n <= 24; ++n) {
    Grid const x = random_grid(n, rng);
    EXPECT_EQ(tv(x), naive_tv(x)) << "side " << n;
  }
}

TEST(TotalVariation, PositivelyHomogeneous)
{
  std::mt19937_64 rng(5);
  Grid const x = random_grid(9, rng);
  for (double c : {-3.0, -0.5, 0.0, 2.0, 10.0}) {
    Grid y = x;
    for (auto &v : y.values()) v *= c;
    EXPECT_NEAR(tv(y), std::abs(c) * tv(x), 1e-12 * (1.0 + tv(x) * std::abs(c)));
  }
}

TEST(ProjectConstraint, ExamplesAndIdempotence)
{
  std::mt19937_64 rng(6);
  DctSpectrum const truth{random_grid(6, rng), 36};
  auto const meas = measure(truth, draw_mask(6, 0.4, 2));

  auto const from_zero = project_constraint(DctSpectrum{Grid(6), 36}, meas);
  EXPECT_EQ(from_zero.coeffs, embed(meas).coeffs);

  DctSpectrum const other{random_grid(6, rng), 36};
  auto const once = project_constraint(other, meas);
  auto const twice = project_constraint(once, meas);
  EXPECT_EQ(once.coeffs, twice.coeffs);

  EXPECT_EQ(project_constraint(truth, meas).coeffs, truth.coeffs);
}

TEST(ProjectConstraint, LeavesUnmeasuredRanksAlone)
{
  std::mt19937_64 rng(7);
  DctSpectrum const s{random_grid(5, rng), 25};
  auto const mask = draw_mask(5, 0.2, 4);
  MeasurementSet const meas{mask, std::vector<double>(mask.kept_ranks.size(), 0.0), 25, std::nullopt};
  auto const out = project_constraint(s, meas);
  auto const z = zigzag_order(5);
  std::vector<bool> measured(25, false);
  for (auto r : mask.kept_ranks) measured[z.linear(r)] = true;
  for (std::size_t k = 0; k < 25; ++k) {
    EXPECT_EQ(out.coeffs[k], measured[k] ? 0.0 : s.coeffs[k]);
  }
}

TEST(ProjectConstraint, SideMismatch)
{
  auto const meas = measure(DctSpectrum{Grid(4), 16}, draw_mask(4, 0.5, 0));
  EXPECT_THROW(project_constraint(DctSpectrum{Grid(5), 25}, meas), DomainError);
}

TEST(SolverConfig, Validation)
{
  EXPECT_NO_THROW(SolverConfig{}.validate());
  SolverConfig c;
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.tol = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.step_primal = 0.5;
  c.step_dual = 0.5; // 8 * 0.25 = 2
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.penalty = -1.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.step_primal = 1.0;
  c.step_dual = 0.125;
  EXPECT_NO_THROW(c.validate());
}

class ReconstructMethods : public ::testing::TestWithParam<SolverMethod>
{
protected:
  SolverConfig config() const
  {
    SolverConfig c;
    c.method = GetParam();
    return c;
  }
};

TEST_P(ReconstructMethods, FullSamplingReproducesImage)
{
  std::mt19937_64 rng(8);
  for (std::size_t n : {1u, 3u, 8u, 20u}) {
    Grid const x = random_grid(n, rng);
    auto cfg = config();
    for (std::size_t iters : {1u, 7u, 200u}) {
      cfg.max_iters = iters;
      auto const r = reconstruct(measure(dct2_forward(as_image(x)), draw_mask(n, 1.0, 1)), cfg);
      EXPECT_LE(max_abs_diff(r.image.values, x), 1e-8);
    }
  }
}

TEST_P(ReconstructMethods, ZeroMeasurementsGiveZeroImage)
{
  for (double ratio : {0.1, 0.5, 1.0}) {
    auto const r = reconstruct(measure(dct2_forward(as_image(Grid(10))), draw_mask(10, ratio, 3)), config());
    for (double v : r.image.values.values()) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(r.final_tv, 0.0);
    EXPECT_TRUE(r.converged);
  }
}

TEST_P(ReconstructMethods, IteratesStayFeasible)
{
  auto const s = gen_respiration_like(900, 25.0, 2);
  auto const im = reshape_to_image(s);
  for (double ratio : {0.3, 0.6}) {
    auto cfg = config();
    cfg.log_every = 10;
    cfg.max_iters = 200;
    auto const r = reconstruct(measure(dct2_forward(im), draw_mask(im.side(), ratio, 5)), cfg);
    EXPECT_LE(r.constraint_residual, 1e-8);
    for (auto const &rec : r.log) EXPECT_LE(rec.residual, 1e-8) << "iter " << rec.iter;
  }
}

INSTANTIATE_TEST_SUITE_P(Methods, ReconstructMethods, ::testing::Values(SolverMethod::admm, SolverMethod::pdhg));

TEST(Reconstruct, TwoBlockImageIsRecoveredFromThirtyPercent)
{
  Grid const truth = two_halves(16, 1.0, 3.0);
  auto const spectrum = dct2_forward(as_image(truth));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto const r = reconstruct(measure(spectrum, draw_mask(16, 0.3, seed)));
    EXPECT_LE(relative_mse(truth, r.image.values), 1e-3) << "seed " << seed;
    EXPECT_LE(r.iters_used, 500u);
    // the optimum: a single vertical edge of height 2 across 16 rows
    EXPECT_NEAR(r.final_tv, 32.0, 1e-3);
  }
}

TEST(Reconstruct, BlindDcLeavesMeanAtZero)
{
  // TV cannot see constant offsets; without the DC coefficient the
  // reconstruction keeps the zero-filled mean.
  Grid const truth = two_halves(16, 1.0, 3.0);
  auto const spectrum = dct2_forward(as_image(truth));
  auto mask = draw_mask(16, 0.3, 2);
  ASSERT_NE(mask.kept_ranks.front(), 0u);
  auto const r = reconstruct(measure(spectrum, mask, DcPolicy::none));
  double mean = 0.0;
  for (double v : r.image.values.values()) mean += v;
  EXPECT_NEAR(mean / 256.0, 0.0, 1e-12);
  EXPECT_NEAR(relative_mse(truth, r.image.values), 4.0, 1e-3); // mean^2 / variance = 4 / 1
}

TEST(Reconstruct, TvTrendIsNonIncreasing)
{
  for (auto const &signal : {gen_ecg_like(1024, 72, 250, 1), gen_ecg_like(4096, 72, 250, 3),
                             gen_respiration_like(1024, 25, 1), gen_respiration_like(2500, 10, 4)}) {
    auto const im = reshape_to_image(signal);
    for (double ratio : {0.3, 0.5, 0.7, 0.9}) {
      SolverConfig cfg;
      cfg.log_every = 25;
      auto const r = reconstruct(measure(dct2_forward(im), draw_mask(im.side(), ratio, 7)), cfg);
      for (std::size_t k = 1; k < r.log.size(); ++k) {
        if (r.log[k - 1].iter < 10) continue;
        EXPECT_LE(r.log[k].tv, r.log[k - 1].tv * (1.0 + 1e-6))
          << "ratio " << ratio << " iter " << r.log[k].iter;
      }
    }
  }
}

TEST(Reconstruct, NonFiniteIterateRaisesSolverError)
{
  double const huge = std::numeric_limits<double>::max();
  MeasurementSet const meas{MeasurementMask{4, 0.25, 0, {1, 2, 5, 9}}, {huge, -huge, huge, -huge}, 16, huge};
  try {
    reconstruct(meas);
    FAIL() << "expected SolverError";
  } catch (SolverError const &e) {
    EXPECT_GE(e.iteration(), 1u);
  }
}

TEST(Reconstruct, RejectsMalformedMeasurements)
{
  MeasurementSet bad{MeasurementMask{4, 0.25, 0, {1, 2}}, {1.0}, 16, std::nullopt};
  EXPECT_THROW(reconstruct(bad), DomainError);
  bad.values = {1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(reconstruct(bad), DomainError);
  MeasurementSet unsorted{MeasurementMask{4, 0.25, 0, {2, 1}}, {1.0, 1.0}, 16, std::nullopt};
  EXPECT_THROW(reconstruct(unsorted), DomainError);
}

TEST(Reconstruct, LogsEveryNthIteration)
{
  auto const im = reshape_to_image(gen_ecg_like(400, 72, 250, 1));
  SolverConfig cfg;
  cfg.max_iters = 40;
  cfg.tol = 1e-300;
  cfg.log_every = 10;
  auto const r = reconstruct(measure(dct2_forward(im), draw_mask(im.side(), 0.5, 1)), cfg);
  std::vector<std::size_t> iters;
  for (auto const &rec : r.log) iters.push_back(rec.iter);
  EXPECT_EQ(iters, (std::vector<std::size_t>{1, 10, 20, 30, 40}));
  EXPECT_EQ(r.iters_used, 40u);
  EXPECT_FALSE(r.converged);
}
