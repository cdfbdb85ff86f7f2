#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "generators.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "sampling.hpp"
#include "signal.hpp"
#include "transform.hpp"
#include "tv_solver.hpp"
#include "version.hpp"

namespace tvcs {

/// Named synthetic signal. `rate` is beats/min (ecg, pressure) or
/// breaths/min (respiration); unset means the generator default.
struct GeneratorSpec
{
  std::string kind = "ecg";
  std::size_t n = 4096;
  double fs = 250.0;
  std::optional<double> rate;
  std::uint64_t seed = 0;
};

using SignalSource = std::variant<std::filesystem::path, GeneratorSpec>;

inline Signal1D generate(GeneratorSpec const &g)
{
  if (g.kind == "ecg") return gen_ecg_like(g.n, g.rate.value_or(72.0), g.fs, g.seed);
  if (g.kind == "pressure") return gen_pressure_like(g.n, g.fs, g.seed, g.rate.value_or(72.0));
  if (g.kind == "respiration") return gen_respiration_like(g.n, g.fs, g.seed, g.rate.value_or(12.0));
  throw DomainError("unknown generator kind '" + g.kind + "' (expected ecg, pressure or respiration)");
}

inline Signal1D load_source(SignalSource const &source)
{
  if (auto const *path = std::get_if<std::filesystem::path>(&source)) {
    return read_signal_csv(*path);
  }
  return generate(std::get<GeneratorSpec>(source));
}

/// 0.30, 0.35, ..., 0.90.
inline std::vector<double> default_ratio_grid()
{
  std::vector<double> r;
  for (int pct = 30; pct <= 90; pct += 5) {
    r.push_back(pct / 100.0);
  }
  return r;
}

struct SweepSpec
{
  std::vector<double> ratios = default_ratio_grid();
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  SignalSource source = GeneratorSpec{};
  SolverConfig solver;
  DcPolicy dc_policy = DcPolicy::side_info;
  std::size_t threads = 1; // 0: one per hardware thread. Never changes the report.

  void validate() const
  {
    if (ratios.empty()) throw DomainError("sweep: no ratios");
    if (seeds.empty()) throw DomainError("sweep: no seeds");
    for (double r : ratios) {
      if (!(r > 0.0 && r <= 1.0)) throw DomainError("sweep: ratio " + format_double(r) + " outside (0, 1]");
    }
    solver.validate();
  }
};

struct SweepRow
{
  double ratio = 0.0;
  std::uint64_t seed = 0;
  double mse = std::numeric_limits<double>::quiet_NaN();
  std::size_t iters_used = 0;
  bool converged = false;
  double wall_time = 0.0; // seconds
  std::string error;      // empty on success
};

struct RatioSummary
{
  double ratio = 0.0;
  double median_mse = std::numeric_limits<double>::quiet_NaN(); // over rows that did not fail
  std::size_t failures = 0;
};

struct SweepReport
{
  std::vector<SweepRow> rows; // sorted by ratio, then seed
  std::vector<RatioSummary> medians;
  std::size_t signal_len = 0;
  double signal_mean = 0.0;
  double signal_variance = 0.0;
};

/// Median of the finite entries; NaN if there are none.
inline double median(std::vector<double> values)
{
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  std::size_t const mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

/// reshape -> DCT -> mask -> measure -> reconstruct -> flatten -> MSE.
inline SweepRow run_trial(Signal1D const &signal, DctSpectrum const &spectrum, double ratio, std::uint64_t seed,
                          SolverConfig const &solver, DcPolicy dc_policy)
{
  SweepRow row;
  row.ratio = ratio;
  row.seed = seed;
  auto const t0 = std::chrono::steady_clock::now();
  try {
    auto const mask = draw_mask(spectrum.side(), ratio, seed);
    auto const result = reconstruct(measure(spectrum, mask, dc_policy), solver);
    row.mse = mse(signal, flatten_to_signal(result.image));
    row.iters_used = result.iters_used;
    row.converged = result.converged;
  } catch (SolverError const &e) {
    row.iters_used = e.iteration();
    row.error = e.what();
  } catch (std::exception const &e) {
    row.error = e.what();
  }
  row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

inline SweepReport run_sweep(SweepSpec const &spec, Signal1D const &signal)
{
  spec.validate();

  std::vector<double> ratios = spec.ratios;
  std::sort(ratios.begin(), ratios.end());
  ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  DctSpectrum const spectrum = dct2_forward(reshape_to_image(signal));

  SweepReport report;
  report.signal_len = signal.size();
  report.signal_mean = mean_value(signal);
  report.signal_variance = variance(signal);
  report.rows.resize(ratios.size() * seeds.size());

  auto job = [&](std::size_t idx) {
    report.rows[idx] = run_trial(signal, spectrum, ratios[idx / seeds.size()], seeds[idx % seeds.size()], spec.solver,
                                 spec.dc_policy);
  };

  std::size_t threads = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.threads;
  threads = std::min(threads, report.rows.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < report.rows.size(); ++i) job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < report.rows.size(); i = next++) job(i);
      });
    }
  }

  for (std::size_t r = 0; r < ratios.size(); ++r) {
    RatioSummary s;
    s.ratio = ratios[r];
    std::vector<double> mses;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      auto const &row = report.rows[r * seeds.size() + k];
      if (row.error.empty()) mses.push_back(row.mse);
      else ++s.failures;
    }
    s.median_mse = median(std::move(mses));
    report.medians.push_back(s);
  }
  return report;
}

inline SweepReport run_sweep(SweepSpec const &spec) { return run_sweep(spec, load_source(spec.source)); }

/// Deterministic CSV: ratio,seed,mse,iters_used,converged,error. Timing is
/// kept out of the CSV (it lives in the JSON sidecar) so identical specs
/// produce identical bytes.
inline std::string sweep_csv(SweepReport const &report)
{
  std::string out = "ratio,seed,mse,iters_used,converged,error\n";
  for (auto const &row : report.rows) {
    std::string err = row.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out += format_double(row.ratio) + ',' + std::to_string(row.seed) + ',' + format_double(row.mse) + ',' +
           std::to_string(row.iters_used) + ',' + (row.converged ? "true" : "false") + ',' + err + '\n';
  }
  return out;
}

inline Json source_json(SignalSource const &source)
{
  if (auto const *path = std::get_if<std::filesystem::path>(&source)) {
    return Json{{"file", path->string()}};
  }
  auto const &g = std::get<GeneratorSpec>(source);
  Json j{{"generator", g.kind}, {"n", g.n}, {"fs", g.fs}, {"seed", g.seed}};
  j["rate"] = g.rate ? Json(*g.rate) : Json(nullptr);
  return j;
}

inline Json sweep_json(SweepSpec const &spec, SweepReport const &report)
{
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  Json rows = Json::array();
  for (auto const &row : report.rows) {
    rows.push_back({{"ratio", row.ratio},
                    {"seed", row.seed},
                    {"mse", num(row.mse)},
                    {"iters_used", row.iters_used},
                    {"converged", row.converged},
                    {"wall_time_s", row.wall_time},
                    {"error", row.error}});
  }
  Json medians = Json::array();
  for (auto const &m : report.medians) {
    medians.push_back({{"ratio", m.ratio}, {"median_mse", num(m.median_mse)}, {"failures", m.failures}});
  }
  return Json{{"software", {{"name", kName}, {"version", kVersion}}},
              {"spec",
               {{"ratios", spec.ratios},
                {"seeds", spec.seeds},
                {"source", source_json(spec.source)},
                {"solver", to_json(spec.solver)},
                {"dc_side_info", spec.dc_policy == DcPolicy::side_info}}},
              {"signal",
               {{"length", report.signal_len}, {"mean", report.signal_mean}, {"variance", report.signal_variance}}},
              {"rows", rows},
              {"medians", medians}};
}

/// Writes `path` (CSV) and `path` + ".json" (provenance sidecar).
inline void write_sweep(std::filesystem::path const &path, SweepSpec const &spec, SweepReport const &report)
{
  write_text(path, sweep_csv(report));
  write_text(std::filesystem::path(path.string() + ".json"), sweep_json(spec, report).dump(2) + "\n");
}

} // namespace tvcs
