#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "signal.hpp"

// Synthetic stand-ins for recorded biomedical signals. All generators are
// deterministic functions of their arguments.

namespace tvcs {

namespace detail {

inline void check_gen_args(std::size_t n, double fs, double rate, char const *who)
{
  if (n < 1) throw DomainError(std::string(who) + ": n must be >= 1");
  if (!(fs > 0.0) || !std::isfinite(fs)) throw DomainError(std::string(who) + ": fs must be > 0");
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError(std::string(who) + ": rate must be > 0");
}

/// Uniform in [0, 1) from the top 53 bits; independent of the standard
/// library's distribution implementations.
inline double unit_uniform(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace detail

/// One Gaussian bump of the PQRST complex, timed relative to the R peak.
struct WaveComponent
{
  double amplitude; // mV at unit amplitude scale
  double offset;    // seconds from the R peak
  double width;     // Gaussian sigma, seconds
};

inline constexpr std::array<WaveComponent, 5> kPqrst{{
  {0.15, -0.20, 0.025},  // P
  {-0.15, -0.035, 0.010}, // Q
  {1.00, 0.0, 0.012},     // R
  {-0.25, 0.035, 0.010},  // S
  {0.30, 0.28, 0.045},    // T
}};

/// Relative amplitude of the baseline wander.
inline constexpr double kEcgWander = 0.05;

/// ECG-like waveform: a PQRST complex per beat (R peak at the middle of
/// each RR interval) plus a slow seeded baseline wander. Everything scales
/// with `amplitude`.
inline Signal1D gen_ecg_like(std::size_t n, double bpm, double fs, std::uint64_t seed, double amplitude = 1.0)
{
  detail::check_gen_args(n, fs, bpm, "gen_ecg_like");
  if (!std::isfinite(amplitude)) throw DomainError("gen_ecg_like: amplitude must be finite");

  std::mt19937_64 rng(seed);
  double const wander_freq = 0.15 + 0.2 * detail::unit_uniform(rng); // Hz
  double const wander_phase = detail::kTwoPi * detail::unit_uniform(rng);

  double const period = 60.0 / bpm;
  double reach = 0.0;
  for (auto const &w : kPqrst) reach = std::max(reach, std::abs(w.offset) + 6.0 * w.width);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double const t = static_cast<double>(i) / fs;
    double v = 0.0;
    auto const first = static_cast<long long>(std::floor((t - reach) / period - 0.5));
    auto const last = static_cast<long long>(std::ceil((t + reach) / period - 0.5));
    for (long long beat = first; beat <= last; ++beat) {
      double const r_time = (static_cast<double>(beat) + 0.5) * period;
      for (auto const &w : kPqrst) {
        double const u = (t - r_time - w.offset) / w.width;
        v += w.amplitude * std::exp(-0.5 * u * u);
      }
    }
    v += kEcgWander * std::sin(detail::kTwoPi * wander_freq * t + wander_phase);
    out[i] = amplitude * v;
  }
  return Signal1D(std::move(out));
}

/// Cuff-pressure-like waveform in mmHg: an exponentially deflating cuff
/// pressure with superimposed arterial oscillations. Each pulse is the sum
/// of two harmonics (fundamental plus a phase-shifted second harmonic that
/// produces the dicrotic notch) under an envelope peaking near 100 mmHg.
inline Signal1D gen_pressure_like(std::size_t n, double fs, std::uint64_t seed, double bpm = 72.0)
{
  detail::check_gen_args(n, fs, bpm, "gen_pressure_like");

  std::mt19937_64 rng(seed);
  double const rate = bpm / 60.0 * (1.0 + 0.05 * (detail::unit_uniform(rng) - 0.5));
  double const phase = detail::kTwoPi * detail::unit_uniform(rng);
  double const decay = 20.0 * (1.0 + 0.1 * (detail::unit_uniform(rng) - 0.5)); // seconds

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double const t = static_cast<double>(i) / fs;
    double const cuff = 40.0 + 140.0 * std::exp(-t / decay);
    double const z = (cuff - 100.0) / 25.0;
    double const envelope = 3.0 * std::exp(-z * z);
    double const w = detail::kTwoPi * rate * t + phase;
    double const pulse = std::sin(w) + 0.4 * std::sin(2.0 * w + 0.8);
    out[i] = cuff + envelope * pulse;
  }
  return Signal1D(std::move(out));
}

/// Respiration-belt-like waveform: a sinusoid at `breaths_per_min` whose
/// amplitude is slowly modulated by a seeded positive envelope.
inline Signal1D gen_respiration_like(std::size_t n, double fs, std::uint64_t seed, double breaths_per_min = 12.0)
{
  detail::check_gen_args(n, fs, breaths_per_min, "gen_respiration_like");

  std::mt19937_64 rng(seed);
  double const phase = detail::kTwoPi * detail::unit_uniform(rng);
  double const mod_freq = 0.01 + 0.02 * detail::unit_uniform(rng); // Hz
  double const mod_phase = detail::kTwoPi * detail::unit_uniform(rng);
  double const freq = breaths_per_min / 60.0;

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double const t = static_cast<double>(i) / fs;
    double const envelope = 1.0 + 0.25 * std::sin(detail::kTwoPi * mod_freq * t + mod_phase);
    out[i] = envelope * std::sin(detail::kTwoPi * freq * t + phase);
  }
  return Signal1D(std::move(out));
}

} // namespace tvcs
