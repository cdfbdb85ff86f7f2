#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "grid.hpp"
#include "sampling.hpp"
#include "signal.hpp"
#include "tv_solver.hpp"

namespace tvcs {

using Json = nlohmann::json;

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  auto const res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::string read_text(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(std::filesystem::path const &path, std::string_view text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

// ---------------------------------------------------------------------------
// Signal CSV: one value per line, or a single comma-separated row. Values are
// parsed as binary64; NaN and infinities are rejected.

inline Signal1D parse_signal_text(std::string_view text)
{
  std::vector<double> values;
  std::size_t line = 1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char const ch = text[pos];
    if (ch == '\n') {
      ++line;
      ++pos;
      continue;
    }
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < text.size() && text[end] != ',' && text[end] != '\n' && text[end] != '\r' && text[end] != ' ' &&
           text[end] != '\t') {
      ++end;
    }
    std::string_view token = text.substr(pos, end - pos);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    auto const [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw IoError("signal: line " + std::to_string(line) + ": cannot parse '" + std::string(text.substr(pos, end - pos)) +
                    "'");
    }
    if (!std::isfinite(v)) {
      throw IoError("signal: line " + std::to_string(line) + ": non-finite value");
    }
    values.push_back(v);
    pos = end;
  }
  if (values.empty()) throw IoError("signal: no samples");
  return Signal1D(std::move(values));
}

inline Signal1D read_signal_csv(std::filesystem::path const &path)
{
  try {
    return parse_signal_text(read_text(path));
  } catch (IoError const &e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

inline std::string signal_csv(Signal1D const &signal)
{
  std::string out;
  out.reserve(signal.size() * 24);
  for (double v : signal.samples()) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

inline void write_signal_csv(std::filesystem::path const &path, Signal1D const &signal)
{
  write_text(path, signal_csv(signal));
}

// ---------------------------------------------------------------------------
// Solver config: a JSON object, or `key = value` lines with '#' comments.

inline void set_config_key(SolverConfig &cfg, std::string const &key, std::string const &value)
{
  auto as_double = [&] {
    double v = 0.0;
    auto const [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw DomainError("solver config: bad number for '" + key + "': " + value);
    }
    return v;
  };
  auto as_count = [&] {
    std::size_t v = 0;
    auto const [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
      throw DomainError("solver config: bad integer for '" + key + "': " + value);
    }
    return v;
  };
  if (key == "method") {
    if (value == "admm") cfg.method = SolverMethod::admm;
    else if (value == "pdhg") cfg.method = SolverMethod::pdhg;
    else throw DomainError("solver config: unknown method '" + value + "'");
  } else if (key == "max_iters") cfg.max_iters = as_count();
  else if (key == "tol") cfg.tol = as_double();
  else if (key == "penalty") cfg.penalty = as_double();
  else if (key == "step_primal") cfg.step_primal = as_double();
  else if (key == "step_dual") cfg.step_dual = as_double();
  else if (key == "log_every") cfg.log_every = as_count();
  else throw DomainError("solver config: unknown key '" + key + "'");
}

inline std::string trim(std::string_view s)
{
  auto const first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto const last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

inline SolverConfig parse_solver_config(std::string_view text)
{
  SolverConfig cfg;
  std::string const body = trim(text);
  if (!body.empty() && body.front() == '{') {
    Json j;
    try {
      j = Json::parse(body);
    } catch (Json::exception const &e) {
      throw IoError(std::string("solver config: ") + e.what());
    }
    for (auto const &[key, value] : j.items()) {
      set_config_key(cfg, key, value.is_string() ? value.get<std::string>() : value.dump());
    }
  } else {
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::string const t = trim(line);
      if (t.empty()) continue;
      auto const eq = t.find('=');
      if (eq == std::string::npos) throw IoError("solver config: expected key = value, got '" + t + "'");
      set_config_key(cfg, trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    }
  }
  cfg.validate();
  return cfg;
}

inline SolverConfig load_solver_config(std::filesystem::path const &path) { return parse_solver_config(read_text(path)); }

inline Json to_json(SolverConfig const &cfg)
{
  return Json{{"method", cfg.method == SolverMethod::admm ? "admm" : "pdhg"},
              {"max_iters", cfg.max_iters},
              {"tol", cfg.tol},
              {"penalty", cfg.penalty},
              {"step_primal", cfg.step_primal},
              {"step_dual", cfg.step_dual},
              {"log_every", cfg.log_every}};
}

// ---------------------------------------------------------------------------
// Mask provenance: {"side", "ratio", "seed", "kept_ranks"}; ranks are 0-based
// zig-zag ranks.

inline Json to_json(MeasurementMask const &mask)
{
  return Json{{"side", mask.side}, {"ratio", mask.ratio}, {"seed", mask.seed}, {"kept_ranks", mask.kept_ranks}};
}

inline MeasurementMask mask_from_json(Json const &j)
{
  MeasurementMask mask;
  try {
    mask.side = j.at("side").get<std::size_t>();
    mask.ratio = j.at("ratio").get<double>();
    mask.seed = j.at("seed").get<std::uint64_t>();
    mask.kept_ranks = j.at("kept_ranks").get<std::vector<std::size_t>>();
  } catch (Json::exception const &e) {
    throw DomainError(std::string("mask json: ") + e.what());
  }
  check_mask(mask);
  return mask;
}

// ---------------------------------------------------------------------------
// Iteration log CSV: iter,tv,rel_change,residual

inline std::string iteration_log_csv(std::vector<IterationRecord> const &log)
{
  std::string out = "iter,tv,rel_change,residual\n";
  for (auto const &r : log) {
    out += std::to_string(r.iter) + ',' + format_double(r.tv) + ',' + format_double(r.rel_change) + ',' +
           format_double(r.residual) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// PGM: binary 8-bit (P5), min-max normalized. Row r of the file is matrix row r.

struct PgmBounds
{
  double min = 0.0;
  double max = 0.0;
};

inline PgmBounds write_pgm(std::filesystem::path const &path, Grid const &image)
{
  auto const v = image.values();
  PgmBounds bounds{v.empty() ? 0.0 : v[0], v.empty() ? 0.0 : v[0]};
  for (double x : v) {
    bounds.min = std::min(bounds.min, x);
    bounds.max = std::max(bounds.max, x);
  }
  double const span = bounds.max - bounds.min;
  std::string out = "P5\n" + std::to_string(image.side()) + ' ' + std::to_string(image.side()) + "\n255\n";
  for (std::size_t r = 0; r < image.side(); ++r) {
    for (std::size_t c = 0; c < image.side(); ++c) {
      double const t = span > 0.0 ? (image(r, c) - bounds.min) / span : 0.0;
      out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
    }
  }
  write_text(path, out);
  return bounds;
}

} // namespace tvcs
