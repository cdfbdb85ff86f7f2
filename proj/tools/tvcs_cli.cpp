// tvcs command line: generate synthetic signals, reconstruct a signal from a
// random subset of its 2D DCT coefficients, and run ratio/seed sweeps.
//
// Exit codes: 0 success, 1 usage error, 2 solver failure, 3 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvcs/tvcs.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kSolverFailure = 2;
constexpr int kIoError = 3;

struct GenOptions
{
  std::string kind;
  std::size_t n = 0;
  double fs = 0.0;
  std::optional<double> bpm;
  std::uint64_t seed = 0;
  std::string out;
};

struct ReconstructOptions
{
  std::string in;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  std::string solver;
  std::string out;
  std::string dump_images;
  std::string report;
  bool blind_dc = false;
  bool verbose = false;
};

struct SweepOptions
{
  std::string in;
  std::string kind;
  std::size_t n = 4096;
  double fs = 250.0;
  std::optional<double> bpm;
  std::uint64_t gen_seed = 0;
  std::vector<double> ratios = tvcs::default_ratio_grid();
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::string solver;
  std::string out;
  std::size_t threads = 1;
  bool blind_dc = false;
};

tvcs::SolverConfig solver_from(std::string const &path)
{
  return path.empty() ? tvcs::SolverConfig{} : tvcs::load_solver_config(path);
}

int run_gen(GenOptions const &o)
{
  tvcs::GeneratorSpec g{o.kind, o.n, o.fs, o.bpm, o.seed};
  tvcs::write_signal_csv(o.out, tvcs::generate(g));
  return 0;
}

int run_reconstruct(ReconstructOptions const &o)
{
  auto solver = solver_from(o.solver);
  if (o.verbose && solver.log_every == 0) solver.log_every = 10;
  auto const signal = tvcs::read_signal_csv(o.in);
  auto const image = tvcs::reshape_to_image(signal);
  auto const mask = tvcs::draw_mask(image.side(), o.ratio, o.seed);
  auto const meas =
    tvcs::measure(tvcs::dct2_forward(image), mask, o.blind_dc ? tvcs::DcPolicy::none : tvcs::DcPolicy::side_info);

  tvcs::ReconstructionResult result;
  try {
    result = tvcs::reconstruct(meas, solver);
  } catch (tvcs::SolverError const &e) {
    std::cerr << "tvcs: solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }

  auto const recovered = tvcs::flatten_to_signal(result.image);
  double const err = tvcs::mse(signal, recovered);
  tvcs::write_signal_csv(o.out, recovered);

  if (o.verbose) {
    std::cerr << tvcs::iteration_log_csv(result.log);
  }

  if (!o.dump_images.empty()) {
    std::filesystem::path const dir(o.dump_images);
    std::filesystem::create_directories(dir);
    auto const b0 = tvcs::write_pgm(dir / "original.pgm", image.values);
    auto const b1 = tvcs::write_pgm(dir / "reconstructed.pgm", result.image.values);
    tvcs::Json j{{"side", image.side()},
                 {"original", {{"file", "original.pgm"}, {"min", b0.min}, {"max", b0.max}}},
                 {"reconstructed", {{"file", "reconstructed.pgm"}, {"min", b1.min}, {"max", b1.max}}}};
    tvcs::write_text(dir / "images.json", j.dump(2) + "\n");
  }

  if (!o.report.empty()) {
    tvcs::Json log = tvcs::Json::array();
    for (auto const &r : result.log) {
      log.push_back({{"iter", r.iter}, {"tv", r.tv}, {"rel_change", r.rel_change}, {"residual", r.residual}});
    }
    tvcs::Json j{{"software", {{"name", tvcs::kName}, {"version", tvcs::kVersion}}},
                 {"input", o.in},
                 {"ratio", o.ratio},
                 {"seed", o.seed},
                 {"dc_side_info", !o.blind_dc},
                 {"mask", tvcs::to_json(mask)},
                 {"solver", tvcs::to_json(solver)},
                 {"iters_used", result.iters_used},
                 {"converged", result.converged},
                 {"final_tv", result.final_tv},
                 {"constraint_residual", result.constraint_residual},
                 {"mse", err},
                 {"log", log}};
    tvcs::write_text(o.report, j.dump(2) + "\n");
  }

  std::cout << "side " << image.side() << "  measured " << mask.kept_ranks.size() << "/" << image.side() * image.side()
            << "  iters " << result.iters_used << (result.converged ? " (converged)" : " (max_iters)") << "  mse "
            << tvcs::format_double(err) << "\n";
  return 0;
}

int run_sweep(SweepOptions const &o)
{
  tvcs::SweepSpec spec;
  spec.ratios = o.ratios;
  spec.seeds = o.seeds;
  spec.solver = solver_from(o.solver);
  spec.threads = o.threads;
  spec.dc_policy = o.blind_dc ? tvcs::DcPolicy::none : tvcs::DcPolicy::side_info;
  if (!o.in.empty()) {
    spec.source = std::filesystem::path(o.in);
  } else {
    spec.source = tvcs::GeneratorSpec{o.kind, o.n, o.fs, o.bpm, o.gen_seed};
  }
  auto const report = tvcs::run_sweep(spec);
  tvcs::write_sweep(o.out, spec, report);
  for (auto const &m : report.medians) {
    std::cout << tvcs::format_double(m.ratio) << "  median mse " << tvcs::format_double(m.median_mse);
    if (m.failures > 0) std::cout << "  (" << m.failures << " failed)";
    std::cout << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Total-variation reconstruction of 1D signals from random 2D DCT coefficients"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tvcs::kVersion));

  GenOptions gen;
  auto *gen_cmd = app.add_subcommand("gen", "Write a synthetic signal as CSV");
  gen_cmd->add_option("--kind", gen.kind, "ecg | pressure | respiration")
    ->required()
    ->check(CLI::IsMember({"ecg", "pressure", "respiration"}));
  gen_cmd->add_option("--n", gen.n, "Number of samples")->required();
  gen_cmd->add_option("--fs", gen.fs, "Sampling rate, Hz")->required();
  gen_cmd->add_option("--bpm", gen.bpm, "Beats (or breaths) per minute");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

  ReconstructOptions rec;
  auto *rec_cmd = app.add_subcommand("reconstruct", "Sample and reconstruct one signal");
  rec_cmd->add_option("--in", rec.in, "Input signal CSV")->required();
  rec_cmd->add_option("--ratio", rec.ratio, "Fraction of DCT coefficients measured, (0, 1]")->required();
  rec_cmd->add_option("--seed", rec.seed, "Mask seed")->required();
  rec_cmd->add_option("--solver", rec.solver, "Solver config (key = value or JSON)");
  rec_cmd->add_option("--out", rec.out, "Reconstructed signal CSV")->required();
  rec_cmd->add_option("--dump-images", rec.dump_images, "Directory for original/reconstructed PGM images");
  rec_cmd->add_option("--report", rec.report, "JSON report (mask, solver, MSE, iteration log)");
  rec_cmd->add_flag("--blind-dc", rec.blind_dc, "Do not send the DC coefficient as side information");
  rec_cmd->add_flag("--verbose,-v", rec.verbose, "Iteration log as CSV on stderr (every 10 iterations unless log_every is set)");

  SweepOptions sw;
  auto *sweep_cmd = app.add_subcommand("sweep", "MSE over a grid of ratios and mask seeds");
  auto *in_opt = sweep_cmd->add_option("--in", sw.in, "Input signal CSV");
  auto *kind_opt = sweep_cmd->add_option("--kind", sw.kind, "Synthetic source: ecg | pressure | respiration")
                     ->check(CLI::IsMember({"ecg", "pressure", "respiration"}));
  in_opt->excludes(kind_opt);
  sweep_cmd->add_option("--n", sw.n, "Synthetic source length")->capture_default_str();
  sweep_cmd->add_option("--fs", sw.fs, "Synthetic source sampling rate, Hz")->capture_default_str();
  sweep_cmd->add_option("--bpm", sw.bpm, "Synthetic source rate per minute");
  sweep_cmd->add_option("--gen-seed", sw.gen_seed, "Synthetic source seed")->capture_default_str();
  sweep_cmd->add_option("--ratios", sw.ratios, "Comma-separated ratios")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--seeds", sw.seeds, "Comma-separated mask seeds")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--solver", sw.solver, "Solver config (key = value or JSON)");
  sweep_cmd->add_option("--out", sw.out, "Report CSV; a .json sidecar is written next to it")->required();
  sweep_cmd->add_option("--threads", sw.threads, "Worker threads, 0 = all cores")->capture_default_str();
  sweep_cmd->add_flag("--blind-dc", sw.blind_dc, "Do not send the DC coefficient as side information");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*rec_cmd) return run_reconstruct(rec);
    if (sweep_cmd->parsed()) {
      if (sw.in.empty() && sw.kind.empty()) {
        std::cerr << "tvcs sweep: one of --in or --kind is required\n";
        return kUsageError;
      }
      return run_sweep(sw);
    }
  } catch (tvcs::IoError const &e) {
    std::cerr << "tvcs: " << e.what() << "\n";
    return kIoError;
  } catch (std::filesystem::filesystem_error const &e) {
    std::cerr << "tvcs: " << e.what() << "\n";
    return kIoError;
  } catch (tvcs::DomainError const &e) {
    std::cerr << "tvcs: " << e.what() << "\n";
    return kUsageError;
  } catch (tvcs::SolverError const &e) {
    std::cerr << "tvcs: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kUsageError;
}
