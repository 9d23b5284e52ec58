// bilateral: run bilateral-trading experiments, solve the Walras benchmark,
// and re-check saved final states.
//
//   bilateral run --config configs/example1.cfg [--seed N] [--runs K] [--out DIR]
//   bilateral walras --config configs/example2.cfg
//   bilateral verify --state out/example1/state_seed1.json --tol 1e-5
//
// Exit status: 0 on success, 2 when a run ends without equilibrium or a state
// fails verification, 1 on any error.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bilateral/engine.hpp"
#include "bilateral/errors.hpp"
#include "bilateral/experiments.hpp"
#include "bilateral/outputs.hpp"
#include "bilateral/walras.hpp"

namespace {

using namespace bilateral;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> runs;
  std::optional<double> eps_p;
  std::optional<double> eps_delta;
  std::optional<double> lambda;
  std::optional<std::uint64_t> max_iters;
  std::optional<std::string> out;
  unsigned jobs = 1;
  std::size_t compare_rows = 4;
};

std::string join(const std::vector<double>& v, const char* spec = "{:.4f}") {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ' ';
    s += fmt::format(fmt::runtime(spec), v[k]);
  }
  return s;
}

int cmd_run(const RunArgs& a) {
  ExperimentConfig config = load_config(a.config);
  if (a.seed) config.first_seed = *a.seed;
  if (a.runs) config.runs = *a.runs;
  if (a.eps_p) config.params.eps_p = *a.eps_p;
  if (a.eps_delta) config.params.eps_delta = *a.eps_delta;
  if (a.lambda) config.params.lambda = *a.lambda;
  if (a.max_iters) config.params.max_iters = *a.max_iters;
  if (a.out) config.output_dir = *a.out;
  config.params.seed = config.first_seed;
  config.params.validate();

  const auto seeds = config.seeds();
  const std::filesystem::path dir = config.output_dir;
  BatchOptions options;
  options.output_dir = dir;
  options.jobs = a.jobs;
  const BatchResult batch = run_batch(config, seeds, options);

  bool all_converged = true;
  for (const auto& r : batch.runs) {
    fmt::print("seed {:>4}  {:<13} k={:<7} trades={:<6} decays={:<3} kkt={:.2e}  p = {}\n", r.seed,
               to_string(r.status), r.iterations, r.trades, r.decays, r.max_kkt_residual, join(r.prices));
    all_converged = all_converged && r.status == RunStatus::Equilibrium;
  }
  if (!batch.runs.empty()) {
    fmt::print("cross-run max price difference: {:.3e}\n", batch.dispersion.max_pairwise_difference);

    std::optional<WalrasSolution> walras;
    if (config.economy.family == UtilityFamily::CobbDouglas) walras = solve_walras_cobb_douglas(build_economy(config.economy));
    emit_comparison(dir / "comparison.csv", select_extreme_runs(batch.runs, a.compare_rows), walras);
    fmt::print("wrote {}\n", dir.string());
  }
  return all_converged ? kExitSuccess : kExitNotConverged;
}

int cmd_walras(const std::string& path) {
  const ExperimentConfig config = load_config(path);
  const WalrasSolution w = solve_walras_cobb_douglas(build_economy(config.economy));
  fmt::print("prices: {}\n", join(w.prices));
  for (std::size_t i = 0; i < w.demands.rows(); ++i) {
    const auto row = w.demands.row(i);
    fmt::print("agent {} demand: {}\n", i, join(std::vector<double>(row.begin(), row.end())));
  }
  fmt::print("residual: {:.3e}  rcond: {:.3e}\n", w.residual, w.rcond);
  return kExitSuccess;
}

int cmd_verify(const std::string& path, double tol) {
  const SavedState state = load_state(path);
  const Economy economy = build_economy(state.economy);
  const KktReport kkt = verify_equilibrium(economy, state.prices, tol);
  fmt::print("{}: max residual {:.3e} (tol {:.1e}) -> {}\n", path, kkt.max_residual, tol, kkt.passes ? "pass" : "FAIL");
  for (std::size_t j = 0; j < kkt.max_threshold_gap.size(); ++j)
    fmt::print("  good {}: max threshold gap {:.3e}\n", j + 1, kkt.max_threshold_gap[j]);
  return kkt.passes ? kExitSuccess : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilateral trading toward equilibrium in an exchange economy"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the bilateral engine for a batch of seeds");
  run->add_option("--config", run_args.config, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_args.seed, "First seed (overrides first_seed)");
  run->add_option("--runs", run_args.runs, "Number of seeded runs");
  run->add_option("--eps-p", run_args.eps_p, "Threshold-dispersion stopping tolerance");
  run->add_option("--eps-delta", run_args.eps_delta, "Premium floor");
  run->add_option("--lambda", run_args.lambda, "Premium decay factor in (0,1)");
  run->add_option("--max-iters", run_args.max_iters, "Iteration budget");
  run->add_option("--out", run_args.out, "Output directory");
  run->add_option("--jobs", run_args.jobs, "Seeds run concurrently")->check(CLI::PositiveNumber);
  run->add_option("--compare-rows", run_args.compare_rows, "Bilateral rows in comparison.csv");

  std::string walras_config;
  auto* walras = app.add_subcommand("walras", "Solve the Walras benchmark for a Cobb-Douglas economy");
  walras->add_option("--config", walras_config, "Experiment config file")->required()->check(CLI::ExistingFile);

  std::string state_path;
  double tol = 1e-5;
  auto* verify = app.add_subcommand("verify", "Check a saved final state against the equilibrium conditions");
  verify->add_option("--state", state_path, "state_seed<N>.json written by run")->required()->check(CLI::ExistingFile);
  verify->add_option("--tol", tol, "Residual tolerance")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitError;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*walras) return cmd_walras(walras_config);
    if (*verify) return cmd_verify(state_path, tol);
  } catch (const bilateral::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitError;
  }
  return kExitError;
}
