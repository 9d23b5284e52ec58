#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bilateral/core_model.hpp"
#include "bilateral/engine.hpp"

namespace bilateral {

enum class UtilityFamily { CobbDouglas, SeparableQuadMoney };

std::string_view to_string(UtilityFamily family);

struct AgentSpec {
  std::vector<double> holdings;  // n+1
  // cobb_douglas
  std::vector<double> beta;  // n+1
  // separable_quad_money
  double alpha = 0.0;
  std::vector<double> a;  // n, goods 1..n
  std::vector<double> b;  // n

  bool operator==(const AgentSpec&) const = default;
};

// Moves trial * step units of `good` from agent `from` to agent `to` when
// the economy is built.
struct EndowmentShift {
  std::size_t good = 1;
  std::size_t from = 0;
  std::size_t to = 1;
  double step = 0.0;
  std::int64_t trial = 0;

  bool operator==(const EndowmentShift&) const = default;
};

struct EconomySpec {
  UtilityFamily family = UtilityFamily::CobbDouglas;
  bool interior = false;
  std::vector<AgentSpec> agents;
  std::optional<EndowmentShift> shift;

  bool operator==(const EconomySpec&) const = default;
};

struct ExperimentConfig {
  std::string name;
  EconomySpec economy;
  AlgorithmParams params;  // params.seed mirrors first_seed
  std::uint64_t runs = 1;
  std::uint64_t first_seed = 1;
  std::string output_dir = "out";
  std::uint64_t trajectory_stride = 1;

  std::vector<std::uint64_t> seeds() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Initial holdings after applying the endowment shift, one row per agent.
Matrix initial_holdings(const EconomySpec& spec);

// Throws ConfigError naming the offending field.
Economy build_economy(const EconomySpec& spec);

// Config files are JSON documents; comments are allowed.  Unknown keys,
// missing required fields and dimension mismatches raise ConfigError.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

EconomySpec parse_economy(const nlohmann::json& j, std::string_view where = "economy");
nlohmann::json economy_to_json(const EconomySpec& spec);

struct RunSummary {
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::MaxIters;
  std::uint64_t iterations = 0;
  std::uint64_t trades = 0;
  std::uint64_t decays = 0;
  std::vector<double> prices;
  Matrix holdings;
  double max_dispersion = 0.0;
  double max_kkt_residual = 0.0;
  bool kkt_passes = false;
  double runtime_seconds = 0.0;
};

RunSummary summarize(std::uint64_t seed, const EquilibriumReport& report);

struct BatchDispersion {
  std::vector<double> price_range;  // max - min across runs, per good 0..n
  double max_pairwise_difference = 0.0;
};

BatchDispersion batch_dispersion(std::span<const RunSummary> runs);

struct BatchOptions {
  // Where to write files; nothing is written when empty.
  std::optional<std::filesystem::path> output_dir;
  unsigned jobs = 1;
};

struct BatchResult {
  std::vector<RunSummary> runs;
  BatchDispersion dispersion;
};

// One engine run per seed. With an output directory, writes per seed
// trades_seed<N>.csv, thresholds_seed<N>.csv, state_seed<N>.json (and
// edgeworth_seed<N>.json for two-agent economies), then summary.json and
// timings.csv. An empty seed list returns an empty result and writes nothing.
// Throws IoError before any run if the directory cannot be written.
BatchResult run_batch(const ExperimentConfig& config, std::span<const std::uint64_t> seeds,
                      const BatchOptions& options = {});

// Exit status convention for the CLI.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

}  // namespace bilateral
