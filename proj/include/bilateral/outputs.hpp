#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bilateral/engine.hpp"
#include "bilateral/experiments.hpp"
#include "bilateral/walras.hpp"

namespace bilateral {

// CSV schemas (header line included in every file):
//   trade log:   k,seller,buyer,good,price,quantity,u_gain_seller,u_gain_buyer
//   trajectory:  k,agent,good,threshold
// Agents are numbered from 0 in roster order; goods 1..n are non-money.
// Reals are written in shortest round-trip form.
inline constexpr const char* kTradeLogHeader = "k,seller,buyer,good,price,quantity,u_gain_seller,u_gain_buyer";
inline constexpr const char* kTrajectoryHeader = "k,agent,good,threshold";

std::string format_trade_log(std::span<const TradeRecord> trades);
std::string format_trajectory(std::span<const ThresholdSample> samples);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_trade_log(const std::filesystem::path& path, std::span<const TradeRecord> trades);
void write_trajectory(const std::filesystem::path& path, std::span<const ThresholdSample> samples);

// Final-state record: the economy at termination (utility parameters and
// final holdings) and its consensus prices. Readable by load_state.
nlohmann::json state_to_json(const EconomySpec& spec, const RunSummary& summary);
void write_state(const std::filesystem::path& path, const EconomySpec& spec, const RunSummary& summary);

struct SavedState {
  EconomySpec economy;  // holdings are the final holdings
  std::vector<double> prices;
  std::optional<std::uint64_t> seed;
};

SavedState load_state(const std::filesystem::path& path);

// Runs whose consensus prices deviate most (max-abs over goods) from the
// batch mean, at most `count` of them, in decreasing order of deviation.
std::vector<RunSummary> select_extreme_runs(std::span<const RunSummary> runs, std::size_t count);

// Table of consensus prices, one row per run plus a final "walras" row when
// a benchmark is supplied. Money (column j=0) is the numeraire at 1.
std::string format_comparison(std::span<const RunSummary> runs, const std::optional<WalrasSolution>& walras);
void emit_comparison(const std::filesystem::path& path, std::span<const RunSummary> runs,
                     const std::optional<WalrasSolution>& walras);

struct EdgeworthPath {
  std::size_t agent = 0;
  std::array<std::size_t, 2> goods{1, 2};
  std::array<double, 2> box{0.0, 0.0};  // total supplies of the two goods
  std::vector<std::uint64_t> iterations;
  std::vector<std::array<double, 2>> points;  // agent holdings, first = initial

  // Whether the last point lies on an edge of the box (within tol).
  bool ends_on_boundary(double tol = 1e-12) const;
};

// Replays the trade log from the initial economy and records the agent's
// holdings of the two goods after every trade touching them.
EdgeworthPath edgeworth_path(const Economy& initial, std::span<const TradeRecord> trades,
                             std::array<std::size_t, 2> goods = {1, 2}, std::size_t agent = 0);
nlohmann::json edgeworth_to_json(const EdgeworthPath& path);
void emit_edgeworth_path(const std::filesystem::path& file, const EdgeworthPath& path);

}  // namespace bilateral
