#include "bilateral/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "bilateral/errors.hpp"

namespace bilateral {

using nlohmann::json;

std::string format_trade_log(std::span<const TradeRecord> trades) {
  std::string out = kTradeLogHeader;
  out += '\n';
  for (const auto& t : trades) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", t.iteration, t.seller, t.buyer, t.good, t.price, t.quantity,
                       t.utility_gain_seller, t.utility_gain_buyer);
  }
  return out;
}

std::string format_trajectory(std::span<const ThresholdSample> samples) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (const auto& s : samples)
    for (std::size_t i = 0; i < s.thresholds.rows(); ++i)
      for (std::size_t j = 0; j < s.thresholds.cols(); ++j)
        out += fmt::format("{},{},{},{}\n", s.iteration, i, j + 1, s.thresholds(i, j));
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("{}: cannot open for writing", path.string()));
  out << text;
  out.flush();
  if (!out) throw IoError(fmt::format("{}: write failed", path.string()));
}

void write_trade_log(const std::filesystem::path& path, std::span<const TradeRecord> trades) {
  write_text(path, format_trade_log(trades));
}

void write_trajectory(const std::filesystem::path& path, std::span<const ThresholdSample> samples) {
  write_text(path, format_trajectory(samples));
}

json state_to_json(const EconomySpec& spec, const RunSummary& summary) {
  EconomySpec final_spec = spec;
  final_spec.shift.reset();
  if (summary.holdings.rows() != spec.agents.size())
    throw StructuralError("state_to_json: summary holdings do not match the economy");
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    const auto row = summary.holdings.row(i);
    final_spec.agents[i].holdings.assign(row.begin(), row.end());
  }
  json j;
  j["seed"] = summary.seed;
  j["status"] = std::string(to_string(summary.status));
  j["iterations"] = summary.iterations;
  j["prices"] = summary.prices;
  j["max_kkt_residual"] = summary.max_kkt_residual;
  j["economy"] = economy_to_json(final_spec);
  return j;
}

void write_state(const std::filesystem::path& path, const EconomySpec& spec, const RunSummary& summary) {
  write_text(path, state_to_json(spec, summary).dump(2) + "\n");
}

SavedState load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("{}: cannot open state file", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: parse error: {}", path.string(), e.what()));
  }
  try {
    if (!j.is_object()) throw ConfigError("state: expected an object");
    for (const auto& [key, _] : j.items()) {
      static const std::vector<std::string> known{"seed", "status", "iterations", "prices", "max_kkt_residual", "economy"};
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError(fmt::format("state.{}: unknown field", key));
    }
    if (!j.contains("economy")) throw ConfigError("state.economy: missing required field");
    if (!j.contains("prices") || !j["prices"].is_array()) throw ConfigError("state.prices: expected an array of numbers");
    SavedState s;
    s.economy = parse_economy(j["economy"], "state.economy");
    for (const auto& p : j["prices"]) {
      if (!p.is_number()) throw ConfigError("state.prices: expected an array of numbers");
      s.prices.push_back(p.get<double>());
    }
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw ConfigError("state.seed: expected a nonnegative integer");
      s.seed = j["seed"].get<std::uint64_t>();
    }
    return s;
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<RunSummary> select_extreme_runs(std::span<const RunSummary> runs, std::size_t count) {
  if (runs.empty() || count == 0) return {};
  const std::size_t goods = runs.front().prices.size();
  std::vector<double> mean(goods, 0.0);
  for (const auto& r : runs)
    for (std::size_t j = 0; j < goods; ++j) mean[j] += r.prices[j];
  for (auto& v : mean) v /= static_cast<double>(runs.size());

  std::vector<double> deviation(runs.size(), 0.0);
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (std::size_t j = 0; j < goods; ++j) deviation[r] = std::max(deviation[r], std::abs(runs[r].prices[j] - mean[j]));

  std::vector<std::size_t> order(runs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deviation[a] > deviation[b]; });
  order.resize(std::min(count, order.size()));

  std::vector<RunSummary> out;
  for (auto idx : order) out.push_back(runs[idx]);
  return out;
}

std::string format_comparison(std::span<const RunSummary> runs, const std::optional<WalrasSolution>& walras) {
  std::size_t goods = 0;
  if (!runs.empty()) goods = runs.front().prices.size();
  else if (walras) goods = walras->prices.size();

  std::string out = "run";
  for (std::size_t j = 0; j < goods; ++j) out += fmt::format(",p{}", j);
  out += '\n';
  for (const auto& r : runs) {
    out += fmt::format("seed{}", r.seed);
    for (double p : r.prices) out += fmt::format(",{:.4f}", p);
    out += '\n';
  }
  if (walras) {
    out += "walras";
    for (double p : walras->prices) out += fmt::format(",{:.4f}", p);
    out += '\n';
  }
  return out;
}

void emit_comparison(const std::filesystem::path& path, std::span<const RunSummary> runs,
                     const std::optional<WalrasSolution>& walras) {
  write_text(path, format_comparison(runs, walras));
}

bool EdgeworthPath::ends_on_boundary(double tol) const {
  if (points.empty()) return false;
  const auto& x = points.back();
  for (std::size_t c = 0; c < 2; ++c) {
    const double slack = tol * std::max(1.0, box[c]);
    if (x[c] <= slack || x[c] >= box[c] - slack) return true;
  }
  return false;
}

EdgeworthPath edgeworth_path(const Economy& initial, std::span<const TradeRecord> trades, std::array<std::size_t, 2> goods,
                             std::size_t agent) {
  if (agent >= initial.agent_count()) throw DomainError("edgeworth_path: agent out of range");
  for (auto g : goods)
    if (g == kMoney || g >= initial.goods_count()) throw DomainError("edgeworth_path: goods must be non-money goods");

  EdgeworthPath path;
  path.agent = agent;
  path.goods = goods;
  const auto& supply = initial.total_supply();
  path.box = {supply[goods[0]], supply[goods[1]]};
  const auto& h = initial.agent(agent).holdings;
  std::array<double, 2> x{h[goods[0]], h[goods[1]]};
  path.iterations.push_back(0);
  path.points.push_back(x);
  for (const auto& t : trades) {
    if (t.seller != agent && t.buyer != agent) continue;
    const std::size_t c = t.good == goods[0] ? 0 : t.good == goods[1] ? 1 : 2;
    if (c == 2) continue;
    x[c] = t.seller == agent ? x[c] - t.quantity : x[c] + t.quantity;
    path.iterations.push_back(t.iteration);
    path.points.push_back(x);
  }
  return path;
}

json edgeworth_to_json(const EdgeworthPath& path) {
  json points = json::array();
  for (const auto& p : path.points) points.push_back({p[0], p[1]});
  return {{"agent", path.agent},
          {"goods", {path.goods[0], path.goods[1]}},
          {"box", {path.box[0], path.box[1]}},
          {"k", path.iterations},
          {"points", std::move(points)},
          {"ends_on_boundary", path.ends_on_boundary()}};
}

void emit_edgeworth_path(const std::filesystem::path& file, const EdgeworthPath& path) {
  write_text(file, edgeworth_to_json(path).dump(2) + "\n");
}

}  // namespace bilateral
