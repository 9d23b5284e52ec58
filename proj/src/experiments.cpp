#include "bilateral/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "bilateral/errors.hpp"
#include "bilateral/outputs.hpp"
#include "bilateral/utility.hpp"

namespace bilateral {

using nlohmann::json;

std::string_view to_string(UtilityFamily family) {
  return family == UtilityFamily::CobbDouglas ? "cobb_douglas" : "separable_quad_money";
}

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
  std::vector<std::uint64_t> out(runs);
  for (std::uint64_t r = 0; r < runs; ++r) out[r] = first_seed + r;
  return out;
}

// ---------------------------------------------------------------------------
// Field readers. Every error names the dotted path of the offending field.

namespace {

[[noreturn]] void fail(std::string_view where, std::string_view what) {
  throw ConfigError(fmt::format("{}: {}", where, what));
}

std::string field(std::string_view where, std::string_view key) { return fmt::format("{}.{}", where, key); }

void require_object(const json& j, std::string_view where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(field(where, key), "unknown field");
}

const json& require(const json& j, std::string_view where, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) fail(field(where, key), "missing required field");
  return *it;
}

double as_number(const json& j, std::string_view where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::uint64_t as_count(const json& j, std::string_view where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  fail(where, "expected a nonnegative integer");
}

std::int64_t as_integer(const json& j, std::string_view where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<std::int64_t>();
}

std::vector<double> as_vector(const json& j, std::string_view where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_number(j[k], fmt::format("{}[{}]", where, k)));
  return out;
}

Matrix as_matrix(const json& j, std::string_view where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < j.size(); ++r) rows.push_back(as_vector(j[r], fmt::format("{}[{}]", where, r)));
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) fail(fmt::format("{}[{}]", where, r), "rows differ in length");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

AgentSpec parse_agent(const json& j, UtilityFamily family, std::string_view where) {
  require_object(j, where);
  AgentSpec a;
  a.holdings = as_vector(require(j, where, "holdings"), field(where, "holdings"));
  if (family == UtilityFamily::CobbDouglas) {
    check_keys(j, where, {"holdings", "beta"});
    a.beta = as_vector(require(j, where, "beta"), field(where, "beta"));
  } else {
    check_keys(j, where, {"holdings", "alpha", "a", "b"});
    a.alpha = as_number(require(j, where, "alpha"), field(where, "alpha"));
    a.a = as_vector(require(j, where, "a"), field(where, "a"));
    a.b = as_vector(require(j, where, "b"), field(where, "b"));
  }
  return a;
}

AlgorithmParams parse_algorithm(const json& j, std::string_view where) {
  require_object(j, where);
  check_keys(j, where, {"eps_p", "eps_delta", "lambda", "delta0_scale", "delta0", "max_iters", "min_trade_quantity"});
  AlgorithmParams p;
  if (j.contains("eps_p")) p.eps_p = as_number(j["eps_p"], field(where, "eps_p"));
  if (j.contains("eps_delta")) p.eps_delta = as_number(j["eps_delta"], field(where, "eps_delta"));
  if (j.contains("lambda")) p.lambda = as_number(j["lambda"], field(where, "lambda"));
  if (j.contains("delta0_scale")) p.delta0_scale = as_number(j["delta0_scale"], field(where, "delta0_scale"));
  if (j.contains("delta0")) p.delta0 = as_matrix(j["delta0"], field(where, "delta0"));
  if (j.contains("max_iters")) p.max_iters = as_count(j["max_iters"], field(where, "max_iters"));
  if (j.contains("min_trade_quantity"))
    p.min_trade_quantity = as_number(j["min_trade_quantity"], field(where, "min_trade_quantity"));
  try {
    p.validate();
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
  return p;
}

}  // namespace

EconomySpec parse_economy(const json& j, std::string_view where) {
  require_object(j, where);
  check_keys(j, where, {"utility", "interior", "agents", "endowment_shift"});
  EconomySpec spec;
  const auto& family = require(j, where, "utility");
  if (family == "cobb_douglas") {
    spec.family = UtilityFamily::CobbDouglas;
  } else if (family == "separable_quad_money") {
    spec.family = UtilityFamily::SeparableQuadMoney;
  } else {
    fail(field(where, "utility"), "expected \"cobb_douglas\" or \"separable_quad_money\"");
  }
  spec.interior = spec.family == UtilityFamily::CobbDouglas;
  if (j.contains("interior")) {
    if (!j["interior"].is_boolean()) fail(field(where, "interior"), "expected true or false");
    spec.interior = j["interior"].get<bool>();
  }

  const auto& agents = require(j, where, "agents");
  if (!agents.is_array()) fail(field(where, "agents"), "expected an array");
  if (agents.empty()) fail(field(where, "agents"), "at least one agent is required");
  for (std::size_t i = 0; i < agents.size(); ++i)
    spec.agents.push_back(parse_agent(agents[i], spec.family, fmt::format("{}.agents[{}]", where, i)));

  if (j.contains("endowment_shift")) {
    const auto w = field(where, "endowment_shift");
    const auto& s = j["endowment_shift"];
    require_object(s, w);
    check_keys(s, w, {"good", "from", "to", "step", "trial"});
    EndowmentShift shift;
    shift.good = as_count(require(s, w, "good"), field(w, "good"));
    shift.from = as_count(require(s, w, "from"), field(w, "from"));
    shift.to = as_count(require(s, w, "to"), field(w, "to"));
    shift.step = as_number(require(s, w, "step"), field(w, "step"));
    shift.trial = s.contains("trial") ? as_integer(s["trial"], field(w, "trial")) : 0;
    spec.shift = shift;
  }

  build_economy(spec);  // dimension and utility-domain validation
  return spec;
}

json economy_to_json(const EconomySpec& spec) {
  json j;
  j["utility"] = std::string(to_string(spec.family));
  j["interior"] = spec.interior;
  json agents = json::array();
  for (const auto& a : spec.agents) {
    json ja;
    if (spec.family == UtilityFamily::CobbDouglas) {
      ja["beta"] = a.beta;
    } else {
      ja["alpha"] = a.alpha;
      ja["a"] = a.a;
      ja["b"] = a.b;
    }
    ja["holdings"] = a.holdings;
    agents.push_back(std::move(ja));
  }
  j["agents"] = std::move(agents);
  if (spec.shift) {
    j["endowment_shift"] = {{"good", spec.shift->good},
                            {"from", spec.shift->from},
                            {"to", spec.shift->to},
                            {"step", spec.shift->step},
                            {"trial", spec.shift->trial}};
  }
  return j;
}

Matrix initial_holdings(const EconomySpec& spec) {
  if (spec.agents.empty()) fail("economy.agents", "at least one agent is required");
  const std::size_t dim = spec.agents.front().holdings.size();
  if (dim < 2) fail("economy.agents[0].holdings", "need money plus at least one good");
  Matrix h(spec.agents.size(), dim);
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    const auto& q = spec.agents[i].holdings;
    if (q.size() != dim)
      fail(fmt::format("economy.agents[{}].holdings", i), fmt::format("expected {} entries, got {}", dim, q.size()));
    std::copy(q.begin(), q.end(), h.row(i).begin());
  }
  if (spec.shift) {
    const auto& s = *spec.shift;
    if (s.good == kMoney || s.good >= dim) fail("economy.endowment_shift.good", "must name a non-money good");
    if (s.from >= h.rows() || s.to >= h.rows() || s.from == s.to)
      fail("economy.endowment_shift", "from/to must be two distinct agents");
    const double amount = s.step * static_cast<double>(s.trial);
    h(s.from, s.good) -= amount;
    h(s.to, s.good) += amount;
    if (h(s.from, s.good) < 0.0 || h(s.to, s.good) < 0.0)
      fail("economy.endowment_shift", "shift leaves a negative holding");
  }
  return h;
}

Economy build_economy(const EconomySpec& spec) {
  const Matrix h = initial_holdings(spec);
  const std::size_t dim = h.cols();
  std::vector<double> supply(dim - 1, 0.0);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 1; j < dim; ++j) supply[j - 1] += h(i, j);

  std::vector<AgentState> agents;
  for (std::size_t i = 0; i < spec.agents.size(); ++i) {
    const auto& a = spec.agents[i];
    const auto where = fmt::format("economy.agents[{}]", i);
    AgentState st;
    st.id = i;
    st.holdings = GoodsVector(std::vector<double>(h.row(i).begin(), h.row(i).end()));
    try {
      if (spec.family == UtilityFamily::CobbDouglas) {
        if (a.beta.size() != dim) fail(field(where, "beta"), fmt::format("expected {} exponents, got {}", dim, a.beta.size()));
        st.utility = std::make_shared<CobbDouglas>(a.beta);
      } else {
        if (a.a.size() != dim - 1) fail(field(where, "a"), fmt::format("expected {} entries, got {}", dim - 1, a.a.size()));
        if (a.b.size() != dim - 1) fail(field(where, "b"), fmt::format("expected {} entries, got {}", dim - 1, a.b.size()));
        st.utility = std::make_shared<SeparableQuadMoney>(a.alpha, a.a, a.b, supply);
      }
    } catch (const DomainError& e) {
      const auto key = spec.family == UtilityFamily::CobbDouglas ? "beta" : "utility parameters";
      fail(field(where, key), e.what());
    }
    agents.push_back(std::move(st));
  }
  try {
    return Economy(std::move(agents), spec.interior);
  } catch (const StructuralError& e) {
    fail("economy", e.what());
  }
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  json j;
  try {
    j = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: parse error: {}", source, e.what()));
  }
  try {
    ExperimentConfig c;
    require_object(j, "config");
    check_keys(j, "config", {"name", "economy", "algorithm", "runs", "first_seed", "output_dir", "trajectory_stride"});
    const auto& name = require(j, "config", "name");
    if (!name.is_string()) fail("config.name", "expected a string");
    c.name = name.get<std::string>();
    c.economy = parse_economy(require(j, "config", "economy"), "economy");
    if (j.contains("algorithm")) c.params = parse_algorithm(j["algorithm"], "algorithm");
    if (j.contains("runs")) c.runs = as_count(j["runs"], "config.runs");
    if (j.contains("first_seed")) c.first_seed = as_count(j["first_seed"], "config.first_seed");
    if (j.contains("output_dir")) {
      if (!j["output_dir"].is_string()) fail("config.output_dir", "expected a string");
      c.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("trajectory_stride")) c.trajectory_stride = as_count(j["trajectory_stride"], "config.trajectory_stride");
    c.params.seed = c.first_seed;
    if (c.params.delta0 &&
        (c.params.delta0->rows() != c.economy.agents.size() || c.params.delta0->cols() + 1 != c.economy.agents[0].holdings.size()))
      fail("algorithm.delta0", "expected an m x n matrix");
    return c;
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["economy"] = economy_to_json(c.economy);
  json alg;
  alg["eps_p"] = c.params.eps_p;
  alg["eps_delta"] = c.params.eps_delta;
  alg["lambda"] = c.params.lambda;
  alg["delta0_scale"] = c.params.delta0_scale;
  if (c.params.delta0) alg["delta0"] = matrix_to_json(*c.params.delta0);
  alg["max_iters"] = c.params.max_iters;
  alg["min_trade_quantity"] = c.params.min_trade_quantity;
  j["algorithm"] = std::move(alg);
  j["runs"] = c.runs;
  j["first_seed"] = c.first_seed;
  j["output_dir"] = c.output_dir;
  j["trajectory_stride"] = c.trajectory_stride;
  return j;
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  write_text(path, config_to_json(config).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Batches

RunSummary summarize(std::uint64_t seed, const EquilibriumReport& report) {
  RunSummary s;
  s.seed = seed;
  s.status = report.status;
  s.iterations = report.iterations;
  s.trades = report.trades;
  s.decays = report.decays;
  s.prices = report.prices;
  s.holdings = report.holdings;
  s.max_dispersion = report.dispersion.empty() ? 0.0 : *std::max_element(report.dispersion.begin(), report.dispersion.end());
  s.max_kkt_residual = report.kkt.max_residual;
  s.kkt_passes = report.kkt.passes;
  s.runtime_seconds = report.wall_seconds;
  return s;
}

BatchDispersion batch_dispersion(std::span<const RunSummary> runs) {
  BatchDispersion d;
  if (runs.empty()) return d;
  const std::size_t goods = runs.front().prices.size();
  d.price_range.assign(goods, 0.0);
  for (std::size_t j = 0; j < goods; ++j) {
    auto [lo, hi] = std::minmax_element(runs.begin(), runs.end(),
                                        [j](const RunSummary& a, const RunSummary& b) { return a.prices[j] < b.prices[j]; });
    d.price_range[j] = hi->prices[j] - lo->prices[j];
  }
  // The largest pairwise max-abs difference is attained by the widest column.
  d.max_pairwise_difference = *std::max_element(d.price_range.begin(), d.price_range.end());
  return d;
}

namespace {

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("{}: cannot create output directory: {}", dir.string(), ec.message()));
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw IoError(fmt::format("{}: output directory is not writable", dir.string()));
  }
  std::filesystem::remove(probe, ec);
}

json summary_to_json(const ExperimentConfig& config, std::span<const RunSummary> runs, const BatchDispersion& d) {
  json j;
  j["name"] = config.name;
  j["utility"] = std::string(to_string(config.economy.family));
  json seeds = json::array();
  json rows = json::array();
  std::size_t converged = 0;
  for (const auto& r : runs) {
    seeds.push_back(r.seed);
    json holdings = json::array();
    for (std::size_t i = 0; i < r.holdings.rows(); ++i)
      holdings.push_back(std::vector<double>(r.holdings.row(i).begin(), r.holdings.row(i).end()));
    rows.push_back({{"seed", r.seed},
                    {"status", std::string(to_string(r.status))},
                    {"iterations", r.iterations},
                    {"trades", r.trades},
                    {"decays", r.decays},
                    {"prices", r.prices},
                    {"holdings", std::move(holdings)},
                    {"max_dispersion", r.max_dispersion},
                    {"max_kkt_residual", r.max_kkt_residual},
                    {"kkt_passes", r.kkt_passes}});
    if (r.status == RunStatus::Equilibrium) ++converged;
  }
  j["seeds"] = std::move(seeds);
  j["converged"] = converged;
  j["runs"] = std::move(rows);
  j["dispersion"] = {{"price_range", d.price_range}, {"max_pairwise_difference", d.max_pairwise_difference}};
  return j;
}

}  // namespace

BatchResult run_batch(const ExperimentConfig& config, std::span<const std::uint64_t> seeds, const BatchOptions& options) {
  BatchResult result;
  if (seeds.empty()) return result;
  if (options.output_dir) ensure_writable(*options.output_dir);

  const Economy initial = build_economy(config.economy);
  const bool two_agent_path = initial.agent_count() == 2 && initial.non_money_count() >= 2;
  result.runs.resize(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());

  auto run_one = [&](std::size_t idx) {
    const std::uint64_t seed = seeds[idx];
    AlgorithmParams params = config.params;
    params.seed = seed;
    RunOptions opts;
    opts.trajectory_stride = options.output_dir ? config.trajectory_stride : 0;
    RunResult r = run(initial, params, opts);
    result.runs[idx] = summarize(seed, r.report);
    if (options.output_dir) {
      const auto& dir = *options.output_dir;
      write_trade_log(dir / fmt::format("trades_seed{}.csv", seed), r.trades);
      write_trajectory(dir / fmt::format("thresholds_seed{}.csv", seed), r.trajectory);
      write_state(dir / fmt::format("state_seed{}.json", seed), config.economy, result.runs[idx]);
      if (two_agent_path)
        emit_edgeworth_path(dir / fmt::format("edgeworth_seed{}.json", seed), edgeworth_path(initial, r.trades));
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(seeds.size())));
  if (jobs == 1) {
    for (std::size_t idx = 0; idx < seeds.size(); ++idx) run_one(idx);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t idx = next++; idx < seeds.size(); idx = next++) {
          try {
            run_one(idx);
          } catch (...) {
            errors[idx] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  result.dispersion = batch_dispersion(result.runs);
  if (options.output_dir) {
    const auto& dir = *options.output_dir;
    write_text(dir / "summary.json", summary_to_json(config, result.runs, result.dispersion).dump(2) + "\n");
    // Wall-clock times vary between invocations; they live apart from the
    // deterministic summary.
    std::string timings = "seed,runtime_seconds\n";
    for (const auto& r : result.runs) timings += fmt::format("{},{}\n", r.seed, r.runtime_seconds);
    write_text(dir / "timings.csv", timings);
  }
  return result;
}

}  // namespace bilateral
