#include "bilateral/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bilateral/errors.hpp"
#include "bilateral/utility.hpp"

namespace bilateral {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Equilibrium:
      return "Equilibrium";
    case RunStatus::PremiumFloor:
      return "PremiumFloor";
    case RunStatus::MaxIters:
      return "MaxIters";
  }
  return "Unknown";
}

std::uint64_t InspectionRng::below(std::uint64_t bound) {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % bound;
}

std::vector<double> threshold_dispersion(const Matrix& thresholds) {
  const std::size_t m = thresholds.rows();
  std::vector<double> out(thresholds.cols(), 0.0);
  for (std::size_t c = 0; c < thresholds.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) mean += thresholds(i, c);
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) ss += (thresholds(i, c) - mean) * (thresholds(i, c) - mean);
    out[c] = std::sqrt(ss / static_cast<double>(m));
  }
  return out;
}

double stdev_stop(const Matrix& thresholds) {
  if (thresholds.rows() < 2) throw DomainError("stdev_stop needs at least two agents");
  const auto d = threshold_dispersion(thresholds);
  return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
}

Matrix threshold_matrix(const Economy& economy) {
  Matrix p(economy.agent_count(), economy.non_money_count());
  for (const auto& a : economy.agents())
    for (std::size_t j = 1; j < economy.goods_count(); ++j) p(a.id, j - 1) = price_threshold(*a.utility, a.holdings, j);
  return p;
}

std::vector<double> consensus_prices(const Matrix& thresholds) {
  std::vector<double> prices(thresholds.cols() + 1, 0.0);
  prices[0] = 1.0;
  for (std::size_t c = 0; c < thresholds.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < thresholds.rows(); ++i) sum += thresholds(i, c);
    prices[c + 1] = sum / static_cast<double>(thresholds.rows());
  }
  return prices;
}

KktReport verify_equilibrium(const Economy& economy, const std::vector<double>& prices, double tol) {
  const std::size_t n = economy.non_money_count();
  std::size_t offset = 0;
  if (prices.size() == n + 1) {
    offset = 1;
  } else if (prices.size() != n) {
    throw StructuralError("verify_equilibrium: expected " + std::to_string(n) + " or " + std::to_string(n + 1) +
                          " prices");
  }
  for (std::size_t k = offset; k < prices.size(); ++k)
    if (!(prices[k] > 0.0)) throw DomainError("verify_equilibrium: prices must be positive");

  const Matrix p = threshold_matrix(economy);
  KktReport rep;
  rep.tolerance = tol;
  rep.residuals = Matrix(economy.agent_count(), n);
  rep.max_threshold_gap.assign(n, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    const double price = prices[j - 1 + offset];
    double highest = -std::numeric_limits<double>::infinity();
    for (const auto& a : economy.agents()) {
      const double pij = p(a.id, j - 1);
      highest = std::max(highest, pij);
      const double r = a.holdings[j] > 0.0 ? std::abs(pij - price) : std::max(0.0, pij - price);
      rep.residuals(a.id, j - 1) = r;
      rep.max_residual = std::max(rep.max_residual, r);
    }
    rep.max_threshold_gap[j - 1] = std::abs(price - highest);
  }
  rep.passes = rep.max_residual <= tol;
  return rep;
}

namespace {

Matrix premium_matrix(const Economy& economy) {
  Matrix d(economy.agent_count(), economy.non_money_count());
  for (const auto& a : economy.agents()) std::copy(a.premiums.begin(), a.premiums.end(), d.row(a.id).begin());
  return d;
}

std::string dump_state(const Economy& economy, std::uint64_t k) {
  std::ostringstream os;
  os.precision(17);
  os << "state at iteration " << k << ":\n";
  for (const auto& a : economy.agents()) {
    os << "  agent " << a.id << " holdings [";
    for (std::size_t j = 0; j < a.holdings.size(); ++j) os << (j ? ", " : "") << a.holdings[j];
    os << "] premiums [";
    for (std::size_t j = 0; j < a.premiums.size(); ++j) os << (j ? ", " : "") << a.premiums[j];
    os << "]\n";
  }
  return os.str();
}

void refresh_row(Matrix& thresholds, const Economy& economy, std::size_t agent, std::uint64_t k) {
  const auto& a = economy.agent(agent);
  for (std::size_t j = 1; j < economy.goods_count(); ++j) {
    const double p = price_threshold(*a.utility, a.holdings, j);
    if (!std::isfinite(p))
      throw NumericalError("non-finite price threshold for agent " + std::to_string(agent) + ", good " +
                           std::to_string(j) + "\n" + dump_state(economy, k));
    thresholds(agent, j - 1) = p;
  }
}

void assign_initial_premiums(Economy& economy, const AlgorithmParams& params, const Matrix& thresholds) {
  const std::size_t n = economy.non_money_count();
  if (params.delta0 && (params.delta0->rows() != economy.agent_count() || params.delta0->cols() != n))
    throw StructuralError("delta0 must be an m x n matrix");
  for (auto& a : economy.agents()) {
    a.premiums.resize(n);
    for (std::size_t c = 0; c < n; ++c)
      a.premiums[c] = params.delta0 ? (*params.delta0)(a.id, c) : params.delta0_scale * thresholds(a.id, c);
    for (double d : a.premiums)
      if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("initial premiums must be positive and finite");
  }
}

double max_premium(const Economy& economy) {
  double out = 0.0;
  for (const auto& a : economy.agents())
    for (double d : a.premiums) out = std::max(out, d);
  return out;
}

}  // namespace

RunResult run(Economy economy, const AlgorithmParams& params, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  params.validate();
  const std::size_t m = economy.agent_count();
  const std::size_t n = economy.non_money_count();
  if (m < 2) throw StructuralError("bilateral trading needs at least two agents");

  Matrix thresholds = threshold_matrix(economy);
  for (double p : thresholds.data())
    if (!std::isfinite(p)) throw NumericalError("non-finite initial threshold\n" + dump_state(economy, 0));
  assign_initial_premiums(economy, params, thresholds);

  InspectionRng rng(params.seed);
  std::vector<TradeRecord> trades;
  std::vector<ThresholdSample> trajectory;
  const std::uint64_t stride = options.trajectory_stride;
  if (stride > 0) trajectory.push_back({0, thresholds});

  std::vector<std::size_t> sellers(m), buyers, goods(n);
  buyers.reserve(m - 1);

  std::uint64_t k = 0;
  std::uint64_t decays = 0;
  RunStatus status = RunStatus::MaxIters;
  for (;;) {
    if (stdev_stop(thresholds) < params.eps_p) {
      status = RunStatus::Equilibrium;
      break;
    }
    if (max_premium(economy) < params.eps_delta) {
      status = RunStatus::PremiumFloor;
      break;
    }
    if (k >= params.max_iters) {
      status = RunStatus::MaxIters;
      break;
    }

    bool traded = false;
    std::iota(sellers.begin(), sellers.end(), std::size_t{0});
    rng.shuffle(sellers);
    for (std::size_t s : sellers) {
      buyers.clear();
      for (std::size_t b = 0; b < m; ++b)
        if (b != s) buyers.push_back(b);
      rng.shuffle(buyers);
      for (std::size_t b : buyers) {
        std::iota(goods.begin(), goods.end(), std::size_t{1});
        rng.shuffle(goods);
        for (std::size_t j : goods) {
          auto& seller = economy.agent(s);
          auto& buyer = economy.agent(b);
          const auto interval = trade_available(seller, buyer, j);
          if (!interval) continue;
          auto rec = execute_trade(seller, buyer, j, select_price(*interval), params.min_trade_quantity, k + 1);
          if (!rec) continue;
          ++k;
          refresh_row(thresholds, economy, s, k);
          refresh_row(thresholds, economy, b, k);
          if (options.on_trade) options.on_trade(economy, *rec);
          trades.push_back(*rec);
          if (stride > 0 && trades.size() % stride == 0) trajectory.push_back({k, thresholds});
          traded = true;
          break;
        }
        if (traded) break;
      }
      if (traded) break;
    }
    if (traded) continue;

    if (options.on_decay) options.on_decay(DecayEvent{k, thresholds, premium_matrix(economy), economy.holdings()});
    for (auto& a : economy.agents())
      for (double& d : a.premiums) d *= params.lambda;
    ++k;
    ++decays;
  }

  if (stride > 0 && (trajectory.empty() || trajectory.back().iteration != k)) trajectory.push_back({k, thresholds});

  EquilibriumReport rep;
  rep.status = status;
  rep.prices = consensus_prices(thresholds);
  rep.holdings = economy.holdings();
  rep.thresholds = thresholds;
  rep.dispersion = threshold_dispersion(thresholds);
  rep.iterations = k;
  rep.trades = trades.size();
  rep.decays = decays;
  rep.final_max_premium = max_premium(economy);
  rep.kkt = verify_equilibrium(economy, rep.prices, 10.0 * params.eps_p);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return RunResult{std::move(rep), std::move(economy), std::move(trades), std::move(trajectory)};
}

}  // namespace bilateral
