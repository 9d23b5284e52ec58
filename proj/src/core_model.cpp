#include "bilateral/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bilateral/errors.hpp"
#include "bilateral/utility.hpp"

namespace bilateral {

Economy::Economy(std::vector<AgentState> agents, bool interior) : agents_(std::move(agents)), interior_(interior) {
  if (agents_.empty()) throw StructuralError("economy has no agents");
  const std::size_t dim = agents_.front().holdings.size();
  if (dim < 2) throw StructuralError("holdings need money plus at least one good");

  total_supply_ = GoodsVector(dim, 0.0);
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    auto& a = agents_[i];
    a.id = i;
    const auto where = "agent " + std::to_string(i);
    if (a.holdings.size() != dim) throw StructuralError(where + ": holdings length differs from agent 0");
    if (!a.utility) throw StructuralError(where + ": missing utility");
    if (a.utility->dimension() != dim) throw StructuralError(where + ": utility dimension differs from holdings");
    if (!a.premiums.empty() && a.premiums.size() != dim - 1)
      throw StructuralError(where + ": premiums must have one entry per non-money good");
    for (std::size_t j = 0; j < dim; ++j) {
      const double q = a.holdings[j];
      if (!std::isfinite(q) || q < 0.0) throw StructuralError(where + ": negative or non-finite holding");
      if (interior_ && q <= 0.0) throw StructuralError(where + ": interior economy requires positive holdings");
      total_supply_[j] += q;
    }
    if (!a.utility->admissible(a.holdings.view())) throw StructuralError(where + ": holdings not admissible");
    for (double d : a.premiums)
      if (!(d > 0.0)) throw StructuralError(where + ": premiums must be positive");
  }
  for (std::size_t j = 0; j < dim; ++j) {
    if (!(total_supply_[j] > 0.0)) throw StructuralError("total supply of good " + std::to_string(j) + " is zero");
    for (const auto& a : agents_) {
      const double cap = a.utility->upper_bound(j);
      if (total_supply_[j] > cap * (1.0 + kConservationTolerance))
        throw StructuralError("agent " + std::to_string(a.id) + ": utility domain for good " + std::to_string(j) +
                              " is smaller than the total supply");
    }
  }
}

Matrix Economy::holdings() const {
  Matrix h(agent_count(), goods_count());
  for (std::size_t i = 0; i < agent_count(); ++i)
    std::copy(agents_[i].holdings.begin(), agents_[i].holdings.end(), h.row(i).begin());
  return h;
}

void AlgorithmParams::validate() const {
  if (!(eps_p > 0.0)) throw DomainError("eps_p must be positive");
  if (!(eps_delta > 0.0)) throw DomainError("eps_delta must be positive");
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
  if (!(min_trade_quantity >= 0.0)) throw DomainError("min_trade_quantity must be nonnegative");
  if (max_iters == 0) throw DomainError("max_iters must be positive");
  if (delta0) {
    for (double d : delta0->data())
      if (!(d > 0.0)) throw DomainError("delta0 entries must be positive");
  } else if (!(delta0_scale > 0.0)) {
    throw DomainError("delta0_scale must be positive");
  }
}

ConservationCheck check_conservation(const Economy& economy, const GoodsVector& reference_supply) {
  const std::size_t dim = reference_supply.size();
  std::vector<double> sums(dim, 0.0);
  for (const auto& a : economy.agents()) {
    if (a.holdings.size() != dim)
      throw StructuralError("agent " + std::to_string(a.id) + ": holdings length does not match reference supply");
    for (std::size_t j = 0; j < dim; ++j) sums[j] += a.holdings[j];
  }
  ConservationCheck out{true, 0.0};
  for (std::size_t j = 0; j < dim; ++j) {
    const double r = std::abs(sums[j] - reference_supply[j]);
    out.max_residual = std::max(out.max_residual, r);
    if (!(r <= kConservationTolerance * std::max(1.0, reference_supply[j]))) out.ok = false;
  }
  return out;
}

}  // namespace bilateral
