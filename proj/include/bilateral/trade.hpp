#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "bilateral/core_model.hpp"

namespace bilateral {

/// An agent's selling (ask) and buying (bid) prices for one good: its
/// price threshold shifted by the premium in either direction.
struct Quote {
  std::size_t agent = 0;
  std::size_t good = 0;
  double threshold = 0.0;
  double ask = 0.0;
  double bid = 0.0;  // may be <= 0 when the premium exceeds the threshold
};

struct PriceInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double p) const { return lo <= p && p <= hi; }
};

struct TradeRecord {
  std::uint64_t iteration = 0;
  std::size_t seller = 0;
  std::size_t buyer = 0;
  std::size_t good = 0;
  double price = 0.0;
  double quantity = 0.0;
  double money = 0.0;  // price * quantity, paid by the buyer
  double utility_gain_seller = 0.0;
  double utility_gain_buyer = 0.0;
  // Unconstrained optimal quantities of each side; the smaller one binds.
  double seller_optimum = 0.0;
  double buyer_optimum = 0.0;

  bool operator==(const TradeRecord&) const = default;
};

Quote quote(const AgentState& agent, std::size_t good);

// [ask of seller, bid of buyer] when the seller holds some of the good and
// the ask does not exceed the bid.
std::optional<PriceInterval> trade_available(const AgentState& seller, const AgentState& buyer, std::size_t good);

// Midpoint of the interval.
double select_price(const PriceInterval& interval);

// Transfers min(seller optimum, buyer optimum) units of `good` at `price`.
// Returns nullopt, leaving both agents untouched, when that quantity is
// below min_trade_quantity or when rounding leaves either side without a
// strict utility gain. Throws ContractViolation if the price is outside the
// availability interval or no trade is available.
std::optional<TradeRecord> execute_trade(AgentState& seller, AgentState& buyer, std::size_t good, double price,
                                         double min_trade_quantity = 1e-12, std::uint64_t iteration = 0);

}  // namespace bilateral
