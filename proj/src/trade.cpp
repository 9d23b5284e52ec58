#include "bilateral/trade.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "bilateral/errors.hpp"
#include "bilateral/utility.hpp"

namespace bilateral {

Quote quote(const AgentState& agent, std::size_t good) {
  const double p = price_threshold(*agent.utility, agent.holdings, good);
  const double delta = agent.premium(good);
  return {agent.id, good, p, p + delta, p - delta};
}

std::optional<PriceInterval> trade_available(const AgentState& seller, const AgentState& buyer, std::size_t good) {
  if (!(seller.holdings[good] > 0.0)) return std::nullopt;
  const double ask = quote(seller, good).ask;
  const double bid = quote(buyer, good).bid;
  if (ask <= bid) return PriceInterval{ask, bid};
  return std::nullopt;
}

namespace {

// Adjusts `amount` until moving it from `from` to `to` changes both balances by exactly that
// amount in floating point. Near convergence the utility gains are far below the rounding of the
// balances, so an inexact move could turn a mutually beneficial trade into a loss for one side.
double exact_transfer(double from, double to, double amount) {
  for (int round = 0; round < 8; ++round) {
    const double received = (to + amount) - to;
    const double given = from - (from - received);
    if (given == received) return received;
    amount = given;
  }
  return amount;
}

}  // namespace

double select_price(const PriceInterval& interval) {
  if (!(interval.lo <= interval.hi)) throw DomainError("select_price: inverted interval");
  return interval.lo + 0.5 * (interval.hi - interval.lo);
}

std::optional<TradeRecord> execute_trade(AgentState& seller, AgentState& buyer, std::size_t good, double price,
                                         double min_trade_quantity, std::uint64_t iteration) {
  if (&seller == &buyer || seller.id == buyer.id) throw ContractViolation("execute_trade: seller and buyer coincide");
  const auto interval = trade_available(seller, buyer, good);
  if (!interval) throw ContractViolation("execute_trade: no trade available in good " + std::to_string(good));
  if (!interval->contains(price))
    throw ContractViolation("execute_trade: price " + std::to_string(price) + " outside [" +
                            std::to_string(interval->lo) + ", " + std::to_string(interval->hi) + "]");

  TradeRecord rec;
  rec.iteration = iteration;
  rec.seller = seller.id;
  rec.buyer = buyer.id;
  rec.good = good;
  rec.price = price;
  rec.seller_optimum = seller_quantity(*seller.utility, seller.holdings, good, price);
  rec.buyer_optimum = buyer_quantity(*buyer.utility, buyer.holdings, good, price);
  rec.quantity = std::min(rec.seller_optimum, rec.buyer_optimum);
  if (!(rec.quantity >= min_trade_quantity) || rec.quantity <= 0.0) return std::nullopt;
  if (rec.quantity < seller.holdings[good])
    rec.quantity = exact_transfer(seller.holdings[good], buyer.holdings[good], rec.quantity);
  rec.money = exact_transfer(buyer.holdings[kMoney], seller.holdings[kMoney], price * rec.quantity);
  if (!(rec.quantity > 0.0) || !(rec.money > 0.0)) return std::nullopt;

  GoodsVector seller_after = seller.holdings;
  GoodsVector buyer_after = buyer.holdings;
  seller_after[kMoney] += rec.money;
  seller_after[good] -= rec.quantity;
  buyer_after[kMoney] -= rec.money;
  buyer_after[good] += rec.quantity;
  // The seller optimum may be the whole stock; keep that exactly zero.
  if (rec.quantity == seller.holdings[good]) seller_after[good] = 0.0;

  auto gain = [](const AgentState& a, const GoodsVector& after) {
    std::vector<double> dx(after.size());
    for (std::size_t j = 0; j < dx.size(); ++j) dx[j] = after[j] - a.holdings[j];
    return a.utility->value_change(a.holdings.view(), dx);
  };
  rec.utility_gain_seller = gain(seller, seller_after);
  rec.utility_gain_buyer = gain(buyer, buyer_after);
  if (!(rec.utility_gain_seller > 0.0) || !(rec.utility_gain_buyer > 0.0)) return std::nullopt;

  if (!seller.utility->admissible(seller_after.view()) || !buyer.utility->admissible(buyer_after.view()))
    throw NumericalError("execute_trade: post-trade holdings left the admissible set (seller " +
                         std::to_string(seller.id) + ", buyer " + std::to_string(buyer.id) + ", good " +
                         std::to_string(good) + ")");

  seller.holdings = std::move(seller_after);
  buyer.holdings = std::move(buyer_after);
  return rec;
}

}  // namespace bilateral
