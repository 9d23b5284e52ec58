#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "bilateral/core_model.hpp"

namespace bilateral {

/// Concave, C2 utility over holdings (x_0, ..., x_n) with positive
/// marginal utilities on its admissible set.
class Utility {
 public:
  virtual ~Utility() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual double partial(std::span<const double> x, std::size_t j) const = 0;
  virtual bool admissible(std::span<const double> x) const = 0;
  // Money (j = 0) is always essential.
  virtual bool essential(std::size_t j) const = 0;
  // Largest holding of good j on which the utility is defined.
  virtual double upper_bound(std::size_t /*j*/) const { return std::numeric_limits<double>::infinity(); }

  // Marginal utility of good j over marginal utility of money.
  virtual double threshold(std::span<const double> x, std::size_t j) const;

  // u(x + dx) - u(x). Families override this to avoid the cancellation of
  // subtracting two nearly equal utility values, which matters once trades
  // shrink with the premiums.
  virtual double value_change(std::span<const double> x, std::span<const double> dx) const;

  GoodsVector gradient(std::span<const double> x) const;
};

/// u(x) = prod_j x_j^beta_j with 0 < beta_j < 1 and sum_j beta_j < 1.
/// Every good is essential.
class CobbDouglas final : public Utility {
 public:
  explicit CobbDouglas(std::vector<double> beta);

  const std::vector<double>& beta() const { return beta_; }

  std::size_t dimension() const override { return beta_.size(); }
  double value(std::span<const double> x) const override;
  double partial(std::span<const double> x, std::size_t j) const override;
  bool admissible(std::span<const double> x) const override;
  bool essential(std::size_t) const override { return true; }
  double threshold(std::span<const double> x, std::size_t j) const override;
  double value_change(std::span<const double> x, std::span<const double> dx) const override;

 private:
  std::vector<double> beta_;
};

/// u(x) = x_0^alpha + sum_{j>=1} (a_j x_j - b_j x_j^2 / 2), defined for
/// x_j in [0, s_j]. Requires a_j / b_j > s_j so marginal utility stays
/// positive over the whole supply range. Only money is essential.
class SeparableQuadMoney final : public Utility {
 public:
  // a, b and supply are indexed by non-money good, a[0] belonging to good 1.
  SeparableQuadMoney(double alpha, std::vector<double> a, std::vector<double> b, std::vector<double> supply);

  double alpha() const { return alpha_; }
  const std::vector<double>& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }
  const std::vector<double>& supply() const { return supply_; }

  std::size_t dimension() const override { return a_.size() + 1; }
  double value(std::span<const double> x) const override;
  double partial(std::span<const double> x, std::size_t j) const override;
  bool admissible(std::span<const double> x) const override;
  bool essential(std::size_t j) const override { return j == kMoney; }
  double upper_bound(std::size_t j) const override;
  double value_change(std::span<const double> x, std::span<const double> dx) const override;

 private:
  double alpha_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> supply_;
};

// p_ij(x). Throws DomainError for j = 0, j out of range, or inadmissible x.
double price_threshold(const Utility& u, std::span<const double> x, std::size_t j);
inline double price_threshold(const Utility& u, const GoodsVector& x, std::size_t j) {
  return price_threshold(u, x.view(), j);
}

struct Maximum1d {
  double argmax = 0.0;
  double value = 0.0;
};

// Golden-section search on the values of a concave f over [lo, hi].
Maximum1d maximize_concave_1d(const std::function<double(double)>& f, double lo, double hi);

// Bisection on the sign of f' (strictly decreasing for strictly concave f).
// Boundary optima are returned exactly as lo or hi.
Maximum1d maximize_concave_1d(const std::function<double(double)>& f, const std::function<double(double)>& df,
                              double lo, double hi);

// theta'_+(xi) for selling xi units of good j at price pi: the derivative of
// u(x + xi [pi, -1]) with respect to xi.
double sell_derivative(const Utility& u, std::span<const double> x, std::size_t j, double pi, double xi);
// theta'_-(xi) for buying: derivative of u(x - xi [pi, -1]).
double buy_derivative(const Utility& u, std::span<const double> x, std::size_t j, double pi, double xi);

// Utility-maximizing quantity of good j the agent would sell at price pi.
double seller_quantity(const Utility& u, std::span<const double> x, std::size_t j, double pi);
// Utility-maximizing quantity of good j the agent would buy at price pi.
double buyer_quantity(const Utility& u, std::span<const double> x, std::size_t j, double pi);

inline double seller_quantity(const Utility& u, const GoodsVector& x, std::size_t j, double pi) {
  return seller_quantity(u, x.view(), j, pi);
}
inline double buyer_quantity(const Utility& u, const GoodsVector& x, std::size_t j, double pi) {
  return buyer_quantity(u, x.view(), j, pi);
}

}  // namespace bilateral
