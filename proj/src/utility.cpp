#include "bilateral/utility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bilateral/errors.hpp"

namespace bilateral {

namespace {

// Seller keeps at least this fraction of an essential good; a buyer never
// spends more than this fraction of its money.
constexpr double kEssentialCap = 1.0 - 1e-12;

void require_dimension(const Utility& u, std::span<const double> x) {
  if (x.size() != u.dimension()) throw StructuralError("holdings length does not match utility dimension");
}

void require_price(double pi) {
  if (!(pi > 0.0) || !std::isfinite(pi)) throw DomainError("price must be positive and finite");
}

void require_good(const Utility& u, std::size_t j) {
  if (j == kMoney || j >= u.dimension()) throw DomainError("good index must be in 1..n");
}

}  // namespace

double Utility::threshold(std::span<const double> x, std::size_t j) const {
  return partial(x, j) / partial(x, kMoney);
}

double Utility::value_change(std::span<const double> x, std::span<const double> dx) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] += dx[j];
  return value(y) - value(x);
}

GoodsVector Utility::gradient(std::span<const double> x) const {
  GoodsVector g(dimension());
  for (std::size_t j = 0; j < dimension(); ++j) g[j] = partial(x, j);
  return g;
}

// ---------------------------------------------------------------------------
// Cobb-Douglas

CobbDouglas::CobbDouglas(std::vector<double> beta) : beta_(std::move(beta)) {
  if (beta_.size() < 2) throw DomainError("Cobb-Douglas needs exponents for money and at least one good");
  for (double b : beta_)
    if (!(b > 0.0 && b < 1.0)) throw DomainError("Cobb-Douglas exponents must lie in (0, 1)");
  if (!(std::accumulate(beta_.begin(), beta_.end(), 0.0) < 1.0))
    throw DomainError("Cobb-Douglas exponents must satisfy sum(beta) < 1");
}

double CobbDouglas::value(std::span<const double> x) const {
  require_dimension(*this, x);
  double log_u = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) log_u += beta_[j] * std::log(x[j]);
  return std::exp(log_u);
}

double CobbDouglas::partial(std::span<const double> x, std::size_t j) const {
  return beta_[j] * value(x) / x[j];
}

bool CobbDouglas::admissible(std::span<const double> x) const {
  if (x.size() != dimension()) return false;
  return std::all_of(x.begin(), x.end(), [](double q) { return q > 0.0 && std::isfinite(q); });
}

double CobbDouglas::threshold(std::span<const double> x, std::size_t j) const {
  return (beta_[j] * x[kMoney]) / (beta_[kMoney] * x[j]);
}

double CobbDouglas::value_change(std::span<const double> x, std::span<const double> dx) const {
  double log_ratio = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (dx[j] != 0.0) log_ratio += beta_[j] * std::log1p(dx[j] / x[j]);
  return value(x) * std::expm1(log_ratio);
}

// ---------------------------------------------------------------------------
// Separable: power utility of money plus concave quadratics in the goods

SeparableQuadMoney::SeparableQuadMoney(double alpha, std::vector<double> a, std::vector<double> b,
                                       std::vector<double> supply)
    : alpha_(alpha), a_(std::move(a)), b_(std::move(b)), supply_(std::move(supply)) {
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw DomainError("money exponent alpha must lie in (0, 1)");
  if (a_.empty() || a_.size() != b_.size() || a_.size() != supply_.size())
    throw DomainError("a, b and supply must have one entry per non-money good");
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const auto good = std::to_string(k + 1);
    if (!(a_[k] > 0.0 && b_[k] > 0.0)) throw DomainError("a and b must be positive for good " + good);
    if (!(supply_[k] > 0.0)) throw DomainError("supply must be positive for good " + good);
    if (!(a_[k] / b_[k] > supply_[k])) throw DomainError("a/b must exceed the total supply for good " + good);
  }
}

double SeparableQuadMoney::value(std::span<const double> x) const {
  require_dimension(*this, x);
  double u = std::pow(x[kMoney], alpha_);
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double q = x[k + 1];
    u += a_[k] * q - 0.5 * b_[k] * q * q;
  }
  return u;
}

double SeparableQuadMoney::partial(std::span<const double> x, std::size_t j) const {
  if (j == kMoney) return alpha_ * std::pow(x[kMoney], alpha_ - 1.0);
  return a_[j - 1] - b_[j - 1] * x[j];
}

bool SeparableQuadMoney::admissible(std::span<const double> x) const {
  if (x.size() != dimension()) return false;
  if (!(x[kMoney] > 0.0) || !std::isfinite(x[kMoney])) return false;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double q = x[k + 1];
    if (!(q >= 0.0) || !(q <= supply_[k] * (1.0 + kConservationTolerance))) return false;
  }
  return true;
}

double SeparableQuadMoney::upper_bound(std::size_t j) const {
  return j == kMoney ? std::numeric_limits<double>::infinity() : supply_[j - 1];
}

double SeparableQuadMoney::value_change(std::span<const double> x, std::span<const double> dx) const {
  double du = 0.0;
  if (dx[kMoney] != 0.0)
    du += std::pow(x[kMoney], alpha_) * std::expm1(alpha_ * std::log1p(dx[kMoney] / x[kMoney]));
  for (std::size_t k = 0; k < a_.size(); ++k) {
    const double d = dx[k + 1];
    if (d != 0.0) du += d * (a_[k] - 0.5 * b_[k] * (2.0 * x[k + 1] + d));
  }
  return du;
}

// ---------------------------------------------------------------------------

double price_threshold(const Utility& u, std::span<const double> x, std::size_t j) {
  require_good(u, j);
  if (!u.admissible(x)) throw DomainError("price threshold requested at inadmissible holdings");
  return u.threshold(x, j);
}

Maximum1d maximize_concave_1d(const std::function<double(double)>& f, double lo, double hi) {
  if (!(lo <= hi)) throw DomainError("maximize_concave_1d: empty or inverted interval");
  if (lo == hi) return {lo, f(lo)};

  const double tol = 1e-12 * std::max(1.0, hi - lo);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    if (!std::isfinite(fc) || !std::isfinite(fd)) throw NumericalError("maximize_concave_1d: non-finite objective");
  }
  Maximum1d best{0.5 * (a + b), f(0.5 * (a + b))};
  // A bracket that collapsed onto an end point means the optimum is there.
  for (double edge : {lo, hi}) {
    if (std::abs(best.argmax - edge) <= tol) {
      const double fe = f(edge);
      if (fe >= best.value) best = {edge, fe};
    }
  }
  return best;
}

Maximum1d maximize_concave_1d(const std::function<double(double)>& f, const std::function<double(double)>& df,
                              double lo, double hi) {
  if (!(lo <= hi)) throw DomainError("maximize_concave_1d: empty or inverted interval");
  auto slope = [&](double t) {
    const double s = df(t);
    if (std::isnan(s)) throw NumericalError("maximize_concave_1d: derivative is NaN at " + std::to_string(t));
    return s;
  };
  if (lo == hi || slope(lo) <= 0.0) return {lo, f(lo)};
  if (slope(hi) >= 0.0) return {hi, f(hi)};

  // Bisect until the bracket spans adjacent doubles.
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double s = slope(mid);
    if (s == 0.0) return {mid, f(mid)};
    (s > 0.0 ? lo : hi) = mid;
  }
  return {lo, f(lo)};
}

double sell_derivative(const Utility& u, std::span<const double> x, std::size_t j, double pi, double xi) {
  std::vector<double> y(x.begin(), x.end());
  y[kMoney] += xi * pi;
  y[j] -= xi;
  return u.partial(y, kMoney) * pi - u.partial(y, j);
}

double buy_derivative(const Utility& u, std::span<const double> x, std::size_t j, double pi, double xi) {
  std::vector<double> y(x.begin(), x.end());
  y[kMoney] -= xi * pi;
  y[j] += xi;
  return -u.partial(y, kMoney) * pi + u.partial(y, j);
}

namespace {

// theta(xi) = u(x + sign * xi [pi, -1]); sign = +1 sells, -1 buys.
Maximum1d line_maximum(const Utility& u, std::span<const double> x, std::size_t j, double pi, double sign,
                       double hi) {
  std::vector<double> y(x.begin(), x.end());
  auto move_to = [&](double xi) {
    y[kMoney] = x[kMoney] + sign * xi * pi;
    y[j] = x[j] - sign * xi;
  };
  auto value = [&](double xi) {
    move_to(xi);
    return u.value(y);
  };
  auto slope = [&](double xi) {
    move_to(xi);
    return sign * (u.partial(y, kMoney) * pi - u.partial(y, j));
  };
  return maximize_concave_1d(value, slope, 0.0, hi);
}

}  // namespace

double seller_quantity(const Utility& u, std::span<const double> x, std::size_t j, double pi) {
  require_price(pi);
  require_good(u, j);
  if (!u.admissible(x)) throw DomainError("seller_quantity: inadmissible holdings");
  if (x[j] <= 0.0) return 0.0;
  const double hi = u.essential(j) ? x[j] * kEssentialCap : x[j];
  return line_maximum(u, x, j, pi, +1.0, hi).argmax;
}

double buyer_quantity(const Utility& u, std::span<const double> x, std::size_t j, double pi) {
  require_price(pi);
  require_good(u, j);
  if (!u.admissible(x)) throw DomainError("buyer_quantity: inadmissible holdings");
  double hi = (x[kMoney] / pi) * kEssentialCap;
  hi = std::min(hi, u.upper_bound(j) - x[j]);
  if (!(hi > 0.0)) return 0.0;
  return line_maximum(u, x, j, pi, -1.0, hi).argmax;
}

}  // namespace bilateral
