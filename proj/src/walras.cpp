#include "bilateral/walras.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bilateral/errors.hpp"
#include "bilateral/utility.hpp"

namespace bilateral {

namespace {

constexpr double kMinRcond = 1e-14;

}  // namespace

WalrasSolution solve_walras_cobb_douglas(const Matrix& betas, const Matrix& holdings) {
  const std::size_t m = betas.rows();
  const std::size_t goods = betas.cols();
  if (m == 0 || goods < 2) throw StructuralError("walras: need at least one agent and one non-money good");
  if (holdings.rows() != m || holdings.cols() != goods) throw StructuralError("walras: betas and holdings differ in shape");
  for (std::size_t i = 0; i < m; ++i) CobbDouglas{std::vector<double>(betas.row(i).begin(), betas.row(i).end())};
  for (double q : holdings.data())
    if (!(q > 0.0)) throw DomainError("walras: initial holdings must be positive");

  const std::size_t n = goods - 1;
  const std::size_t price_base = m * goods;
  const auto size = static_cast<Eigen::Index>(price_base + goods);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);

  std::vector<double> supply(goods, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < goods; ++j) supply[j] += holdings(i, j);

  Eigen::Index row = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto bi = betas.row(i);
    const double total = std::accumulate(bi.begin(), bi.end(), 0.0);
    for (std::size_t j = 0; j < goods; ++j, ++row) {
      const double share = bi[j] / total;
      a(row, static_cast<Eigen::Index>(i * goods + j)) = 1.0;
      for (std::size_t k = 0; k < goods; ++k) a(row, static_cast<Eigen::Index>(price_base + k)) -= share * holdings(i, k);
    }
  }
  for (std::size_t j = 1; j <= n; ++j, ++row) {
    for (std::size_t i = 0; i < m; ++i) a(row, static_cast<Eigen::Index>(i * goods + j)) = 1.0;
    a(row, static_cast<Eigen::Index>(price_base + j)) = -supply[j];
  }
  for (std::size_t j = 1; j <= n; ++j) a(row, static_cast<Eigen::Index>(price_base + j)) = 1.0;
  rhs(row) = 1.0;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  WalrasSolution sol;
  sol.rcond = lu.rcond();
  if (!(sol.rcond > kMinRcond)) {
    std::ostringstream os;
    os << "walras: linear system is singular (reciprocal condition estimate " << sol.rcond << ", size " << size << ")";
    throw SolverError(os.str());
  }
  const Eigen::VectorXd z = lu.solve(rhs);
  sol.residual = (a * z - rhs).cwiseAbs().maxCoeff();
  if (!z.allFinite()) throw SolverError("walras: non-finite solution");

  sol.normalized_prices.resize(goods);
  for (std::size_t j = 0; j < goods; ++j) sol.normalized_prices[j] = z(static_cast<Eigen::Index>(price_base + j));
  const double money_price = sol.normalized_prices[kMoney];
  if (!(money_price > 0.0)) throw SolverError("walras: non-positive price of money");
  sol.prices.resize(goods);
  for (std::size_t j = 0; j < goods; ++j) sol.prices[j] = sol.normalized_prices[j] / money_price;

  sol.demands = Matrix(m, goods);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < goods; ++j)
      sol.demands(i, j) = z(static_cast<Eigen::Index>(i * goods + j)) / sol.normalized_prices[j];
  return sol;
}

WalrasSolution solve_walras_cobb_douglas(const Economy& economy) {
  Matrix betas(economy.agent_count(), economy.goods_count());
  for (const auto& a : economy.agents()) {
    const auto* cd = dynamic_cast<const CobbDouglas*>(a.utility.get());
    if (!cd) throw DomainError("walras: agent " + std::to_string(a.id) + " does not have a Cobb-Douglas utility");
    std::copy(cd->beta().begin(), cd->beta().end(), betas.row(a.id).begin());
  }
  return solve_walras_cobb_douglas(betas, economy.holdings());
}

}  // namespace bilateral
