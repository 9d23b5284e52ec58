#include "doctest.h"

#include <cmath>

#include "bilateral/errors.hpp"
#include "bilateral/presets.hpp"
#include "bilateral/walras.hpp"
#include "support.hpp"

using namespace bilateral;
using namespace testing;

namespace {

Matrix table(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  return m;
}

}  // namespace

TEST_SUITE("walras") {
  TEST_CASE("Example 1 prices match the power-iteration oracle and the reference row") {
    const WalrasSolution w = solve_walras_cobb_douglas(table(kExample1Betas), table(kExample1Holdings));
    const auto oracle = walras_power_iteration(kExample1Betas, kExample1Holdings);
    REQUIRE(w.prices.size() == 10);
    CHECK(w.prices[0] == 1.0);
    for (std::size_t j = 0; j < 10; ++j) CHECK(w.prices[j] == doctest::Approx(oracle[j]).epsilon(1e-9));
    const double reference[] = {0.9575, 1.2218, 1.0569, 0.9680, 1.0594, 1.2609, 0.7102, 1.4501, 1.0371};
    for (std::size_t j = 1; j < 10; ++j) CHECK(std::abs(w.prices[j] - reference[j - 1]) <= 1e-3);
    CHECK(w.residual <= 1e-10);
  }

  TEST_CASE("Example 2 prices and holdings") {
    const WalrasSolution w = solve_walras_cobb_douglas(table(kExample2Betas), table(kExample2Holdings));
    const auto oracle = walras_power_iteration(kExample2Betas, kExample2Holdings);
    for (std::size_t j = 0; j < 3; ++j) CHECK(w.prices[j] == doctest::Approx(oracle[j]).epsilon(1e-9));
    CHECK(std::abs(w.prices[1] - 0.4921) <= 1e-3);
    CHECK(std::abs(w.prices[2] - 0.4614) <= 1e-3);
    // Reference holdings good by good: money of agents 0..2, then good 1, then good 2.
    const double reference_holdings[3][3] = {{13.02, 0.48, 0.50}, {6.62, 82.23, 9.16}, {7.06, 4.13, 86.82}};
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(w.demands(i, j) - reference_holdings[j][i]) <= 2e-2);
  }

  TEST_CASE("demands follow the Cobb-Douglas expenditure rule and clear the market") {
    for (const auto& cfg : {presets::example1(), presets::example2()}) {
      const Economy e = build_economy(cfg.economy);
      const WalrasSolution w = solve_walras_cobb_douglas(e);
      CHECK(w.residual <= 1e-10);
      double norm = 0.0;
      for (std::size_t j = 1; j < w.normalized_prices.size(); ++j) norm += w.normalized_prices[j];
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t i = 0; i < e.agent_count(); ++i) {
        const auto& beta = cfg.economy.agents[i].beta;
        double bsum = 0.0, wealth = 0.0;
        for (std::size_t k = 0; k < beta.size(); ++k) {
          bsum += beta[k];
          wealth += w.prices[k] * e.agent(i).holdings[k];
        }
        for (std::size_t j = 0; j < beta.size(); ++j)
          CHECK(std::abs(w.demands(i, j) * w.prices[j] - beta[j] / bsum * wealth) <= 1e-8 * std::max(1.0, wealth));
      }
      for (std::size_t j = 0; j < e.goods_count(); ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < e.agent_count(); ++i) total += w.demands(i, j);
        CHECK(total == doctest::Approx(e.total_supply()[j]).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("a single agent keeps its endowment") {
    const WalrasSolution w = solve_walras_cobb_douglas(table({{0.2, 0.3, 0.1}}), table({{4, 5, 6}}));
    CHECK(w.demands(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(w.demands(0, 1) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(w.demands(0, 2) == doctest::Approx(6.0).epsilon(1e-12));
    // Own-wealth expenditure shares: p_j x_j / wealth = beta_j / sum(beta).
    CHECK(w.prices[1] == doctest::Approx(0.3 / 0.2 * 4.0 / 5.0).epsilon(1e-12));
  }

  TEST_CASE("prices are invariant under scaling every endowment") {
    const WalrasSolution base = solve_walras_cobb_douglas(table(kExample2Betas), table(kExample2Holdings));
    auto scaled = kExample2Holdings;
    for (auto& row : scaled)
      for (auto& q : row) q *= 3.5;
    const WalrasSolution w = solve_walras_cobb_douglas(table(kExample2Betas), table(scaled));
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(w.prices[j] == doctest::Approx(base.prices[j]).epsilon(1e-12));
      for (std::size_t i = 0; i < 3; ++i) CHECK(w.demands(i, j) == doctest::Approx(3.5 * base.demands(i, j)).epsilon(1e-12));
    }
  }

  TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(solve_walras_cobb_douglas(table({{0.6, 0.6}}), table({{1, 1}})), DomainError);
    CHECK_THROWS(solve_walras_cobb_douglas(table({{0.2, 0.2}}), table({{1, 1, 1}})));
    CHECK_THROWS(solve_walras_cobb_douglas(table({{0.2, 0.2}}), table({{0, 1}})));
    CHECK_THROWS_AS(solve_walras_cobb_douglas(build_economy(presets::example3(0).economy)), DomainError);
  }
}
