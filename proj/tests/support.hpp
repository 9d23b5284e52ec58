// Shared fixtures and independent oracles for the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bilateral/core_model.hpp"
#include "bilateral/utility.hpp"

namespace testing {

using namespace bilateral;

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(BILATERAL_SOURCE_DIR) / rel;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bilateral_tests_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Economy cobb_douglas_economy(const std::vector<std::vector<double>>& betas,
                                    const std::vector<std::vector<double>>& holdings, bool interior = true) {
  std::vector<AgentState> agents;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    AgentState a;
    a.id = i;
    a.holdings = GoodsVector(holdings[i]);
    a.utility = std::make_shared<CobbDouglas>(betas[i]);
    agents.push_back(std::move(a));
  }
  return Economy(std::move(agents), interior);
}

inline AgentState cd_agent(std::vector<double> beta, std::vector<double> holdings, std::vector<double> premiums = {}) {
  AgentState a;
  a.holdings = GoodsVector(std::move(holdings));
  a.utility = std::make_shared<CobbDouglas>(std::move(beta));
  a.premiums = std::move(premiums);
  return a;
}

// Central finite difference with step h relative to max(1, |x_j|).
inline double fd_partial(const Utility& u, std::vector<double> x, std::size_t j, double h_rel = 1e-6) {
  const double h = h_rel * std::max(1.0, std::abs(x[j]));
  const double xj = x[j];
  x[j] = xj + h;
  const double up = u.value(x);
  x[j] = xj - h;
  const double down = u.value(x);
  return (up - down) / (2.0 * h);
}

// Cobb-Douglas seller/buyer optima from setting the directional derivative
// of u(x0 + pi xi, xj - xi) (resp. u(x0 - pi xi, xj + xi)) to zero:
// beta_0 pi / (x0 + pi xi) = beta_j / (xj - xi).
inline double cd_seller_oracle(double beta0, double betaj, double x0, double xj, double pi) {
  const double xi = (beta0 * pi * xj - betaj * x0) / (pi * (beta0 + betaj));
  return std::clamp(xi, 0.0, xj);
}

inline double cd_buyer_oracle(double beta0, double betaj, double x0, double xj, double pi) {
  const double xi = (betaj * x0 - beta0 * pi * xj) / (pi * (beta0 + betaj));
  return std::clamp(xi, 0.0, x0 / pi);
}

// Walras prices of a Cobb-Douglas exchange economy by power iteration on
// p_j s_j = sum_i bt_ij (p . x_i), normalized to p_0 = 1. Independent of the
// library's linear-system formulation.
inline std::vector<double> walras_power_iteration(const std::vector<std::vector<double>>& betas,
                                                  const std::vector<std::vector<double>>& holdings) {
  const std::size_t m = betas.size();
  const std::size_t d = betas[0].size();
  std::vector<double> s(d, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) s[j] += holdings[i][j];
  std::vector<double> p(d, 1.0), next(d);
  for (int iter = 0; iter < 1'000'000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      double wealth = 0.0, bsum = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        wealth += p[k] * holdings[i][k];
        bsum += betas[i][k];
      }
      for (std::size_t j = 0; j < d; ++j) next[j] += betas[i][j] / bsum * wealth / s[j];
    }
    const double scale = next[0];
    double change = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      next[j] /= scale;
      change = std::max(change, std::abs(next[j] - p[j]));
    }
    p.swap(next);
    if (change < 1e-15) break;
  }
  return p;
}

// Five agents, ten goods.
inline const std::vector<std::vector<double>> kExample1Betas = {
    {0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09},
    {0.05, 0.1, 0.17, 0.02, 0.16, 0.1, 0.16, 0.07, 0.03, 0.04},
    {0.06, 0.05, 0.09, 0.15, 0.07, 0.08, 0.14, 0.02, 0.11, 0.13},
    {0.01, 0.15, 0.01, 0.11, 0.11, 0.16, 0.03, 0.14, 0.09, 0.09},
    {0.03, 0.13, 0.05, 0.16, 0.16, 0.07, 0.08, 0.1, 0.08, 0.04},
};
inline const std::vector<std::vector<double>> kExample1Holdings = {
    {59, 76, 10, 37, 54, 99, 73, 30, 25, 20},
    {14, 40, 63, 57, 69, 39, 34, 86, 10, 56},
    {19, 57, 43, 65, 78, 40, 9, 82, 71, 82},
    {10, 65, 35, 43, 63, 74, 79, 38, 20, 27},
    {37, 70, 40, 94, 83, 15, 34, 97, 35, 34},
};

// Three agents, two goods.
inline const std::vector<std::vector<double>> kExample2Betas = {
    {0.60, 0.15, 0.15}, {0.01, 0.85, 0.04}, {0.01, 0.09, 0.80}};
inline const std::vector<std::vector<double>> kExample2Holdings = {{10, 10, 10}, {2, 8, 80}, {2, 80, 8}};

// Random admissible Cobb-Douglas exponents: entries in (0.01, 0.3) scaled so
// the row sums to a value in (0.3, 0.95).
inline std::vector<double> random_beta(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<double> entry(0.01, 0.3), total(0.3, 0.95);
  std::vector<double> b(dim);
  double sum = 0.0;
  for (auto& v : b) sum += (v = entry(rng));
  const double target = total(rng);
  for (auto& v : b) v *= target / sum;
  return b;
}

}  // namespace testing
