#pragma once

#include <vector>

#include "bilateral/core_model.hpp"

namespace bilateral {

struct WalrasSolution {
  // Relative prices p~_0..p~_n, normalized so that p~_1 + ... + p~_n = 1.
  std::vector<double> normalized_prices;
  // Money-denominated prices p~_j / p~_0; prices[0] = 1.
  std::vector<double> prices;
  Matrix demands;  // m x (n+1)
  // Largest absolute residual over all equations of the linear system.
  double residual = 0.0;
  // Reciprocal condition number estimate of the system matrix.
  double rcond = 0.0;
};

// Walras equilibrium of a Cobb-Douglas exchange economy. With
// w_i = sum_k p~_k x0_ik and normalized exponents bt_ij = beta_ij / sum_k beta_ik,
// the expenditures e_ij = p~_j x~_ij solve the linear system
//
//   e_ij - bt_ij * sum_k p~_k x0_ik = 0       i = 1..m, j = 0..n
//   sum_i e_ij - p~_j s_j           = 0       j = 1..n
//   sum_{j=1..n} p~_j               = 1
//
// The clearing equation for money follows from the others and is omitted.
// Throws SolverError when the system is numerically singular.
WalrasSolution solve_walras_cobb_douglas(const Matrix& betas, const Matrix& holdings);

// Same, reading exponents and holdings from an all-Cobb-Douglas economy.
WalrasSolution solve_walras_cobb_douglas(const Economy& economy);

}  // namespace bilateral
