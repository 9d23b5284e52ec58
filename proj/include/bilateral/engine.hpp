#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

#include "bilateral/core_model.hpp"
#include "bilateral/trade.hpp"

namespace bilateral {

enum class RunStatus { Equilibrium, PremiumFloor, MaxIters };

std::string_view to_string(RunStatus status);

/// Portable seeded stream for the random inspection order. mt19937_64's
/// output sequence is fixed by the standard; bounded draws use rejection
/// sampling so permutations do not depend on the standard library's
/// distribution implementations.
class InspectionRng {
 public:
  explicit InspectionRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  // Fisher-Yates: for k = size-1 down to 1, swap element k with a uniform
  // index in [0, k].
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[below(k)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct KktReport {
  bool passes = false;
  double tolerance = 0.0;
  double max_residual = 0.0;
  Matrix residuals;  // m x n, column j-1 holds good j
  // |p_j - max_i p_ij(x_i)| per non-money good.
  std::vector<double> max_threshold_gap;
};

struct EquilibriumReport {
  RunStatus status = RunStatus::MaxIters;
  std::vector<double> prices;  // n+1 entries, prices[0] = 1 (money)
  Matrix holdings;             // m x (n+1)
  Matrix thresholds;           // m x n at termination
  std::vector<double> dispersion;  // population stdev of thresholds per good
  std::uint64_t iterations = 0;
  std::uint64_t trades = 0;
  std::uint64_t decays = 0;
  double final_max_premium = 0.0;
  KktReport kkt;
  double wall_seconds = 0.0;
};

struct ThresholdSample {
  std::uint64_t iteration = 0;
  Matrix thresholds;  // m x n
};

struct DecayEvent {
  std::uint64_t iteration = 0;
  Matrix thresholds;  // before the decay
  Matrix premiums;    // before the decay
  Matrix holdings;
};

struct RunResult {
  EquilibriumReport report;
  Economy final_economy;
  std::vector<TradeRecord> trades;
  std::vector<ThresholdSample> trajectory;
};

struct RunOptions {
  // Record thresholds every `trajectory_stride` trades (0 disables, the
  // initial and final states are always kept when enabled).
  std::uint64_t trajectory_stride = 1;
  std::function<void(const Economy&, const TradeRecord&)> on_trade;
  std::function<void(const DecayEvent&)> on_decay;
};

// max_j of the population standard deviation over agents of column j.
// Requires at least two rows.
double stdev_stop(const Matrix& thresholds);

std::vector<double> threshold_dispersion(const Matrix& thresholds);

// All p_ij(x_i) for j = 1..n, as an m x n matrix.
Matrix threshold_matrix(const Economy& economy);

// Mean of each threshold column; prices[0] = 1.
std::vector<double> consensus_prices(const Matrix& thresholds);

// Equilibrium conditions at candidate prices (n+1 entries, or n entries for
// the non-money goods only): agents holding good j must have threshold equal
// to p_j; agents holding none may not value it above p_j.
KktReport verify_equilibrium(const Economy& economy, const std::vector<double>& prices, double tol);

// Bilateral trading: random inspection of (seller, buyer, good) triples,
// first available trade executed, uniform premium decay after a fruitless
// sweep, until the thresholds agree, the premiums fall below their floor, or
// the iteration budget runs out.
RunResult run(Economy economy, const AlgorithmParams& params, const RunOptions& options = {});

}  // namespace bilateral
