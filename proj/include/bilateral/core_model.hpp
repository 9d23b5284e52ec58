#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace bilateral {

class Utility;
using UtilityPtr = std::shared_ptr<const Utility>;

inline constexpr std::size_t kMoney = 0;

/// Quantities of goods 0..n held by one agent; index 0 is money.
class GoodsVector {
 public:
  GoodsVector() = default;
  explicit GoodsVector(std::size_t size, double fill = 0.0) : q_(size, fill) {}
  GoodsVector(std::initializer_list<double> q) : q_(q) {}
  explicit GoodsVector(std::vector<double> q) : q_(std::move(q)) {}

  std::size_t size() const { return q_.size(); }
  double& operator[](std::size_t j) { return q_[j]; }
  double operator[](std::size_t j) const { return q_[j]; }
  double money() const { return q_[kMoney]; }

  std::span<const double> view() const { return q_; }
  std::span<double> view() { return q_; }
  const std::vector<double>& values() const { return q_; }

  auto begin() const { return q_.begin(); }
  auto end() const { return q_.end(); }

  bool operator==(const GoodsVector&) const = default;

 private:
  std::vector<double> q_;
};

/// Row-major dense matrix, used for agent x good tables.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct AgentState {
  std::size_t id = 0;
  GoodsVector holdings;
  UtilityPtr utility;
  // delta_ij for j = 1..n, stored at index j-1. Empty until the engine
  // (or a caller) assigns premiums.
  std::vector<double> premiums;

  double premium(std::size_t good) const { return premiums.at(good - 1); }
};

/// Agent roster plus the total supply fixed by the initial holdings.
class Economy {
 public:
  // Total supply is taken from the agents' current holdings. With
  // `interior` set, every holding must be strictly positive.
  explicit Economy(std::vector<AgentState> agents, bool interior = false);

  std::size_t agent_count() const { return agents_.size(); }
  std::size_t goods_count() const { return total_supply_.size(); }
  std::size_t non_money_count() const { return goods_count() - 1; }
  bool interior() const { return interior_; }

  const GoodsVector& total_supply() const { return total_supply_; }
  std::span<AgentState> agents() { return agents_; }
  std::span<const AgentState> agents() const { return agents_; }
  AgentState& agent(std::size_t i) { return agents_.at(i); }
  const AgentState& agent(std::size_t i) const { return agents_.at(i); }

  Matrix holdings() const;

 private:
  std::vector<AgentState> agents_;
  GoodsVector total_supply_;
  bool interior_ = false;
};

struct AlgorithmParams {
  double eps_p = 1e-6;
  double eps_delta = 1e-12;
  double lambda = 0.5;
  // delta^0_ij = delta0_scale * p_ij(x^0_i) unless explicit values are given.
  double delta0_scale = 0.1;
  std::optional<Matrix> delta0;  // m x n
  std::uint64_t max_iters = 1'000'000;
  double min_trade_quantity = 1e-12;
  std::uint64_t seed = 0;

  // Throws DomainError naming the offending field.
  void validate() const;

  bool operator==(const AlgorithmParams&) const = default;
};

struct ConservationCheck {
  bool ok = false;
  double max_residual = 0.0;
};

inline constexpr double kConservationTolerance = 1e-9;

// |sum_i x_ij - s_j| <= 1e-9 * max(1, s_j) for every good j.
ConservationCheck check_conservation(const Economy& economy, const GoodsVector& reference_supply);

}  // namespace bilateral
