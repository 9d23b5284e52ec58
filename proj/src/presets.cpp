#include "bilateral/presets.hpp"

#include <string>

namespace bilateral::presets {

namespace {

AgentSpec cobb_douglas(std::vector<double> beta, std::vector<double> holdings) {
  AgentSpec a;
  a.beta = std::move(beta);
  a.holdings = std::move(holdings);
  return a;
}

AgentSpec separable(double alpha, std::vector<double> a, std::vector<double> b, std::vector<double> holdings) {
  AgentSpec s;
  s.alpha = alpha;
  s.a = std::move(a);
  s.b = std::move(b);
  s.holdings = std::move(holdings);
  return s;
}

}  // namespace

ExperimentConfig example1() {
  ExperimentConfig c;
  c.name = "example1";
  c.economy.family = UtilityFamily::CobbDouglas;
  c.economy.interior = true;
  c.economy.agents = {
      cobb_douglas({0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09, 0.09},
                   {59, 76, 10, 37, 54, 99, 73, 30, 25, 20}),
      cobb_douglas({0.05, 0.1, 0.17, 0.02, 0.16, 0.1, 0.16, 0.07, 0.03, 0.04},
                   {14, 40, 63, 57, 69, 39, 34, 86, 10, 56}),
      cobb_douglas({0.06, 0.05, 0.09, 0.15, 0.07, 0.08, 0.14, 0.02, 0.11, 0.13},
                   {19, 57, 43, 65, 78, 40, 9, 82, 71, 82}),
      cobb_douglas({0.01, 0.15, 0.01, 0.11, 0.11, 0.16, 0.03, 0.14, 0.09, 0.09},
                   {10, 65, 35, 43, 63, 74, 79, 38, 20, 27}),
      cobb_douglas({0.03, 0.13, 0.05, 0.16, 0.16, 0.07, 0.08, 0.1, 0.08, 0.04},
                   {37, 70, 40, 94, 83, 15, 34, 97, 35, 34}),
  };
  c.runs = 50;
  c.first_seed = 1;
  c.params.seed = c.first_seed;
  c.output_dir = "out/example1";
  return c;
}

ExperimentConfig example2() {
  ExperimentConfig c;
  c.name = "example2";
  c.economy.family = UtilityFamily::CobbDouglas;
  c.economy.interior = true;
  c.economy.agents = {
      cobb_douglas({0.60, 0.15, 0.15}, {10, 10, 10}),
      cobb_douglas({0.01, 0.85, 0.04}, {2, 8, 80}),
      cobb_douglas({0.01, 0.09, 0.80}, {2, 80, 8}),
  };
  c.runs = 2;
  c.first_seed = 1;
  c.params.seed = c.first_seed;
  c.output_dir = "out/example2";
  return c;
}

ExperimentConfig example3(std::int64_t trial) {
  ExperimentConfig c;
  c.name = "example3_trial" + std::to_string(trial);
  c.economy.family = UtilityFamily::SeparableQuadMoney;
  c.economy.interior = false;
  c.economy.agents = {
      separable(0.5, {5, 5}, {0.2, 0.2}, {9.9, 0, 8}),
      separable(0.5, {8, 8}, {0.4, 0.4}, {0.1, 10, 7}),
  };
  c.economy.shift = EndowmentShift{2, 0, 1, 3.0, trial};
  c.runs = 1;
  c.first_seed = 1;
  c.params.seed = c.first_seed;
  c.output_dir = "out/" + c.name;
  return c;
}

}  // namespace bilateral::presets
