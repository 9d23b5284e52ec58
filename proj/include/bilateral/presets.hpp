#pragma once

#include <cstdint>

#include "bilateral/experiments.hpp"

namespace bilateral::presets {

// Five agents, nine goods plus money, Cobb-Douglas utilities.
ExperimentConfig example1();

// Three agents, two goods plus money; each good starts concentrated in one
// agent's hands.
ExperimentConfig example2();

// Two agents with separable utilities (power utility of money, concave
// quadratics in goods 1 and 2). Agent 0 starts with none of good 1 and
// agent 1 with almost no money; `trial` moves 3 * trial units of good 2 from
// agent 0 to agent 1. The parameter values are reconstructed: they were
// chosen to give initial thresholds 31.4643 / 2.5298 for good 1 and
// 21.3957 + 3.7757 trial / 3.2888 - 0.7590 trial for good 2.
ExperimentConfig example3(std::int64_t trial);

}  // namespace bilateral::presets
