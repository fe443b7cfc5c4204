// Copyright 2026 The bornbench Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Quantum circuit Born machine: exact distribution, sampling and
 * parameter-shift gradients of sample-space cost functionals.
 */
#pragma once

#include "bornbench/ansatz.hpp"
#include "bornbench/random.hpp"
#include "bornbench/samples.hpp"

#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace bornbench {

struct BornMachine {
    BornMachine(AnsatzLayout layout_, ParameterVector params_);

    AnsatzLayout layout;
    ParameterVector params;

    [[nodiscard]] std::size_t n_qubits() const noexcept { return layout.n_qubits(); }
};

std::vector<double> born_exact_distribution(const BornMachine &machine);

SampleSet born_sample(const BornMachine &machine, std::size_t shots, Rng &rng);

/**
 * @brief Per-sample function phi(x) whose expectation change drives the
 * gradient. Must be defined on the whole sample space.
 */
using SampleFunction = std::function<double(Code)>;

enum class EvalMode { Exact, Sampled };

struct GradientOptions {
    EvalMode mode{EvalMode::Exact};
    std::size_t shots{500};
    std::uint64_t seed{0};
};

inline constexpr double kParameterShift = std::numbers::pi / 2;

/// E_{x ~ p}[phi(x)] over a dense probability vector.
double expectation(std::span<const double> probabilities, const SampleFunction &phi);

/// E[phi] over a sample multiset (sample mean).
double expectation(const SampleSet &samples, const SampleFunction &phi);

/**
 * @brief Parameter-shift gradient of E_{p_theta}[phi] treated with phi held
 * fixed:
 *
 *   grad_k = 1/2 (E_{p_{theta_k^+}}[phi] - E_{p_{theta_k^-}}[phi]),
 *
 * with theta_k^{+-} = theta +- (pi/2) e_k. In Sampled mode each shifted
 * circuit is measured `shots` times; the + and - runs of parameter k draw
 * from streams derive_seed(seed, "shift+", k) and derive_seed(seed, "shift-", k),
 * so results do not depend on the order in which k is visited.
 */
std::vector<double> born_gradient(const BornMachine &machine, const SampleFunction &phi,
                                  const GradientOptions &options);

} // namespace bornbench
