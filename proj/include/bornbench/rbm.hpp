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
 * Restricted Boltzmann machine over {0,1} units.
 *
 * Energy E(v, h) = -(v^T W h + b_v . v + b_h . h), distribution
 * p(v, h) = exp(-beta E) / Z. Visible unit i corresponds to position i of a
 * visible code (position 0 is the leftmost bit).
 */
#pragma once

#include "bornbench/random.hpp"
#include "bornbench/samples.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bornbench {

/// Largest visible layer handled by exact enumeration. Hidden units are
/// summed out analytically and do not count against this.
inline constexpr std::size_t kMaxRbmVisible = 24;

/// Largest visible layer accepted at all (codes are 64-bit).
inline constexpr std::size_t kMaxRbmVisibleSampled = 64;

enum class TrainableMask { BiasesOnly, BiasesAndWeights };

struct RbmModel {
    RbmModel() = default;
    /// All parameters zero, beta = 1, biases-only training.
    RbmModel(std::size_t n_visible, std::size_t n_hidden);

    std::size_t n_visible{0};
    std::size_t n_hidden{0};
    Eigen::MatrixXd weights;     // n_visible x n_hidden
    Eigen::VectorXd visible_bias;
    Eigen::VectorXd hidden_bias;
    double beta{1.0};
    TrainableMask trainable{TrainableMask::BiasesOnly};

    /// Throws std::invalid_argument on inconsistent shapes or beta <= 0.
    void validate() const;

    /// n_visible + n_hidden, plus n_visible * n_hidden when weights train.
    [[nodiscard]] std::size_t trainable_count() const noexcept;
};

struct RbmInit {
    double weight_range{1.0};  // fixed weights ~ U[-range, range]
    double visible_bias{-3.0};
    double hidden_bias{0.0};
};

RbmModel random_rbm(std::size_t n_visible, std::size_t n_hidden, Rng &rng,
                    const RbmInit &init = {},
                    TrainableMask mask = TrainableMask::BiasesOnly);

/// Trainable parameters flattened as [b_v, b_h, W row-major (if trainable)].
std::vector<double> trainable_parameters(const RbmModel &model);

/// Inverse of trainable_parameters; weights are untouched in biases-only mode.
void set_trainable_parameters(RbmModel &model, std::span<const double> values);

/// Energy of a full (visible then hidden) 0/1 configuration.
double energy(const RbmModel &model, std::span<const std::uint8_t> full_config);

/// log sum_h exp(-beta E(v, h)).
double log_visible_weight(const RbmModel &model, Code visible);

/// log Z; throws std::length_error above kMaxRbmVisible visible units.
double log_partition_function(const RbmModel &model);

/// Z itself (may overflow to inf for extreme parameters; prefer the log).
double partition_function_exact(const RbmModel &model);

/// p(v) over all 2^n_visible codes.
std::vector<double> exact_visible_distribution(const RbmModel &model);

/// p(h_j = 1 | v) for every hidden unit.
std::vector<double> hidden_activation(const RbmModel &model, Code visible);

/// Mean log-likelihood sum_v data(v) log p(v).
double log_likelihood(const RbmModel &model, const EmpiricalDistribution &data);

struct GibbsConfig {
    std::size_t sweeps{1000};  // recorded samples per chain
    std::size_t n_chains{100};
    std::size_t burn_in{500};
};

/**
 * @brief Block Gibbs sampling, alternating h | v and v | h.
 *
 * Each chain starts from a uniformly random visible state with its own
 * derived stream, discards `burn_in` sweeps and then records the visible
 * state after each of `sweeps` sweeps.
 */
SampleSet gibbs_sample(const RbmModel &model, const GibbsConfig &cfg, Rng &rng);

/**
 * @brief Simulated annealing over inverse temperature.
 *
 * Every chain performs `sweeps_per_stage` sweeps at each beta of the
 * (strictly increasing) schedule, then `sweeps_per_stage` recorded sweeps at
 * the model's own beta.
 */
SampleSet annealed_sample(const RbmModel &model, std::span<const double> schedule,
                          std::size_t sweeps_per_stage, std::size_t n_chains, Rng &rng);

/**
 * @brief Log-likelihood ascent direction in the trainable_parameters layout.
 *
 * Visible terms are beta (<v_i>_data - <v_i>_model); hidden and weight terms
 * use the exact conditionals p(h_j = 1 | v) on both sides.
 */
std::vector<double> loglik_gradient(const RbmModel &model, const EmpiricalDistribution &data,
                                    const EmpiricalDistribution &model_samples);

std::vector<double> loglik_gradient(const RbmModel &model, const SampleSet &data,
                                    const SampleSet &model_samples);

} // namespace bornbench
