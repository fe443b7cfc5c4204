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
 * Optimizers and the training loops for Born machines and RBMs.
 *
 * Each epoch record describes the model at the start of that epoch, before
 * its update, so record 0 is the initial model.
 */
#pragma once

#include "bornbench/born.hpp"
#include "bornbench/discriminator.hpp"
#include "bornbench/divergence.hpp"
#include "bornbench/rbm.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bornbench {

// ---------------------------------------------------------------------------
// Optimizers

enum class OptimizerKind { Vanilla, Adam, Genetic };

struct OptimizerConfig {
    OptimizerKind kind{OptimizerKind::Adam};
    /// Unset selects 0.05 for vanilla descent and 0.01 for Adam.
    std::optional<double> learning_rate;
    double adam_beta1{0.9};
    double adam_beta2{0.999};
    double adam_epsilon{1e-8};
    std::size_t epochs{100};
    EvalMode mode{EvalMode::Exact};
    std::size_t model_shots{500};  // N
    std::size_t data_shots{500};   // M
    std::size_t eval_every{5};     // 0 disables discriminator evaluation
    std::size_t eval_samples{2000};
    std::size_t snapshot_every{5}; // 0 keeps no parameter snapshots
    std::uint64_t seed{0};

    [[nodiscard]] double effective_learning_rate() const;
    void validate() const;
};

std::vector<double> vanilla_step(std::span<const double> params, std::span<const double> gradient, double eta);

struct AdamConfig {
    double learning_rate{0.01};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t t{0};

    /// Zero moments for `n` parameters.
    static AdamState zeros(std::size_t n);
};

/// Bias-corrected Adam update; returns the advanced state and new parameters.
std::pair<AdamState, std::vector<double>> adam_step(AdamState state, std::span<const double> params,
                                                    std::span<const double> gradient, const AdamConfig &cfg);

struct GeneticConfig {
    std::size_t population_size{20};
    std::size_t elite_count{2};
    double mutation_stddev{0.1};
    std::size_t tournament_size{3};
    std::size_t generations{50};
    std::uint64_t seed{0};

    void validate() const;
};

using Member = std::vector<double>;
using FitnessFunction = std::function<double(const Member &)>;

/**
 * @brief One generation of cost minimization.
 *
 * The elite_count lowest-cost members are copied unchanged (ordered by cost,
 * ties by position); every other slot is a tournament winner perturbed by
 * N(0, mutation_stddev) in each coordinate.
 */
std::vector<Member> genetic_generation(const std::vector<Member> &population, const FitnessFunction &fitness,
                                       const GeneticConfig &cfg, Rng &rng);

/// phi(x) = 1 - D(x): the generator cost with the log and 1/2 terms dropped.
SampleFunction adversarial_generator_phi(const Forest &discriminator);

// ---------------------------------------------------------------------------
// Traces

struct EpochRecord {
    std::size_t epoch{0};
    double cost{0.0};
    std::optional<double> discriminator_error;
    bool converged{true};
    std::vector<double> params;  // empty unless a snapshot epoch
    std::uint64_t seed{0};       // epoch stream seed
    double wall_seconds{0.0};
};

struct TrainingTrace {
    std::string model;  // "born" or "rbm"
    std::string cost;
    std::size_t trainable_parameters{0};
    std::uint64_t root_seed{0};
    std::vector<EpochRecord> records;
};

// ---------------------------------------------------------------------------
// Training loops

enum class BornCost { Sinkhorn, Mmd, Adversarial, Genetic };

struct BornTrainingConfig {
    BornCost cost{BornCost::Sinkhorn};
    OptimizerConfig optimizer;
    SinkhornConfig sinkhorn;
    KernelConfig kernel;
    GeneticConfig genetic;
    ForestConfig forest;
};

/**
 * @brief Trains `machine` in place against the data multiset.
 *
 * Exact mode evaluates costs and gradients on the exact model distribution
 * and the full data distribution; sampled mode uses N model and M data
 * samples per epoch. The genetic cost runs one generation per epoch with the
 * Sinkhorn divergence as fitness and keeps the best member.
 */
TrainingTrace train_born(BornMachine &machine, const SampleSet &data, const BornTrainingConfig &cfg);

enum class RbmSampler { Exact, Gibbs, Annealed };

struct RbmTrainingConfig {
    OptimizerConfig optimizer;
    RbmSampler sampler{RbmSampler::Exact};
    std::size_t n_chains{10};
    std::size_t burn_in{100};
    /// Empty selects {0.2, 0.4, 0.6, 0.8} times the model's beta.
    std::vector<double> annealing_schedule;
    ForestConfig forest;
};

/// Log-likelihood ascent on the trainable parameters; cost is -log-likelihood.
TrainingTrace train_rbm(RbmModel &model, const SampleSet &data, const RbmTrainingConfig &cfg);

std::string to_string(BornCost cost);
std::string to_string(OptimizerKind kind);
std::string to_string(RbmSampler sampler);
BornCost parse_born_cost(const std::string &name);
OptimizerKind parse_optimizer_kind(const std::string &name);
RbmSampler parse_rbm_sampler(const std::string &name);

} // namespace bornbench
