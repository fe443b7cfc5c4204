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
#include "bornbench/trainers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace bornbench {

namespace {

using Clock = std::chrono::steady_clock;

/// Vanilla or Adam descent over a flat parameter vector.
class Stepper {
  public:
    Stepper(const OptimizerConfig &cfg, std::size_t n)
        : kind_{cfg.kind}, eta_{cfg.effective_learning_rate()},
          adam_{cfg.effective_learning_rate(), cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon},
          state_{AdamState::zeros(n)} {}

    std::vector<double> step(std::span<const double> params, std::span<const double> gradient) {
        if (kind_ == OptimizerKind::Adam) {
            auto [state, next] = adam_step(std::move(state_), params, gradient, adam_);
            state_ = std::move(state);
            return next;
        }
        return vanilla_step(params, gradient, eta_);
    }

  private:
    OptimizerKind kind_;
    double eta_;
    AdamConfig adam_;
    AdamState state_;
};

bool is_eval_epoch(const OptimizerConfig &cfg, std::size_t e) { return cfg.eval_every > 0 && e % cfg.eval_every == 0; }

bool is_snapshot_epoch(const OptimizerConfig &cfg, std::size_t e) {
    return cfg.snapshot_every > 0 && e % cfg.snapshot_every == 0;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

ForestConfig with_seed(ForestConfig cfg, std::uint64_t seed) {
    cfg.seed = seed;
    return cfg;
}

double evaluate_discriminator(const SampleSet &model_samples, const SampleSet &data, const ForestConfig &forest,
                              std::uint64_t epoch_seed, std::size_t eval_samples) {
    Rng data_rng{derive_seed(epoch_seed, "eval-data", 0)};
    const auto data_samples = resample(data, eval_samples, data_rng);
    return discriminator_error(model_samples, data_samples, with_seed(forest, derive_seed(epoch_seed, "eval-forest", 0)),
                               derive_seed(epoch_seed, "eval-split", 0));
}

} // namespace

double OptimizerConfig::effective_learning_rate() const {
    if (learning_rate) {
        return *learning_rate;
    }
    return kind == OptimizerKind::Vanilla ? 0.05 : 0.01;
}

void OptimizerConfig::validate() const {
    if (!(effective_learning_rate() > 0.0)) {
        throw std::invalid_argument("learning rate must be positive");
    }
    if (mode == EvalMode::Sampled && (model_shots == 0 || data_shots == 0)) {
        throw std::invalid_argument("sampled training needs positive shot counts");
    }
    if (eval_every > 0 && eval_samples < 2) {
        throw std::invalid_argument("discriminator evaluation needs at least two samples per class");
    }
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0 && adam_epsilon > 0.0)) {
        throw std::invalid_argument("Adam hyperparameters out of range");
    }
}

std::vector<double> vanilla_step(std::span<const double> params, std::span<const double> gradient, double eta) {
    if (params.size() != gradient.size()) {
        throw std::invalid_argument("parameter and gradient lengths differ");
    }
    std::vector<double> out(params.begin(), params.end());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] -= eta * gradient[k];
    }
    return out;
}

AdamState AdamState::zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0}; }

std::pair<AdamState, std::vector<double>> adam_step(AdamState state, std::span<const double> params,
                                                    std::span<const double> gradient, const AdamConfig &cfg) {
    if (params.size() != gradient.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw std::invalid_argument("Adam state, parameter and gradient lengths differ");
    }
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double c1 = 1.0 - std::pow(cfg.beta1, t);
    const double c2 = 1.0 - std::pow(cfg.beta2, t);
    std::vector<double> out(params.begin(), params.end());
    for (std::size_t k = 0; k < out.size(); ++k) {
        state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * gradient[k];
        state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * gradient[k] * gradient[k];
        const double m_hat = state.m[k] / c1;
        const double v_hat = state.v[k] / c2;
        out[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
    return {std::move(state), std::move(out)};
}

void GeneticConfig::validate() const {
    if (population_size < 2) {
        throw std::invalid_argument("genetic population needs at least two members");
    }
    if (elite_count < 1 || elite_count >= population_size) {
        throw std::invalid_argument("elite count must be in [1, population size)");
    }
    if (tournament_size < 1) {
        throw std::invalid_argument("tournament size must be positive");
    }
    if (!(mutation_stddev >= 0.0)) {
        throw std::invalid_argument("mutation standard deviation must be nonnegative");
    }
}

std::vector<Member> genetic_generation(const std::vector<Member> &population, const FitnessFunction &fitness,
                                       const GeneticConfig &cfg, Rng &rng) {
    cfg.validate();
    if (population.size() != cfg.population_size) {
        throw std::invalid_argument("population size does not match the genetic configuration");
    }
    std::vector<double> cost(population.size());
    for (std::size_t k = 0; k < population.size(); ++k) {
        cost[k] = fitness(population[k]);
    }
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });

    std::vector<Member> next;
    next.reserve(population.size());
    for (std::size_t k = 0; k < cfg.elite_count; ++k) {
        next.push_back(population[order[k]]);
    }
    while (next.size() < population.size()) {
        std::size_t winner = rng.uniform_index(population.size());
        for (std::size_t k = 1; k < cfg.tournament_size; ++k) {
            const std::size_t rival = rng.uniform_index(population.size());
            if (cost[rival] < cost[winner]) {
                winner = rival;
            }
        }
        Member child = population[winner];
        for (auto &x : child) {
            x += cfg.mutation_stddev * rng.normal();
        }
        next.push_back(std::move(child));
    }
    return next;
}

SampleFunction adversarial_generator_phi(const Forest &discriminator) {
    return [discriminator](Code x) { return 1.0 - discriminator.predict_proba(x); };
}

TrainingTrace train_born(BornMachine &machine, const SampleSet &data, const BornTrainingConfig &cfg) {
    const auto &opt = cfg.optimizer;
    opt.validate();
    if (data.empty()) {
        throw std::invalid_argument("training data is empty");
    }
    if (data.width() != machine.n_qubits()) {
        throw std::invalid_argument("data bit length " + std::to_string(data.width()) + " does not match " +
                                    std::to_string(machine.n_qubits()) + " qubits");
    }
    if (cfg.cost == BornCost::Genetic) {
        cfg.genetic.validate();
    }
    const auto pi_full = EmpiricalDistribution::from_samples(data);
    const bool exact = opt.mode == EvalMode::Exact;
    const std::size_t n = machine.n_qubits();

    TrainingTrace trace{"born", to_string(cfg.cost), machine.params.size(), opt.seed, {}};
    Stepper stepper{opt, machine.params.size()};

    std::vector<Member> population;
    if (cfg.cost == BornCost::Genetic) {
        Rng init{derive_seed(opt.seed, "genetic-init", 0)};
        population.push_back(machine.params.values);
        while (population.size() < cfg.genetic.population_size) {
            population.push_back(random_parameters(machine.layout, init).values);
        }
    }

    for (std::size_t e = 0; e < opt.epochs; ++e) {
        const auto start = Clock::now();
        const std::uint64_t seed_e = derive_seed(opt.seed, "epoch", e);
        EpochRecord rec;
        rec.epoch = e;
        rec.seed = seed_e;

        // Model and data distributions seen by this epoch.
        const auto dense = exact ? born_exact_distribution(machine) : std::vector<double>{};
        SampleSet model_samples{n};
        EmpiricalDistribution p_model;
        EmpiricalDistribution pi;
        if (exact) {
            p_model = EmpiricalDistribution::from_dense(dense, n);
            pi = pi_full;
        } else {
            Rng mrng{derive_seed(seed_e, "model-samples", 0)};
            Rng drng{derive_seed(seed_e, "data-samples", 0)};
            model_samples = born_sample(machine, opt.model_shots, mrng);
            p_model = EmpiricalDistribution::from_samples(model_samples);
            pi = EmpiricalDistribution::from_samples(resample(data, opt.data_shots, drng));
        }

        SampleFunction phi;
        switch (cfg.cost) {
        case BornCost::Sinkhorn:
        case BornCost::Genetic: {
            const auto value = sinkhorn_divergence(p_model, pi, cfg.sinkhorn);
            rec.cost = value.value;
            rec.converged = value.converged;
            if (cfg.cost == BornCost::Sinkhorn) {
                auto functional = sinkhorn_grad_functional(p_model, pi, cfg.sinkhorn);
                rec.converged = rec.converged && functional.converged;
                phi = std::move(functional.phi);
            }
            break;
        }
        case BornCost::Mmd:
            rec.cost = mmd(p_model, pi, cfg.kernel);
            phi = mmd_grad_functional(pi, p_model, cfg.kernel);
            break;
        case BornCost::Adversarial: {
            // A fresh forest every epoch, on N model and M data samples.
            Rng mrng{derive_seed(seed_e, "adversary-model", 0)};
            Rng drng{derive_seed(seed_e, "adversary-data", 0)};
            const auto fake = exact ? sample_from_probabilities(dense, n, opt.model_shots, mrng) : model_samples;
            const auto real = resample(data, opt.data_shots, drng);
            LabeledDataset labeled{n, {}, {}};
            for (const auto &[c, k] : fake.counts()) {
                labeled.add(c, Origin::Model, k);
            }
            for (const auto &[c, k] : real.counts()) {
                labeled.add(c, Origin::Data, k);
            }
            const auto forest = fit(labeled, with_seed(cfg.forest, derive_seed(seed_e, "adversary-forest", 0)));
            phi = adversarial_generator_phi(forest);
            rec.cost = exact ? expectation(dense, phi) : expectation(model_samples, phi);
            break;
        }
        }

        if (is_eval_epoch(opt, e)) {
            Rng erng{derive_seed(seed_e, "eval-model", 0)};
            rec.discriminator_error =
                evaluate_discriminator(born_sample(machine, opt.eval_samples, erng), data, cfg.forest, seed_e,
                                       opt.eval_samples);
        }
        if (is_snapshot_epoch(opt, e)) {
            rec.params = machine.params.values;
        }

        if (cfg.cost == BornCost::Genetic) {
            std::size_t calls = 0;
            const FitnessFunction fitness = [&](const Member &m) {
                const BornMachine candidate{machine.layout, ParameterVector{m}};
                EmpiricalDistribution pm;
                if (exact) {
                    pm = EmpiricalDistribution::from_dense(born_exact_distribution(candidate), n);
                } else {
                    Rng frng{derive_seed(seed_e, "fitness", calls)};
                    pm = EmpiricalDistribution::from_samples(born_sample(candidate, opt.model_shots, frng));
                }
                ++calls;
                return sinkhorn_divergence(pm, pi, cfg.sinkhorn).value;
            };
            Rng grng{derive_seed(seed_e, "genetic", 0)};
            population = genetic_generation(population, fitness, cfg.genetic, grng);
            machine.params.values = population.front();
        } else {
            const GradientOptions gopt{opt.mode, opt.model_shots, derive_seed(seed_e, "shift", 0)};
            const auto grad = born_gradient(machine, phi, gopt);
            machine.params.values = stepper.step(machine.params.values, grad);
        }

        rec.wall_seconds = seconds_since(start);
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

TrainingTrace train_rbm(RbmModel &model, const SampleSet &data, const RbmTrainingConfig &cfg) {
    const auto &opt = cfg.optimizer;
    opt.validate();
    model.validate();
    if (opt.kind == OptimizerKind::Genetic) {
        throw std::invalid_argument("RBM training supports vanilla and Adam updates only");
    }
    if (data.empty()) {
        throw std::invalid_argument("training data is empty");
    }
    if (data.width() != model.n_visible) {
        throw std::invalid_argument("data bit length " + std::to_string(data.width()) + " does not match " +
                                    std::to_string(model.n_visible) + " visible units");
    }
    if (cfg.sampler != RbmSampler::Exact && cfg.n_chains == 0) {
        throw std::invalid_argument("sampled RBM training needs at least one chain");
    }
    std::vector<double> schedule = cfg.annealing_schedule;
    if (schedule.empty()) {
        for (const double f : {0.2, 0.4, 0.6, 0.8}) {
            schedule.push_back(f * model.beta);
        }
    }
    const bool enumerable = model.n_visible <= kMaxRbmVisible;
    if (cfg.sampler == RbmSampler::Exact && !enumerable) {
        throw std::length_error("exact RBM sampler needs at most " + std::to_string(kMaxRbmVisible) +
                                " visible units");
    }
    const auto pi_full = EmpiricalDistribution::from_samples(data);

    TrainingTrace trace{"rbm", "loglik", model.trainable_count(), opt.seed, {}};
    Stepper stepper{opt, model.trainable_count()};

    const auto model_draw = [&](std::size_t shots, Rng &rng, const std::vector<double> &dense) {
        if (cfg.sampler == RbmSampler::Exact) {
            return sample_from_probabilities(dense, model.n_visible, shots, rng);
        }
        const std::size_t sweeps = (shots + cfg.n_chains - 1) / cfg.n_chains;
        if (cfg.sampler == RbmSampler::Gibbs) {
            return gibbs_sample(model, GibbsConfig{sweeps, cfg.n_chains, cfg.burn_in}, rng);
        }
        return annealed_sample(model, schedule, sweeps, cfg.n_chains, rng);
    };

    for (std::size_t e = 0; e < opt.epochs; ++e) {
        const auto start = Clock::now();
        const std::uint64_t seed_e = derive_seed(opt.seed, "epoch", e);
        EpochRecord rec;
        rec.epoch = e;
        rec.seed = seed_e;

        const auto dense = enumerable ? exact_visible_distribution(model) : std::vector<double>{};
        rec.cost = enumerable ? -log_likelihood(model, pi_full) : std::numeric_limits<double>::quiet_NaN();

        EmpiricalDistribution model_dist;
        EmpiricalDistribution data_dist;
        if (cfg.sampler == RbmSampler::Exact) {
            model_dist = EmpiricalDistribution::from_dense(dense, model.n_visible);
        } else {
            Rng mrng{derive_seed(seed_e, "model-samples", 0)};
            model_dist = EmpiricalDistribution::from_samples(model_draw(opt.model_shots, mrng, dense));
        }
        if (opt.mode == EvalMode::Exact) {
            data_dist = pi_full;
        } else {
            Rng drng{derive_seed(seed_e, "data-samples", 0)};
            data_dist = EmpiricalDistribution::from_samples(resample(data, opt.data_shots, drng));
        }

        if (is_eval_epoch(opt, e)) {
            Rng erng{derive_seed(seed_e, "eval-model", 0)};
            rec.discriminator_error =
                evaluate_discriminator(model_draw(opt.eval_samples, erng, dense), data, cfg.forest, seed_e,
                                       opt.eval_samples);
        }
        if (is_snapshot_epoch(opt, e)) {
            rec.params = trainable_parameters(model);
        }

        // Ascent on the log-likelihood is descent on its negation.
        auto grad = loglik_gradient(model, data_dist, model_dist);
        for (auto &g : grad) {
            g = -g;
        }
        set_trainable_parameters(model, stepper.step(trainable_parameters(model), grad));

        rec.wall_seconds = seconds_since(start);
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

std::string to_string(BornCost cost) {
    switch (cost) {
    case BornCost::Sinkhorn:
        return "sinkhorn";
    case BornCost::Mmd:
        return "mmd";
    case BornCost::Adversarial:
        return "adversarial";
    case BornCost::Genetic:
        return "genetic";
    }
    return "unknown";
}

std::string to_string(OptimizerKind kind) {
    switch (kind) {
    case OptimizerKind::Vanilla:
        return "vanilla";
    case OptimizerKind::Adam:
        return "adam";
    case OptimizerKind::Genetic:
        return "genetic";
    }
    return "unknown";
}

std::string to_string(RbmSampler sampler) {
    switch (sampler) {
    case RbmSampler::Exact:
        return "exact";
    case RbmSampler::Gibbs:
        return "gibbs";
    case RbmSampler::Annealed:
        return "annealed";
    }
    return "unknown";
}

BornCost parse_born_cost(const std::string &name) {
    for (const auto c : {BornCost::Sinkhorn, BornCost::Mmd, BornCost::Adversarial, BornCost::Genetic}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    throw std::invalid_argument("unknown Born machine cost '" + name + "'");
}

OptimizerKind parse_optimizer_kind(const std::string &name) {
    for (const auto k : {OptimizerKind::Vanilla, OptimizerKind::Adam, OptimizerKind::Genetic}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown optimizer '" + name + "'");
}

RbmSampler parse_rbm_sampler(const std::string &name) {
    for (const auto s : {RbmSampler::Exact, RbmSampler::Gibbs, RbmSampler::Annealed}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw std::invalid_argument("unknown RBM sampler '" + name + "'");
}

} // namespace bornbench
