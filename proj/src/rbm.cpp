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
#include "bornbench/rbm.hpp"

#include "bornbench/divergence.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bornbench {

namespace {

double log1p_exp(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void require_enumerable(const RbmModel &model) {
    if (model.n_visible > kMaxRbmVisible) {
        throw std::length_error("RBM with " + std::to_string(model.n_visible) +
                                " visible units exceeds the enumeration ceiling");
    }
}

/// Input to hidden unit j: c_j + sum_i v_i W_ij.
double hidden_field(const RbmModel &model, Code visible, std::size_t j) {
    double field = model.hidden_bias(static_cast<Eigen::Index>(j));
    for (std::size_t i = 0; i < model.n_visible; ++i) {
        if (bit_at(visible, model.n_visible, i) != 0U) {
            field += model.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return field;
}

struct Moments {
    std::vector<double> visible;
    std::vector<double> hidden;
    Eigen::MatrixXd joint;  // <v_i p(h_j | v)>
};

Moments moments(const RbmModel &model, const EmpiricalDistribution &dist, bool with_joint) {
    Moments m{std::vector<double>(model.n_visible, 0.0), std::vector<double>(model.n_hidden, 0.0),
              Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.n_visible),
                                    static_cast<Eigen::Index>(model.n_hidden))};
    for (std::size_t k = 0; k < dist.size(); ++k) {
        const Code v = dist.support()[k];
        const double w = dist.weights()[k];
        const auto h = hidden_activation(model, v);
        for (std::size_t j = 0; j < model.n_hidden; ++j) {
            m.hidden[j] += w * h[j];
        }
        for (std::size_t i = 0; i < model.n_visible; ++i) {
            if (bit_at(v, model.n_visible, i) == 0U) {
                continue;
            }
            m.visible[i] += w;
            if (with_joint) {
                for (std::size_t j = 0; j < model.n_hidden; ++j) {
                    m.joint(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w * h[j];
                }
            }
        }
    }
    return m;
}

/// One chain's mutable state plus the conditional updates.
class GibbsChain {
  public:
    GibbsChain(const RbmModel &model, Rng rng) : model_{model}, rng_{rng}, v_(model.n_visible), h_(model.n_hidden) {
        for (auto &x : v_) {
            x = rng_.bernoulli(0.5) ? 1 : 0;
        }
    }

    void sweep(double beta) {
        const auto nv = static_cast<Eigen::Index>(model_.n_visible);
        const auto nh = static_cast<Eigen::Index>(model_.n_hidden);
        for (Eigen::Index j = 0; j < nh; ++j) {
            double field = model_.hidden_bias(j);
            for (Eigen::Index i = 0; i < nv; ++i) {
                if (v_[static_cast<std::size_t>(i)] != 0) {
                    field += model_.weights(i, j);
                }
            }
            h_[static_cast<std::size_t>(j)] = rng_.bernoulli(logistic(beta * field)) ? 1 : 0;
        }
        for (Eigen::Index i = 0; i < nv; ++i) {
            double field = model_.visible_bias(i);
            for (Eigen::Index j = 0; j < nh; ++j) {
                if (h_[static_cast<std::size_t>(j)] != 0) {
                    field += model_.weights(i, j);
                }
            }
            v_[static_cast<std::size_t>(i)] = rng_.bernoulli(logistic(beta * field)) ? 1 : 0;
        }
    }

    [[nodiscard]] Code visible_code() const {
        Code c = 0;
        for (const auto x : v_) {
            c = (c << 1U) | x;
        }
        return c;
    }

  private:
    const RbmModel &model_;
    Rng rng_;
    std::vector<std::uint8_t> v_;
    std::vector<std::uint8_t> h_;
};

} // namespace

RbmModel::RbmModel(std::size_t nv, std::size_t nh)
    : n_visible{nv}, n_hidden{nh},
      weights{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nh))},
      visible_bias{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv))},
      hidden_bias{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nh))} {
    validate();
}

void RbmModel::validate() const {
    if (n_visible == 0 || n_visible > kMaxRbmVisibleSampled) {
        throw std::invalid_argument("RBM visible layer must have 1.." +
                                    std::to_string(kMaxRbmVisibleSampled) + " units");
    }
    const auto nv = static_cast<Eigen::Index>(n_visible);
    const auto nh = static_cast<Eigen::Index>(n_hidden);
    if (weights.rows() != nv || weights.cols() != nh || visible_bias.size() != nv ||
        hidden_bias.size() != nh) {
        throw std::invalid_argument("RBM parameter shapes do not match the layer sizes");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("RBM inverse temperature must be positive");
    }
}

std::size_t RbmModel::trainable_count() const noexcept {
    return n_visible + n_hidden + (trainable == TrainableMask::BiasesAndWeights ? n_visible * n_hidden : 0);
}

RbmModel random_rbm(std::size_t n_visible, std::size_t n_hidden, Rng &rng, const RbmInit &init,
                    TrainableMask mask) {
    RbmModel model{n_visible, n_hidden};
    model.trainable = mask;
    for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < model.weights.cols(); ++j) {
            model.weights(i, j) = rng.uniform(-init.weight_range, init.weight_range);
        }
    }
    model.visible_bias.setConstant(init.visible_bias);
    model.hidden_bias.setConstant(init.hidden_bias);
    return model;
}

std::vector<double> trainable_parameters(const RbmModel &model) {
    std::vector<double> out;
    out.reserve(model.trainable_count());
    out.insert(out.end(), model.visible_bias.begin(), model.visible_bias.end());
    out.insert(out.end(), model.hidden_bias.begin(), model.hidden_bias.end());
    if (model.trainable == TrainableMask::BiasesAndWeights) {
        for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
            for (Eigen::Index j = 0; j < model.weights.cols(); ++j) {
                out.push_back(model.weights(i, j));
            }
        }
    }
    return out;
}

void set_trainable_parameters(RbmModel &model, std::span<const double> values) {
    if (values.size() != model.trainable_count()) {
        throw std::invalid_argument("expected " + std::to_string(model.trainable_count()) +
                                    " RBM parameters, got " + std::to_string(values.size()));
    }
    std::size_t k = 0;
    for (auto &b : model.visible_bias) {
        b = values[k++];
    }
    for (auto &b : model.hidden_bias) {
        b = values[k++];
    }
    if (model.trainable == TrainableMask::BiasesAndWeights) {
        for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
            for (Eigen::Index j = 0; j < model.weights.cols(); ++j) {
                model.weights(i, j) = values[k++];
            }
        }
    }
}

double energy(const RbmModel &model, std::span<const std::uint8_t> config) {
    if (config.size() != model.n_visible + model.n_hidden) {
        throw std::invalid_argument("configuration length does not match the RBM");
    }
    const auto v = config.first(model.n_visible);
    const auto h = config.subspan(model.n_visible);
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0) {
            continue;
        }
        e += model.visible_bias(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < h.size(); ++j) {
            if (h[j] != 0) {
                e += model.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
        if (h[j] != 0) {
            e += model.hidden_bias(static_cast<Eigen::Index>(j));
        }
    }
    return -e;
}

double log_visible_weight(const RbmModel &model, Code visible) {
    double out = 0.0;
    for (std::size_t i = 0; i < model.n_visible; ++i) {
        if (bit_at(visible, model.n_visible, i) != 0U) {
            out += model.beta * model.visible_bias(static_cast<Eigen::Index>(i));
        }
    }
    for (std::size_t j = 0; j < model.n_hidden; ++j) {
        out += log1p_exp(model.beta * hidden_field(model, visible, j));
    }
    return out;
}

double log_partition_function(const RbmModel &model) {
    require_enumerable(model);
    const std::size_t dim = std::size_t{1} << model.n_visible;
    std::vector<double> logs(dim);
    for (Code v = 0; v < dim; ++v) {
        logs[v] = log_visible_weight(model, v);
    }
    return log_sum_exp(logs);
}

double partition_function_exact(const RbmModel &model) { return std::exp(log_partition_function(model)); }

std::vector<double> exact_visible_distribution(const RbmModel &model) {
    require_enumerable(model);
    const std::size_t dim = std::size_t{1} << model.n_visible;
    std::vector<double> p(dim);
    for (Code v = 0; v < dim; ++v) {
        p[v] = log_visible_weight(model, v);
    }
    const double log_z = log_sum_exp(p);
    for (auto &x : p) {
        x = std::exp(x - log_z);
    }
    return p;
}

std::vector<double> hidden_activation(const RbmModel &model, Code visible) {
    std::vector<double> out(model.n_hidden);
    for (std::size_t j = 0; j < model.n_hidden; ++j) {
        out[j] = logistic(model.beta * hidden_field(model, visible, j));
    }
    return out;
}

double log_likelihood(const RbmModel &model, const EmpiricalDistribution &data) {
    if (data.width() != model.n_visible) {
        throw std::invalid_argument("data width does not match the visible layer");
    }
    const double log_z = log_partition_function(model);
    double out = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) {
        out += data.weights()[k] * (log_visible_weight(model, data.support()[k]) - log_z);
    }
    return out;
}

SampleSet gibbs_sample(const RbmModel &model, const GibbsConfig &cfg, Rng &rng) {
    model.validate();
    if (cfg.sweeps == 0 || cfg.n_chains == 0) {
        throw std::invalid_argument("Gibbs sampling needs at least one sweep and one chain");
    }
    const std::uint64_t base = rng.next_u64();
    SampleSet out{model.n_visible};
    for (std::size_t c = 0; c < cfg.n_chains; ++c) {
        GibbsChain chain{model, Rng{derive_seed(base, "gibbs-chain", c)}};
        for (std::size_t s = 0; s < cfg.burn_in; ++s) {
            chain.sweep(model.beta);
        }
        for (std::size_t s = 0; s < cfg.sweeps; ++s) {
            chain.sweep(model.beta);
            out.add(chain.visible_code());
        }
    }
    return out;
}

SampleSet annealed_sample(const RbmModel &model, std::span<const double> schedule,
                          std::size_t sweeps_per_stage, std::size_t n_chains, Rng &rng) {
    model.validate();
    if (schedule.empty()) {
        throw std::invalid_argument("annealing schedule is empty");
    }
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (!(schedule[k] > 0.0) || (k > 0 && !(schedule[k] > schedule[k - 1]))) {
            throw std::invalid_argument("annealing schedule must be positive and increasing");
        }
    }
    if (sweeps_per_stage == 0 || n_chains == 0) {
        throw std::invalid_argument("annealing needs at least one sweep and one chain");
    }
    const std::uint64_t base = rng.next_u64();
    SampleSet out{model.n_visible};
    for (std::size_t c = 0; c < n_chains; ++c) {
        GibbsChain chain{model, Rng{derive_seed(base, "anneal-chain", c)}};
        for (const double beta : schedule) {
            for (std::size_t s = 0; s < sweeps_per_stage; ++s) {
                chain.sweep(beta);
            }
        }
        for (std::size_t s = 0; s < sweeps_per_stage; ++s) {
            chain.sweep(model.beta);
            out.add(chain.visible_code());
        }
    }
    return out;
}

std::vector<double> loglik_gradient(const RbmModel &model, const EmpiricalDistribution &data,
                                    const EmpiricalDistribution &model_samples) {
    model.validate();
    if (data.size() == 0 || model_samples.size() == 0) {
        throw std::invalid_argument("log-likelihood gradient needs nonempty data and model samples");
    }
    if (data.width() != model.n_visible || model_samples.width() != model.n_visible) {
        throw std::invalid_argument("sample width does not match the visible layer");
    }
    const bool joint = model.trainable == TrainableMask::BiasesAndWeights;
    const auto pos = moments(model, data, joint);
    const auto neg = moments(model, model_samples, joint);
    std::vector<double> grad;
    grad.reserve(model.trainable_count());
    for (std::size_t i = 0; i < model.n_visible; ++i) {
        grad.push_back(model.beta * (pos.visible[i] - neg.visible[i]));
    }
    for (std::size_t j = 0; j < model.n_hidden; ++j) {
        grad.push_back(model.beta * (pos.hidden[j] - neg.hidden[j]));
    }
    if (joint) {
        for (Eigen::Index i = 0; i < pos.joint.rows(); ++i) {
            for (Eigen::Index j = 0; j < pos.joint.cols(); ++j) {
                grad.push_back(model.beta * (pos.joint(i, j) - neg.joint(i, j)));
            }
        }
    }
    return grad;
}

std::vector<double> loglik_gradient(const RbmModel &model, const SampleSet &data,
                                    const SampleSet &model_samples) {
    if (data.empty() || model_samples.empty()) {
        throw std::invalid_argument("log-likelihood gradient needs nonempty data and model samples");
    }
    return loglik_gradient(model, EmpiricalDistribution::from_samples(data),
                           EmpiricalDistribution::from_samples(model_samples));
}

} // namespace bornbench
