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
#include "bornbench/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bornbench {

namespace {

std::vector<double> log_weights(const EmpiricalDistribution &d) {
    std::vector<double> out(d.size());
    std::transform(d.weights().begin(), d.weights().end(), out.begin(),
                   [](double w) { return std::log(w); });
    return out;
}

/// -eps * LSE_j(log_w_j + (pot_j - cost(j)) / eps), two-pass max-shifted.
template <class CostAt>
double soft_min(std::span<const double> log_w, std::span<const double> pot, double eps,
                CostAt &&cost) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < log_w.size(); ++j) {
        hi = std::max(hi, log_w[j] + (pot[j] - cost(j)) / eps);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < log_w.size(); ++j) {
        acc += std::exp(log_w[j] + (pot[j] - cost(j)) / eps - hi);
    }
    return -eps * (hi + std::log(acc));
}

double sup_change(const std::vector<double> &a, const std::vector<double> &b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

double dot(const std::vector<double> &w, const std::vector<double> &v) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        acc += w[k] * v[k];
    }
    return acc;
}

} // namespace

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double hi = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(hi)) {
        return hi;
    }
    double acc = 0.0;
    for (const double v : values) {
        acc += std::exp(v - hi);
    }
    return hi + std::log(acc);
}

Eigen::MatrixXd hamming_cost_matrix(std::span<const Code> xs, std::span<const Code> ys) {
    Eigen::MatrixXd c(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                hamming_distance(xs[i], ys[j]);
        }
    }
    return c;
}

Eigen::MatrixXd hamming_cost_matrix(const EmpiricalDistribution &p,
                                    const EmpiricalDistribution &q) {
    if (p.width() != q.width()) {
        throw std::invalid_argument("cost matrix between bitstrings of different lengths");
    }
    return hamming_cost_matrix(p.support(), q.support());
}

// --------------------------------------------------------------------------- MMD

void KernelConfig::validate() const {
    if (bandwidths.empty()) {
        throw std::invalid_argument("kernel needs at least one bandwidth");
    }
    for (const double s : bandwidths) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("kernel bandwidths must be positive");
        }
    }
}

double kernel_at_distance(unsigned h, const KernelConfig &cfg) {
    double acc = 0.0;
    for (const double s : cfg.bandwidths) {
        acc += std::exp(-static_cast<double>(h) / (2.0 * s));
    }
    return acc / static_cast<double>(cfg.bandwidths.size());
}

double gaussian_mixture_kernel(std::string_view x, std::string_view y, const KernelConfig &cfg) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("kernel arguments have different lengths");
    }
    cfg.validate();
    return kernel_at_distance(hamming_distance(parse_bitstring(x), parse_bitstring(y)), cfg);
}

namespace {

std::vector<double> kernel_table(std::size_t width, const KernelConfig &cfg) {
    std::vector<double> table(width + 1);
    for (std::size_t h = 0; h <= width; ++h) {
        table[h] = kernel_at_distance(static_cast<unsigned>(h), cfg);
    }
    return table;
}

double kernel_mean(const EmpiricalDistribution &a, const EmpiricalDistribution &b,
                   const std::vector<double> &table) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            row += b.weights()[j] * table[hamming_distance(a.support()[i], b.support()[j])];
        }
        acc += a.weights()[i] * row;
    }
    return acc;
}

} // namespace

double mmd(const EmpiricalDistribution &p, const EmpiricalDistribution &q,
           const KernelConfig &cfg) {
    if (p.width() != q.width()) {
        throw std::invalid_argument("MMD between bitstrings of different lengths");
    }
    cfg.validate();
    const auto table = kernel_table(p.width(), cfg);
    const double value =
        kernel_mean(p, p, table) + kernel_mean(q, q, table) - 2.0 * kernel_mean(p, q, table);
    // The V-statistic is a squared RKHS norm; clamp rounding below zero.
    return std::max(value, 0.0);
}

SampleFunction mmd_grad_functional(const EmpiricalDistribution &pi_hat,
                                   const EmpiricalDistribution &p_theta,
                                   const KernelConfig &cfg) {
    if (pi_hat.width() != p_theta.width()) {
        throw std::invalid_argument("MMD gradient between bitstrings of different lengths");
    }
    cfg.validate();
    return [pi_hat, p_theta, table = kernel_table(p_theta.width(), cfg)](Code x) {
        double model_term = 0.0;
        for (std::size_t k = 0; k < p_theta.size(); ++k) {
            model_term += p_theta.weights()[k] * table[hamming_distance(x, p_theta.support()[k])];
        }
        double data_term = 0.0;
        for (std::size_t k = 0; k < pi_hat.size(); ++k) {
            data_term += pi_hat.weights()[k] * table[hamming_distance(x, pi_hat.support()[k])];
        }
        return 2.0 * (model_term - data_term);
    };
}

// ---------------------------------------------------------------------- Sinkhorn

void SinkhornConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("Sinkhorn epsilon must be positive");
    }
    if (max_iterations == 0) {
        throw std::invalid_argument("Sinkhorn needs at least one iteration");
    }
    if (!(convergence_tol > 0.0)) {
        throw std::invalid_argument("Sinkhorn tolerance must be positive");
    }
}

SinkhornPotentials sinkhorn_potentials(const EmpiricalDistribution &p,
                                       const EmpiricalDistribution &q,
                                       const Eigen::MatrixXd &cost, const SinkhornConfig &cfg) {
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(p.size());
    const auto m = static_cast<Eigen::Index>(q.size());
    if (cost.rows() != n || cost.cols() != m) {
        throw std::invalid_argument("cost matrix shape does not match the supports");
    }
    const double eps = cfg.epsilon;
    const auto log_p = log_weights(p);
    const auto log_q = log_weights(q);

    SinkhornPotentials out;
    out.first.assign(p.size(), 0.0);
    out.second.assign(q.size(), 0.0);
    std::vector<double> f_next(p.size());
    std::vector<double> g_next(q.size());
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) {
            f_next[static_cast<std::size_t>(i)] = soft_min(
                log_q, out.second, eps, [&](std::size_t j) { return cost(i, static_cast<Eigen::Index>(j)); });
        }
        for (Eigen::Index j = 0; j < m; ++j) {
            g_next[static_cast<std::size_t>(j)] = soft_min(
                log_p, f_next, eps, [&](std::size_t i) { return cost(static_cast<Eigen::Index>(i), j); });
        }
        const double change = std::max(sup_change(f_next, out.first), sup_change(g_next, out.second));
        out.first.swap(f_next);
        out.second.swap(g_next);
        out.iterations = it;
        if (change < cfg.convergence_tol) {
            out.converged = true;
            break;
        }
    }
    out.transport_value = dot(p.weights(), out.first) + dot(q.weights(), out.second);
    return out;
}

SinkhornPotentials sinkhorn_self_potentials(const EmpiricalDistribution &p,
                                            const Eigen::MatrixXd &cost,
                                            const SinkhornConfig &cfg) {
    cfg.validate();
    const auto n = static_cast<Eigen::Index>(p.size());
    if (cost.rows() != n || cost.cols() != n) {
        throw std::invalid_argument("self cost matrix shape does not match the support");
    }
    const double eps = cfg.epsilon;
    const auto log_p = log_weights(p);

    SinkhornPotentials out;
    std::vector<double> s(p.size(), 0.0);
    std::vector<double> s_next(p.size());
    for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = soft_min(log_p, s, eps,
                                      [&](std::size_t j) { return cost(i, static_cast<Eigen::Index>(j)); });
            s_next[static_cast<std::size_t>(i)] = 0.5 * (s[static_cast<std::size_t>(i)] + t);
        }
        const double change = sup_change(s_next, s);
        s.swap(s_next);
        out.iterations = it;
        if (change < cfg.convergence_tol) {
            out.converged = true;
            break;
        }
    }
    out.transport_value = 2.0 * dot(p.weights(), s);
    out.first = s;
    out.second = std::move(s);
    return out;
}

SinkhornPotentials entropic_ot(const EmpiricalDistribution &p, const EmpiricalDistribution &q,
                               const SinkhornConfig &cfg) {
    return sinkhorn_potentials(p, q, hamming_cost_matrix(p, q), cfg);
}

DivergenceValue sinkhorn_divergence(const EmpiricalDistribution &p,
                                    const EmpiricalDistribution &q, const SinkhornConfig &cfg) {
    const auto cross = entropic_ot(p, q, cfg);
    const auto self_p = sinkhorn_self_potentials(p, hamming_cost_matrix(p, p), cfg);
    const auto self_q = sinkhorn_self_potentials(q, hamming_cost_matrix(q, q), cfg);
    return {cross.transport_value - 0.5 * self_p.transport_value - 0.5 * self_q.transport_value,
            cross.converged && self_p.converged && self_q.converged};
}

SampleFunction sinkhorn_phi(const EmpiricalDistribution &p, const EmpiricalDistribution &q,
                            const SinkhornPotentials &cross, const SinkhornPotentials &self,
                            const SinkhornConfig &cfg) {
    cfg.validate();
    if (p.width() != q.width()) {
        throw std::invalid_argument("Sinkhorn gradient between bitstrings of different lengths");
    }
    if (cross.second.size() != q.size() || self.first.size() != p.size()) {
        throw std::invalid_argument("potentials do not match the distribution supports");
    }
    return [eps = cfg.epsilon, data_support = q.support(), data_log_w = log_weights(q),
            data_pot = cross.second, model_support = p.support(), model_log_w = log_weights(p),
            model_pot = self.first](Code x) {
        const double to_data = soft_min(data_log_w, data_pot, eps, [&](std::size_t k) {
            return static_cast<double>(hamming_distance(x, data_support[k]));
        });
        const double to_model = soft_min(model_log_w, model_pot, eps, [&](std::size_t k) {
            return static_cast<double>(hamming_distance(x, model_support[k]));
        });
        return to_data - to_model;
    };
}

SinkhornGradient sinkhorn_grad_functional(const EmpiricalDistribution &p_theta,
                                          const EmpiricalDistribution &pi,
                                          const SinkhornConfig &cfg) {
    const auto cross = entropic_ot(p_theta, pi, cfg);
    const auto self = sinkhorn_self_potentials(p_theta, hamming_cost_matrix(p_theta, p_theta), cfg);
    return {sinkhorn_phi(p_theta, pi, cross, self, cfg), cross.converged && self.converged};
}

} // namespace bornbench
