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
 * Distribution-comparison costs on bitstrings: debiased Sinkhorn divergence
 * (log-domain solver, sample-space gradient function) and the
 * multi-bandwidth Gaussian MMD.
 *
 * The transport cost is the Hamming distance, which equals the squared
 * Euclidean distance between 0/1 vectors.
 */
#pragma once

#include "bornbench/born.hpp"
#include "bornbench/samples.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bornbench {

/// log(sum_k exp(v_k)), stable for large |v|; -inf for an empty span.
double log_sum_exp(std::span<const double> values);

Eigen::MatrixXd hamming_cost_matrix(std::span<const Code> xs, std::span<const Code> ys);

/// Cost matrix between two supports; throws std::invalid_argument if widths differ.
Eigen::MatrixXd hamming_cost_matrix(const EmpiricalDistribution &p,
                                    const EmpiricalDistribution &q);

// ---------------------------------------------------------------------------
// MMD

struct KernelConfig {
    std::vector<double> bandwidths{0.25, 10.0, 1000.0};

    void validate() const;
};

/// Kernel value at Hamming distance `h`: mean_i exp(-h / (2 sigma_i)).
double kernel_at_distance(unsigned h, const KernelConfig &cfg);

/// Gaussian mixture kernel between two '0'/'1' strings of equal length.
double gaussian_mixture_kernel(std::string_view x, std::string_view y, const KernelConfig &cfg);

/// Biased (V-statistic) squared MMD between weighted distributions.
double mmd(const EmpiricalDistribution &p, const EmpiricalDistribution &q,
           const KernelConfig &cfg = {});

/**
 * @brief Derivative of mmd(p_theta, pi) w.r.t. p_theta(x):
 *   phi(x) = 2 (E_{x'~p_theta} k(x, x') - E_{y~pi} k(x, y)).
 */
SampleFunction mmd_grad_functional(const EmpiricalDistribution &pi_hat,
                                   const EmpiricalDistribution &p_theta,
                                   const KernelConfig &cfg = {});

// ---------------------------------------------------------------------------
// Sinkhorn

struct SinkhornConfig {
    double epsilon{1.0};
    std::size_t max_iterations{1000};
    double convergence_tol{1e-9};

    void validate() const;
};

/**
 * @brief Dual potentials of entropic OT between a first and a second
 * distribution, on their respective supports.
 *
 * For a self problem (p against p) both vectors hold the same symmetric
 * potential.
 */
struct SinkhornPotentials {
    std::vector<double> first;
    std::vector<double> second;
    double transport_value{0.0};
    std::size_t iterations{0};
    bool converged{false};
};

/**
 * @brief Log-domain alternating Sinkhorn iteration:
 *
 *   f_i = -eps LSE_j(log q_j + (g_j - C_ij) / eps)
 *   g_j = -eps LSE_i(log p_i + (f_i - C_ij) / eps)
 *
 * until the sup-norm change of (f, g) drops below the tolerance or the
 * iteration budget is spent. The value <p, f> + <q, g> is the entropic OT
 * cost with KL(U | p x q) regularization. Non-convergence is reported via
 * `converged`, never thrown.
 */
SinkhornPotentials sinkhorn_potentials(const EmpiricalDistribution &p,
                                       const EmpiricalDistribution &q,
                                       const Eigen::MatrixXd &cost,
                                       const SinkhornConfig &cfg = {});

/// Symmetric solve of OT(p, p) by the averaged update s <- (s + T(s)) / 2.
SinkhornPotentials sinkhorn_self_potentials(const EmpiricalDistribution &p,
                                            const Eigen::MatrixXd &cost,
                                            const SinkhornConfig &cfg = {});

/// Entropic OT value with Hamming cost (cross problem).
SinkhornPotentials entropic_ot(const EmpiricalDistribution &p, const EmpiricalDistribution &q,
                               const SinkhornConfig &cfg = {});

struct DivergenceValue {
    double value{0.0};
    bool converged{true};
};

/// OT(p, q) - OT(p, p) / 2 - OT(q, q) / 2.
DivergenceValue sinkhorn_divergence(const EmpiricalDistribution &p,
                                    const EmpiricalDistribution &q,
                                    const SinkhornConfig &cfg = {});

/**
 * @brief Sample-space gradient of sinkhorn_divergence(p, q) w.r.t. p(x):
 *
 *   phi(x) = -eps LSE_k(log q(y_k) + (g(y_k) - c(x, y_k)) / eps)
 *            + eps LSE_k(log p(x_k) + (s(x_k) - c(x, x_k)) / eps)
 *
 * where g is the second potential of the (p, q) problem and s the symmetric
 * potential of the (p, p) problem.
 */
SampleFunction sinkhorn_phi(const EmpiricalDistribution &p, const EmpiricalDistribution &q,
                            const SinkhornPotentials &cross, const SinkhornPotentials &self,
                            const SinkhornConfig &cfg = {});

struct SinkhornGradient {
    SampleFunction phi;
    bool converged{true};
};

/// Solves both potential problems and returns phi for p_theta against pi.
SinkhornGradient sinkhorn_grad_functional(const EmpiricalDistribution &p_theta,
                                          const EmpiricalDistribution &pi,
                                          const SinkhornConfig &cfg = {});

} // namespace bornbench
