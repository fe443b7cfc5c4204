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
 * Meyer-Wallach global entanglement and the entangling capability of an
 * ansatz.
 */
#pragma once

#include "bornbench/ansatz.hpp"
#include "bornbench/random.hpp"
#include "bornbench/statevector.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bornbench {

/// Q = 2 (1 - mean_k Tr[rho_k^2]).
double q_purity(const PureState &state);

/// D(u, v) = 1/2 sum_{a,b} |u_a v_b - u_b v_a|^2.
double generalized_distance(std::span<const Complex> u, std::span<const Complex> v);

/// Q = (4 / n) sum_k D(iota_k(0) psi, iota_k(1) psi). Quadratic in the
/// dimension; meant for cross-checks.
double q_direct(const PureState &state);

struct EntanglementReport {
    std::string topology;
    std::size_t n_qubits{0};
    std::size_t layers{0};
    std::vector<double> q_values;
    std::vector<std::uint64_t> seeds;
    double mean{0.0};
    double stddev{0.0};  // population
};

inline constexpr std::size_t kDefaultEntanglementInstances = 100;

/**
 * @brief Mean and spread of Q over random parameter draws.
 *
 * Instance k draws its angles from derive_seed(base, "ent-instance", k)
 * with base taken from `rng`. Layouts without an entangling block prepare
 * product states, so their Q is reported as exactly zero.
 */
EntanglementReport ent_average(const AnsatzLayout &layout, std::size_t n_instances, Rng &rng);

/// Population mean and standard deviation; std is 0 when all values agree.
std::pair<double, double> mean_and_stddev(std::span<const double> values);

/// `instance,seed,Q`.
void write_entanglement_csv(std::ostream &out, const EntanglementReport &report);

/// Summary as one JSON object.
std::string entanglement_summary_json(const EntanglementReport &report);

/// `layers,mean_q,std_q`, one line per report.
void write_entanglement_sweep_csv(std::ostream &out, const std::vector<EntanglementReport> &reports);

} // namespace bornbench
