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
#include "bornbench/entanglement.hpp"

#include "bornbench/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace bornbench {

double q_purity(const PureState &state) {
    const std::size_t n = state.n_qubits();
    double purity = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        purity += reduced_purity(state, k);
    }
    return 2.0 * (1.0 - purity / static_cast<double>(n));
}

double generalized_distance(std::span<const Complex> u, std::span<const Complex> v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("generalized distance needs vectors of equal length");
    }
    double sum = 0.0;
    for (std::size_t a = 0; a < u.size(); ++a) {
        for (std::size_t b = 0; b < u.size(); ++b) {
            sum += std::norm(u[a] * v[b] - u[b] * v[a]);
        }
    }
    return 0.5 * sum;
}

double q_direct(const PureState &state) {
    const std::size_t n = state.n_qubits();
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum += generalized_distance(project_drop(state, k, 0), project_drop(state, k, 1));
    }
    return 4.0 * sum / static_cast<double>(n);
}

std::pair<double, double> mean_and_stddev(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("no values");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) {
        return {*lo, 0.0};
    }
    double mean = 0.0;
    for (const double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (const double v : values) {
        var += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

EntanglementReport ent_average(const AnsatzLayout &layout, std::size_t n_instances, Rng &rng) {
    if (n_instances == 0) {
        throw std::invalid_argument("entanglement average needs at least one instance");
    }
    EntanglementReport report;
    report.topology = layout.topology().name();
    report.n_qubits = layout.n_qubits();
    report.layers = layout.layers();
    const bool product = layout.layers() < 2 || layout.topology().edges().empty();
    const std::uint64_t base = rng.next_u64();
    for (std::size_t k = 0; k < n_instances; ++k) {
        const std::uint64_t seed = derive_seed(base, "ent-instance", k);
        Rng instance{seed};
        const auto params = random_parameters(layout, instance);
        report.seeds.push_back(seed);
        report.q_values.push_back(product ? 0.0 : q_purity(prepare_state(layout, params)));
    }
    std::tie(report.mean, report.stddev) = mean_and_stddev(report.q_values);
    return report;
}

void write_entanglement_csv(std::ostream &out, const EntanglementReport &report) {
    out << "instance,seed,Q\n";
    for (std::size_t k = 0; k < report.q_values.size(); ++k) {
        out << k << ',' << report.seeds[k] << ',' << format_double(report.q_values[k]) << '\n';
    }
}

std::string entanglement_summary_json(const EntanglementReport &report) {
    const nlohmann::json j = {{"topology", report.topology},   {"n_qubits", report.n_qubits},
                              {"layers", report.layers},       {"instances", report.q_values.size()},
                              {"mean", report.mean},           {"std", report.stddev}};
    return j.dump(2);
}

void write_entanglement_sweep_csv(std::ostream &out, const std::vector<EntanglementReport> &reports) {
    out << "layers,mean_q,std_q\n";
    for (const auto &r : reports) {
        out << r.layers << ',' << format_double(r.mean) << ',' << format_double(r.stddev) << '\n';
    }
}

} // namespace bornbench
