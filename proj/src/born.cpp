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
#include "bornbench/born.hpp"

#include "bornbench/statevector.hpp"

#include <stdexcept>

namespace bornbench {

BornMachine::BornMachine(AnsatzLayout layout_, ParameterVector params_)
    : layout{std::move(layout_)}, params{std::move(params_)} {
    if (params.size() != layout.parameter_count()) {
        throw std::invalid_argument("Born machine parameters do not match the layout");
    }
}

std::vector<double> born_exact_distribution(const BornMachine &machine) {
    return exact_probabilities(prepare_state(machine.layout, machine.params));
}

SampleSet born_sample(const BornMachine &machine, std::size_t shots, Rng &rng) {
    return sample(prepare_state(machine.layout, machine.params), shots, rng);
}

double expectation(std::span<const double> probabilities, const SampleFunction &phi) {
    double acc = 0.0;
    for (std::size_t x = 0; x < probabilities.size(); ++x) {
        if (probabilities[x] != 0.0) {
            acc += probabilities[x] * phi(x);
        }
    }
    return acc;
}

double expectation(const SampleSet &samples, const SampleFunction &phi) {
    if (samples.empty()) {
        throw std::invalid_argument("expectation over an empty sample set");
    }
    double acc = 0.0;
    for (const auto &[code, count] : samples.counts()) {
        acc += static_cast<double>(count) * phi(code);
    }
    return acc / static_cast<double>(samples.total());
}

std::vector<double> born_gradient(const BornMachine &machine, const SampleFunction &phi,
                                  const GradientOptions &options) {
    const std::size_t n_params = machine.params.size();
    std::vector<double> grad(n_params, 0.0);
    if (options.mode == EvalMode::Exact) {
        // phi is fixed for the whole gradient; tabulate it once.
        const std::size_t dim = std::size_t{1} << machine.n_qubits();
        std::vector<double> table(dim);
        for (std::size_t x = 0; x < dim; ++x) {
            table[x] = phi(x);
        }
        const auto tabulated = [&table](Code x) { return table[x]; };
        for (std::size_t k = 0; k < n_params; ++k) {
            const auto plus = exact_probabilities(prepare_state(
                machine.layout, shifted_params(machine.params, k, kParameterShift)));
            const auto minus = exact_probabilities(prepare_state(
                machine.layout, shifted_params(machine.params, k, -kParameterShift)));
            grad[k] = 0.5 * (expectation(plus, tabulated) - expectation(minus, tabulated));
        }
        return grad;
    }
    if (options.shots == 0) {
        throw std::invalid_argument("sampled gradient needs at least one shot");
    }
    for (std::size_t k = 0; k < n_params; ++k) {
        Rng rng_plus{derive_seed(options.seed, "shift+", k)};
        Rng rng_minus{derive_seed(options.seed, "shift-", k)};
        const auto plus = sample(
            prepare_state(machine.layout, shifted_params(machine.params, k, kParameterShift)),
            options.shots, rng_plus);
        const auto minus = sample(
            prepare_state(machine.layout, shifted_params(machine.params, k, -kParameterShift)),
            options.shots, rng_minus);
        grad[k] = 0.5 * (expectation(plus, phi) - expectation(minus, phi));
    }
    return grad;
}

} // namespace bornbench
