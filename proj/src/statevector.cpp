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
#include "bornbench/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bornbench {

namespace {

void check_qubit(std::size_t qubit, std::size_t n_qubits) {
    if (qubit >= n_qubits) {
        throw std::out_of_range("qubit index " + std::to_string(qubit) +
                                " out of range for " + std::to_string(n_qubits) +
                                " qubits");
    }
}

/// Stride of `qubit` in the basis index (qubit 0 is the MSB).
std::size_t stride_of(std::size_t qubit, std::size_t n_qubits) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

} // namespace

std::array<Complex, 4> rotation_matrix(GateKind kind, double angle) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    switch (kind) {
    case GateKind::RX:
        return {Complex{c, 0}, Complex{0, -s}, Complex{0, -s}, Complex{c, 0}};
    case GateKind::RY:
        return {Complex{c, 0}, Complex{-s, 0}, Complex{s, 0}, Complex{c, 0}};
    case GateKind::RZ:
        return {Complex{c, -s}, Complex{0, 0}, Complex{0, 0}, Complex{c, s}};
    case GateKind::CZ:
        break;
    }
    throw std::invalid_argument("CZ has no single-qubit rotation matrix");
}

PureState::PureState(std::size_t n_qubits) : n_qubits_{n_qubits} {
    if (n_qubits == 0 || n_qubits > kMaxSimulatedQubits) {
        throw std::length_error("qubit count must be in 1.." +
                                std::to_string(kMaxSimulatedQubits));
    }
    amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0, 0});
    amplitudes_[0] = Complex{1, 0};
}

PureState::PureState(std::size_t n_qubits, std::vector<Complex> amplitudes)
    : n_qubits_{n_qubits}, amplitudes_{std::move(amplitudes)} {}

PureState PureState::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t dim = amplitudes.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) {
        throw std::length_error("amplitude vector length must be a power of two >= 2");
    }
    const auto n = static_cast<std::size_t>(std::countr_zero(dim));
    if (n > kMaxSimulatedQubits) {
        throw std::length_error("state exceeds the simulation ceiling");
    }
    return PureState{n, std::move(amplitudes)};
}

double PureState::norm_squared() const noexcept {
    double acc = 0.0;
    for (const auto &a : amplitudes_) {
        acc += std::norm(a);
    }
    return acc;
}

void PureState::apply_single(std::size_t qubit, const std::array<Complex, 4> &m) {
    const std::size_t stride = stride_of(qubit, n_qubits_);
    const std::size_t dim = amplitudes_.size();
    for (std::size_t block = 0; block < dim; block += 2 * stride) {
        for (std::size_t k = block; k < block + stride; ++k) {
            const Complex a0 = amplitudes_[k];
            const Complex a1 = amplitudes_[k + stride];
            amplitudes_[k] = m[0] * a0 + m[1] * a1;
            amplitudes_[k + stride] = m[2] * a0 + m[3] * a1;
        }
    }
}

void PureState::apply_cz(std::size_t a, std::size_t b) {
    const std::size_t mask = stride_of(a, n_qubits_) | stride_of(b, n_qubits_);
    for (std::size_t k = 0; k < amplitudes_.size(); ++k) {
        if ((k & mask) == mask) {
            amplitudes_[k] = -amplitudes_[k];
        }
    }
}

void PureState::apply(const Gate &gate) {
    check_qubit(gate.targets[0], n_qubits_);
    if (gate.kind == GateKind::CZ) {
        check_qubit(gate.targets[1], n_qubits_);
        if (gate.targets[0] == gate.targets[1]) {
            throw std::invalid_argument("CZ targets must be distinct");
        }
        apply_cz(gate.targets[0], gate.targets[1]);
        return;
    }
    apply_single(gate.targets[0], rotation_matrix(gate.kind, gate.angle));
}

void PureState::apply(std::span<const Gate> circuit) {
    for (const auto &g : circuit) {
        apply(g);
    }
}

void PureState::apply_global_phase(double alpha) {
    const Complex phase = std::polar(1.0, alpha);
    for (auto &a : amplitudes_) {
        a *= phase;
    }
}

PureState zero_state(std::size_t n_qubits) { return PureState{n_qubits}; }

PureState apply_gate(PureState state, const Gate &gate) {
    state.apply(gate);
    return state;
}

std::vector<double> exact_probabilities(const PureState &state) {
    std::vector<double> probs(state.dimension());
    const auto amps = state.amplitudes();
    std::transform(amps.begin(), amps.end(), probs.begin(),
                   [](const Complex &a) { return std::norm(a); });
    return probs;
}

SampleSet sample_from_probabilities(std::span<const double> probabilities,
                                    std::size_t width, std::size_t shots, Rng &rng) {
    if (probabilities.size() != (std::size_t{1} << width)) {
        throw std::invalid_argument("probability vector length must equal 2^width");
    }
    std::vector<double> cdf(probabilities.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
        acc += probabilities[k];
        cdf[k] = acc;
    }
    if (!(acc > 0.0)) {
        throw std::invalid_argument("probability vector has no mass");
    }
    // Last index carrying mass, so a draw near acc never lands on a zero entry.
    std::size_t last = probabilities.size() - 1;
    while (last > 0 && probabilities[last] == 0.0) {
        --last;
    }
    SampleSet out{width};
    for (std::size_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * acc;
        auto idx = static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        out.add(std::min(idx, last));
    }
    return out;
}

SampleSet sample(const PureState &state, std::size_t shots, Rng &rng) {
    const auto probs = exact_probabilities(state);
    return sample_from_probabilities(probs, state.n_qubits(), shots, rng);
}

double reduced_purity(const PureState &state, std::size_t qubit) {
    check_qubit(qubit, state.n_qubits());
    const std::size_t stride = stride_of(qubit, state.n_qubits());
    const auto amps = state.amplitudes();
    double rho00 = 0.0;
    double rho11 = 0.0;
    Complex rho01{0, 0};
    for (std::size_t block = 0; block < amps.size(); block += 2 * stride) {
        for (std::size_t k = block; k < block + stride; ++k) {
            const Complex a0 = amps[k];
            const Complex a1 = amps[k + stride];
            rho00 += std::norm(a0);
            rho11 += std::norm(a1);
            rho01 += a0 * std::conj(a1);
        }
    }
    return rho00 * rho00 + rho11 * rho11 + 2.0 * std::norm(rho01);
}

std::vector<Complex> project_drop(const PureState &state, std::size_t qubit, unsigned bit) {
    check_qubit(qubit, state.n_qubits());
    if (bit > 1) {
        throw std::invalid_argument("projection bit must be 0 or 1");
    }
    const std::size_t stride = stride_of(qubit, state.n_qubits());
    const auto amps = state.amplitudes();
    std::vector<Complex> out;
    out.reserve(amps.size() / 2);
    const std::size_t offset = bit == 1 ? stride : 0;
    // Blocks are visited in order, so the surviving indices stay sorted.
    for (std::size_t block = 0; block < amps.size(); block += 2 * stride) {
        for (std::size_t k = block; k < block + stride; ++k) {
            out.push_back(amps[k + offset]);
        }
    }
    return out;
}

} // namespace bornbench
