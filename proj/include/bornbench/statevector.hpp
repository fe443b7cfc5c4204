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
 * Dense pure-state simulator.
 *
 * Conventions:
 *  - Basis index = integer value of the bitstring, qubit 0 is the most
 *    significant bit.
 *  - Rotations are R_a(theta) = exp(-i theta A / 2) for A in {X, Y, Z}, so
 *    RY(pi)|0> = |1> with real amplitudes.
 */
#pragma once

#include "bornbench/random.hpp"
#include "bornbench/samples.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bornbench {

using Complex = std::complex<double>;

/// Configurable ceiling on simulated register size.
inline constexpr std::size_t kMaxSimulatedQubits = 24;

enum class GateKind { RX, RY, RZ, CZ };

struct Gate {
    GateKind kind{GateKind::RY};
    double angle{0.0};
    std::array<std::size_t, 2> targets{0, 0};

    static Gate rx(std::size_t q, double angle) { return {GateKind::RX, angle, {q, q}}; }
    static Gate ry(std::size_t q, double angle) { return {GateKind::RY, angle, {q, q}}; }
    static Gate rz(std::size_t q, double angle) { return {GateKind::RZ, angle, {q, q}}; }
    static Gate cz(std::size_t a, std::size_t b) { return {GateKind::CZ, 0.0, {a, b}}; }

    friend bool operator==(const Gate &, const Gate &) = default;
};

/// The 2x2 matrix of a rotation gate, row-major.
std::array<Complex, 4> rotation_matrix(GateKind kind, double angle);

class PureState {
  public:
    /// |0...0> on `n_qubits` qubits; throws std::length_error outside 1..24.
    explicit PureState(std::size_t n_qubits);

    /// Wraps raw amplitudes; length must be a power of two >= 2.
    /// No normalization is applied.
    static PureState from_amplitudes(std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] Complex amplitude(Code basis) const { return amplitudes_.at(basis); }

    /// Squared norm, sum of |amplitude|^2.
    [[nodiscard]] double norm_squared() const noexcept;

    /// In-place evolution; throws std::out_of_range for bad targets.
    void apply(const Gate &gate);
    void apply(std::span<const Gate> circuit);

    /// Multiplies every amplitude by exp(i alpha).
    void apply_global_phase(double alpha);

  private:
    PureState(std::size_t n_qubits, std::vector<Complex> amplitudes);

    void apply_single(std::size_t qubit, const std::array<Complex, 4> &m);
    void apply_cz(std::size_t a, std::size_t b);

    std::size_t n_qubits_;
    std::vector<Complex> amplitudes_;
};

PureState zero_state(std::size_t n_qubits);

/// Value-semantics gate application.
PureState apply_gate(PureState state, const Gate &gate);

/// Born-rule outcome probabilities in basis order.
std::vector<double> exact_probabilities(const PureState &state);

/**
 * @brief Draw `shots` i.i.d. measurement outcomes.
 *
 * Inverse-CDF sampling over exact_probabilities; deterministic given the
 * generator state.
 */
SampleSet sample(const PureState &state, std::size_t shots, Rng &rng);

/// Draw `shots` codes from an explicit probability vector over 2^width codes.
SampleSet sample_from_probabilities(std::span<const double> probabilities,
                                    std::size_t width, std::size_t shots, Rng &rng);

/// Tr[rho_k^2] of the single-qubit reduced state of `qubit`.
double reduced_purity(const PureState &state, std::size_t qubit);

/**
 * @brief Apply iota_qubit(bit): keep basis states whose `qubit` has value
 * `bit` and delete that qubit.
 *
 * The result has 2^(n-1) amplitudes (a single amplitude when n = 1) and is
 * not renormalized.
 */
std::vector<Complex> project_drop(const PureState &state, std::size_t qubit, unsigned bit);

} // namespace bornbench
