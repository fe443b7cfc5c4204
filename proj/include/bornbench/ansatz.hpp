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
 * Hardware-efficient layered ansatz: RY layer, then (CZ block, RY layer)
 * repeated, with the CZ block fixed by a lattice topology.
 *
 * Built-in topologies (qubit indices 0-based):
 *
 *   chain4     0-1-2-3
 *   ring6      cycle 0-1-2-3-4-5-0
 *   ladder8    rails 0-1-2-3 and 4-5-6-7, rungs (i, i+4)
 *   lattice10  2x5 grid, row-major (rows 0..4 and 5..9)
 *   lattice12  3x4 grid, row-major (rows 0..3, 4..7, 8..11)
 */
#pragma once

#include "bornbench/random.hpp"
#include "bornbench/statevector.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bornbench {

using Edge = std::pair<std::size_t, std::size_t>;

/**
 * @brief Qubit count plus the CZ edges applied in every entangling block.
 *
 * Edges are stored normalized (first < second) and sorted; construction
 * rejects self-loops, out-of-range indices and duplicates.
 */
class LatticeTopology {
  public:
    LatticeTopology(std::size_t n_qubits, std::vector<Edge> edges, std::string name = "custom");

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] const std::vector<Edge> &edges() const noexcept { return edges_; }
    [[nodiscard]] const std::string &name() const noexcept { return name_; }

    friend bool operator==(const LatticeTopology &, const LatticeTopology &) = default;

  private:
    std::size_t n_qubits_;
    std::vector<Edge> edges_;
    std::string name_;
};

/// One of chain4, ring6, ladder8, lattice10, lattice12.
LatticeTopology builtin_topology(std::string_view name);

std::vector<std::string> builtin_topology_names();

/**
 * @brief Parse an edge-list text: one "i j" pair per line, '#' comments.
 *
 * `n_qubits = 0` infers the count as the largest index + 1.
 */
LatticeTopology parse_edge_list(std::string_view text, std::size_t n_qubits = 0,
                                std::string name = "custom");

std::string format_edge_list(const LatticeTopology &topology);

class AnsatzLayout {
  public:
    AnsatzLayout(LatticeTopology topology, std::size_t layers);

    [[nodiscard]] const LatticeTopology &topology() const noexcept { return topology_; }
    [[nodiscard]] std::size_t n_qubits() const noexcept { return topology_.n_qubits(); }
    [[nodiscard]] std::size_t layers() const noexcept { return layers_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return topology_.n_qubits() * layers_;
    }

    friend bool operator==(const AnsatzLayout &, const AnsatzLayout &) = default;

  private:
    LatticeTopology topology_;
    std::size_t layers_;
};

/// RY angles in radians, flattened layer-major: index = layer * n + qubit.
struct ParameterVector {
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    double &operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }

    friend bool operator==(const ParameterVector &, const ParameterVector &) = default;
};

/// Independent U[0, 2pi) draws, one per parameter.
ParameterVector random_parameters(const AnsatzLayout &layout, Rng &rng);

ParameterVector zero_parameters(const AnsatzLayout &layout);

/**
 * @brief Gate sequence for `layout` bound to `params`.
 *
 * [RY(theta_{0,q}) for all q], then for each later layer: [CZ(e) for e in
 * sorted edges], [RY(theta_{layer,q}) for all q].
 * Throws std::invalid_argument on a length mismatch.
 */
std::vector<Gate> build_circuit(const AnsatzLayout &layout, const ParameterVector &params);

/// Circuit applied to |0...0>.
PureState prepare_state(const AnsatzLayout &layout, const ParameterVector &params);

/// Copy with `values[index] += shift`. Throws std::out_of_range.
ParameterVector shifted_params(const ParameterVector &params, std::size_t index, double shift);

} // namespace bornbench
