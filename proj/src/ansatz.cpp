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
#include "bornbench/ansatz.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bornbench {

namespace {

std::vector<Edge> grid_edges(std::size_t rows, std::size_t cols) {
    std::vector<Edge> edges;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t q = r * cols + c;
            if (c + 1 < cols) {
                edges.emplace_back(q, q + 1);
            }
            if (r + 1 < rows) {
                edges.emplace_back(q, q + cols);
            }
        }
    }
    return edges;
}

} // namespace

LatticeTopology::LatticeTopology(std::size_t n_qubits, std::vector<Edge> edges, std::string name)
    : n_qubits_{n_qubits}, edges_{std::move(edges)}, name_{std::move(name)} {
    if (n_qubits == 0 || n_qubits > kMaxSimulatedQubits) {
        throw std::length_error("topology qubit count must be in 1..24");
    }
    for (auto &[a, b] : edges_) {
        if (a == b) {
            throw std::invalid_argument("topology edge joins a qubit to itself");
        }
        if (a >= n_qubits || b >= n_qubits) {
            throw std::out_of_range("topology edge references a qubit outside the register");
        }
        if (a > b) {
            std::swap(a, b);
        }
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw std::invalid_argument("topology contains a duplicate edge");
    }
}

LatticeTopology builtin_topology(std::string_view name) {
    if (name == "chain4") {
        return {4, {{0, 1}, {1, 2}, {2, 3}}, "chain4"};
    }
    if (name == "ring6") {
        return {6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}, "ring6"};
    }
    if (name == "ladder8") {
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < 3; ++i) {
            edges.emplace_back(i, i + 1);
            edges.emplace_back(i + 4, i + 5);
        }
        for (std::size_t i = 0; i < 4; ++i) {
            edges.emplace_back(i, i + 4);
        }
        return {8, std::move(edges), "ladder8"};
    }
    if (name == "lattice10") {
        return {10, grid_edges(2, 5), "lattice10"};
    }
    if (name == "lattice12") {
        return {12, grid_edges(3, 4), "lattice12"};
    }
    throw std::invalid_argument("unknown topology '" + std::string{name} + "'");
}

std::vector<std::string> builtin_topology_names() {
    return {"chain4", "ring6", "ladder8", "lattice10", "lattice12"};
}

LatticeTopology parse_edge_list(std::string_view text, std::size_t n_qubits, std::string name) {
    std::vector<Edge> edges;
    std::size_t max_index = 0;
    std::istringstream in{std::string{text}};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields{line};
        long long a = 0;
        long long b = 0;
        if (!(fields >> a)) {
            continue;
        }
        std::string rest;
        if (!(fields >> b) || (fields >> rest) || a < 0 || b < 0) {
            throw std::invalid_argument("edge list line " + std::to_string(line_no) +
                                        ": expected two nonnegative indices");
        }
        edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        max_index = std::max({max_index, static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
    }
    if (n_qubits == 0) {
        if (edges.empty()) {
            throw std::invalid_argument("cannot infer qubit count from an empty edge list");
        }
        n_qubits = max_index + 1;
    }
    return {n_qubits, std::move(edges), std::move(name)};
}

std::string format_edge_list(const LatticeTopology &topology) {
    std::ostringstream out;
    out << "# " << topology.name() << ", " << topology.n_qubits() << " qubits\n";
    for (const auto &[a, b] : topology.edges()) {
        out << a << ' ' << b << '\n';
    }
    return out.str();
}

AnsatzLayout::AnsatzLayout(LatticeTopology topology, std::size_t layers)
    : topology_{std::move(topology)}, layers_{layers} {
    if (layers == 0) {
        throw std::invalid_argument("ansatz needs at least one layer");
    }
}

ParameterVector random_parameters(const AnsatzLayout &layout, Rng &rng) {
    ParameterVector p;
    p.values.resize(layout.parameter_count());
    for (auto &v : p.values) {
        v = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    return p;
}

ParameterVector zero_parameters(const AnsatzLayout &layout) {
    return ParameterVector{std::vector<double>(layout.parameter_count(), 0.0)};
}

std::vector<Gate> build_circuit(const AnsatzLayout &layout, const ParameterVector &params) {
    const std::size_t n = layout.n_qubits();
    if (params.size() != layout.parameter_count()) {
        throw std::invalid_argument("parameter vector has length " + std::to_string(params.size()) +
                                    ", layout expects " +
                                    std::to_string(layout.parameter_count()));
    }
    const auto &edges = layout.topology().edges();
    std::vector<Gate> gates;
    gates.reserve(layout.parameter_count() + (layout.layers() - 1) * edges.size());
    for (std::size_t layer = 0; layer < layout.layers(); ++layer) {
        if (layer > 0) {
            for (const auto &[a, b] : edges) {
                gates.push_back(Gate::cz(a, b));
            }
        }
        for (std::size_t q = 0; q < n; ++q) {
            gates.push_back(Gate::ry(q, params[layer * n + q]));
        }
    }
    return gates;
}

PureState prepare_state(const AnsatzLayout &layout, const ParameterVector &params) {
    PureState state{layout.n_qubits()};
    const auto circuit = build_circuit(layout, params);
    state.apply(circuit);
    return state;
}

ParameterVector shifted_params(const ParameterVector &params, std::size_t index, double shift) {
    if (index >= params.size()) {
        throw std::out_of_range("parameter index out of range");
    }
    ParameterVector out = params;
    out[index] += shift;
    return out;
}

} // namespace bornbench
