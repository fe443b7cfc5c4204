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
#include "bornbench/io.hpp"

#include "bornbench/text.hpp"

#include <json.hpp>

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bornbench {

namespace {

using nlohmann::json;

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_or_nan(const json &j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::vector<double> to_vector(const Eigen::VectorXd &v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double> &v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

std::string born_model_json(const BornMachine &machine) {
    const auto &topo = machine.layout.topology();
    json edges = json::array();
    for (const auto &[a, b] : topo.edges()) {
        edges.push_back({a, b});
    }
    const json j = {{"model", "born"},
                    {"topology", topo.name()},
                    {"n_qubits", topo.n_qubits()},
                    {"edges", edges},
                    {"layers", machine.layout.layers()},
                    {"params", machine.params.values}};
    return j.dump(2) + "\n";
}

std::string rbm_model_json(const RbmModel &model) {
    json weights = json::array();
    for (Eigen::Index i = 0; i < model.weights.rows(); ++i) {
        weights.push_back(to_vector(model.weights.row(i).transpose()));
    }
    const json j = {{"model", "rbm"},
                    {"n_visible", model.n_visible},
                    {"n_hidden", model.n_hidden},
                    {"beta", model.beta},
                    {"trainable", model.trainable == TrainableMask::BiasesOnly ? "biases" : "biases_and_weights"},
                    {"visible_bias", to_vector(model.visible_bias)},
                    {"hidden_bias", to_vector(model.hidden_bias)},
                    {"weights", weights}};
    return j.dump(2) + "\n";
}

StoredModel parse_model_json(const std::string &text) {
    try {
        const auto j = json::parse(text);
        const auto kind = j.at("model").get<std::string>();
        if (kind == "born") {
            std::vector<Edge> edges;
            for (const auto &e : j.at("edges")) {
                edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
            }
            LatticeTopology topo{j.at("n_qubits").get<std::size_t>(), std::move(edges),
                                 j.at("topology").get<std::string>()};
            AnsatzLayout layout{std::move(topo), j.at("layers").get<std::size_t>()};
            ParameterVector params{j.at("params").get<std::vector<double>>()};
            if (params.size() != layout.parameter_count()) {
                throw std::invalid_argument("stored Born parameters do not match the layout");
            }
            return BornMachine{std::move(layout), std::move(params)};
        }
        if (kind == "rbm") {
            RbmModel m{j.at("n_visible").get<std::size_t>(), j.at("n_hidden").get<std::size_t>()};
            m.beta = j.at("beta").get<double>();
            const auto mask = j.at("trainable").get<std::string>();
            if (mask != "biases" && mask != "biases_and_weights") {
                throw std::invalid_argument("unknown RBM trainable mask '" + mask + "'");
            }
            m.trainable = mask == "biases" ? TrainableMask::BiasesOnly : TrainableMask::BiasesAndWeights;
            const auto vb = j.at("visible_bias").get<std::vector<double>>();
            const auto hb = j.at("hidden_bias").get<std::vector<double>>();
            const auto w = j.at("weights").get<std::vector<std::vector<double>>>();
            if (vb.size() != m.n_visible || hb.size() != m.n_hidden || w.size() != m.n_visible) {
                throw std::invalid_argument("stored RBM arrays do not match its dimensions");
            }
            m.visible_bias = to_eigen(vb);
            m.hidden_bias = to_eigen(hb);
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (w[i].size() != m.n_hidden) {
                    throw std::invalid_argument("stored RBM weight row has the wrong length");
                }
                for (std::size_t k = 0; k < m.n_hidden; ++k) {
                    m.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = w[i][k];
                }
            }
            m.validate();
            return m;
        }
        throw std::invalid_argument("unknown model kind '" + kind + "'");
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string{"bad model file: "} + e.what());
    }
}

void write_trace_ndjson(std::ostream &out, const TrainingTrace &trace) {
    const json header = {{"type", "header"},
                         {"model", trace.model},
                         {"cost", trace.cost},
                         {"trainable_parameters", trace.trainable_parameters},
                         {"root_seed", trace.root_seed},
                         {"epochs", trace.records.size()}};
    out << header.dump() << '\n';
    for (const auto &r : trace.records) {
        json j = {{"type", "epoch"},
                  {"epoch", r.epoch},
                  {"cost", number_or_null(r.cost)},
                  {"discriminator_error", r.discriminator_error ? json(*r.discriminator_error) : json(nullptr)},
                  {"converged", r.converged},
                  {"seed", r.seed}};
        if (!r.params.empty()) {
            j["params"] = r.params;
        }
        out << j.dump() << '\n';
    }
}

TrainingTrace read_trace_ndjson(std::istream &in) {
    TrainingTrace trace;
    std::string line;
    bool have_header = false;
    try {
        while (std::getline(in, line)) {
            if (trim(line).empty()) {
                continue;
            }
            const auto j = json::parse(line);
            const auto type = j.at("type").get<std::string>();
            if (type == "header") {
                trace.model = j.at("model").get<std::string>();
                trace.cost = j.at("cost").get<std::string>();
                trace.trainable_parameters = j.at("trainable_parameters").get<std::size_t>();
                trace.root_seed = j.at("root_seed").get<std::uint64_t>();
                have_header = true;
                continue;
            }
            if (!have_header || type != "epoch") {
                throw std::invalid_argument("trace records must follow a header");
            }
            EpochRecord r;
            r.epoch = j.at("epoch").get<std::size_t>();
            r.cost = number_or_nan(j.at("cost"));
            if (!j.at("discriminator_error").is_null()) {
                r.discriminator_error = j.at("discriminator_error").get<double>();
            }
            r.converged = j.at("converged").get<bool>();
            r.seed = j.at("seed").get<std::uint64_t>();
            if (j.contains("params")) {
                r.params = j.at("params").get<std::vector<double>>();
            }
            trace.records.push_back(std::move(r));
        }
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string{"bad trace file: "} + e.what());
    }
    if (!have_header) {
        throw std::invalid_argument("trace file has no header");
    }
    return trace;
}

void write_metrics_csv(std::ostream &out, const TrainingTrace &trace) {
    out << "epoch,cost,discriminator_error\n";
    for (const auto &r : trace.records) {
        out << r.epoch << ',' << format_double(r.cost) << ',';
        if (r.discriminator_error) {
            out << format_double(*r.discriminator_error);
        }
        out << '\n';
    }
}

} // namespace bornbench
