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
#include "bornbench/discriminator.hpp"

#include "bornbench/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace bornbench {

namespace {

/// Distinct (code, label) rows with per-tree bootstrap weights.
struct RowTable {
    std::vector<Code> codes;
    std::vector<Origin> labels;
};

class TreeBuilder {
  public:
    TreeBuilder(const RowTable &rows, const std::vector<double> &weights, std::size_t width,
                std::size_t mtry, std::optional<std::size_t> max_depth, Rng rng)
        : rows_{rows}, weights_{weights}, width_{width}, mtry_{mtry}, max_depth_{max_depth}, rng_{rng} {}

    DecisionTree build() {
        std::vector<std::size_t> ids;
        for (std::size_t k = 0; k < weights_.size(); ++k) {
            if (weights_[k] > 0.0) {
                ids.push_back(k);
            }
        }
        grow(std::move(ids), 0);
        return std::move(tree_);
    }

  private:
    int grow(std::vector<std::size_t> ids, std::size_t depth) {
        const int index = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        double w_model = 0.0;
        double w_data = 0.0;
        Code any = 0;
        Code all = width_mask(width_);
        for (const auto id : ids) {
            (rows_.labels[id] == Origin::Data ? w_data : w_model) += weights_[id];
            any |= rows_.codes[id];
            all &= rows_.codes[id];
        }
        {
            auto &node = tree_.nodes[static_cast<std::size_t>(index)];
            node.weight_model = w_model;
            node.weight_data = w_data;
            const double total = w_model + w_data;
            node.data_fraction = total > 0.0 ? w_data / total : 0.5;
        }
        const Code varying = any & ~all;
        if (w_model == 0.0 || w_data == 0.0 || varying == 0 || (max_depth_ && depth >= *max_depth_)) {
            return index;
        }

        std::vector<std::size_t> candidates;
        for (std::size_t f = 0; f < width_; ++f) {
            if (bit_at(varying, width_, f) != 0U) {
                candidates.push_back(f);
            }
        }
        const std::size_t draws = std::min(mtry_, candidates.size());
        for (std::size_t k = 0; k < draws; ++k) {
            const auto pick = k + static_cast<std::size_t>(rng_.uniform_index(candidates.size() - k));
            std::swap(candidates[k], candidates[pick]);
        }

        std::size_t best_feature = candidates[0];
        double best_impurity = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < draws; ++k) {
            const std::size_t f = candidates[k];
            double side[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
            for (const auto id : ids) {
                side[bit_at(rows_.codes[id], width_, f)][static_cast<int>(rows_.labels[id])] += weights_[id];
            }
            double impurity = 0.0;
            for (const auto &s : side) {
                const double n = s[0] + s[1];
                if (n > 0.0) {
                    impurity += n - (s[0] * s[0] + s[1] * s[1]) / n;
                }
            }
            if (impurity < best_impurity) {
                best_impurity = impurity;
                best_feature = f;
            }
        }

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (const auto id : ids) {
            (bit_at(rows_.codes[id], width_, best_feature) != 0U ? right : left).push_back(id);
        }
        ids.clear();
        ids.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto &node = tree_.nodes[static_cast<std::size_t>(index)];
        node.feature = static_cast<int>(best_feature);
        node.left = l;
        node.right = r;
        return index;
    }

    const RowTable &rows_;
    const std::vector<double> &weights_;
    std::size_t width_;
    std::size_t mtry_;
    std::optional<std::size_t> max_depth_;
    Rng rng_;
    DecisionTree tree_;
};

double tree_output(const DecisionTree &tree, Code x, std::size_t width) {
    std::size_t at = 0;
    while (tree.nodes[at].feature >= 0) {
        const auto &node = tree.nodes[at];
        at = static_cast<std::size_t>(bit_at(x, width, static_cast<std::size_t>(node.feature)) != 0U ? node.right
                                                                                                      : node.left);
    }
    return tree.nodes[at].data_fraction;
}

/// Shuffled codes of one class, split into (train, test).
std::pair<std::vector<Code>, std::vector<Code>> split_class(const SampleSet &samples, double test_fraction,
                                                            Rng rng) {
    auto codes = samples.expand();
    for (std::size_t k = codes.size(); k > 1; --k) {
        std::swap(codes[k - 1], codes[static_cast<std::size_t>(rng.uniform_index(k))]);
    }
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(codes.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, codes.size() - 1);
    std::vector<Code> test(codes.begin(), codes.begin() + static_cast<std::ptrdiff_t>(n_test));
    codes.erase(codes.begin(), codes.begin() + static_cast<std::ptrdiff_t>(n_test));
    return {std::move(codes), std::move(test)};
}

} // namespace

void LabeledDataset::add(Code code, Origin label, std::uint64_t count) {
    for (std::uint64_t k = 0; k < count; ++k) {
        features.push_back(code);
        labels.push_back(label);
    }
}

void LabeledDataset::validate() const {
    if (width == 0 || width > kMaxBitWidth) {
        throw std::invalid_argument("feature width must be in 1..64");
    }
    if (features.size() != labels.size()) {
        throw std::invalid_argument("feature and label counts differ");
    }
    for (const Code c : features) {
        if ((c & ~width_mask(width)) != 0) {
            throw std::invalid_argument("feature code wider than the dataset width");
        }
    }
}

void ForestConfig::validate() const {
    if (n_estimators == 0) {
        throw std::invalid_argument("forest needs at least one estimator");
    }
    if (!(bootstrap_fraction > 0.0) || !std::isfinite(bootstrap_fraction)) {
        throw std::invalid_argument("bootstrap fraction must be positive");
    }
}

Forest::Forest(std::size_t width, std::vector<DecisionTree> trees) : width_{width}, trees_{std::move(trees)} {
    if (trees_.empty()) {
        throw std::invalid_argument("forest has no trees");
    }
    for (const auto &t : trees_) {
        for (const auto &node : t.nodes) {
            if (node.feature >= static_cast<int>(width_)) {
                throw std::invalid_argument("tree node splits on a feature outside the width");
            }
        }
    }
}

double Forest::predict_proba(Code x) const {
    if ((x & ~width_mask(width_)) != 0) {
        throw std::invalid_argument("sample is wider than the forest features");
    }
    double sum = 0.0;
    for (const auto &t : trees_) {
        sum += tree_output(t, x, width_);
    }
    return sum / static_cast<double>(trees_.size());
}

double Forest::predict_proba(std::string_view bits) const {
    if (bits.size() != width_) {
        throw std::invalid_argument("sample length " + std::to_string(bits.size()) + " does not match forest width " +
                                    std::to_string(width_));
    }
    return predict_proba(parse_bitstring(bits));
}

Origin Forest::predict(Code x) const { return predict_proba(x) > 0.5 ? Origin::Data : Origin::Model; }

Forest fit(const LabeledDataset &dataset, const ForestConfig &cfg) {
    dataset.validate();
    cfg.validate();
    const bool has_model = std::find(dataset.labels.begin(), dataset.labels.end(), Origin::Model) != dataset.labels.end();
    const bool has_data = std::find(dataset.labels.begin(), dataset.labels.end(), Origin::Data) != dataset.labels.end();
    if (!has_model || !has_data) {
        throw std::invalid_argument("discriminator training needs samples of both classes");
    }

    // Aggregate identical rows; bootstrap draws then index into `row_of`.
    RowTable rows;
    std::map<std::pair<Code, Origin>, std::size_t> ids;
    std::vector<std::size_t> row_of;
    row_of.reserve(dataset.features.size());
    for (std::size_t k = 0; k < dataset.features.size(); ++k) {
        const auto key = std::make_pair(dataset.features[k], dataset.labels[k]);
        auto [it, inserted] = ids.try_emplace(key, rows.codes.size());
        if (inserted) {
            rows.codes.push_back(key.first);
            rows.labels.push_back(key.second);
        }
        row_of.push_back(it->second);
    }

    const std::size_t n = row_of.size();
    const auto draws = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg.bootstrap_fraction * static_cast<double>(n))));
    const std::size_t mtry =
        cfg.features_per_split > 0
            ? cfg.features_per_split
            : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(dataset.width))));

    std::vector<DecisionTree> trees;
    trees.reserve(cfg.n_estimators);
    std::vector<double> weights(rows.codes.size());
    for (std::size_t t = 0; t < cfg.n_estimators; ++t) {
        Rng rng{derive_seed(cfg.seed, "tree", t)};
        std::fill(weights.begin(), weights.end(), 0.0);
        for (std::size_t s = 0; s < draws; ++s) {
            weights[row_of[static_cast<std::size_t>(rng.uniform_index(n))]] += 1.0;
        }
        trees.push_back(TreeBuilder{rows, weights, dataset.width, mtry, cfg.max_depth, rng}.build());
    }
    return Forest{dataset.width, std::move(trees)};
}

double discriminator_error(const SampleSet &model_samples, const SampleSet &data_samples, const ForestConfig &cfg,
                           std::uint64_t split_seed, const SplitConfig &split) {
    if (model_samples.total() < 2 || data_samples.total() < 2) {
        throw std::invalid_argument("discriminator error needs at least two samples per class");
    }
    if (model_samples.width() != data_samples.width()) {
        throw std::invalid_argument("model and data samples have different lengths");
    }
    if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0)) {
        throw std::invalid_argument("test fraction must lie strictly between 0 and 1");
    }
    const auto [model_train, model_test] =
        split_class(model_samples, split.test_fraction, Rng{derive_seed(split_seed, "split-model", 0)});
    const auto [data_train, data_test] =
        split_class(data_samples, split.test_fraction, Rng{derive_seed(split_seed, "split-data", 0)});

    LabeledDataset train{model_samples.width(), {}, {}};
    for (const Code c : model_train) {
        train.add(c, Origin::Model);
    }
    for (const Code c : data_train) {
        train.add(c, Origin::Data);
    }
    const auto forest = fit(train, cfg);

    // Predictions depend only on the code, so evaluate each distinct code once.
    std::map<Code, Origin> cache;
    const auto predict = [&](Code c) {
        auto it = cache.find(c);
        if (it == cache.end()) {
            it = cache.emplace(c, forest.predict(c)).first;
        }
        return it->second;
    };
    std::size_t wrong = 0;
    for (const Code c : model_test) {
        wrong += predict(c) != Origin::Model ? 1 : 0;
    }
    for (const Code c : data_test) {
        wrong += predict(c) != Origin::Data ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(model_test.size() + data_test.size());
}

} // namespace bornbench
