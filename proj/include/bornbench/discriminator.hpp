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
 * Random-forest classifier separating model samples from data samples.
 *
 * Trees split on single bits by Gini impurity, grow to full depth unless
 * bounded, and are fitted on bootstrap resamples. The forest output is the
 * mean over trees of the leaf frequency of the data class.
 */
#pragma once

#include "bornbench/samples.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace bornbench {

enum class Origin : std::uint8_t { Model = 0, Data = 1 };

struct LabeledDataset {
    std::size_t width{0};
    std::vector<Code> features;
    std::vector<Origin> labels;

    void add(Code code, Origin label, std::uint64_t count = 1);
    /// Throws std::invalid_argument on length mismatch or codes wider than `width`.
    void validate() const;
};

struct ForestConfig {
    std::size_t n_estimators{1000};
    std::optional<std::size_t> max_depth;
    double bootstrap_fraction{1.0};
    /// Candidate features per split; 0 selects floor(sqrt(width)), at least 1.
    std::size_t features_per_split{0};
    std::uint64_t seed{0};

    void validate() const;
};

struct TreeNode {
    int feature{-1};  // -1 marks a leaf
    int left{-1};     // bit value 0
    int right{-1};    // bit value 1
    double data_fraction{0.0};
    double weight_model{0.0};
    double weight_data{0.0};

    friend bool operator==(const TreeNode &, const TreeNode &) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    friend bool operator==(const DecisionTree &, const DecisionTree &) = default;
};

class Forest {
  public:
    Forest(std::size_t width, std::vector<DecisionTree> trees);

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] const std::vector<DecisionTree> &trees() const noexcept { return trees_; }

    /// Fraction of data-class votes, soft-averaged over trees.
    [[nodiscard]] double predict_proba(Code x) const;
    /// Same for a '0'/'1' string; throws std::invalid_argument on length mismatch.
    [[nodiscard]] double predict_proba(std::string_view bits) const;
    /// Data when predict_proba(x) > 0.5, otherwise model.
    [[nodiscard]] Origin predict(Code x) const;

    friend bool operator==(const Forest &, const Forest &) = default;

  private:
    std::size_t width_;
    std::vector<DecisionTree> trees_;
};

/// Throws std::invalid_argument when one class is absent.
Forest fit(const LabeledDataset &dataset, const ForestConfig &cfg);

struct SplitConfig {
    double test_fraction{0.25};
};

/**
 * @brief Held-out misclassification rate of a fresh forest.
 *
 * Each class is shuffled (from `split_seed`) and split separately so the
 * test set keeps the class ratio.
 */
double discriminator_error(const SampleSet &model_samples, const SampleSet &data_samples,
                           const ForestConfig &cfg, std::uint64_t split_seed,
                           const SplitConfig &split = {});

} // namespace bornbench
