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
 * Experiment configuration and the end-to-end run pipelines behind the
 * command line tool.
 *
 * All randomness in a run flows from `seed` through derive_seed with the
 * labels "synthetic-data", "born-init", "rbm-init", "born-train",
 * "rbm-train" and "entanglement".
 */
#pragma once

#include "bornbench/ansatz.hpp"
#include "bornbench/data.hpp"
#include "bornbench/entanglement.hpp"
#include "bornbench/rbm.hpp"
#include "bornbench/trainers.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bornbench {

enum class ModelChoice { Born, Rbm, Both };
enum class DataSource { Synthetic, Csv, Dataset };

struct ExperimentConfig {
    std::string run_id{"run"};
    std::filesystem::path out_dir{"runs"};
    std::uint64_t seed{0};

    DataSource data_source{DataSource::Synthetic};
    std::vector<std::string> data_files;
    std::string dataset_path;
    ProblemSpec problem{{"EURUSD", "GBPUSD"}, 2};
    std::size_t synthetic_samples{kDefaultSyntheticSamples};
    double synthetic_correlation{0.4};

    ModelChoice model{ModelChoice::Born};
    std::string topology{"chain4"};  // builtin name, or "custom" with topology_file
    std::string topology_file;
    std::size_t layers{2};
    BornTrainingConfig born;

    std::size_t rbm_hidden{0};  // resolved at load: n (layers - 1) unless given
    double rbm_beta{1.0};
    TrainableMask rbm_trainable{TrainableMask::BiasesOnly};
    RbmInit rbm_init;
    RbmTrainingConfig rbm;

    bool entanglement_enabled{true};
    std::size_t entanglement_instances{kDefaultEntanglementInstances};
    std::vector<std::size_t> entanglement_layers{1, 2, 3, 4, 5, 6};

    std::size_t qq_quantiles{100};
    std::string qq_stage{"final"};
    std::size_t benchmark_runs{5};
    std::vector<std::string> report_runs;

    [[nodiscard]] std::filesystem::path run_dir() const { return out_dir / run_id; }
    [[nodiscard]] AnsatzLayout born_layout() const;
};

/**
 * @brief Parses `key = value` lines; '#' starts a comment.
 *
 * Unknown or repeated keys and malformed values throw std::invalid_argument,
 * as does a model = both configuration whose RBM bias count differs from
 * the Born parameter count.
 */
ExperimentConfig parse_config(const std::string &text, const std::filesystem::path &base_dir = {});
ExperimentConfig load_config(const std::filesystem::path &path);

/// Every recognized key with its meaning, for --help output and the README.
std::string config_reference();

/// Thrown when a run's output already exists and --force was not given.
class RunExists : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

BinnedDataset load_data(const ExperimentConfig &cfg);

struct RunOptions {
    bool force{false};
    std::string config_text;  // copied into the run directory when set
};

/// Writes dataset.txt and marginal_<pair>.csv; returns the run directory.
std::filesystem::path run_ingest(const ExperimentConfig &cfg, const RunOptions &opts);

/**
 * @brief Trains the configured model(s) and writes every artifact.
 *
 * Per model: trace.ndjson, metrics.csv, model.json, model_initial.json,
 * qq_<pair>_initial.csv, qq_<pair>_final.csv, run_info.json and, for Born
 * machines with entanglement enabled, entanglement.csv, entanglement.json
 * and entanglement_trace.csv. With model = both these go to born/ and rbm/.
 */
std::filesystem::path run_train(const ExperimentConfig &cfg, const RunOptions &opts);

/// benchmark_runs trainings with seeds seed, seed + 1, ... plus report.csv.
std::filesystem::path run_benchmark(const ExperimentConfig &cfg, const RunOptions &opts);

/// entanglement.csv (layers,mean_q,std_q) over entanglement_layers plus
/// per-layer instance files.
std::filesystem::path run_entanglement(const ExperimentConfig &cfg, const RunOptions &opts);

/// QQ files for the stored model(s) of an existing run, for qq_stage.
std::filesystem::path run_qq(const ExperimentConfig &cfg, const RunOptions &opts);

/**
 * @brief Mean and std bands per (model, cost, problem, epoch) over every
 * trace found under the report_runs directories; writes report.csv.
 */
std::filesystem::path run_report(const ExperimentConfig &cfg, const RunOptions &opts);

} // namespace bornbench
