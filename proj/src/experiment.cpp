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
#include "bornbench/experiment.hpp"

#include "bornbench/entanglement.hpp"
#include "bornbench/io.hpp"
#include "bornbench/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace bornbench {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Value parsing

std::uint64_t to_uint(const std::string &key, const std::string &v) {
    std::uint64_t x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw std::invalid_argument(key + ": expected a nonnegative integer, got '" + v + "'");
    }
    return x;
}

std::size_t to_size(const std::string &key, const std::string &v) { return static_cast<std::size_t>(to_uint(key, v)); }

double to_real(const std::string &key, const std::string &v) {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
        throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
    }
    return x;
}

bool to_bool(const std::string &key, const std::string &v) {
    if (v == "true" || v == "yes" || v == "1") {
        return true;
    }
    if (v == "false" || v == "no" || v == "0") {
        return false;
    }
    throw std::invalid_argument(key + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> to_list(const std::string &v) {
    std::vector<std::string> out;
    for (const auto item : split(v, ',')) {
        const auto t = trim(item);
        if (!t.empty()) {
            out.emplace_back(t);
        }
    }
    return out;
}

/// "1-6" or "1,2,4" style lists of sizes.
std::vector<std::size_t> to_size_list(const std::string &key, const std::string &v) {
    std::vector<std::size_t> out;
    for (const auto &item : to_list(v)) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(to_size(key, item));
            continue;
        }
        const auto lo = to_size(key, std::string{trim(item.substr(0, dash))});
        const auto hi = to_size(key, std::string{trim(item.substr(dash + 1))});
        if (hi < lo) {
            throw std::invalid_argument(key + ": empty range '" + item + "'");
        }
        for (std::size_t k = lo; k <= hi; ++k) {
            out.push_back(k);
        }
    }
    return out;
}

std::vector<double> to_real_list(const std::string &key, const std::string &v) {
    std::vector<double> out;
    for (const auto &item : to_list(v)) {
        out.push_back(to_real(key, item));
    }
    return out;
}

EvalMode to_mode(const std::string &key, const std::string &v) {
    if (v == "exact") {
        return EvalMode::Exact;
    }
    if (v == "sampled") {
        return EvalMode::Sampled;
    }
    throw std::invalid_argument(key + ": expected exact or sampled, got '" + v + "'");
}

OptimizerKind to_gradient_optimizer(const std::string &key, const std::string &v) {
    const auto kind = parse_optimizer_kind(v);
    if (kind == OptimizerKind::Genetic) {
        throw std::invalid_argument(key + ": use born.cost = genetic for the genetic optimizer");
    }
    return kind;
}

// ---------------------------------------------------------------------------
// Schema

struct Key {
    std::string name;
    std::string fallback;
    std::string help;
    std::function<void(ExperimentConfig &, const std::string &)> apply;
};

struct Pending {
    std::optional<std::size_t> rbm_hidden;
    std::optional<OptimizerKind> rbm_optimizer;
    std::optional<double> rbm_learning_rate;
    fs::path base_dir;
};

std::vector<Key> schema(Pending &pending) {
    const auto path = [&pending](const std::string &v) {
        const fs::path p{v};
        return (p.is_absolute() || pending.base_dir.empty() ? p : pending.base_dir / p).lexically_normal().string();
    };
    return {
        {"run_id", "run", "name of the run directory under out_dir",
         [](ExperimentConfig &c, const std::string &v) {
             if (v.empty() || v.find('/') != std::string::npos || v == "." || v == "..") {
                 throw std::invalid_argument("run_id must be a plain directory name");
             }
             c.run_id = v;
         }},
        {"out_dir", "runs", "parent directory for run outputs (relative to the config file)",
         [path](ExperimentConfig &c, const std::string &v) { c.out_dir = path(v); }},
        {"seed", "0", "root seed of every random stream in the run",
         [](ExperimentConfig &c, const std::string &v) { c.seed = to_uint("seed", v); }},

        {"data.source", "synthetic", "synthetic | csv | dataset",
         [](ExperimentConfig &c, const std::string &v) {
             if (v == "synthetic") {
                 c.data_source = DataSource::Synthetic;
             } else if (v == "csv") {
                 c.data_source = DataSource::Csv;
             } else if (v == "dataset") {
                 c.data_source = DataSource::Dataset;
             } else {
                 throw std::invalid_argument("data.source: expected synthetic, csv or dataset");
             }
         }},
        {"data.files", "", "comma-separated date,pair,price CSV files",
         [path](ExperimentConfig &c, const std::string &v) {
             c.data_files.clear();
             for (const auto &f : to_list(v)) {
                 c.data_files.push_back(path(f));
             }
         }},
        {"data.dataset", "", "dataset file written by ingest",
         [path](ExperimentConfig &c, const std::string &v) { c.dataset_path = path(v); }},
        {"data.pairs", "EURUSD, GBPUSD", "currency pairs in bit order (i = count)",
         [](ExperimentConfig &c, const std::string &v) { c.problem.pairs = to_list(v); }},
        {"data.bits_per_pair", "2", "precision j of each pair",
         [](ExperimentConfig &c, const std::string &v) { c.problem.bits_per_pair = to_size("data.bits_per_pair", v); }},
        {"data.binning", "quantile", "quantile | linear",
         [](ExperimentConfig &c, const std::string &v) { c.problem.binning = parse_binning(v); }},
        {"data.quantity", "log_returns", "log_returns | prices",
         [](ExperimentConfig &c, const std::string &v) { c.problem.quantity = parse_binned_quantity(v); }},
        {"data.clip_lower", "0.001", "lower clip quantile of the bin range",
         [](ExperimentConfig &c, const std::string &v) { c.problem.clip_lower = to_real("data.clip_lower", v); }},
        {"data.clip_upper", "0.999", "upper clip quantile of the bin range",
         [](ExperimentConfig &c, const std::string &v) { c.problem.clip_upper = to_real("data.clip_upper", v); }},
        {"data.synthetic_samples", "5070", "number of synthetic daily returns",
         [](ExperimentConfig &c, const std::string &v) {
             c.synthetic_samples = to_size("data.synthetic_samples", v);
         }},
        {"data.synthetic_correlation", "0.4", "pairwise correlation of the synthetic returns",
         [](ExperimentConfig &c, const std::string &v) {
             c.synthetic_correlation = to_real("data.synthetic_correlation", v);
         }},

        {"model", "born", "born | rbm | both",
         [](ExperimentConfig &c, const std::string &v) {
             if (v == "born") {
                 c.model = ModelChoice::Born;
             } else if (v == "rbm") {
                 c.model = ModelChoice::Rbm;
             } else if (v == "both") {
                 c.model = ModelChoice::Both;
             } else {
                 throw std::invalid_argument("model: expected born, rbm or both");
             }
         }},
        {"born.topology", "chain4", "chain4 | ring6 | ladder8 | lattice10 | lattice12 | custom",
         [](ExperimentConfig &c, const std::string &v) { c.topology = v; }},
        {"born.topology_file", "", "edge-list file for born.topology = custom",
         [path](ExperimentConfig &c, const std::string &v) { c.topology_file = path(v); }},
        {"born.layers", "2", "ansatz layers l (n * l parameters)",
         [](ExperimentConfig &c, const std::string &v) { c.layers = to_size("born.layers", v); }},
        {"born.cost", "sinkhorn", "sinkhorn | mmd | adversarial | genetic",
         [](ExperimentConfig &c, const std::string &v) { c.born.cost = parse_born_cost(v); }},

        {"optimizer.kind", "adam", "adam | vanilla",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.optimizer.kind = to_gradient_optimizer("optimizer.kind", v);
         }},
        {"optimizer.learning_rate", "", "step size; unset means 0.01 for adam, 0.05 for vanilla",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.optimizer.learning_rate = to_real("optimizer.learning_rate", v);
         }},
        {"optimizer.beta1", "0.9", "Adam first-moment decay",
         [](ExperimentConfig &c, const std::string &v) { c.born.optimizer.adam_beta1 = to_real("optimizer.beta1", v); }},
        {"optimizer.beta2", "0.999", "Adam second-moment decay",
         [](ExperimentConfig &c, const std::string &v) { c.born.optimizer.adam_beta2 = to_real("optimizer.beta2", v); }},
        {"optimizer.epsilon", "1e-8", "Adam denominator offset",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.optimizer.adam_epsilon = to_real("optimizer.epsilon", v);
         }},
        {"optimizer.epochs", "100", "training epochs",
         [](ExperimentConfig &c, const std::string &v) { c.born.optimizer.epochs = to_size("optimizer.epochs", v); }},
        {"optimizer.mode", "exact", "exact | sampled cost and gradient evaluation",
         [](ExperimentConfig &c, const std::string &v) { c.born.optimizer.mode = to_mode("optimizer.mode", v); }},
        {"optimizer.model_shots", "500", "model samples per epoch in sampled mode (N)",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.optimizer.model_shots = to_size("optimizer.model_shots", v);
         }},
        {"optimizer.data_shots", "500", "data samples per epoch in sampled mode (M)",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.optimizer.data_shots = to_size("optimizer.data_shots", v);
         }},
        {"eval.every", "5", "discriminator evaluation cadence in epochs (0 disables)",
         [](ExperimentConfig &c, const std::string &v) { c.born.optimizer.eval_every = to_size("eval.every", v); }},
        {"eval.samples", "2000", "model and data samples per discriminator evaluation",
         [](ExperimentConfig &c, const std::string &v) { c.born.optimizer.eval_samples = to_size("eval.samples", v); }},
        {"snapshot.every", "5", "parameter snapshot cadence in epochs (0 disables)",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.optimizer.snapshot_every = to_size("snapshot.every", v);
         }},

        {"sinkhorn.epsilon", "1", "entropic regularization",
         [](ExperimentConfig &c, const std::string &v) { c.born.sinkhorn.epsilon = to_real("sinkhorn.epsilon", v); }},
        {"sinkhorn.max_iterations", "1000", "Sinkhorn iteration cap",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.sinkhorn.max_iterations = to_size("sinkhorn.max_iterations", v);
         }},
        {"sinkhorn.tolerance", "1e-9", "potential change tolerance",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.sinkhorn.convergence_tol = to_real("sinkhorn.tolerance", v);
         }},
        {"mmd.bandwidths", "0.25, 10, 1000", "Gaussian mixture kernel bandwidths",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.kernel.bandwidths = to_real_list("mmd.bandwidths", v);
         }},
        {"genetic.population", "20", "population size",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.genetic.population_size = to_size("genetic.population", v);
         }},
        {"genetic.elite", "2", "members copied unchanged each generation",
         [](ExperimentConfig &c, const std::string &v) { c.born.genetic.elite_count = to_size("genetic.elite", v); }},
        {"genetic.mutation_stddev", "0.1", "Gaussian mutation scale",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.genetic.mutation_stddev = to_real("genetic.mutation_stddev", v);
         }},
        {"genetic.tournament", "3", "tournament size",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.genetic.tournament_size = to_size("genetic.tournament", v);
         }},

        {"forest.estimators", "1000", "trees per discriminator forest",
         [](ExperimentConfig &c, const std::string &v) { c.born.forest.n_estimators = to_size("forest.estimators", v); }},
        {"forest.max_depth", "", "tree depth limit; unset grows full trees",
         [](ExperimentConfig &c, const std::string &v) { c.born.forest.max_depth = to_size("forest.max_depth", v); }},
        {"forest.bootstrap_fraction", "1", "bootstrap draws per tree as a fraction of the rows",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.forest.bootstrap_fraction = to_real("forest.bootstrap_fraction", v);
         }},
        {"forest.features_per_split", "0", "candidate features per split; 0 means sqrt(width)",
         [](ExperimentConfig &c, const std::string &v) {
             c.born.forest.features_per_split = to_size("forest.features_per_split", v);
         }},

        {"rbm.hidden", "", "hidden units; unset means n (l - 1), the matched budget",
         [&pending](ExperimentConfig &, const std::string &v) { pending.rbm_hidden = to_size("rbm.hidden", v); }},
        {"rbm.beta", "1", "inverse temperature",
         [](ExperimentConfig &c, const std::string &v) { c.rbm_beta = to_real("rbm.beta", v); }},
        {"rbm.train_weights", "false", "also train the couplings",
         [](ExperimentConfig &c, const std::string &v) {
             c.rbm_trainable =
                 to_bool("rbm.train_weights", v) ? TrainableMask::BiasesAndWeights : TrainableMask::BiasesOnly;
         }},
        {"rbm.init_weight_range", "1", "couplings start U[-r, r]",
         [](ExperimentConfig &c, const std::string &v) {
             c.rbm_init.weight_range = to_real("rbm.init_weight_range", v);
         }},
        {"rbm.init_visible_bias", "-3", "initial visible bias",
         [](ExperimentConfig &c, const std::string &v) {
             c.rbm_init.visible_bias = to_real("rbm.init_visible_bias", v);
         }},
        {"rbm.init_hidden_bias", "0", "initial hidden bias",
         [](ExperimentConfig &c, const std::string &v) {
             c.rbm_init.hidden_bias = to_real("rbm.init_hidden_bias", v);
         }},
        {"rbm.sampler", "exact", "exact | gibbs | annealed",
         [](ExperimentConfig &c, const std::string &v) { c.rbm.sampler = parse_rbm_sampler(v); }},
        {"rbm.chains", "10", "Markov chains for sampled moments",
         [](ExperimentConfig &c, const std::string &v) { c.rbm.n_chains = to_size("rbm.chains", v); }},
        {"rbm.burn_in", "100", "Gibbs burn-in sweeps per chain",
         [](ExperimentConfig &c, const std::string &v) { c.rbm.burn_in = to_size("rbm.burn_in", v); }},
        {"rbm.schedule", "", "annealing betas; unset means 0.2, 0.4, 0.6, 0.8 times rbm.beta",
         [](ExperimentConfig &c, const std::string &v) { c.rbm.annealing_schedule = to_real_list("rbm.schedule", v); }},
        {"rbm.optimizer", "", "adam | vanilla; unset follows optimizer.kind",
         [&pending](ExperimentConfig &, const std::string &v) {
             pending.rbm_optimizer = to_gradient_optimizer("rbm.optimizer", v);
         }},
        {"rbm.learning_rate", "", "RBM step size; unset follows optimizer.learning_rate",
         [&pending](ExperimentConfig &, const std::string &v) {
             pending.rbm_learning_rate = to_real("rbm.learning_rate", v);
         }},

        {"entanglement.enabled", "true", "write entanglement reports for Born runs",
         [](ExperimentConfig &c, const std::string &v) { c.entanglement_enabled = to_bool("entanglement.enabled", v); }},
        {"entanglement.instances", "100", "random parameter instances per report",
         [](ExperimentConfig &c, const std::string &v) {
             c.entanglement_instances = to_size("entanglement.instances", v);
         }},
        {"entanglement.layers", "1-6", "layer counts swept by the entanglement command",
         [](ExperimentConfig &c, const std::string &v) {
             c.entanglement_layers = to_size_list("entanglement.layers", v);
         }},
        {"qq.quantiles", "100", "probability levels per QQ file",
         [](ExperimentConfig &c, const std::string &v) { c.qq_quantiles = to_size("qq.quantiles", v); }},
        {"qq.stage", "final", "initial | final model used by the qq command",
         [](ExperimentConfig &c, const std::string &v) {
             if (v != "initial" && v != "final") {
                 throw std::invalid_argument("qq.stage: expected initial or final");
             }
             c.qq_stage = v;
         }},
        {"benchmark.runs", "5", "independent seeds trained by the benchmark command",
         [](ExperimentConfig &c, const std::string &v) { c.benchmark_runs = to_size("benchmark.runs", v); }},
        {"report.runs", "", "run directories aggregated by the report command",
         [path](ExperimentConfig &c, const std::string &v) {
             c.report_runs.clear();
             for (const auto &d : to_list(v)) {
                 c.report_runs.push_back(path(d));
             }
         }},
    };
}

void finalize(ExperimentConfig &c, const Pending &pending) {
    c.problem.validate();
    const std::size_t width = c.problem.width();
    const bool wants_born = c.model != ModelChoice::Rbm;
    const bool wants_rbm = c.model != ModelChoice::Born;
    if (c.layers == 0) {
        throw std::invalid_argument("born.layers must be at least 1");
    }
    if (c.data_source == DataSource::Csv && c.data_files.empty()) {
        throw std::invalid_argument("data.source = csv needs data.files");
    }
    if (c.data_source == DataSource::Dataset && c.dataset_path.empty()) {
        throw std::invalid_argument("data.source = dataset needs data.dataset");
    }
    if (c.born.cost == BornCost::Genetic && !wants_born) {
        throw std::invalid_argument("born.cost = genetic needs a Born machine");
    }
    if (wants_born) {
        const auto layout = c.born_layout();
        if (layout.n_qubits() != width) {
            throw std::invalid_argument("topology has " + std::to_string(layout.n_qubits()) +
                                        " qubits but the problem needs " + std::to_string(width));
        }
        if (width > kMaxSimulatedQubits) {
            throw std::length_error("problem width " + std::to_string(width) + " exceeds the simulator ceiling of " +
                                    std::to_string(kMaxSimulatedQubits) + " qubits");
        }
    }
    c.rbm_hidden = pending.rbm_hidden.value_or(width * (c.layers - 1));
    c.rbm.optimizer = c.born.optimizer;
    if (pending.rbm_optimizer) {
        c.rbm.optimizer.kind = *pending.rbm_optimizer;
    }
    if (pending.rbm_learning_rate) {
        c.rbm.optimizer.learning_rate = *pending.rbm_learning_rate;
    }
    c.rbm.forest = c.born.forest;
    if (wants_rbm) {
        RbmModel probe{width, c.rbm_hidden};
        probe.beta = c.rbm_beta;
        probe.validate();
    }
    if (c.model == ModelChoice::Both) {
        const std::size_t born_params = width * c.layers;
        if (c.rbm_trainable != TrainableMask::BiasesOnly || width + c.rbm_hidden != born_params) {
            throw std::invalid_argument("model = both needs equal trainable budgets: the Born machine has " +
                                        std::to_string(born_params) + " parameters, the RBM " +
                                        std::to_string(width + c.rbm_hidden) +
                                        " biases (set rbm.hidden = n (l - 1) and rbm.train_weights = false)");
        }
    }
    c.born.optimizer.validate();
    c.rbm.optimizer.validate();
    c.born.sinkhorn.validate();
    c.born.kernel.validate();
    c.born.forest.validate();
    if (c.born.cost == BornCost::Genetic) {
        c.born.genetic.validate();
    }
    if (c.entanglement_instances == 0) {
        throw std::invalid_argument("entanglement.instances must be positive");
    }
    if (c.qq_quantiles == 0) {
        throw std::invalid_argument("qq.quantiles must be positive");
    }
}

// ---------------------------------------------------------------------------
// Files

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

std::string read_text(const fs::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class Writer>
void write_with(const fs::path &path, Writer &&writer) {
    std::ostringstream ss;
    writer(ss);
    write_text(path, ss.str());
}

void prepare_dir(const fs::path &dir, bool force) {
    if (fs::exists(dir) && !fs::is_empty(dir)) {
        if (!force) {
            throw RunExists("output " + dir.string() + " already exists; pass --force to overwrite");
        }
        fs::remove_all(dir);
    }
    fs::create_directories(dir);
}

std::string file_label(const std::string &name) {
    std::string out = name;
    for (auto &ch : out) {
        if (!std::isalnum(static_cast<unsigned char>(ch))) {
            ch = '_';
        }
    }
    return out;
}

std::string problem_label(const ProblemSpec &spec) {
    return std::to_string(spec.pairs.size()) + "x" + std::to_string(spec.bits_per_pair);
}

void write_qq_files(const fs::path &dir, const std::string &stage, const BinnedDataset &data,
                    const std::vector<double> &model_dense, std::size_t quantiles) {
    const auto joint = EmpiricalDistribution::from_dense(model_dense, data.width());
    const std::size_t n_pairs = data.spec.pairs.size();
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const auto points =
            qq_data(marginal_distribution(data, p), marginal_distribution(joint, p, n_pairs), quantiles);
        write_with(dir / ("qq_" + file_label(data.spec.pairs[p]) + "_" + stage + ".csv"),
                   [&](std::ostream &o) { write_qq_csv(o, points); });
    }
}

void write_run_info(const fs::path &dir, const ExperimentConfig &cfg, const TrainingTrace &trace) {
    nlohmann::json info = {{"model", trace.model},
                           {"cost", trace.cost},
                           {"problem", problem_label(cfg.problem)},
                           {"pairs", cfg.problem.pairs},
                           {"bits_per_pair", cfg.problem.bits_per_pair},
                           {"seed", cfg.seed},
                           {"trainable_parameters", trace.trainable_parameters},
                           {"epochs", trace.records.size()}};
    if (!trace.records.empty()) {
        const auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
        info["initial_cost"] = num(trace.records.front().cost);
        info["last_cost"] = num(trace.records.back().cost);
    }
    write_text(dir / "run_info.json", info.dump(2) + "\n");
}

void write_trace_files(const fs::path &dir, const TrainingTrace &trace) {
    write_with(dir / "trace.ndjson", [&](std::ostream &o) { write_trace_ndjson(o, trace); });
    write_with(dir / "metrics.csv", [&](std::ostream &o) { write_metrics_csv(o, trace); });
}

void train_born_into(const fs::path &dir, const ExperimentConfig &cfg, const BinnedDataset &data) {
    const auto layout = cfg.born_layout();
    Rng init{derive_seed(cfg.seed, "born-init")};
    BornMachine machine{layout, random_parameters(layout, init)};
    const BornMachine initial = machine;
    auto bcfg = cfg.born;
    bcfg.optimizer.seed = derive_seed(cfg.seed, "born-train");
    const auto trace = train_born(machine, data.samples(), bcfg);

    write_trace_files(dir, trace);
    write_text(dir / "model_initial.json", born_model_json(initial));
    write_text(dir / "model.json", born_model_json(machine));
    write_qq_files(dir, "initial", data, born_exact_distribution(initial), cfg.qq_quantiles);
    write_qq_files(dir, "final", data, born_exact_distribution(machine), cfg.qq_quantiles);
    write_run_info(dir, cfg, trace);

    if (cfg.entanglement_enabled) {
        Rng rng{derive_seed(cfg.seed, "entanglement")};
        const auto report = ent_average(layout, cfg.entanglement_instances, rng);
        write_with(dir / "entanglement.csv", [&](std::ostream &o) { write_entanglement_csv(o, report); });
        write_text(dir / "entanglement.json", entanglement_summary_json(report) + "\n");
        std::ostringstream q;
        q << "epoch,Q\n";
        for (const auto &r : trace.records) {
            if (!r.params.empty()) {
                q << r.epoch << ',' << format_double(q_purity(prepare_state(layout, ParameterVector{r.params})))
                  << '\n';
            }
        }
        q << trace.records.size() << ',' << format_double(q_purity(prepare_state(layout, machine.params))) << '\n';
        write_text(dir / "entanglement_trace.csv", q.str());
    }
    std::cerr << "born: " << trace.records.size() << " epochs";
    if (!trace.records.empty()) {
        std::cerr << ", cost " << trace.records.front().cost << " -> " << trace.records.back().cost;
    }
    std::cerr << '\n';
}

RbmModel initial_rbm(const ExperimentConfig &cfg) {
    Rng init{derive_seed(cfg.seed, "rbm-init")};
    auto model = random_rbm(cfg.problem.width(), cfg.rbm_hidden, init, cfg.rbm_init, cfg.rbm_trainable);
    model.beta = cfg.rbm_beta;
    return model;
}

void train_rbm_into(const fs::path &dir, const ExperimentConfig &cfg, const BinnedDataset &data) {
    RbmModel model = initial_rbm(cfg);
    const RbmModel initial = model;
    auto rcfg = cfg.rbm;
    rcfg.optimizer.seed = derive_seed(cfg.seed, "rbm-train");
    const auto trace = train_rbm(model, data.samples(), rcfg);

    write_trace_files(dir, trace);
    write_text(dir / "model_initial.json", rbm_model_json(initial));
    write_text(dir / "model.json", rbm_model_json(model));
    if (model.n_visible <= kMaxRbmVisible) {
        write_qq_files(dir, "initial", data, exact_visible_distribution(initial), cfg.qq_quantiles);
        write_qq_files(dir, "final", data, exact_visible_distribution(model), cfg.qq_quantiles);
    }
    write_run_info(dir, cfg, trace);
    std::cerr << "rbm: " << trace.records.size() << " epochs";
    if (!trace.records.empty()) {
        std::cerr << ", cost " << trace.records.front().cost << " -> " << trace.records.back().cost;
    }
    std::cerr << '\n';
}

void train_into(const fs::path &dir, const ExperimentConfig &cfg) {
    const auto data = load_data(cfg);
    write_with(dir / "dataset.txt", [&](std::ostream &o) { write_dataset(o, data); });
    switch (cfg.model) {
    case ModelChoice::Born:
        train_born_into(dir, cfg, data);
        break;
    case ModelChoice::Rbm:
        train_rbm_into(dir, cfg, data);
        break;
    case ModelChoice::Both:
        fs::create_directories(dir / "born");
        fs::create_directories(dir / "rbm");
        train_born_into(dir / "born", cfg, data);
        train_rbm_into(dir / "rbm", cfg, data);
        break;
    }
}

std::vector<fs::path> find_files(const fs::path &root, const std::string &name) {
    std::vector<fs::path> out;
    if (!fs::exists(root)) {
        throw std::runtime_error("report input " + root.string() + " does not exist");
    }
    if (fs::is_regular_file(root / name)) {
        out.push_back(root / name);
    }
    for (const auto &entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && entry.path().filename() == name && entry.path().parent_path() != root) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string report_csv(const std::vector<fs::path> &roots) {
    using GroupKey = std::tuple<std::string, std::string, std::string>;
    std::map<GroupKey, std::vector<TrainingTrace>> groups;
    for (const auto &root : roots) {
        for (const auto &trace_path : find_files(root, "trace.ndjson")) {
            std::ifstream in{trace_path};
            auto trace = read_trace_ndjson(in);
            std::string problem = "unknown";
            const auto info_path = trace_path.parent_path() / "run_info.json";
            if (fs::exists(info_path)) {
                problem = nlohmann::json::parse(read_text(info_path)).at("problem").get<std::string>();
            }
            groups[{trace.model, trace.cost, problem}].push_back(std::move(trace));
        }
    }
    if (groups.empty()) {
        throw std::runtime_error("no trace.ndjson files found under the report inputs");
    }
    std::ostringstream out;
    out << "model,cost,problem,epoch,runs,mean_error,std_error,mean_cost,std_cost\n";
    for (const auto &[key, traces] : groups) {
        std::size_t epochs = 0;
        for (const auto &t : traces) {
            epochs = std::max(epochs, t.records.size());
        }
        for (std::size_t e = 0; e < epochs; ++e) {
            std::vector<double> errors;
            std::vector<double> costs;
            for (const auto &t : traces) {
                if (e >= t.records.size()) {
                    continue;
                }
                costs.push_back(t.records[e].cost);
                if (t.records[e].discriminator_error) {
                    errors.push_back(*t.records[e].discriminator_error);
                }
            }
            out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ',' << e << ','
                << costs.size() << ',';
            if (!errors.empty()) {
                const auto [m, s] = mean_and_stddev(errors);
                out << format_double(m) << ',' << format_double(s);
            } else {
                out << ',';
            }
            const auto [mc, sc] = mean_and_stddev(costs);
            out << ',' << format_double(mc) << ',' << format_double(sc) << '\n';
        }
    }
    return out.str();
}

} // namespace

AnsatzLayout ExperimentConfig::born_layout() const {
    if (topology == "custom") {
        if (topology_file.empty()) {
            throw std::invalid_argument("born.topology = custom needs born.topology_file");
        }
        return {parse_edge_list(read_text(topology_file), 0, fs::path{topology_file}.stem().string()), layers};
    }
    return {builtin_topology(topology), layers};
}

ExperimentConfig parse_config(const std::string &text, const fs::path &base_dir) {
    ExperimentConfig cfg;
    Pending pending;
    pending.base_dir = base_dir;
    const auto keys = schema(pending);
    std::map<std::string, const Key *> by_name;
    for (const auto &k : keys) {
        by_name.emplace(k.name, &k);
    }
    std::set<std::string> seen;
    std::istringstream in{text};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const auto line = trim(std::string_view{raw}.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        const auto it = by_name.find(key);
        if (it == by_name.end()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
        }
        try {
            it->second->apply(cfg, value);
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    finalize(cfg, pending);
    return cfg;
}

ExperimentConfig load_config(const fs::path &path) {
    return parse_config(read_text(path), path.parent_path());
}

std::string config_reference() {
    Pending pending;
    std::ostringstream out;
    for (const auto &k : schema(pending)) {
        out << k.name << " = " << (k.fallback.empty() ? "(unset)" : k.fallback) << "\n    " << k.help << '\n';
    }
    return out.str();
}

BinnedDataset load_data(const ExperimentConfig &cfg) {
    switch (cfg.data_source) {
    case DataSource::Synthetic: {
        Rng rng{derive_seed(cfg.seed, "synthetic-data")};
        return synthetic_fx_generator(cfg.problem, cfg.synthetic_samples,
                                      equicorrelation(cfg.problem.pairs.size(), cfg.synthetic_correlation), rng);
    }
    case DataSource::Csv: {
        auto ds = build_dataset(load_price_files(cfg.data_files), cfg.problem);
        for (const auto &f : cfg.data_files) {
            ds.provenance.files.push_back(fs::path{f}.filename().string());
        }
        return ds;
    }
    case DataSource::Dataset: {
        std::ifstream in{cfg.dataset_path};
        if (!in) {
            throw std::runtime_error("cannot open dataset " + cfg.dataset_path);
        }
        auto ds = read_dataset(in);
        if (!(ds.spec == cfg.problem)) {
            throw std::invalid_argument("dataset " + cfg.dataset_path + " was built for a different problem spec");
        }
        return ds;
    }
    }
    throw std::logic_error("unreachable data source");
}

fs::path run_ingest(const ExperimentConfig &cfg, const RunOptions &opts) {
    const auto data = load_data(cfg);
    const auto dir = cfg.run_dir();
    prepare_dir(dir, opts.force);
    if (!opts.config_text.empty()) {
        write_text(dir / "config.txt", opts.config_text);
    }
    write_with(dir / "dataset.txt", [&](std::ostream &o) { write_dataset(o, data); });
    for (std::size_t p = 0; p < data.spec.pairs.size(); ++p) {
        write_with(dir / ("marginal_" + file_label(data.spec.pairs[p]) + ".csv"),
                   [&](std::ostream &o) { write_marginal_csv(o, marginal_distribution(data, p)); });
    }
    std::cerr << "ingest: " << data.rows.size() << " samples of " << data.width() << " bits\n";
    return dir;
}

fs::path run_train(const ExperimentConfig &cfg, const RunOptions &opts) {
    const auto dir = cfg.run_dir();
    prepare_dir(dir, opts.force);
    if (!opts.config_text.empty()) {
        write_text(dir / "config.txt", opts.config_text);
    }
    train_into(dir, cfg);
    return dir;
}

fs::path run_benchmark(const ExperimentConfig &cfg, const RunOptions &opts) {
    if (cfg.benchmark_runs == 0) {
        throw std::invalid_argument("benchmark.runs must be positive");
    }
    const auto dir = cfg.run_dir();
    prepare_dir(dir, opts.force);
    if (!opts.config_text.empty()) {
        write_text(dir / "config.txt", opts.config_text);
    }
    for (std::size_t r = 0; r < cfg.benchmark_runs; ++r) {
        ExperimentConfig run = cfg;
        run.seed = cfg.seed + r;
        const auto sub = dir / ("seed_" + std::to_string(run.seed));
        fs::create_directories(sub);
        std::cerr << "benchmark: seed " << run.seed << '\n';
        train_into(sub, run);
    }
    write_text(dir / "report.csv", report_csv({dir}));
    return dir;
}

fs::path run_entanglement(const ExperimentConfig &cfg, const RunOptions &opts) {
    if (cfg.entanglement_layers.empty()) {
        throw std::invalid_argument("entanglement.layers is empty");
    }
    std::vector<EntanglementReport> reports;
    for (const std::size_t l : cfg.entanglement_layers) {
        ExperimentConfig at = cfg;
        at.layers = l;
        Rng rng{derive_seed(cfg.seed, "entanglement", l)};
        reports.push_back(ent_average(at.born_layout(), cfg.entanglement_instances, rng));
    }
    const auto dir = cfg.run_dir();
    prepare_dir(dir, opts.force);
    if (!opts.config_text.empty()) {
        write_text(dir / "config.txt", opts.config_text);
    }
    write_with(dir / "entanglement.csv", [&](std::ostream &o) { write_entanglement_sweep_csv(o, reports); });
    nlohmann::json summary = nlohmann::json::array();
    for (const auto &r : reports) {
        write_with(dir / ("entanglement_l" + std::to_string(r.layers) + ".csv"),
                   [&](std::ostream &o) { write_entanglement_csv(o, r); });
        summary.push_back(nlohmann::json::parse(entanglement_summary_json(r)));
    }
    write_text(dir / "entanglement.json", summary.dump(2) + "\n");
    return dir;
}

fs::path run_qq(const ExperimentConfig &cfg, const RunOptions &opts) {
    const auto dir = cfg.run_dir();
    std::vector<fs::path> model_dirs;
    for (const auto &d : {dir, dir / "born", dir / "rbm"}) {
        if (fs::is_regular_file(d / "model.json")) {
            model_dirs.push_back(d);
        }
    }
    if (model_dirs.empty()) {
        throw std::runtime_error("no trained model under " + dir.string() + "; run train first");
    }
    const auto data = load_data(cfg);
    const std::string file = cfg.qq_stage == "initial" ? "model_initial.json" : "model.json";
    for (const auto &d : model_dirs) {
        for (const auto &pair : data.spec.pairs) {
            const auto out = d / ("qq_" + file_label(pair) + "_" + cfg.qq_stage + ".csv");
            if (fs::exists(out) && !opts.force) {
                throw RunExists("output " + out.string() + " already exists; pass --force to overwrite");
            }
        }
        const auto stored = parse_model_json(read_text(d / file));
        std::vector<double> dense;
        if (const auto *born = std::get_if<BornMachine>(&stored)) {
            if (born->n_qubits() != data.width()) {
                throw std::invalid_argument("stored model does not match the problem width");
            }
            dense = born_exact_distribution(*born);
        } else {
            const auto &rbm = std::get<RbmModel>(stored);
            if (rbm.n_visible != data.width()) {
                throw std::invalid_argument("stored model does not match the problem width");
            }
            dense = exact_visible_distribution(rbm);
        }
        write_qq_files(d, cfg.qq_stage, data, dense, cfg.qq_quantiles);
    }
    return dir;
}

fs::path run_report(const ExperimentConfig &cfg, const RunOptions &opts) {
    if (cfg.report_runs.empty()) {
        throw std::invalid_argument("report needs report.runs");
    }
    std::vector<fs::path> roots(cfg.report_runs.begin(), cfg.report_runs.end());
    const auto csv = report_csv(roots);
    const auto dir = cfg.run_dir();
    prepare_dir(dir, opts.force);
    if (!opts.config_text.empty()) {
        write_text(dir / "config.txt", opts.config_text);
    }
    write_text(dir / "report.csv", csv);
    return dir;
}

} // namespace bornbench
