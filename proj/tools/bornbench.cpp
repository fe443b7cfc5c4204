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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace bornbench;
namespace fs = std::filesystem;

struct Common {
    std::string config;
    bool force{false};
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_common(CLI::App &sub, Common &c) {
    sub.add_option("--config", c.config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub.add_flag("--force", c.force, "overwrite existing outputs");
    sub.add_option("--seed", c.seed, "override the root seed");
    sub.add_option("--out", c.out, "override the output parent directory");
}

int run(const std::string &name, const Common &c) {
    std::ifstream in{c.config, std::ios::binary};
    std::ostringstream text;
    text << in.rdbuf();
    auto cfg = parse_config(text.str(), fs::path{c.config}.parent_path());
    if (c.seed) {
        cfg.seed = *c.seed;
    }
    if (c.out) {
        cfg.out_dir = *c.out;
    }
    const RunOptions opts{c.force, text.str()};
    fs::path dir;
    if (name == "ingest") {
        dir = run_ingest(cfg, opts);
    } else if (name == "train") {
        dir = run_train(cfg, opts);
    } else if (name == "benchmark") {
        dir = run_benchmark(cfg, opts);
    } else if (name == "entanglement") {
        dir = run_entanglement(cfg, opts);
    } else if (name == "qq") {
        dir = run_qq(cfg, opts);
    } else {
        dir = run_report(cfg, opts);
    }
    std::cout << dir.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Benchmark quantum circuit Born machines against restricted Boltzmann machines"};
    app.require_subcommand(0, 1);
    bool keys = false;
    app.add_flag("--list-config-keys", keys, "print every config key with its default and exit");

    const std::vector<std::pair<std::string, std::string>> commands{
        {"ingest", "build the binned dataset and its marginals"},
        {"train", "train the configured model(s) and write all artifacts"},
        {"benchmark", "train over benchmark.runs seeds and aggregate them"},
        {"entanglement", "sweep the ansatz entangling capability over layer counts"},
        {"qq", "write QQ files for a trained run"},
        {"report", "aggregate run directories into per-epoch bands"},
    };
    std::vector<Common> options(commands.size());
    std::vector<CLI::App *> subs;
    for (std::size_t k = 0; k < commands.size(); ++k) {
        auto *sub = app.add_subcommand(commands[k].first, commands[k].second);
        add_common(*sub, options[k]);
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);
    if (keys) {
        std::cout << config_reference();
        return 0;
    }
    for (std::size_t k = 0; k < subs.size(); ++k) {
        if (!subs[k]->parsed()) {
            continue;
        }
        try {
            return run(commands[k].first, options[k]);
        } catch (const RunExists &e) {
            std::cerr << "bornbench: " << e.what() << '\n';
            return 3;
        } catch (const std::exception &e) {
            std::cerr << "bornbench " << commands[k].first << ": " << e.what() << '\n';
            return 2;
        }
    }
    std::cerr << app.help();
    return 1;
}
