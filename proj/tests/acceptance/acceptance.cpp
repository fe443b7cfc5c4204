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
 * Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
 * failure. Run with a criterion number (or several) to select a subset.
 */
#include "oracles.hpp"
#include "ot_oracle.hpp"
#include "rbm_oracle.hpp"

#include "bornbench/born.hpp"
#include "bornbench/discriminator.hpp"
#include "bornbench/divergence.hpp"
#include "bornbench/entanglement.hpp"
#include "bornbench/experiment.hpp"
#include "bornbench/io.hpp"
#include "bornbench/rbm.hpp"
#include "bornbench/trainers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace bornbench;

namespace {

struct Outcome {
    bool pass{true};
    std::string detail;
};

/// Records a failed check and keeps the first few messages.
class Checker {
  public:
    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass_ = false;
            if (++failures_ <= 3) {
                notes_ << (failures_ > 1 ? "; " : "") << what;
            }
        }
    }
    void note(const std::string &text) { extra_ << (extra_.tellp() > 0 ? ", " : "") << text; }

    [[nodiscard]] Outcome outcome() const {
        std::string d = extra_.str();
        if (!pass_) {
            d += (d.empty() ? "" : "; ") + std::to_string(failures_) + " failed: " + notes_.str();
        }
        return {pass_, d};
    }

  private:
    bool pass_{true};
    int failures_{0};
    std::ostringstream notes_;
    std::ostringstream extra_;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

EmpiricalDistribution dense(const std::vector<double> &p, std::size_t width) {
    return EmpiricalDistribution::from_dense(p, width);
}

/// Strictly positive random distribution over `points` distinct codes.
EmpiricalDistribution random_distribution(std::size_t width, std::size_t points, Rng &rng) {
    std::set<Code> codes;
    while (codes.size() < points) {
        codes.insert(rng.uniform_index(std::uint64_t{1} << width));
    }
    std::vector<double> w(points);
    double total = 0.0;
    for (auto &x : w) {
        x = rng.uniform(0.05, 1.0);
        total += x;
    }
    for (auto &x : w) {
        x /= total;
    }
    return {width, {codes.begin(), codes.end()}, w};
}

EmpiricalDistribution fixed_target() {
    std::vector<double> w(16);
    double total = 0.0;
    for (Code x = 0; x < 16; ++x) {
        w[x] = 1.0 + static_cast<double>((x * 7) % 5);
        total += w[x];
    }
    for (auto &x : w) {
        x /= total;
    }
    return dense(w, 4);
}

RbmModel random_model(std::size_t nv, std::size_t nh, Rng &rng) {
    RbmModel m{nv, nh};
    for (auto &w : m.weights.reshaped()) {
        w = rng.uniform(-1.0, 1.0);
    }
    for (auto &b : m.visible_bias) {
        b = rng.uniform(-1.0, 1.0);
    }
    for (auto &b : m.hidden_bias) {
        b = rng.uniform(-1.0, 1.0);
    }
    return m;
}

// ---------------------------------------------------------------------------

Outcome simulator_oracle() {
    Checker c;
    Rng rng{101};
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(4);
        const auto gates = oracle::random_circuit(n, 10 + rng.uniform_index(30), rng);
        const auto u = oracle::circuit_unitary(gates, n);
        // Evolve a random input as well as |0...0>.
        const auto amps = oracle::random_amplitudes(n, rng);
        PureState random_in = PureState::from_amplitudes(amps);
        PureState zero = zero_state(n);
        random_in.apply(gates);
        zero.apply(gates);
        oracle::Vector v(static_cast<Eigen::Index>(amps.size()));
        for (std::size_t k = 0; k < amps.size(); ++k) {
            v(static_cast<Eigen::Index>(k)) = amps[k];
        }
        const oracle::Vector expected_random = u * v;
        const oracle::Vector expected_zero = u * oracle::basis_vector(n, 0);
        double err = 0.0;
        for (std::size_t k = 0; k < amps.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            err = std::max({err, std::abs(random_in.amplitude(k) - expected_random(i)),
                            std::abs(zero.amplitude(k) - expected_zero(i))});
        }
        worst = std::max(worst, err);
        c.require(err <= 1e-12, "trial " + std::to_string(trial) + " error " + num(err));
    }
    c.note("max entry error " + num(worst));
    return c.outcome();
}

Outcome born_normalization() {
    Checker c;
    Rng rng{202};
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(12);
        std::vector<Edge> edges;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (rng.bernoulli(0.3)) {
                    edges.emplace_back(a, b);
                }
            }
        }
        const AnsatzLayout layout{LatticeTopology{n, edges}, 1 + rng.uniform_index(6)};
        const BornMachine m{layout, random_parameters(layout, rng)};
        const auto p = born_exact_distribution(m);
        double total = 0.0;
        for (const double x : p) {
            total += x;
        }
        worst = std::max(worst, std::abs(total - 1.0));
        c.require(std::abs(total - 1.0) <= 1e-12, "n=" + std::to_string(n) + " sum off by " + num(total - 1.0));
    }
    c.note("max |sum - 1| " + num(worst));
    return c.outcome();
}

Outcome gradient_correctness() {
    Checker c;
    const auto target = fixed_target();
    const AnsatzLayout layout{builtin_topology("chain4"), 2};
    // A tight solve keeps the finite differences free of solver noise.
    SinkhornConfig sinkhorn;
    sinkhorn.convergence_tol = 1e-13;
    sinkhorn.max_iterations = 20000;
    const KernelConfig kernel;
    ForestConfig forest;
    const double h = 1e-4;
    // Absolute floor for coordinates that vanish; far below the gradient scale.
    const double floor = 1e-6;
    const auto p_of = [&](const BornMachine &m) { return dense(born_exact_distribution(m), 4); };

    Rng rng{303};
    double worst[3] = {0.0, 0.0, 0.0};
    const auto compare = [&](int which, const std::string &name, const std::vector<double> &grad,
                             const std::function<double(const BornMachine &)> &cost, const BornMachine &m) {
        for (std::size_t k = 0; k < grad.size(); ++k) {
            const double fd = (cost({m.layout, shifted_params(m.params, k, h)}) -
                               cost({m.layout, shifted_params(m.params, k, -h)})) /
                              (2 * h);
            const double err = oracle::rel_error(grad[k], fd, floor);
            worst[which] = std::max(worst[which], err);
            c.require(err < 1e-3, name + " coordinate " + std::to_string(k) + " rel error " + num(err));
        }
    };

    for (int point = 0; point < 20; ++point) {
        const BornMachine m{layout, random_parameters(layout, rng)};
        const auto p = p_of(m);

        const auto shd = sinkhorn_grad_functional(p, target, sinkhorn);
        c.require(shd.converged, "sinkhorn solve did not converge");
        compare(0, "sinkhorn", born_gradient(m, shd.phi, {}),
                [&](const BornMachine &x) { return sinkhorn_divergence(p_of(x), target, sinkhorn).value; }, m);

        compare(1, "mmd", born_gradient(m, mmd_grad_functional(target, p, kernel), {}),
                [&](const BornMachine &x) { return mmd(p_of(x), target, kernel); }, m);

        // Generator cost E_p[1 - D] with the forest fitted at this point and then frozen.
        Rng draws{derive_seed(303, "adversarial", static_cast<std::uint64_t>(point))};
        const auto model_samples = sample_from_probabilities(p.to_dense(), 4, 2000, draws);
        const auto data_samples = draw(target, 2000, draws);
        LabeledDataset labeled{4, {}, {}};
        for (const auto &[code, count] : model_samples.counts()) {
            labeled.add(code, Origin::Model, count);
        }
        for (const auto &[code, count] : data_samples.counts()) {
            labeled.add(code, Origin::Data, count);
        }
        forest.seed = derive_seed(303, "adversary-forest", static_cast<std::uint64_t>(point));
        const auto phi = adversarial_generator_phi(fit(labeled, forest));
        compare(2, "adversarial", born_gradient(m, phi, {}),
                [&](const BornMachine &x) { return expectation(born_exact_distribution(x), phi); }, m);
    }
    c.note("max rel error sinkhorn " + num(worst[0]) + ", mmd " + num(worst[1]) + ", adversarial " +
           num(worst[2]));
    return c.outcome();
}

Outcome sinkhorn_oracle() {
    Checker c;
    Rng rng{404};
    double worst_ot = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_distribution(3, 4, rng);
        const auto q = random_distribution(3, 4, rng);
        const auto ref = oracle::entropic_ot_primal(p.weights(), q.weights(), hamming_cost_matrix(p, q), 1.0);
        const double value = entropic_ot(p, q).transport_value;
        worst_ot = std::max(worst_ot, std::abs(value - ref.value));
        c.require(std::abs(value - ref.value) <= 1e-4, "OT value off by " + num(value - ref.value));
    }
    double worst_self = 0.0;
    double worst_sym = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t width = 2 + rng.uniform_index(5);
        const std::size_t cap = std::size_t{1} << width;
        const auto p = random_distribution(width, 1 + rng.uniform_index(cap), rng);
        const auto q = random_distribution(width, 1 + rng.uniform_index(cap), rng);
        const double self = std::abs(sinkhorn_divergence(p, p).value);
        const double sym = std::abs(sinkhorn_divergence(p, q).value - sinkhorn_divergence(q, p).value);
        worst_self = std::max(worst_self, self);
        worst_sym = std::max(worst_sym, sym);
        c.require(self < 1e-8, "SHD(p,p) = " + num(self));
        c.require(sym < 1e-8, "asymmetry " + num(sym));
    }
    c.note("OT error " + num(worst_ot) + ", SHD(p,p) " + num(worst_self) + ", asymmetry " + num(worst_sym));
    return c.outcome();
}

Outcome mmd_properties() {
    Checker c;
    const KernelConfig defaults;
    c.require(defaults.bandwidths == std::vector<double>{0.25, 10.0, 1000.0}, "default bandwidths changed");
    Rng rng{505};
    double lowest = 1.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t width = 1 + rng.uniform_index(8);
        const std::size_t cap = std::min<std::size_t>(std::size_t{1} << width, 40);
        const auto p = random_distribution(width, 1 + rng.uniform_index(cap), rng);
        const auto q = random_distribution(width, 1 + rng.uniform_index(cap), rng);
        const double self = mmd(p, p);
        c.require(self == 0.0, "MMD(p,p) = " + num(self));
        const double cross = mmd(p, q);
        lowest = std::min(lowest, cross);
        c.require(cross >= 0.0, "MMD(p,q) = " + num(cross));
    }
    c.note("min MMD(p,q) " + num(lowest));
    return c.outcome();
}

Outcome rbm_oracle() {
    Checker c;
    Rng rng{606};
    double worst_p = 0.0;
    double worst_g = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t nv = 1 + rng.uniform_index(8);
        const std::size_t nh = rng.uniform_index(12 - nv + 1);
        auto m = random_model(nv, nh, rng);
        m.beta = rng.uniform(0.5, 2.0);
        const auto p = exact_visible_distribution(m);
        const auto ref = oracle::rbm_visible_distribution(m);
        for (std::size_t k = 0; k < p.size(); ++k) {
            worst_p = std::max(worst_p, std::abs(p[k] - ref[k]));
        }
        c.require(worst_p <= 1e-12, "distribution mismatch " + num(worst_p));

        m.trainable = trial % 2 == 0 ? TrainableMask::BiasesAndWeights : TrainableMask::BiasesOnly;
        std::vector<double> w(p.size());
        double total = 0.0;
        for (auto &x : w) {
            x = rng.uniform(0.1, 1.0);
            total += x;
        }
        for (auto &x : w) {
            x /= total;
        }
        const auto data = dense(w, nv);
        const auto grad = loglik_gradient(m, data, dense(ref, nv));
        const auto theta = trainable_parameters(m);
        // Five-point central stencil: truncation and rounding both near 1e-12.
        const double h = 1e-3;
        const auto at = [&](std::size_t k, double shift) {
            auto moved = m;
            auto t = theta;
            t[k] += shift;
            set_trainable_parameters(moved, t);
            return oracle::rbm_log_likelihood(moved, data);
        };
        for (std::size_t k = 0; k < theta.size(); ++k) {
            const double fd = (8 * (at(k, h) - at(k, -h)) - (at(k, 2 * h) - at(k, -2 * h))) / (12 * h);
            const double err = oracle::rel_error(grad[k], fd, 1e-8);
            worst_g = std::max(worst_g, err);
            c.require(err < 1e-6, "gradient coordinate rel error " + num(err));
        }
    }
    c.note("max |p - p_ref| " + num(worst_p) + ", max gradient rel error " + num(worst_g));
    return c.outcome();
}

Outcome sampler_fidelity() {
    Checker c;
    Rng rng{707};
    double worst_gibbs = 0.0;
    double worst_anneal = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = random_model(4, 4, rng);
        const auto exact = exact_visible_distribution(m);
        Rng g{derive_seed(707, "gibbs", static_cast<std::uint64_t>(trial))};
        const auto gibbs = gibbs_sample(m, GibbsConfig{1000, 100, 500}, g);
        Rng a{derive_seed(707, "annealed", static_cast<std::uint64_t>(trial))};
        const std::vector<double> schedule{0.2, 0.4, 0.6, 0.8};
        const auto annealed = annealed_sample(m, schedule, 1000, 100, a);
        c.require(gibbs.total() == 100000 && annealed.total() == 100000, "sample count");
        const double tv_g = total_variation(EmpiricalDistribution::from_samples(gibbs).to_dense(), exact);
        const double tv_a = total_variation(EmpiricalDistribution::from_samples(annealed).to_dense(), exact);
        worst_gibbs = std::max(worst_gibbs, tv_g);
        worst_anneal = std::max(worst_anneal, tv_a);
        c.require(tv_g < 0.02, "gibbs TV " + num(tv_g));
        c.require(tv_a < 0.02, "annealed TV " + num(tv_a));
    }
    c.note("max TV gibbs " + num(worst_gibbs) + ", annealed " + num(worst_anneal));
    return c.outcome();
}

Outcome meyer_wallach() {
    Checker c;
    Rng rng{808};
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(6);
        const auto state = PureState::from_amplitudes(oracle::random_amplitudes(n, rng));
        const double gap = std::abs(q_direct(state) - q_purity(state));
        worst = std::max(worst, gap);
        c.require(gap < 1e-10, "formulations differ by " + num(gap));
    }
    const double r = 1.0 / std::sqrt(2.0);
    const auto bell = PureState::from_amplitudes({r, 0.0, 0.0, r});
    c.require(std::abs(q_purity(bell) - 1.0) <= 1e-12, "Q(Bell) = " + num(q_purity(bell)));
    c.require(std::abs(q_direct(bell) - 1.0) <= 1e-12, "direct Q(Bell) = " + num(q_direct(bell)));

    double worst_product = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(5);
        PureState s = zero_state(n);
        for (std::size_t q = 0; q < n; ++q) {
            s.apply(Gate::ry(q, rng.uniform(0.0, 6.3)));
            s.apply(Gate::rz(q, rng.uniform(0.0, 6.3)));
        }
        worst_product = std::max({worst_product, q_purity(s), q_direct(s)});
    }
    c.require(worst_product < 1e-10, "product Q " + num(worst_product));

    for (const auto &name : builtin_topology_names()) {
        Rng ent{derive_seed(808, name)};
        const auto report = ent_average(AnsatzLayout{builtin_topology(name), 1}, 20, ent);
        bool zero = report.mean == 0.0 && report.stddev == 0.0;
        for (const double q : report.q_values) {
            zero = zero && q == 0.0;
        }
        c.require(zero, name + " l=1 Ent = " + num(report.mean));
    }
    c.note("max formulation gap " + num(worst) + ", max product Q " + num(worst_product));
    return c.outcome();
}

Outcome discriminator_calibration() {
    Checker c;
    const ForestConfig forest;  // 1000 estimators
    c.require(forest.n_estimators == 1000, "default estimator count changed");
    const auto target = fixed_target();
    double lo = 1.0;
    double hi = 0.0;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        Rng rng{derive_seed(909, "same", trial)};
        const auto a = draw(target, 2000, rng);
        const auto b = draw(target, 2000, rng);
        auto cfg = forest;
        cfg.seed = derive_seed(909, "forest", trial);
        const double err = discriminator_error(a, b, cfg, derive_seed(909, "split", trial));
        lo = std::min(lo, err);
        hi = std::max(hi, err);
        c.require(err >= 0.45 && err <= 0.55, "same-distribution error " + num(err));
    }
    // Disjoint supports: model on codes with a leading 0, data on a leading 1.
    std::vector<double> left(16, 0.0);
    std::vector<double> right(16, 0.0);
    for (Code x = 0; x < 8; ++x) {
        left[x] = 1.0 / 8;
        right[x + 8] = 1.0 / 8;
    }
    Rng rng{derive_seed(909, "disjoint")};
    const auto a = draw(dense(left, 4), 2000, rng);
    const auto b = draw(dense(right, 4), 2000, rng);
    auto cfg = forest;
    cfg.seed = derive_seed(909, "forest-disjoint");
    const double disjoint = discriminator_error(a, b, cfg, derive_seed(909, "split-disjoint"));
    c.require(disjoint < 0.05, "disjoint error " + num(disjoint));
    c.note("same-distribution error in [" + num(lo) + ", " + num(hi) + "], disjoint " + num(disjoint));
    return c.outcome();
}

// ---------------------------------------------------------------------------
// End-to-end runs shared by the last three criteria.

const char *const kEndToEnd = "data.source = synthetic\n"
                              "data.pairs = EURUSD, GBPUSD\n"
                              "data.bits_per_pair = 2\n"
                              "data.synthetic_correlation = 0.4\n"
                              "model = both\n"
                              "born.topology = chain4\n"
                              "born.layers = 2\n"
                              "born.cost = sinkhorn\n"
                              "optimizer.kind = adam\n"
                              "optimizer.mode = exact\n"
                              "optimizer.learning_rate = 0.05\n"
                              "optimizer.epochs = 300\n"
                              "eval.every = 5\n"
                              "rbm.hidden = 4\n"
                              "rbm.sampler = exact\n"
                              "rbm.learning_rate = 0.05\n";

struct EndToEnd {
    ExperimentConfig cfg;
    BinnedDataset data;
    BornMachine initial_born;
    RbmModel initial_rbm;
};

EndToEnd setup(std::uint64_t seed, const std::string &cost = "sinkhorn") {
    auto text = std::string{kEndToEnd};
    const std::string key = "born.cost = sinkhorn";
    text.replace(text.find(key), key.size(), "born.cost = " + cost);
    auto cfg = parse_config(text);
    cfg.seed = seed;
    auto data = load_data(cfg);
    const auto layout = cfg.born_layout();
    Rng born_init{derive_seed(seed, "born-init")};
    BornMachine born{layout, random_parameters(layout, born_init)};
    Rng rbm_init{derive_seed(seed, "rbm-init")};
    auto rbm = random_rbm(cfg.problem.width(), cfg.rbm_hidden, rbm_init, cfg.rbm_init, cfg.rbm_trainable);
    rbm.beta = cfg.rbm_beta;
    return {cfg, std::move(data), born, rbm};
}

TrainingTrace run_born(const EndToEnd &e, BornMachine &machine) {
    auto bcfg = e.cfg.born;
    bcfg.optimizer.seed = derive_seed(e.cfg.seed, "born-train");
    return train_born(machine, e.data.samples(), bcfg);
}

TrainingTrace run_rbm(const EndToEnd &e, RbmModel &model) {
    auto rcfg = e.cfg.rbm;
    rcfg.optimizer.seed = derive_seed(e.cfg.seed, "rbm-train");
    return train_rbm(model, e.data.samples(), rcfg);
}

std::string trace_bytes(const TrainingTrace &t) {
    std::ostringstream out;
    write_trace_ndjson(out, t);
    return out.str();
}

constexpr std::uint64_t kSeeds = 5;

Outcome end_to_end_trend(std::vector<std::string> &born_traces, std::vector<std::string> &rbm_traces) {
    Checker c;
    std::ostringstream summary;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        const auto e = setup(seed);
        c.require(e.cfg.problem.width() == 4 && e.cfg.born_layout().parameter_count() == 8 &&
                      e.initial_rbm.trainable_count() == 8,
                  "instance shape");
        auto born = e.initial_born;
        auto rbm = e.initial_rbm;
        const auto traces = {std::pair{std::string{"born"}, run_born(e, born)},
                             std::pair{std::string{"rbm"}, run_rbm(e, rbm)}};
        for (const auto &[name, trace] : traces) {
            (name == "born" ? born_traces : rbm_traces).push_back(trace_bytes(trace));
            std::optional<double> initial;
            double best = 0.0;
            for (const auto &r : trace.records) {
                if (r.discriminator_error) {
                    if (!initial) {
                        initial = r.discriminator_error;
                    }
                    best = std::max(best, *r.discriminator_error);
                }
            }
            const std::string tag = name + " seed " + std::to_string(seed);
            c.require(trace.records.size() == 300, tag + " epoch count");
            c.require(initial.has_value() && *initial < 0.30, tag + " initial error " + num(initial.value_or(-1)));
            c.require(best > 0.40, tag + " max error " + num(best));
            summary << ' ' << name[0] << seed << '=' << num(initial.value_or(-1)) << "->" << num(best);
        }
    }
    c.note("initial->max error" + summary.str());
    return c.outcome();
}

Outcome training_progress() {
    Checker c;
    std::ostringstream summary;
    for (const auto *cost : {"sinkhorn", "mmd"}) {
        for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
            const auto run = setup(seed, cost);
            auto machine = run.initial_born;
            run_born(run, machine);

            const auto target = EmpiricalDistribution::from_samples(run.data.samples());
            const auto value = [&](const BornMachine &m) {
                const auto p = dense(born_exact_distribution(m), 4);
                return std::string{cost} == "mmd" ? mmd(p, target, run.cfg.born.kernel)
                                                  : sinkhorn_divergence(p, target, run.cfg.born.sinkhorn).value;
            };
            const double before = value(run.initial_born);
            const double after = value(machine);
            c.require(after < 0.5 * before, std::string{cost} + " seed " + std::to_string(seed) + " cost " +
                                                num(before) + " -> " + num(after));
            summary << ' ' << cost << seed << '=' << num(after / before);
        }
    }
    c.note("final/initial" + summary.str());
    return c.outcome();
}

Outcome reproducibility(const std::vector<std::string> &born_traces, const std::vector<std::string> &rbm_traces) {
    Checker c;
    std::size_t bytes = 0;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        const auto e = setup(seed);
        auto born = e.initial_born;
        auto rbm = e.initial_rbm;
        const auto b = trace_bytes(run_born(e, born));
        const auto r = trace_bytes(run_rbm(e, rbm));
        bytes += b.size() + r.size();
        c.require(seed < born_traces.size() && b == born_traces[seed], "born trace differs, seed " + std::to_string(seed));
        c.require(seed < rbm_traces.size() && r == rbm_traces[seed], "rbm trace differs, seed " + std::to_string(seed));
    }
    c.note(std::to_string(2 * kSeeds) + " traces, " + std::to_string(bytes) + " bytes compared");
    return c.outcome();
}

} // namespace

int main(int argc, char **argv) {
    std::set<int> selected;
    for (int k = 1; k < argc; ++k) {
        selected.insert(std::stoi(argv[k]));
    }
    const auto wanted = [&](int id) { return selected.empty() || selected.count(id) > 0; };

    std::vector<std::string> born_traces;
    std::vector<std::string> rbm_traces;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"simulator matches full-unitary products", simulator_oracle},
        {"Born distributions are normalized", born_normalization},
        {"exact gradients match finite differences", gradient_correctness},
        {"Sinkhorn solver matches the primal oracle", sinkhorn_oracle},
        {"MMD properties", mmd_properties},
        {"RBM matches brute-force enumeration", rbm_oracle},
        {"Gibbs and annealed sampler fidelity", sampler_fidelity},
        {"Meyer-Wallach formulations agree", meyer_wallach},
        {"discriminator calibration", discriminator_calibration},
        {"end-to-end discriminator trend", [&] { return end_to_end_trend(born_traces, rbm_traces); }},
        {"training halves the cost", training_progress},
        {"byte-identical traces", [&] {
             if (born_traces.empty()) {
                 Outcome discard = end_to_end_trend(born_traces, rbm_traces);
                 (void)discard;
             }
             return reproducibility(born_traces, rbm_traces);
         }},
    };

    bool all = true;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!wanted(id)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[k].second();
        } catch (const std::exception &e) {
            out = {false, std::string{"exception: "} + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        all = all && out.pass;
        std::cout << (out.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << criteria[k].first << " ("
                  << out.detail << "; " << num(secs) << " s)" << std::endl;
    }
    return all ? 0 : 1;
}
