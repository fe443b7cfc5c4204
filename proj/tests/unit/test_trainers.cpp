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
#include "bornbench/trainers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace bornbench;
using Catch::Approx;

namespace {

/// Exact-count sample set of independent bits with the given P(bit = 1).
SampleSet product_data(const std::vector<double> &p_one, std::uint64_t total) {
    const std::size_t n = p_one.size();
    SampleSet s{n};
    for (Code x = 0; x < (Code{1} << n); ++x) {
        double p = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            p *= bit_at(x, n, i) != 0U ? p_one[i] : 1.0 - p_one[i];
        }
        const auto count = static_cast<std::uint64_t>(std::llround(p * static_cast<double>(total)));
        if (count > 0) {
            s.add(x, count);
        }
    }
    return s;
}

BornMachine chain4(std::uint64_t seed) {
    const AnsatzLayout layout{builtin_topology("chain4"), 2};
    Rng rng{seed};
    return {layout, random_parameters(layout, rng)};
}

Forest constant_forest(std::size_t width, double fraction) {
    DecisionTree tree;
    tree.nodes.push_back(TreeNode{-1, -1, -1, fraction, 1.0 - fraction, fraction});
    return Forest{width, {tree}};
}

/// Root split on bit 0: bit 0 -> model leaf, bit 1 -> data leaf.
Forest separating_forest() {
    DecisionTree tree;
    tree.nodes.push_back(TreeNode{0, 1, 2, 0.5, 1.0, 1.0});
    tree.nodes.push_back(TreeNode{-1, -1, -1, 0.0, 1.0, 0.0});
    tree.nodes.push_back(TreeNode{-1, -1, -1, 1.0, 0.0, 1.0});
    return Forest{1, {tree}};
}

void check_equal_ignoring_time(const TrainingTrace &a, const TrainingTrace &b) {
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        CHECK(a.records[k].epoch == b.records[k].epoch);
        CHECK(a.records[k].cost == b.records[k].cost);
        CHECK(a.records[k].discriminator_error == b.records[k].discriminator_error);
        CHECK(a.records[k].params == b.records[k].params);
        CHECK(a.records[k].seed == b.records[k].seed);
    }
}

} // namespace

TEST_CASE("Trainers::vanilla_step", "[trainers]") {
    const std::vector<double> p{0.3, -0.4};
    CHECK(vanilla_step(p, std::vector<double>{0.0, 0.0}, 0.1) == p);
    const auto out = vanilla_step(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, -2.0}, 0.1);
    CHECK(out[0] == Approx(-0.1));
    CHECK(out[1] == Approx(0.2));
    const std::vector<double> g{0.5, 1.5};
    const auto twice = vanilla_step(vanilla_step(p, g, 0.2), g, 0.2);
    const auto once = vanilla_step(p, g, 0.4);
    CHECK(twice[0] == Approx(once[0]));
    CHECK(twice[1] == Approx(once[1]));
    CHECK_THROWS_AS(vanilla_step(p, std::vector<double>{1.0}, 0.1), std::invalid_argument);
}

TEST_CASE("Trainers::adam_step", "[trainers]") {
    const AdamConfig cfg;
    SECTION("zero gradient never moves the parameters") {
        std::vector<double> p{1.0, 2.0, 3.0};
        auto state = AdamState::zeros(3);
        for (int t = 0; t < 50; ++t) {
            auto [s, q] = adam_step(state, p, std::vector<double>(3, 0.0), cfg);
            CHECK(q == p);
            state = s;
        }
        CHECK(state.t == 50);
    }
    SECTION("first step of a constant gradient moves by the learning rate") {
        const std::vector<double> p{0.0, 0.0};
        const auto [s, q] = adam_step(AdamState::zeros(2), p, std::vector<double>{3.0, -0.2}, cfg);
        CHECK(q[0] == Approx(-0.01).epsilon(1e-6));
        CHECK(q[1] == Approx(0.01).epsilon(1e-6));
    }
    SECTION("agrees with an independent reference over 100 random steps") {
        Rng rng{1};
        const AdamConfig c{0.02, 0.8, 0.99, 1e-7};
        std::vector<double> p(5);
        for (auto &x : p) {
            x = rng.uniform(-1.0, 1.0);
        }
        auto state = AdamState::zeros(5);
        Eigen::ArrayXd ref_p = Eigen::Map<Eigen::ArrayXd>(p.data(), 5);
        Eigen::ArrayXd m = Eigen::ArrayXd::Zero(5);
        Eigen::ArrayXd v = Eigen::ArrayXd::Zero(5);
        double b1t = 1.0;
        double b2t = 1.0;
        for (int t = 0; t < 100; ++t) {
            std::vector<double> g(5);
            for (auto &x : g) {
                x = rng.normal();
            }
            const Eigen::ArrayXd ga = Eigen::Map<Eigen::ArrayXd>(g.data(), 5);
            m = c.beta1 * m + (1 - c.beta1) * ga;
            v = c.beta2 * v + (1 - c.beta2) * ga.square();
            b1t *= c.beta1;
            b2t *= c.beta2;
            ref_p -= c.learning_rate * (m / (1 - b1t)) / ((v / (1 - b2t)).sqrt() + c.epsilon);
            auto [s, q] = adam_step(state, p, g, c);
            state = s;
            p = q;
        }
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(std::abs(p[k] - ref_p(static_cast<Eigen::Index>(k))) < 1e-10);
        }
    }
    CHECK_THROWS_AS(adam_step(AdamState::zeros(2), std::vector<double>{1.0}, std::vector<double>{1.0}, cfg),
                    std::invalid_argument);
}

TEST_CASE("Trainers::genetic_generation", "[trainers]") {
    const FitnessFunction sphere = [](const Member &m) {
        double s = 0.0;
        for (const double x : m) {
            s += x * x;
        }
        return s;
    };
    GeneticConfig cfg;
    Rng rng{2};
    std::vector<Member> population(cfg.population_size, Member(8));
    for (auto &m : population) {
        for (auto &x : m) {
            x = rng.uniform(-1.0, 1.0);
        }
    }

    SECTION("the best member survives unchanged") {
        population[7].assign(8, 0.0);
        const auto next = genetic_generation(population, sphere, cfg, rng);
        CHECK(next.size() == population.size());
        CHECK(next.front() == Member(8, 0.0));
    }
    SECTION("zero mutation on identical members is a fixed point") {
        std::vector<Member> same(cfg.population_size, population[0]);
        GeneticConfig frozen = cfg;
        frozen.mutation_stddev = 0.0;
        CHECK(genetic_generation(same, sphere, frozen, rng) == same);
    }
    SECTION("sphere cost drops tenfold in 50 generations, monotonically") {
        const auto best = [&](const std::vector<Member> &pop) {
            double b = std::numeric_limits<double>::infinity();
            for (const auto &m : pop) {
                b = std::min(b, sphere(m));
            }
            return b;
        };
        const double initial = best(population);
        double previous = initial;
        for (int g = 0; g < 50; ++g) {
            population = genetic_generation(population, sphere, cfg, rng);
            const double now = best(population);
            CHECK(now <= previous);
            previous = now;
        }
        CHECK(previous * 10.0 <= initial);
    }
    SECTION("configuration checks") {
        GeneticConfig bad = cfg;
        bad.elite_count = bad.population_size;
        CHECK_THROWS_AS(genetic_generation(population, sphere, bad, rng), std::invalid_argument);
        population.pop_back();
        CHECK_THROWS_AS(genetic_generation(population, sphere, cfg, rng), std::invalid_argument);
    }
}

TEST_CASE("Trainers::adversarial_generator_phi", "[trainers]") {
    SECTION("a coin-flip discriminator gives zero gradient") {
        const auto m = chain4(1);
        const auto phi = adversarial_generator_phi(constant_forest(4, 0.5));
        for (const double g : born_gradient(m, phi, {})) {
            CHECK(std::abs(g) < 1e-14);
        }
    }
    SECTION("one qubit stuck near the model region is pushed toward the data") {
        const AnsatzLayout layout{LatticeTopology{1, {}}, 1};
        const double theta = 0.4;
        const BornMachine m{layout, ParameterVector{{theta}}};
        const auto phi = adversarial_generator_phi(separating_forest());
        CHECK(phi(0) == 1.0);
        CHECK(phi(1) == 0.0);
        // E[phi] = cos^2(theta / 2), derivative -sin(theta) / 2.
        const auto grad = born_gradient(m, phi, {});
        CHECK(grad[0] == Approx(-std::sin(theta) / 2).epsilon(1e-12));
        const auto stepped = vanilla_step(m.params.values, grad, 0.1);
        CHECK(born_exact_distribution({layout, ParameterVector{stepped}})[1] > born_exact_distribution(m)[1]);
    }
    SECTION("phi stays in [0, 1]") {
        Rng rng{3};
        LabeledDataset ds{4, {}, {}};
        for (int k = 0; k < 200; ++k) {
            ds.add(rng.uniform_index(16), k % 3 == 0 ? Origin::Data : Origin::Model);
        }
        ForestConfig fc;
        fc.n_estimators = 50;
        const auto phi = adversarial_generator_phi(fit(ds, fc));
        for (Code x = 0; x < 16; ++x) {
            CHECK(phi(x) >= 0.0);
            CHECK(phi(x) <= 1.0);
        }
    }
}

TEST_CASE("Trainers::train_born", "[trainers][training]") {
    const auto data = product_data({0.2, 0.7, 0.4, 0.9}, 20000);
    BornTrainingConfig cfg;
    cfg.forest.n_estimators = 50;
    cfg.optimizer.eval_samples = 400;

    SECTION("Sinkhorn with Adam shrinks the divergence tenfold") {
        auto m = chain4(4);
        cfg.optimizer.epochs = 200;
        cfg.optimizer.learning_rate = 0.05;
        cfg.optimizer.eval_every = 0;
        const auto trace = train_born(m, data, cfg);
        REQUIRE(trace.records.size() == 200);
        const auto p = EmpiricalDistribution::from_dense(born_exact_distribution(m), 4);
        const double final_cost = sinkhorn_divergence(p, EmpiricalDistribution::from_samples(data)).value;
        CHECK(final_cost < 0.1 * trace.records.front().cost);
        CHECK(trace.model == "born");
        CHECK(trace.trainable_parameters == 8);
    }
    SECTION("trace layout and evaluation cadence") {
        auto m = chain4(5);
        cfg.optimizer.epochs = 12;
        const auto trace = train_born(m, data, cfg);
        REQUIRE(trace.records.size() == 12);
        for (std::size_t k = 0; k < 12; ++k) {
            CHECK(trace.records[k].epoch == k);
            CHECK(trace.records[k].discriminator_error.has_value() == (k % 5 == 0));
            CHECK(trace.records[k].params.empty() == (k % 5 != 0));
        }
        CHECK(trace.records[0].params == chain4(5).params.values);
    }
    SECTION("identical seeds reproduce the trace") {
        auto a = chain4(6);
        auto b = chain4(6);
        cfg.optimizer.epochs = 6;
        check_equal_ignoring_time(train_born(a, data, cfg), train_born(b, data, cfg));
        CHECK(a.params.values == b.params.values);
    }
    SECTION("MMD and sampled mode also reduce the cost") {
        auto m = chain4(7);
        cfg.cost = BornCost::Mmd;
        cfg.optimizer.epochs = 60;
        cfg.optimizer.learning_rate = 0.05;
        cfg.optimizer.eval_every = 0;
        const auto exact = train_born(m, data, cfg);
        CHECK(exact.records.back().cost < exact.records.front().cost);

        auto s = chain4(7);
        cfg.cost = BornCost::Sinkhorn;
        cfg.optimizer.mode = EvalMode::Sampled;
        cfg.optimizer.model_shots = 1000;
        cfg.optimizer.data_shots = 1000;
        const auto sampled = train_born(s, data, cfg);
        const auto pi = EmpiricalDistribution::from_samples(data);
        const auto before = EmpiricalDistribution::from_dense(born_exact_distribution(chain4(7)), 4);
        const auto after = EmpiricalDistribution::from_dense(born_exact_distribution(s), 4);
        CHECK(sinkhorn_divergence(after, pi).value < sinkhorn_divergence(before, pi).value);
    }
    SECTION("adversarial training refits a forest each epoch") {
        auto m = chain4(8);
        cfg.cost = BornCost::Adversarial;
        cfg.optimizer.epochs = 4;
        cfg.optimizer.eval_every = 0;
        const auto trace = train_born(m, data, cfg);
        REQUIRE(trace.records.size() == 4);
        for (const auto &r : trace.records) {
            CHECK(r.cost >= 0.0);
            CHECK(r.cost <= 1.0);
        }
        CHECK(m.params.values != chain4(8).params.values);
    }
    SECTION("genetic training never loses its best member") {
        auto m = chain4(9);
        cfg.cost = BornCost::Genetic;
        cfg.optimizer.epochs = 15;
        cfg.optimizer.eval_every = 0;
        const auto trace = train_born(m, data, cfg);
        for (std::size_t k = 1; k < trace.records.size(); ++k) {
            CHECK(trace.records[k].cost <= trace.records[k - 1].cost);
        }
    }
    SECTION("dimension mismatch") {
        auto m = chain4(10);
        CHECK_THROWS_AS(train_born(m, product_data({0.5, 0.5}, 100), cfg), std::invalid_argument);
    }
}

TEST_CASE("Trainers::train_rbm", "[trainers][training]") {
    const std::vector<double> target{0.2, 0.7, 0.4, 0.9};
    const auto data = product_data(target, 20000);
    RbmTrainingConfig cfg;
    cfg.forest.n_estimators = 50;
    cfg.optimizer.eval_samples = 400;

    SECTION("exact bias-only training matches the target marginals") {
        Rng rng{11};
        auto m = random_rbm(4, 2, rng);
        const Eigen::MatrixXd weights = m.weights;
        cfg.optimizer.epochs = 3000;
        cfg.optimizer.learning_rate = 0.05;
        cfg.optimizer.eval_every = 0;
        cfg.optimizer.snapshot_every = 0;
        train_rbm(m, data, cfg);
        const auto p = exact_visible_distribution(m);
        const auto pi = EmpiricalDistribution::from_samples(data);
        for (std::size_t i = 0; i < 4; ++i) {
            double model_marginal = 0.0;
            double data_marginal = 0.0;
            for (Code v = 0; v < 16; ++v) {
                if (bit_at(v, 4, i) != 0U) {
                    model_marginal += p[v];
                    data_marginal += pi.probability(v);
                }
            }
            CHECK(std::abs(model_marginal - data_marginal) < 1e-3);
        }
        CHECK(m.weights == weights);
    }
    SECTION("zero epochs leave the model alone") {
        Rng rng{12};
        auto m = random_rbm(4, 4, rng);
        const auto before = trainable_parameters(m);
        cfg.optimizer.epochs = 0;
        CHECK(train_rbm(m, data, cfg).records.empty());
        CHECK(trainable_parameters(m) == before);
    }
    SECTION("log-likelihood improves and the trace is reproducible") {
        Rng rng{13};
        auto a = random_rbm(4, 4, rng);
        auto b = a;
        cfg.optimizer.epochs = 30;
        cfg.optimizer.learning_rate = 0.05;
        const auto ta = train_rbm(a, data, cfg);
        const auto tb = train_rbm(b, data, cfg);
        check_equal_ignoring_time(ta, tb);
        CHECK(ta.records.back().cost < ta.records.front().cost);
        CHECK(ta.records[0].discriminator_error.has_value());
        CHECK(ta.model == "rbm");
        CHECK(ta.trainable_parameters == 8);
    }
    SECTION("sampled moments with Gibbs and annealing") {
        for (const auto sampler : {RbmSampler::Gibbs, RbmSampler::Annealed}) {
            Rng rng{14};
            auto m = random_rbm(4, 4, rng);
            const Eigen::MatrixXd weights = m.weights;
            cfg.sampler = sampler;
            cfg.optimizer.mode = EvalMode::Sampled;
            cfg.optimizer.epochs = 40;
            cfg.optimizer.learning_rate = 0.05;
            cfg.optimizer.eval_every = 20;
            const auto trace = train_rbm(m, data, cfg);
            CHECK(trace.records.back().cost < trace.records.front().cost);
            CHECK(m.weights == weights);
        }
    }
    SECTION("weight training changes the weights") {
        Rng rng{15};
        auto m = random_rbm(4, 2, rng, {}, TrainableMask::BiasesAndWeights);
        const Eigen::MatrixXd weights = m.weights;
        cfg.optimizer.epochs = 5;
        cfg.optimizer.eval_every = 0;
        train_rbm(m, data, cfg);
        CHECK(m.weights != weights);
    }
    SECTION("input checks") {
        RbmModel m{3, 2};
        CHECK_THROWS_AS(train_rbm(m, data, cfg), std::invalid_argument);
        RbmModel ok{4, 2};
        cfg.optimizer.kind = OptimizerKind::Genetic;
        CHECK_THROWS_AS(train_rbm(ok, data, cfg), std::invalid_argument);
    }
}

TEST_CASE("Trainers name round trips", "[trainers]") {
    for (const auto c : {BornCost::Sinkhorn, BornCost::Mmd, BornCost::Adversarial, BornCost::Genetic}) {
        CHECK(parse_born_cost(to_string(c)) == c);
    }
    for (const auto k : {OptimizerKind::Vanilla, OptimizerKind::Adam, OptimizerKind::Genetic}) {
        CHECK(parse_optimizer_kind(to_string(k)) == k);
    }
    for (const auto s : {RbmSampler::Exact, RbmSampler::Gibbs, RbmSampler::Annealed}) {
        CHECK(parse_rbm_sampler(to_string(s)) == s);
    }
    CHECK_THROWS_AS(parse_born_cost("kl"), std::invalid_argument);
    CHECK(OptimizerConfig{}.effective_learning_rate() == 0.01);
    OptimizerConfig vanilla;
    vanilla.kind = OptimizerKind::Vanilla;
    CHECK(vanilla.effective_learning_rate() == 0.05);
}
