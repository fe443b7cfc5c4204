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
#include "bornbench/divergence.hpp"

#include "oracles.hpp"
#include "ot_oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>

using namespace bornbench;
using Catch::Approx;

namespace {

/// Random distribution on `points` distinct codes of `width` bits.
EmpiricalDistribution random_distribution(std::size_t width, std::size_t points, Rng &rng) {
    std::map<Code, double> picked;
    while (picked.size() < points) {
        picked[rng.uniform_index(std::uint64_t{1} << width)] = 0.05 + rng.uniform();
    }
    double total = 0.0;
    for (const auto &kv : picked) {
        total += kv.second;
    }
    std::vector<Code> support;
    std::vector<double> weights;
    for (const auto &[c, w] : picked) {
        support.push_back(c);
        weights.push_back(w / total);
    }
    return {width, support, weights};
}

/// Same distribution with every code XORed by `mask` (a Hamming isometry).
EmpiricalDistribution relabel(const EmpiricalDistribution &d, Code mask) {
    std::vector<Code> support;
    for (const Code c : d.support()) {
        support.push_back(c ^ mask);
    }
    return {d.width(), support, d.weights()};
}

BornMachine chain4(std::uint64_t seed) {
    AnsatzLayout layout{builtin_topology("chain4"), 2};
    Rng rng{seed};
    auto params = random_parameters(layout, rng);
    return {layout, params};
}

} // namespace

TEST_CASE("Divergence::hamming_cost_matrix", "[divergence]") {
    const std::vector<Code> xs{0b0101, 0b0110, 0b1111};
    const auto c = hamming_cost_matrix(xs, xs);
    CHECK(c(0, 1) == 2.0);
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(c(i, i) == 0.0);
        for (Eigen::Index j = 0; j < 3; ++j) {
            CHECK(c(i, j) == c(j, i));
        }
    }
    const auto p = EmpiricalDistribution::delta(0, 3);
    const auto q = EmpiricalDistribution::delta(0, 4);
    CHECK_THROWS_AS(hamming_cost_matrix(p, q), std::invalid_argument);
}

TEST_CASE("Divergence::gaussian_mixture_kernel", "[divergence][mmd]") {
    const KernelConfig cfg;
    CHECK(cfg.bandwidths == std::vector<double>{0.25, 10.0, 1000.0});
    CHECK(gaussian_mixture_kernel("0110", "0110", cfg) == Approx(1.0));
    CHECK(gaussian_mixture_kernel("0110", "0110", KernelConfig{{3.0}}) == 1.0);
    // High-precision reference of (e^-2 + e^-0.05 + e^-0.0005) / 3.
    CHECK(gaussian_mixture_kernel("0", "1", cfg) == Approx(0.695354944238831990519).epsilon(1e-14));
    CHECK_THROWS_AS(gaussian_mixture_kernel("01", "011", cfg), std::invalid_argument);
    CHECK_THROWS_AS(KernelConfig{{}}.validate(), std::invalid_argument);
    CHECK_THROWS_AS((KernelConfig{{1.0, -2.0}}.validate()), std::invalid_argument);
}

TEST_CASE("Divergence::mmd", "[divergence][mmd]") {
    Rng rng{1};
    const auto p = random_distribution(4, 6, rng);
    const auto q = random_distribution(4, 9, rng);
    CHECK(mmd(p, p) == 0.0);
    CHECK(mmd(p, q) == Approx(mmd(q, p)).epsilon(1e-14));

    const auto d00 = EmpiricalDistribution::delta(0b00, 2);
    const auto d11 = EmpiricalDistribution::delta(0b11, 2);
    // 2 (1 - k(00, 11)), k = (e^-4 + e^-0.1 + e^-0.001) / 3.
    CHECK(mmd(d00, d11) == Approx(0.718564295494620836583).epsilon(1e-14));
    CHECK_THROWS_AS(mmd(d00, EmpiricalDistribution::delta(0, 3)), std::invalid_argument);
}

TEST_CASE("Divergence MMD invariants", "[divergence][mmd][property]") {
    Rng rng{2};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t width = 1 + rng.uniform_index(8);
        const std::size_t cap = std::min<std::size_t>(std::size_t{1} << width, 20);
        const auto p = random_distribution(width, 1 + rng.uniform_index(cap), rng);
        const auto q = random_distribution(width, 1 + rng.uniform_index(cap), rng);
        const double v = mmd(p, q);
        CHECK(v >= 0.0);
        CHECK(std::isfinite(v));
    }
}

TEST_CASE("Divergence::mmd_grad_functional", "[divergence][mmd]") {
    const auto m = chain4(12);
    const auto p = EmpiricalDistribution::from_dense(born_exact_distribution(m), 4);

    SECTION("zero gradient when the model equals the data") {
        const auto phi = mmd_grad_functional(p, p);
        for (const double g : born_gradient(m, phi, {})) {
            CHECK(std::abs(g) < 1e-10);
        }
    }
    SECTION("finite differences on chain4, two layers") {
        Rng rng{3};
        const auto target = random_distribution(4, 10, rng);
        const auto grad = born_gradient(m, mmd_grad_functional(target, p), {});
        const auto loss = [&](const ParameterVector &theta) {
            return mmd(EmpiricalDistribution::from_dense(born_exact_distribution({m.layout, theta}), 4),
                       target);
        };
        const double h = 1e-4;
        for (std::size_t k = 0; k < grad.size(); ++k) {
            const double fd = (loss(shifted_params(m.params, k, h)) - loss(shifted_params(m.params, k, -h))) / (2 * h);
            CHECK(oracle::rel_error(grad[k], fd, 1e-5) < 1e-4);
        }
    }
    SECTION("uniform pair gives a constant phi") {
        std::vector<double> uniform(16, 1.0 / 16);
        const auto u = EmpiricalDistribution::from_dense(uniform, 4);
        const auto phi = mmd_grad_functional(u, u);
        for (Code x = 0; x < 16; ++x) {
            CHECK(std::abs(phi(x) - phi(0)) < 1e-14);
        }
        for (const double g : born_gradient(m, phi, {})) {
            CHECK(std::abs(g) < 1e-12);
        }
    }
}

TEST_CASE("Divergence::log_sum_exp", "[divergence]") {
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(log_sum_exp(zeros) == Approx(std::log(2.0)));
    const std::vector<double> big{1000.0, 1000.0};
    CHECK(log_sum_exp(big) == Approx(1000.0 + std::log(2.0)));
    CHECK(std::isinf(log_sum_exp(std::vector<double>{})));
}

TEST_CASE("Divergence::sinkhorn_potentials", "[divergence][sinkhorn]") {
    SECTION("single shared point") {
        const auto d = EmpiricalDistribution::delta(0b101, 3);
        const auto pot = entropic_ot(d, d);
        REQUIRE(pot.converged);
        CHECK(pot.first[0] + pot.second[0] == Approx(0.0).margin(1e-15));
        CHECK(pot.transport_value == Approx(0.0).margin(1e-15));
    }
    SECTION("two-point uniform against itself") {
        const EmpiricalDistribution u{2, {0b00, 0b11}, {0.5, 0.5}};
        const auto value = sinkhorn_divergence(u, u);
        CHECK(std::isfinite(value.value));
        CHECK(value.value >= -1e-10);
    }
    SECTION("4-point instances agree with direct primal minimization") {
        Rng rng{4};
        for (int trial = 0; trial < 5; ++trial) {
            const auto p = random_distribution(3, 4, rng);
            const auto q = random_distribution(3, 4, rng);
            const auto cost = hamming_cost_matrix(p, q);
            const auto pot = sinkhorn_potentials(p, q, cost);
            REQUIRE(pot.converged);
            const auto primal = oracle::entropic_ot_primal(p.weights(), q.weights(), cost, 1.0);
            CHECK(std::abs(pot.transport_value - primal.value) < 1e-4);
            CHECK(std::abs(pot.transport_value - primal.value) < 1e-8);
        }
    }
    SECTION("shape and config errors") {
        const auto d = EmpiricalDistribution::delta(0, 2);
        CHECK_THROWS_AS(sinkhorn_potentials(d, d, Eigen::MatrixXd::Zero(2, 1)), std::invalid_argument);
        SinkhornConfig bad;
        bad.epsilon = 0.0;
        CHECK_THROWS_AS(entropic_ot(d, d, bad), std::invalid_argument);
    }
    SECTION("iteration budget exhaustion is flagged, not thrown") {
        Rng rng{5};
        const auto p = random_distribution(6, 20, rng);
        const auto q = random_distribution(6, 20, rng);
        SinkhornConfig short_budget;
        short_budget.max_iterations = 2;
        const auto pot = entropic_ot(p, q, short_budget);
        CHECK_FALSE(pot.converged);
        CHECK(pot.iterations == 2);
        CHECK(std::isfinite(pot.transport_value));
        CHECK_FALSE(sinkhorn_divergence(p, q, short_budget).converged);
    }
}

TEST_CASE("Divergence::sinkhorn_divergence", "[divergence][sinkhorn]") {
    Rng rng{6};
    const auto p = random_distribution(5, 12, rng);
    const auto q = random_distribution(5, 7, rng);
    CHECK(std::abs(sinkhorn_divergence(p, p).value) < 1e-8);
    CHECK(std::abs(sinkhorn_divergence(p, q).value - sinkhorn_divergence(q, p).value) < 1e-8);

    // Two deltas admit a single coupling, so OT = C(0, 1) = 1 and the self terms vanish.
    SinkhornConfig small;
    small.epsilon = 0.1;
    const auto d0 = EmpiricalDistribution::delta(0, 1);
    const auto d1 = EmpiricalDistribution::delta(1, 1);
    CHECK(sinkhorn_divergence(d0, d1, small).value == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Divergence Sinkhorn invariants", "[divergence][sinkhorn][property]") {
    Rng rng{7};
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t width = 2 + rng.uniform_index(6);
        const std::size_t cap = std::min<std::size_t>(std::size_t{1} << width, 64);
        const auto p = random_distribution(width, 1 + rng.uniform_index(cap), rng);
        const auto q = random_distribution(width, 1 + rng.uniform_index(cap), rng);
        CHECK(std::abs(sinkhorn_divergence(p, p).value) <= 1e-8);
        CHECK(sinkhorn_divergence(p, q).value >= -1e-8);
    }

    SECTION("support relabelling permutes potentials and keeps the value") {
        const auto p = random_distribution(5, 9, rng);
        const auto q = random_distribution(5, 11, rng);
        const Code mask = 0b10110;
        const auto base = entropic_ot(p, q);
        const auto moved = entropic_ot(relabel(p, mask), relabel(q, mask));
        CHECK(moved.transport_value == Approx(base.transport_value).epsilon(1e-12));
        const auto rp = relabel(p, mask);
        // Potentials agree point by point up to a constant gauge shift.
        std::vector<double> diffs;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Code target = p.support()[i] ^ mask;
            const auto pos = static_cast<std::size_t>(
                std::lower_bound(rp.support().begin(), rp.support().end(), target) - rp.support().begin());
            diffs.push_back(moved.first[pos] - base.first[i]);
        }
        for (const double d : diffs) {
            CHECK(d == Approx(diffs.front()).margin(1e-8));
        }
    }

    SECTION("finite over a range of epsilon") {
        const auto p = random_distribution(6, 30, rng);
        const auto q = random_distribution(6, 25, rng);
        for (const double eps : {0.1, 1.0, 10.0}) {
            SinkhornConfig cfg;
            cfg.epsilon = eps;
            cfg.max_iterations = 5000;
            const auto v = sinkhorn_divergence(p, q, cfg);
            CHECK(std::isfinite(v.value));
            const auto ot = entropic_ot(p, q, cfg);
            CHECK(std::isfinite(ot.transport_value));
        }
        const auto cost = hamming_cost_matrix(p, q);
        CHECK(cost.allFinite());
    }
}

TEST_CASE("Divergence::sinkhorn_phi", "[divergence][sinkhorn]") {
    const auto m = chain4(21);
    const auto p = EmpiricalDistribution::from_dense(born_exact_distribution(m), 4);

    SECTION("zero gradient when the model equals the data") {
        const auto functional = sinkhorn_grad_functional(p, p);
        REQUIRE(functional.converged);
        for (const double g : born_gradient(m, functional.phi, {})) {
            CHECK(std::abs(g) < 1e-8);
        }
    }
    SECTION("finite differences at epsilon = 1") {
        Rng rng{8};
        const auto target = random_distribution(4, 11, rng);
        const auto grad = born_gradient(m, sinkhorn_grad_functional(p, target).phi, {});
        SinkhornConfig tight;
        tight.convergence_tol = 1e-13;
        tight.max_iterations = 20000;
        const auto loss = [&](const ParameterVector &theta) {
            return sinkhorn_divergence(
                       EmpiricalDistribution::from_dense(born_exact_distribution({m.layout, theta}), 4),
                       target, tight)
                .value;
        };
        const double h = 1e-4;
        for (std::size_t k = 0; k < grad.size(); ++k) {
            const double fd = (loss(shifted_params(m.params, k, h)) - loss(shifted_params(m.params, k, -h))) / (2 * h);
            CHECK(oracle::rel_error(grad[k], fd, 1e-5) < 1e-3);
        }
    }
    SECTION("mismatched potentials are rejected") {
        const auto d = EmpiricalDistribution::delta(0, 4);
        const auto cross = entropic_ot(d, d);
        const auto self = sinkhorn_self_potentials(p, hamming_cost_matrix(p, p));
        CHECK_THROWS_AS(sinkhorn_phi(p, d, self, self), std::invalid_argument);
        CHECK_THROWS_AS(sinkhorn_phi(p, d, cross, cross), std::invalid_argument);
    }
}
