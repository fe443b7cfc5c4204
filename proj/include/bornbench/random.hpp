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
 * Seeded random source and seed derivation.
 *
 * Every stochastic routine in the library takes an `Rng&` explicitly. The
 * draws are built directly on the raw 64-bit output of `std::mt19937_64`
 * (whose sequence is fixed by the standard), so a given seed produces the
 * same stream on every conforming toolchain.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace bornbench {

/// SplitMix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

/// FNV-1a over a label, for component-labelled seed derivation.
constexpr std::uint64_t label_hash(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/**
 * @brief Derive an independent child seed from `(base, label, index)`.
 *
 * All randomness in a run flows from one root seed through this function,
 * e.g. `derive_seed(root, "chain", 3)` for the fourth sampler chain.
 */
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                    std::uint64_t index = 0) noexcept {
    return splitmix64(splitmix64(base ^ label_hash(label)) ^ splitmix64(index));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_{seed}, engine_{seed} {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n). `n` must be positive.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
        std::uint64_t r = engine_();
        while (r >= limit) {
            r = engine_();
        }
        return r % n;
    }

    /// Standard normal deviate (Marsaglia polar method).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Child generator for `(label, index)`; does not advance this stream.
    [[nodiscard]] Rng child(std::string_view label,
                            std::uint64_t index = 0) const {
        return Rng{derive_seed(seed_, label, index)};
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_{0.0};
    bool has_spare_{false};
};

} // namespace bornbench
