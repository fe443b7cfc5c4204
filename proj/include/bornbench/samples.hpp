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
 * Bitstring codes, sample multisets and weighted empirical distributions.
 *
 * A bitstring of width `w` is stored as an unsigned integer code whose most
 * significant bit (bit `w - 1`) is the first character of the string. The
 * same convention is used for statevector basis indices (qubit 0 is the
 * most significant bit), RBM visible units and dataset columns.
 */
#pragma once

#include "bornbench/random.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bornbench {

using Code = std::uint64_t;

inline constexpr std::size_t kMaxBitWidth = 64;

/// Mask with the low `width` bits set (width may be 64).
constexpr Code width_mask(std::size_t width) noexcept {
    return width >= 64 ? ~Code{0} : ((Code{1} << width) - 1);
}

/// Value (0/1) of position `pos` of a `width`-bit code; position 0 is leftmost.
constexpr unsigned bit_at(Code code, std::size_t width, std::size_t pos) noexcept {
    return static_cast<unsigned>((code >> (width - 1 - pos)) & 1U);
}

/// Number of differing positions.
inline unsigned hamming_distance(Code a, Code b) noexcept {
    return static_cast<unsigned>(__builtin_popcountll(a ^ b));
}

std::string to_bitstring(Code code, std::size_t width);

/// Parse a string of '0'/'1' characters. Throws std::invalid_argument.
Code parse_bitstring(std::string_view bits);

/**
 * @brief Multiset of fixed-width bitstrings with counts.
 *
 * Counts are held in a code-ordered map, so iteration order, and everything
 * computed from it, depends only on the multiset contents.
 */
class SampleSet {
  public:
    SampleSet() = default;
    explicit SampleSet(std::size_t width);

    void add(Code code, std::uint64_t count = 1);
    void merge(const SampleSet &other);

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::uint64_t total() const noexcept { return total_; }
    [[nodiscard]] bool empty() const noexcept { return total_ == 0; }
    [[nodiscard]] std::size_t distinct() const noexcept { return counts_.size(); }
    [[nodiscard]] const std::map<Code, std::uint64_t> &counts() const noexcept {
        return counts_;
    }
    [[nodiscard]] std::uint64_t count(Code code) const;

    /// All samples as a flat code list in ascending code order.
    [[nodiscard]] std::vector<Code> expand() const;

    /// Per-position mean of the bit values.
    [[nodiscard]] std::vector<double> bit_means() const;

    friend bool operator==(const SampleSet &, const SampleSet &) = default;

  private:
    std::size_t width_{0};
    std::uint64_t total_{0};
    std::map<Code, std::uint64_t> counts_;
};

/**
 * @brief Probability distribution over a finite set of distinct bitstrings.
 *
 * Support is kept sorted and free of zero-weight points.
 */
class EmpiricalDistribution {
  public:
    EmpiricalDistribution() = default;

    /// Validates nonnegativity, normalization (1e-12) and distinctness.
    EmpiricalDistribution(std::size_t width, std::vector<Code> support,
                          std::vector<double> weights);

    /// Frequency normalization of a nonempty sample multiset.
    static EmpiricalDistribution from_samples(const SampleSet &samples);

    /// From a dense probability vector over all 2^width codes.
    /// Entries that are exactly zero are dropped from the support.
    static EmpiricalDistribution from_dense(std::span<const double> probabilities,
                                            std::size_t width);

    static EmpiricalDistribution delta(Code code, std::size_t width);

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t size() const noexcept { return support_.size(); }
    [[nodiscard]] const std::vector<Code> &support() const noexcept { return support_; }
    [[nodiscard]] const std::vector<double> &weights() const noexcept { return weights_; }

    /// Probability of `code` (0 when outside the support).
    [[nodiscard]] double probability(Code code) const;

    /// Dense vector over all 2^width codes; width must be at most 24.
    [[nodiscard]] std::vector<double> to_dense() const;

  private:
    std::size_t width_{0};
    std::vector<Code> support_;
    std::vector<double> weights_;
};

/// `shots` draws with replacement from a nonempty multiset.
SampleSet resample(const SampleSet &samples, std::size_t shots, Rng &rng);

/// `shots` draws from a distribution.
SampleSet draw(const EmpiricalDistribution &dist, std::size_t shots, Rng &rng);

/// Total variation distance between two distributions of the same width.
double total_variation(const EmpiricalDistribution &p, const EmpiricalDistribution &q);

/// Total variation between two dense vectors of equal length.
double total_variation(std::span<const double> p, std::span<const double> q);

} // namespace bornbench
