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
 * FX price ingestion, log-returns, discretization to joint bitstrings and
 * plot data. A correlated-Gaussian generator stands in when no price feed is
 * available.
 */
#pragma once

#include "bornbench/random.hpp"
#include "bornbench/samples.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bornbench {

struct PricePoint {
    std::string date;  // ISO yyyy-mm-dd, compared lexicographically
    double price{0.0};

    friend bool operator==(const PricePoint &, const PricePoint &) = default;
};

struct PriceSeries {
    std::string pair;
    std::vector<PricePoint> points;

    /// Dates strictly increasing and prices positive.
    void validate() const;

    friend bool operator==(const PriceSeries &, const PriceSeries &) = default;
};

/**
 * @brief Parses `date,pair,price` CSV text (header required).
 *
 * Rows may arrive in any order; each pair's points are sorted by date.
 * Duplicate dates within a pair, bad numbers and nonpositive prices throw
 * std::invalid_argument. Pairs are returned in order of first appearance.
 */
std::vector<PriceSeries> read_price_csv(std::istream &in);

/// Reads and merges one or more CSV files (one file, or one per pair).
std::vector<PriceSeries> load_price_files(const std::vector<std::string> &paths);

void write_price_csv(std::ostream &out, const std::vector<PriceSeries> &series);

/// r_t = ln(p_t / p_{t-1}); needs at least two points.
std::vector<double> log_returns(const PriceSeries &series);

enum class Binning { Quantile, Linear };

/// What gets discretized: the daily log-returns, or the raw spot prices.
enum class BinnedQuantity { LogReturns, Prices };

struct ProblemSpec {
    std::vector<std::string> pairs;  // i
    std::size_t bits_per_pair{2};    // j
    Binning binning{Binning::Quantile};
    BinnedQuantity quantity{BinnedQuantity::LogReturns};
    double clip_lower{0.001};
    double clip_upper{0.999};

    [[nodiscard]] std::size_t width() const noexcept { return pairs.size() * bits_per_pair; }
    void validate() const;

    friend bool operator==(const ProblemSpec &, const ProblemSpec &) = default;
};

/**
 * @brief The 2^j + 1 bin edges for `values`.
 *
 * The outer edges are the clip quantiles. Quantile binning places the
 * interior edges at equal-mass quantiles of the clipped values; linear
 * binning spaces them evenly.
 */
std::vector<double> fit_bin_edges(std::vector<double> values, std::size_t bits, Binning binning,
                                  double clip_lower = 0.001, double clip_upper = 0.999);

/// Bin index of `value`; values outside the edges clamp to the end bins.
Code bin_index(double value, const std::vector<double> &edges);

/// bin_index as a big-endian j-bit string.
std::string binarize(double value, const std::vector<double> &edges);

/// Midpoint of bin `code`.
double decode_bin(Code code, const std::vector<double> &edges);

struct Provenance {
    std::string source;  // "csv" or "synthetic"
    std::vector<std::string> files;
    std::uint64_t seed{0};
    std::size_t joined_dates{0};
    std::size_t dropped_dates{0};

    friend bool operator==(const Provenance &, const Provenance &) = default;
};

struct BinnedDataset {
    ProblemSpec spec;
    std::vector<Code> rows;  // one (i*j)-bit sample per date, in date order
    std::vector<std::vector<double>> edges;  // per pair
    Provenance provenance;

    [[nodiscard]] std::size_t width() const noexcept { return spec.width(); }
    [[nodiscard]] SampleSet samples() const;
    void validate() const;

    friend bool operator==(const BinnedDataset &, const BinnedDataset &) = default;
};

/**
 * @brief Discretizes the spec's pairs and concatenates their codes per date.
 *
 * Dates are inner-joined across pairs; edges are fitted on each pair's full
 * series, including dates later dropped by the join.
 */
BinnedDataset build_dataset(const std::vector<PriceSeries> &series, const ProblemSpec &spec);

/// Keeps the `bits` most significant bits of every pair's code.
BinnedDataset downsample_precision(const BinnedDataset &dataset, std::size_t bits);

/// The code of pair `pair` (0-based) within a joint sample.
Code pair_code(Code sample, std::size_t pair, std::size_t n_pairs, std::size_t bits);

EmpiricalDistribution marginal_distribution(const BinnedDataset &dataset, std::size_t pair);

/// Marginal of a joint distribution over n_pairs * bits bits.
EmpiricalDistribution marginal_distribution(const EmpiricalDistribution &joint, std::size_t pair,
                                            std::size_t n_pairs);

struct QqPoint {
    double level{0.0};
    Code quantile_a{0};
    Code quantile_b{0};
};

/**
 * @brief Paired quantiles at levels (k + 1/2) / n_quantiles.
 *
 * The quantile of a level is the smallest code whose cumulative probability
 * reaches it.
 */
std::vector<QqPoint> qq_data(const EmpiricalDistribution &a, const EmpiricalDistribution &b,
                             std::size_t n_quantiles = 100);

inline constexpr std::size_t kDefaultSyntheticSamples = 5070;

/**
 * @brief Correlated Gaussian log-returns, binarized per `spec`.
 *
 * `correlation` must be symmetric with unit diagonal and positive
 * semidefinite; it is factored by pivoted LDLT so singular matrices work.
 */
BinnedDataset synthetic_fx_generator(const ProblemSpec &spec, std::size_t n_samples,
                                     const Eigen::MatrixXd &correlation, Rng &rng);

/// All off-diagonal entries equal to `rho`.
Eigen::MatrixXd equicorrelation(std::size_t n, double rho);

/// JSON header line followed by one 0/1 row per sample.
void write_dataset(std::ostream &out, const BinnedDataset &dataset);
BinnedDataset read_dataset(std::istream &in);

/// `code,frequency` over every code of the distribution's width.
void write_marginal_csv(std::ostream &out, const EmpiricalDistribution &marginal);

/// `level,quantile_a,quantile_b`.
void write_qq_csv(std::ostream &out, const std::vector<QqPoint> &points);

std::string to_string(Binning binning);
Binning parse_binning(const std::string &name);
std::string to_string(BinnedQuantity quantity);
BinnedQuantity parse_binned_quantity(const std::string &name);

} // namespace bornbench
