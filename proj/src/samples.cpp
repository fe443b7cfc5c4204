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
#include "bornbench/samples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bornbench {

std::string to_bitstring(Code code, std::size_t width) {
    std::string out(width, '0');
    for (std::size_t pos = 0; pos < width; ++pos) {
        if (bit_at(code, width, pos) != 0U) {
            out[pos] = '1';
        }
    }
    return out;
}

Code parse_bitstring(std::string_view bits) {
    if (bits.empty() || bits.size() > kMaxBitWidth) {
        throw std::invalid_argument("bitstring must have 1..64 characters");
    }
    Code code = 0;
    for (const char c : bits) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("bitstring contains a character other than 0/1");
        }
        code = (code << 1U) | static_cast<Code>(c == '1');
    }
    return code;
}

SampleSet::SampleSet(std::size_t width) : width_{width} {
    if (width == 0 || width > kMaxBitWidth) {
        throw std::invalid_argument("sample width must be in 1..64");
    }
}

void SampleSet::add(Code code, std::uint64_t count) {
    if ((code & ~width_mask(width_)) != 0) {
        throw std::invalid_argument("code " + std::to_string(code) +
                                    " does not fit the sample width");
    }
    if (count == 0) {
        return;
    }
    counts_[code] += count;
    total_ += count;
}

void SampleSet::merge(const SampleSet &other) {
    if (other.width_ != width_) {
        throw std::invalid_argument("cannot merge sample sets of different widths");
    }
    for (const auto &[code, count] : other.counts_) {
        add(code, count);
    }
}

std::uint64_t SampleSet::count(Code code) const {
    const auto it = counts_.find(code);
    return it == counts_.end() ? 0 : it->second;
}

std::vector<Code> SampleSet::expand() const {
    std::vector<Code> out;
    out.reserve(total_);
    for (const auto &[code, count] : counts_) {
        out.insert(out.end(), count, code);
    }
    return out;
}

std::vector<double> SampleSet::bit_means() const {
    std::vector<double> means(width_, 0.0);
    if (total_ == 0) {
        return means;
    }
    for (const auto &[code, count] : counts_) {
        for (std::size_t pos = 0; pos < width_; ++pos) {
            means[pos] += static_cast<double>(bit_at(code, width_, pos) * count);
        }
    }
    for (auto &m : means) {
        m /= static_cast<double>(total_);
    }
    return means;
}

EmpiricalDistribution::EmpiricalDistribution(std::size_t width,
                                             std::vector<Code> support,
                                             std::vector<double> weights)
    : width_{width} {
    if (width == 0 || width > kMaxBitWidth) {
        throw std::invalid_argument("distribution width must be in 1..64");
    }
    if (support.size() != weights.size() || support.empty()) {
        throw std::invalid_argument("support and weights must be nonempty and of equal length");
    }
    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
    double sum = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const Code c = support[order[k]];
        const double w = weights[order[k]];
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("distribution weights must be finite and nonnegative");
        }
        if ((c & ~width_mask(width)) != 0) {
            throw std::invalid_argument("support code does not fit the width");
        }
        if (k > 0 && c == support[order[k - 1]]) {
            throw std::invalid_argument("support entries must be distinct");
        }
        sum += w;
        if (w > 0.0) {
            support_.push_back(c);
            weights_.push_back(w);
        }
    }
    if (std::abs(sum - 1.0) >= 1e-12) {
        throw std::invalid_argument("distribution weights must sum to 1");
    }
}

EmpiricalDistribution EmpiricalDistribution::from_samples(const SampleSet &samples) {
    if (samples.empty()) {
        throw std::invalid_argument("cannot build a distribution from an empty sample set");
    }
    std::vector<Code> support;
    std::vector<double> weights;
    support.reserve(samples.distinct());
    weights.reserve(samples.distinct());
    const auto total = static_cast<double>(samples.total());
    for (const auto &[code, count] : samples.counts()) {
        support.push_back(code);
        weights.push_back(static_cast<double>(count) / total);
    }
    // Rounding in count/total can leave a residual of a few ulps.
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto &w : weights) {
        w /= sum;
    }
    return {samples.width(), std::move(support), std::move(weights)};
}

EmpiricalDistribution EmpiricalDistribution::from_dense(std::span<const double> probabilities,
                                                        std::size_t width) {
    if (width == 0 || width > 24 || probabilities.size() != (std::size_t{1} << width)) {
        throw std::invalid_argument("dense distribution must have length 2^width, width <= 24");
    }
    std::vector<Code> support;
    std::vector<double> weights;
    for (std::size_t x = 0; x < probabilities.size(); ++x) {
        if (probabilities[x] != 0.0) {
            support.push_back(x);
            weights.push_back(probabilities[x]);
        }
    }
    return {width, std::move(support), std::move(weights)};
}

EmpiricalDistribution EmpiricalDistribution::delta(Code code, std::size_t width) {
    return {width, {code}, {1.0}};
}

double EmpiricalDistribution::probability(Code code) const {
    const auto it = std::lower_bound(support_.begin(), support_.end(), code);
    if (it == support_.end() || *it != code) {
        return 0.0;
    }
    return weights_[static_cast<std::size_t>(it - support_.begin())];
}

std::vector<double> EmpiricalDistribution::to_dense() const {
    if (width_ > 24) {
        throw std::length_error("dense expansion limited to 24 bits");
    }
    std::vector<double> dense(std::size_t{1} << width_, 0.0);
    for (std::size_t k = 0; k < support_.size(); ++k) {
        dense[support_[k]] = weights_[k];
    }
    return dense;
}

double total_variation(const EmpiricalDistribution &p, const EmpiricalDistribution &q) {
    if (p.width() != q.width()) {
        throw std::invalid_argument("total variation needs equal widths");
    }
    double acc = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    const auto &ps = p.support();
    const auto &qs = q.support();
    while (i < ps.size() || j < qs.size()) {
        if (j == qs.size() || (i < ps.size() && ps[i] < qs[j])) {
            acc += p.weights()[i++];
        } else if (i == ps.size() || qs[j] < ps[i]) {
            acc += q.weights()[j++];
        } else {
            acc += std::abs(p.weights()[i++] - q.weights()[j++]);
        }
    }
    return 0.5 * acc;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("total variation needs equal lengths");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        acc += std::abs(p[k] - q[k]);
    }
    return 0.5 * acc;
}

SampleSet resample(const SampleSet &samples, std::size_t shots, Rng &rng) {
    if (samples.empty()) {
        throw std::invalid_argument("cannot resample an empty sample set");
    }
    std::vector<Code> codes;
    std::vector<std::uint64_t> upper;
    std::uint64_t running = 0;
    for (const auto &[c, n] : samples.counts()) {
        running += n;
        codes.push_back(c);
        upper.push_back(running);
    }
    SampleSet out{samples.width()};
    for (std::size_t k = 0; k < shots; ++k) {
        const auto r = rng.uniform_index(running);
        const auto it = std::upper_bound(upper.begin(), upper.end(), r);
        out.add(codes[static_cast<std::size_t>(it - upper.begin())]);
    }
    return out;
}

SampleSet draw(const EmpiricalDistribution &dist, std::size_t shots, Rng &rng) {
    if (dist.size() == 0) {
        throw std::invalid_argument("cannot draw from an empty distribution");
    }
    std::vector<double> cdf(dist.size());
    double running = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        running += dist.weights()[k];
        cdf[k] = running;
    }
    SampleSet out{dist.width()};
    for (std::size_t k = 0; k < shots; ++k) {
        const double u = rng.uniform() * running;
        auto pos = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        out.add(dist.support()[std::min(pos, dist.size() - 1)]);
    }
    return out;
}

} // namespace bornbench
