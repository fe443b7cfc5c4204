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
#include "bornbench/data.hpp"

#include "bornbench/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace bornbench {

namespace {

using nlohmann::json;

constexpr double kDailyVolatility = 0.006;

bool is_iso_date(std::string_view d) {
    if (d.size() != 10 || d[4] != '-' || d[7] != '-') {
        return false;
    }
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (k != 4 && k != 7 && (d[k] < '0' || d[k] > '9')) {
            return false;
        }
    }
    return true;
}

double parse_double(std::string_view text, const std::string &what) {
    text = trim(text);
    double x = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("cannot parse " + what + " '" + std::string{text} + "'");
    }
    return x;
}

/// Type-7 quantile of sorted values.
double quantile_sorted(const std::vector<double> &sorted, double level) {
    const double h = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::size_t edge_bits(const std::vector<double> &edges) {
    const std::size_t bins = edges.size() < 2 ? 0 : edges.size() - 1;
    if (bins < 2 || (bins & (bins - 1)) != 0) {
        throw std::invalid_argument("bin edges must number 2^j + 1 with j >= 1");
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!std::isfinite(edges[k]) || (k > 0 && edges[k] < edges[k - 1])) {
            throw std::invalid_argument("bin edges must be finite and non-decreasing");
        }
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < bins) {
        ++bits;
    }
    return bits;
}

/// Rows from per-pair value columns of equal length.
BinnedDataset assemble(const ProblemSpec &spec, const std::vector<std::vector<double>> &fit_values,
                       const std::vector<std::vector<double>> &columns) {
    BinnedDataset ds;
    ds.spec = spec;
    for (const auto &values : fit_values) {
        ds.edges.push_back(fit_bin_edges(values, spec.bits_per_pair, spec.binning, spec.clip_lower, spec.clip_upper));
    }
    const std::size_t n = columns.front().size();
    ds.rows.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        Code code = 0;
        for (std::size_t p = 0; p < columns.size(); ++p) {
            code = (code << spec.bits_per_pair) | bin_index(columns[p][t], ds.edges[p]);
        }
        ds.rows.push_back(code);
    }
    return ds;
}

json spec_to_json(const ProblemSpec &s) {
    return {{"pairs", s.pairs},
            {"bits_per_pair", s.bits_per_pair},
            {"binning", to_string(s.binning)},
            {"quantity", to_string(s.quantity)},
            {"clip_lower", s.clip_lower},
            {"clip_upper", s.clip_upper}};
}

ProblemSpec spec_from_json(const json &j) {
    ProblemSpec s;
    s.pairs = j.at("pairs").get<std::vector<std::string>>();
    s.bits_per_pair = j.at("bits_per_pair").get<std::size_t>();
    s.binning = parse_binning(j.at("binning").get<std::string>());
    s.quantity = parse_binned_quantity(j.at("quantity").get<std::string>());
    s.clip_lower = j.at("clip_lower").get<double>();
    s.clip_upper = j.at("clip_upper").get<double>();
    return s;
}

} // namespace

void PriceSeries::validate() const {
    if (pair.empty()) {
        throw std::invalid_argument("price series has no pair name");
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (!(points[k].price > 0.0) || !std::isfinite(points[k].price)) {
            throw std::invalid_argument(pair + ": prices must be positive, got " + format_double(points[k].price) +
                                        " on " + points[k].date);
        }
        if (k > 0 && !(points[k - 1].date < points[k].date)) {
            throw std::invalid_argument(pair + ": dates must be strictly increasing at " + points[k].date);
        }
    }
}

std::vector<PriceSeries> read_price_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("price CSV is empty");
    }
    const auto header = split(trim(line), ',');
    if (header.size() != 3 || trim(header[0]) != "date" || trim(header[1]) != "pair" || trim(header[2]) != "price") {
        throw std::invalid_argument("price CSV header must be 'date,pair,price'");
    }
    std::vector<PriceSeries> out;
    std::map<std::string, std::size_t, std::less<>> index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto fields = split(row, ',');
        if (fields.size() != 3) {
            throw std::invalid_argument("price CSV line " + std::to_string(line_no) + " needs 3 fields");
        }
        const std::string date{trim(fields[0])};
        const std::string pair{trim(fields[1])};
        if (!is_iso_date(date)) {
            throw std::invalid_argument("price CSV line " + std::to_string(line_no) + ": bad date '" + date + "'");
        }
        if (pair.empty()) {
            throw std::invalid_argument("price CSV line " + std::to_string(line_no) + ": empty pair");
        }
        const double price = parse_double(fields[2], "price on line " + std::to_string(line_no));
        auto [it, inserted] = index.try_emplace(pair, out.size());
        if (inserted) {
            out.push_back({pair, {}});
        }
        out[it->second].points.push_back({date, price});
    }
    for (auto &s : out) {
        std::stable_sort(s.points.begin(), s.points.end(),
                         [](const PricePoint &a, const PricePoint &b) { return a.date < b.date; });
        s.validate();
    }
    return out;
}

std::vector<PriceSeries> load_price_files(const std::vector<std::string> &paths) {
    if (paths.empty()) {
        throw std::invalid_argument("no price files given");
    }
    std::vector<PriceSeries> all;
    for (const auto &path : paths) {
        std::ifstream in{path};
        if (!in) {
            throw std::runtime_error("cannot open price file " + path);
        }
        for (auto &s : read_price_csv(in)) {
            const auto it = std::find_if(all.begin(), all.end(), [&](const PriceSeries &x) { return x.pair == s.pair; });
            if (it == all.end()) {
                all.push_back(std::move(s));
                continue;
            }
            it->points.insert(it->points.end(), s.points.begin(), s.points.end());
            std::stable_sort(it->points.begin(), it->points.end(),
                             [](const PricePoint &a, const PricePoint &b) { return a.date < b.date; });
            it->validate();
        }
    }
    return all;
}

void write_price_csv(std::ostream &out, const std::vector<PriceSeries> &series) {
    out << "date,pair,price\n";
    for (const auto &s : series) {
        for (const auto &p : s.points) {
            out << p.date << ',' << s.pair << ',' << format_double(p.price) << '\n';
        }
    }
}

std::vector<double> log_returns(const PriceSeries &series) {
    series.validate();
    if (series.points.size() < 2) {
        throw std::invalid_argument(series.pair + ": log-returns need at least two prices");
    }
    std::vector<double> r(series.points.size() - 1);
    for (std::size_t t = 1; t < series.points.size(); ++t) {
        r[t - 1] = std::log(series.points[t].price / series.points[t - 1].price);
    }
    return r;
}

void ProblemSpec::validate() const {
    if (pairs.empty()) {
        throw std::invalid_argument("problem needs at least one pair");
    }
    if (std::set<std::string>(pairs.begin(), pairs.end()).size() != pairs.size()) {
        throw std::invalid_argument("problem pairs must be distinct");
    }
    if (bits_per_pair < 1 || bits_per_pair > 16) {
        throw std::invalid_argument("bits per pair must be in 1..16");
    }
    if (width() > kMaxBitWidth) {
        throw std::length_error("problem width " + std::to_string(width()) + " exceeds 64 bits");
    }
    if (!(clip_lower >= 0.0 && clip_lower < clip_upper && clip_upper <= 1.0)) {
        throw std::invalid_argument("clip quantiles must satisfy 0 <= lower < upper <= 1");
    }
}

std::vector<double> fit_bin_edges(std::vector<double> values, std::size_t bits, Binning binning, double clip_lower,
                                  double clip_upper) {
    if (values.empty()) {
        throw std::invalid_argument("cannot fit bin edges to no values");
    }
    if (bits < 1 || bits > 16) {
        throw std::invalid_argument("bits per pair must be in 1..16");
    }
    if (!(clip_lower >= 0.0 && clip_lower < clip_upper && clip_upper <= 1.0)) {
        throw std::invalid_argument("clip quantiles must satisfy 0 <= lower < upper <= 1");
    }
    for (const double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("cannot bin non-finite values");
        }
    }
    std::sort(values.begin(), values.end());
    const double lo = quantile_sorted(values, clip_lower);
    const double hi = quantile_sorted(values, clip_upper);
    for (auto &v : values) {
        v = std::clamp(v, lo, hi);
    }
    const std::size_t bins = std::size_t{1} << bits;
    std::vector<double> edges(bins + 1);
    edges.front() = lo;
    edges.back() = hi;
    for (std::size_t k = 1; k < bins; ++k) {
        const double level = static_cast<double>(k) / static_cast<double>(bins);
        edges[k] = binning == Binning::Quantile ? quantile_sorted(values, level) : lo + level * (hi - lo);
        edges[k] = std::clamp(edges[k], edges[k - 1], hi);
    }
    return edges;
}

Code bin_index(double value, const std::vector<double> &edges) {
    edge_bits(edges);
    if (std::isnan(value)) {
        throw std::invalid_argument("cannot bin NaN");
    }
    const auto first = edges.begin() + 1;
    const auto last = edges.end() - 1;
    return static_cast<Code>(std::upper_bound(first, last, value) - first);
}

std::string binarize(double value, const std::vector<double> &edges) {
    return to_bitstring(bin_index(value, edges), edge_bits(edges));
}

double decode_bin(Code code, const std::vector<double> &edges) {
    const std::size_t bits = edge_bits(edges);
    if (code >> bits != 0) {
        throw std::out_of_range("bin code outside the edge table");
    }
    return 0.5 * (edges[code] + edges[code + 1]);
}

SampleSet BinnedDataset::samples() const {
    SampleSet s{width()};
    for (const Code c : rows) {
        s.add(c);
    }
    return s;
}

void BinnedDataset::validate() const {
    spec.validate();
    if (edges.size() != spec.pairs.size()) {
        throw std::invalid_argument("dataset needs one edge table per pair");
    }
    for (const auto &e : edges) {
        if (edge_bits(e) != spec.bits_per_pair) {
            throw std::invalid_argument("edge table does not match bits per pair");
        }
    }
    for (const Code c : rows) {
        if ((c & ~width_mask(width())) != 0) {
            throw std::invalid_argument("dataset row wider than the problem width");
        }
    }
}

BinnedDataset build_dataset(const std::vector<PriceSeries> &series, const ProblemSpec &spec) {
    spec.validate();
    std::vector<std::map<std::string, double>> dated;
    std::vector<std::vector<double>> fit_values;
    for (const auto &name : spec.pairs) {
        const auto it = std::find_if(series.begin(), series.end(), [&](const PriceSeries &s) { return s.pair == name; });
        if (it == series.end()) {
            throw std::invalid_argument("no price series for pair " + name);
        }
        std::map<std::string, double> values;
        if (spec.quantity == BinnedQuantity::LogReturns) {
            const auto r = log_returns(*it);
            for (std::size_t t = 0; t < r.size(); ++t) {
                values.emplace(it->points[t + 1].date, r[t]);
            }
            fit_values.push_back(r);
        } else {
            it->validate();
            std::vector<double> prices;
            for (const auto &p : it->points) {
                values.emplace(p.date, p.price);
                prices.push_back(p.price);
            }
            if (prices.empty()) {
                throw std::invalid_argument(name + ": no prices");
            }
            fit_values.push_back(std::move(prices));
        }
        dated.push_back(std::move(values));
    }

    std::set<std::string> all_dates;
    for (const auto &m : dated) {
        for (const auto &[d, v] : m) {
            all_dates.insert(d);
        }
    }
    std::vector<std::vector<double>> columns(dated.size());
    std::size_t joined = 0;
    for (const auto &d : all_dates) {
        const bool everywhere = std::all_of(dated.begin(), dated.end(), [&](const auto &m) { return m.count(d) > 0; });
        if (!everywhere) {
            continue;
        }
        ++joined;
        for (std::size_t p = 0; p < dated.size(); ++p) {
            columns[p].push_back(dated[p].at(d));
        }
    }
    if (joined == 0) {
        throw std::invalid_argument("the pairs share no dates");
    }
    auto ds = assemble(spec, fit_values, columns);
    ds.provenance.source = "csv";
    ds.provenance.joined_dates = joined;
    ds.provenance.dropped_dates = all_dates.size() - joined;
    return ds;
}

Code pair_code(Code sample, std::size_t pair, std::size_t n_pairs, std::size_t bits) {
    if (pair >= n_pairs) {
        throw std::out_of_range("pair index " + std::to_string(pair) + " out of range");
    }
    return (sample >> ((n_pairs - 1 - pair) * bits)) & width_mask(bits);
}

BinnedDataset downsample_precision(const BinnedDataset &dataset, std::size_t bits) {
    const std::size_t j = dataset.spec.bits_per_pair;
    if (bits < 1 || bits >= j) {
        throw std::invalid_argument("target precision must be in 1.." + std::to_string(j - 1));
    }
    const std::size_t n_pairs = dataset.spec.pairs.size();
    const std::size_t drop = j - bits;
    BinnedDataset out = dataset;
    out.spec.bits_per_pair = bits;
    for (auto &edges : out.edges) {
        std::vector<double> coarse;
        for (std::size_t k = 0; k < edges.size(); k += std::size_t{1} << drop) {
            coarse.push_back(edges[k]);
        }
        edges = std::move(coarse);
    }
    for (auto &row : out.rows) {
        Code code = 0;
        for (std::size_t p = 0; p < n_pairs; ++p) {
            code = (code << bits) | (pair_code(row, p, n_pairs, j) >> drop);
        }
        row = code;
    }
    return out;
}

EmpiricalDistribution marginal_distribution(const BinnedDataset &dataset, std::size_t pair) {
    const std::size_t n_pairs = dataset.spec.pairs.size();
    const std::size_t bits = dataset.spec.bits_per_pair;
    if (pair >= n_pairs) {
        throw std::out_of_range("pair index " + std::to_string(pair) + " out of range");
    }
    SampleSet s{bits};
    for (const Code c : dataset.rows) {
        s.add(pair_code(c, pair, n_pairs, bits));
    }
    return EmpiricalDistribution::from_samples(s);
}

EmpiricalDistribution marginal_distribution(const EmpiricalDistribution &joint, std::size_t pair,
                                            std::size_t n_pairs) {
    if (n_pairs == 0 || joint.width() % n_pairs != 0) {
        throw std::invalid_argument("joint width is not a multiple of the pair count");
    }
    const std::size_t bits = joint.width() / n_pairs;
    std::map<Code, double> acc;
    for (std::size_t k = 0; k < joint.size(); ++k) {
        acc[pair_code(joint.support()[k], pair, n_pairs, bits)] += joint.weights()[k];
    }
    std::vector<Code> support;
    std::vector<double> weights;
    double total = 0.0;
    for (const auto &[c, w] : acc) {
        support.push_back(c);
        weights.push_back(w);
        total += w;
    }
    for (auto &w : weights) {
        w /= total;
    }
    return {bits, std::move(support), std::move(weights)};
}

std::vector<QqPoint> qq_data(const EmpiricalDistribution &a, const EmpiricalDistribution &b,
                             std::size_t n_quantiles) {
    if (a.width() != b.width()) {
        throw std::invalid_argument("QQ data needs distributions of the same width");
    }
    if (n_quantiles == 0 || a.size() == 0 || b.size() == 0) {
        throw std::invalid_argument("QQ data needs nonempty distributions and at least one level");
    }
    const auto quantile = [](const EmpiricalDistribution &d, double level) {
        double cum = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            cum += d.weights()[k];
            if (cum + 1e-12 >= level) {
                return d.support()[k];
            }
        }
        return d.support().back();
    };
    std::vector<QqPoint> out;
    out.reserve(n_quantiles);
    for (std::size_t k = 0; k < n_quantiles; ++k) {
        const double level = (static_cast<double>(k) + 0.5) / static_cast<double>(n_quantiles);
        out.push_back({level, quantile(a, level), quantile(b, level)});
    }
    return out;
}

Eigen::MatrixXd equicorrelation(std::size_t n, double rho) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), rho);
    c.diagonal().setOnes();
    return c;
}

BinnedDataset synthetic_fx_generator(const ProblemSpec &spec, std::size_t n_samples,
                                     const Eigen::MatrixXd &correlation, Rng &rng) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.pairs.size());
    if (correlation.rows() != n || correlation.cols() != n) {
        throw std::invalid_argument("correlation matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (n_samples < 2) {
        throw std::invalid_argument("synthetic data needs at least two samples");
    }
    if (!correlation.allFinite() || (correlation - correlation.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
        (correlation.diagonal().array() - 1.0).abs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("correlation matrix must be symmetric with unit diagonal");
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt{correlation};
    const Eigen::VectorXd d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || d.minCoeff() < -1e-10) {
        throw std::invalid_argument("correlation matrix is not positive semidefinite");
    }
    const Eigen::MatrixXd lower = ldlt.matrixL();
    const Eigen::MatrixXd factor =
        ldlt.transpositionsP().transpose() * (lower * d.cwiseMax(0.0).cwiseSqrt().asDiagonal());

    std::vector<std::vector<double>> columns(spec.pairs.size(), std::vector<double>(n_samples));
    Eigen::VectorXd g(n);
    for (std::size_t t = 0; t < n_samples; ++t) {
        for (Eigen::Index k = 0; k < n; ++k) {
            g(k) = rng.normal();
        }
        const Eigen::VectorXd x = kDailyVolatility * (factor * g);
        for (Eigen::Index k = 0; k < n; ++k) {
            columns[static_cast<std::size_t>(k)][t] = x(k);
        }
    }
    if (spec.quantity == BinnedQuantity::Prices) {
        for (auto &col : columns) {
            double log_price = 0.0;
            for (auto &v : col) {
                log_price += v;
                v = std::exp(log_price);
            }
        }
    }
    auto ds = assemble(spec, columns, columns);
    ds.provenance.source = "synthetic";
    ds.provenance.seed = rng.seed();
    ds.provenance.joined_dates = n_samples;
    return ds;
}

void write_dataset(std::ostream &out, const BinnedDataset &dataset) {
    dataset.validate();
    const json header = {{"format", "bornbench-dataset"},
                         {"version", 1},
                         {"width", dataset.width()},
                         {"n_samples", dataset.rows.size()},
                         {"spec", spec_to_json(dataset.spec)},
                         {"edges", dataset.edges},
                         {"provenance",
                          {{"source", dataset.provenance.source},
                           {"files", dataset.provenance.files},
                           {"seed", dataset.provenance.seed},
                           {"joined_dates", dataset.provenance.joined_dates},
                           {"dropped_dates", dataset.provenance.dropped_dates}}}};
    out << header.dump() << '\n';
    for (const Code c : dataset.rows) {
        out << to_bitstring(c, dataset.width()) << '\n';
    }
}

BinnedDataset read_dataset(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("dataset file is empty");
    }
    BinnedDataset ds;
    std::size_t expected = 0;
    try {
        const auto header = json::parse(line);
        if (header.at("format") != "bornbench-dataset") {
            throw std::invalid_argument("not a bornbench dataset file");
        }
        ds.spec = spec_from_json(header.at("spec"));
        ds.edges = header.at("edges").get<std::vector<std::vector<double>>>();
        const auto &p = header.at("provenance");
        ds.provenance.source = p.at("source").get<std::string>();
        ds.provenance.files = p.at("files").get<std::vector<std::string>>();
        ds.provenance.seed = p.at("seed").get<std::uint64_t>();
        ds.provenance.joined_dates = p.at("joined_dates").get<std::size_t>();
        ds.provenance.dropped_dates = p.at("dropped_dates").get<std::size_t>();
        expected = header.at("n_samples").get<std::size_t>();
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string{"bad dataset header: "} + e.what());
    }
    while (std::getline(in, line)) {
        const auto row = trim(line);
        if (row.empty()) {
            continue;
        }
        if (row.size() != ds.width()) {
            throw std::invalid_argument("dataset row length " + std::to_string(row.size()) + " does not match width " +
                                        std::to_string(ds.width()));
        }
        ds.rows.push_back(parse_bitstring(row));
    }
    if (ds.rows.size() != expected) {
        throw std::invalid_argument("dataset holds " + std::to_string(ds.rows.size()) + " rows, header says " +
                                    std::to_string(expected));
    }
    ds.validate();
    return ds;
}

void write_marginal_csv(std::ostream &out, const EmpiricalDistribution &marginal) {
    out << "code,frequency\n";
    const auto dense = marginal.to_dense();
    for (std::size_t c = 0; c < dense.size(); ++c) {
        out << c << ',' << format_double(dense[c]) << '\n';
    }
}

void write_qq_csv(std::ostream &out, const std::vector<QqPoint> &points) {
    out << "level,quantile_a,quantile_b\n";
    for (const auto &p : points) {
        out << format_double(p.level) << ',' << p.quantile_a << ',' << p.quantile_b << '\n';
    }
}

std::string to_string(Binning binning) { return binning == Binning::Quantile ? "quantile" : "linear"; }

Binning parse_binning(const std::string &name) {
    if (name == "quantile") {
        return Binning::Quantile;
    }
    if (name == "linear") {
        return Binning::Linear;
    }
    throw std::invalid_argument("unknown binning '" + name + "' (quantile, linear)");
}

std::string to_string(BinnedQuantity quantity) {
    return quantity == BinnedQuantity::LogReturns ? "log_returns" : "prices";
}

BinnedQuantity parse_binned_quantity(const std::string &name) {
    if (name == "log_returns") {
        return BinnedQuantity::LogReturns;
    }
    if (name == "prices") {
        return BinnedQuantity::Prices;
    }
    throw std::invalid_argument("unknown binned quantity '" + name + "' (log_returns, prices)");
}

} // namespace bornbench
