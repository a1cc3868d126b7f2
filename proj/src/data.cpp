// Copyright 2026 The qcloud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qcloud/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "format.hpp"
#include "json.hpp"
#include "qcloud/error.hpp"
#include "qcloud/log.hpp"
#include "qcloud/random.hpp"

namespace qcloud {

namespace {

using detail::format_double;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

double parse_double(std::string_view field, std::size_t row, std::string_view column) {
    double value = 0.0;
    const auto *first = field.data();
    const auto *last = field.data() + field.size();
    if (!field.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last) {
        throw ValidationError("row " + std::to_string(row) + ", column " +
                              std::string(column) + ": cannot parse '" +
                              std::string(field) + "' as a number");
    }
    return value;
}

bool is_known_column(std::string_view name) {
    return std::find(kFeatureColumns.begin(), kFeatureColumns.end(), name) !=
           kFeatureColumns.end();
}

} // namespace

void validate(const Sample &s, std::size_t row) {
    const auto fail = [row](const std::string &what) {
        throw ValidationError("row " + std::to_string(row) + ": " + what);
    };
    const double fields[] = {s.qv, s.qc, s.qi, s.ta, s.pa, s.hw, s.zg, s.lat, s.clc};
    for (double v : fields) {
        if (!std::isfinite(v)) {
            fail("non-finite value");
        }
    }
    if (s.clc < 0.0 || s.clc > 1.0) {
        fail("clc = " + format_double(s.clc) + " outside [0, 1]");
    }
    if (s.qv < 0.0 || s.qc < 0.0 || s.qi < 0.0) {
        fail("negative humidity");
    }
    if (s.pa <= 0.0) {
        fail("non-positive pressure");
    }
}

std::vector<std::string> subset_columns(FeatureSubset subset) {
    const std::size_t n = subset == FeatureSubset::full ? 8 : 6;
    return {kFeatureColumns.begin(), kFeatureColumns.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<std::string> parse_feature_subset(std::string_view spec) {
    spec = trim(spec);
    if (spec == "full") {
        return subset_columns(FeatureSubset::full);
    }
    if (spec == "reduced") {
        return subset_columns(FeatureSubset::reduced);
    }
    std::vector<std::string> out;
    for (const auto name : split_fields(spec)) {
        if (!is_known_column(name)) {
            throw ConfigError("unknown feature column '" + std::string(name) + "'");
        }
        if (std::find(out.begin(), out.end(), name) != out.end()) {
            throw ConfigError("feature column '" + std::string(name) + "' listed twice");
        }
        out.emplace_back(name);
    }
    if (out.empty()) {
        throw ConfigError("empty feature subset");
    }
    return out;
}

Dataset::Dataset(std::vector<std::string> feature_names) : names_(std::move(feature_names)) {
    if (names_.empty()) {
        throw ConfigError("dataset needs at least one feature");
    }
}

void Dataset::add_row(std::span<const double> features, double target) {
    if (features.size() != names_.size()) {
        throw ConfigError("row has " + std::to_string(features.size()) +
                          " features, dataset has " + std::to_string(names_.size()));
    }
    features_.insert(features_.end(), features.begin(), features.end());
    targets_.push_back(target);
}

std::optional<std::size_t> Dataset::feature_index(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> Dataset::row(std::size_t i) const {
    if (i >= size()) {
        throw ConfigError("row index out of range");
    }
    return std::span<const double>(features_).subspan(i * names_.size(), names_.size());
}

double Dataset::target_mean() const {
    if (targets_.empty()) {
        throw ValidationError("target mean of an empty dataset");
    }
    return std::accumulate(targets_.begin(), targets_.end(), 0.0) /
           static_cast<double>(targets_.size());
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
    Dataset out(names_);
    out.features_.reserve(rows.size() * names_.size());
    out.targets_.reserve(rows.size());
    for (const std::size_t r : rows) {
        out.add_row(row(r), targets_[r]);
    }
    return out;
}

Dataset Dataset::select_features(const std::vector<std::string> &names) const {
    std::vector<std::size_t> columns;
    for (const auto &name : names) {
        const auto idx = feature_index(name);
        if (!idx) {
            throw ConfigError("dataset has no feature '" + name + "'");
        }
        columns.push_back(*idx);
    }
    Dataset out(names);
    std::vector<double> buffer(columns.size());
    for (std::size_t i = 0; i < size(); ++i) {
        const auto r = row(i);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            buffer[c] = r[columns[c]];
        }
        out.add_row(buffer, targets_[i]);
    }
    return out;
}

Dataset load_csv(const std::filesystem::path &path,
                 const std::vector<std::string> &features) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("'" + path.string() + "' is empty; header row required");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    const auto header = split_fields(line);

    // Position of each schema column (8 features + target) in the file.
    std::array<std::size_t, 9> position{};
    for (std::size_t c = 0; c < 9; ++c) {
        const std::string_view name = c < 8 ? kFeatureColumns[c] : kTargetColumn;
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ValidationError("'" + path.string() + "' is missing column '" +
                                  std::string(name) + "'");
        }
        position[c] = static_cast<std::size_t>(it - header.begin());
    }
    for (const auto name : header) {
        if (!is_known_column(name) && name != kTargetColumn) {
            throw ValidationError("'" + path.string() + "' has unknown column '" +
                                  std::string(name) + "'");
        }
    }

    std::vector<std::size_t> keep;
    for (const auto &name : features) {
        const auto it = std::find(kFeatureColumns.begin(), kFeatureColumns.end(), name);
        if (it == kFeatureColumns.end()) {
            throw ConfigError("unknown feature column '" + name + "'");
        }
        keep.push_back(static_cast<std::size_t>(it - kFeatureColumns.begin()));
    }

    Dataset out(features);
    std::vector<double> buffer(keep.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ValidationError("row " + std::to_string(row) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        std::array<double, 9> v{};
        for (std::size_t c = 0; c < 9; ++c) {
            const std::string_view name = c < 8 ? kFeatureColumns[c] : kTargetColumn;
            v[c] = parse_double(fields[position[c]], row, name);
        }
        const Sample s{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]};
        validate(s, row);
        for (std::size_t k = 0; k < keep.size(); ++k) {
            buffer[k] = v[keep[k]];
        }
        out.add_row(buffer, s.clc);
    }
    return out;
}

void write_csv(const Dataset &dataset, const std::filesystem::path &path) {
    std::array<std::size_t, 8> columns{};
    for (std::size_t c = 0; c < 8; ++c) {
        const auto idx = dataset.feature_index(kFeatureColumns[c]);
        if (!idx) {
            throw ConfigError("CSV export needs all eight feature columns; missing '" +
                              std::string(kFeatureColumns[c]) + "'");
        }
        columns[c] = *idx;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    for (const auto name : kFeatureColumns) {
        out << name << ',';
    }
    out << kTargetColumn << '\n';
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto r = dataset.row(i);
        for (const std::size_t c : columns) {
            out << format_double(r[c]) << ',';
        }
        out << format_double(dataset.target(i)) << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

std::vector<double> FeatureScaling::apply(std::span<const double> raw) const {
    std::vector<double> out(raw.size());
    apply_into(raw, out);
    return out;
}

void FeatureScaling::apply_into(std::span<const double> raw, std::span<double> out) const {
    if (raw.size() != n_features() || out.size() != n_features()) {
        throw ConfigError("scaling expects " + std::to_string(n_features()) +
                          " features, got " + std::to_string(raw.size()));
    }
    for (std::size_t j = 0; j < raw.size(); ++j) {
        out[j] = lo + (raw[j] - min[j]) * (hi - lo) / (max[j] - min[j]);
    }
}

std::vector<double> FeatureScaling::invert(std::span<const double> scaled) const {
    if (scaled.size() != n_features()) {
        throw ConfigError("scaling expects " + std::to_string(n_features()) + " features");
    }
    std::vector<double> out(scaled.size());
    for (std::size_t j = 0; j < scaled.size(); ++j) {
        out[j] = min[j] + (scaled[j] - lo) * (max[j] - min[j]) / (hi - lo);
    }
    return out;
}

std::uint64_t FeatureScaling::checksum() const {
    std::vector<double> record;
    record.reserve(2 * min.size() + 2);
    record.insert(record.end(), min.begin(), min.end());
    record.insert(record.end(), max.begin(), max.end());
    record.push_back(lo);
    record.push_back(hi);
    return hash_doubles(record);
}

FeatureScaling fit_scaling(const Dataset &train, double lo, double hi) {
    if (train.empty()) {
        throw ValidationError("cannot fit scaling on an empty dataset");
    }
    if (!(hi > lo)) {
        throw ConfigError("scaling interval must satisfy hi > lo");
    }
    FeatureScaling s;
    s.lo = lo;
    s.hi = hi;
    const std::size_t m = train.n_features();
    s.min.assign(m, std::numeric_limits<double>::infinity());
    s.max.assign(m, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto r = train.row(i);
        for (std::size_t j = 0; j < m; ++j) {
            s.min[j] = std::min(s.min[j], r[j]);
            s.max[j] = std::max(s.max[j], r[j]);
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (!(s.max[j] > s.min[j])) {
            throw ValidationError("feature '" + train.feature_names()[j] +
                                  "' is constant on the training split");
        }
    }
    return s;
}

Dataset apply_scaling(const FeatureScaling &scaling, const Dataset &dataset) {
    Dataset out(dataset.feature_names());
    std::vector<double> buffer(dataset.n_features());
    std::size_t outside = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto r = dataset.row(i);
        scaling.apply_into(r, buffer);
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (r[j] < scaling.min[j] || r[j] > scaling.max[j]) {
                ++outside;
                break;
            }
        }
        out.add_row(buffer, dataset.target(i));
    }
    if (outside > 0) {
        log_warning(std::to_string(outside) +
                    " rows lie outside the fitted feature range; extrapolating");
    }
    return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitFractions &f) {
    const std::array<double, 3> fr = {f.train, f.validation, f.test};
    double sum = 0.0;
    for (double v : fr) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError("split fractions must be non-negative");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double exact = fr[k] * static_cast<double>(n);
        const double whole = std::floor(exact + 1e-9);
        sizes[k] = static_cast<std::size_t>(whole);
        remainder[k] = exact - whole;
        assigned += sizes[k];
    }
    while (assigned < n) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < 3; ++k) {
            if (remainder[k] > remainder[best]) {
                best = k;
            }
        }
        ++sizes[best];
        remainder[best] = -1.0;
        ++assigned;
    }
    return sizes;
}

DatasetSplit split(const Dataset &dataset, const SplitFractions &fractions,
                   std::uint64_t seed) {
    const auto sizes = split_sizes(dataset.size(), fractions);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::span<const std::size_t> all(order);
    return DatasetSplit{
        dataset.select_rows(all.subspan(0, sizes[0])),
        dataset.select_rows(all.subspan(sizes[0], sizes[1])),
        dataset.select_rows(all.subspan(sizes[0] + sizes[1], sizes[2])),
    };
}

Dataset synthesize_dataset(const SynthOptions &options) {
    validate(options.constants);
    if (options.n == 0) {
        throw ConfigError("synthetic dataset needs n >= 1");
    }
    if (!(options.noise_sd >= 0.0)) {
        throw ConfigError("noise_sd must be non-negative");
    }
    constexpr double kPi = std::numbers::pi;
    constexpr double kTopHeight = 17000.0;
    const double scale_height = kTopHeight / std::log(10.0);

    Rng rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto log_uniform = [&](double a, double b) {
        return std::exp(std::log(a) + unit(rng) * (std::log(b) - std::log(a)));
    };

    Dataset out(subset_columns(FeatureSubset::full));
    for (std::size_t i = 0; i < options.n; ++i) {
        Sample s;
        s.lat = -80.0 + 160.0 * unit(rng);
        s.zg = kTopHeight * unit(rng);
        s.pa = std::clamp(1e5 * std::exp(-s.zg / scale_height + 0.01 * gauss(rng)), 1e4, 1e5);
        const double sin_lat = std::sin(s.lat * kPi / 180.0);
        s.ta = std::clamp(302.0 - 30.0 * sin_lat * sin_lat - 0.0065 * s.zg + 3.0 * gauss(rng),
                          200.0, 310.0);
        const double qsat = saturation_specific_humidity(s.ta, s.pa);
        const double ratio = log_uniform(0.05, 1.1);
        s.qv = ratio * qsat;
        const double p_condensate = std::clamp((ratio - 0.4) / 0.6, 0.0, 1.0);
        const bool cloudy = unit(rng) < p_condensate;
        const double total = log_uniform(1e-5, 1e-3);
        if (cloudy) {
            const double liquid = std::clamp((s.ta - 238.15) / 35.0, 0.0, 1.0);
            s.qc = liquid * total;
            s.qi = (1.0 - liquid) * total;
        }
        s.hw = 40.0 * unit(rng);
        const double noise = options.noise_sd * gauss(rng);
        const double base =
            xu_randall_cloud_cover(s.qv, s.qc, s.qi, s.ta, s.pa, options.constants);
        s.clc = std::clamp(base + 0.06 * std::sin(2.0 * kPi * s.zg / 8000.0) +
                               0.04 * std::cos(kPi * s.lat / 60.0) + noise,
                           0.0, 1.0);
        const double row[] = {s.qv, s.qc, s.qi, s.ta, s.pa, s.hw, s.zg, s.lat};
        out.add_row(row, s.clc);
    }
    return out;
}

void write_synth_metadata(const SynthOptions &options, const std::filesystem::path &path) {
    const nlohmann::json j = {
        {"generator_version", kGeneratorVersion},
        {"n", options.n},
        {"seed", options.seed},
        {"noise_sd", options.noise_sd},
        {"xu_randall",
         {{"p", options.constants.p},
          {"alpha0", options.constants.alpha0},
          {"gamma", options.constants.gamma}}},
    };
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    out.close();
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

} // namespace qcloud
