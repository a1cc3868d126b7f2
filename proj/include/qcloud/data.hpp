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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcloud/statevector.hpp"
#include "qcloud/xu_randall.hpp"

namespace qcloud {

/// Feature columns in qubit order: q_v, q_c, q_i, T, p, h_w, z_g, latitude.
inline constexpr std::array<std::string_view, 8> kFeatureColumns = {
    "qv", "qc", "qi", "ta", "pa", "hw", "zg", "lat"};
inline constexpr std::string_view kTargetColumn = "clc";

/// One grid-cell record in physical units (kg/kg, K, Pa, m/s, m, degrees).
struct Sample {
    double qv = 0.0;
    double qc = 0.0;
    double qi = 0.0;
    double ta = 0.0;
    double pa = 0.0;
    double hw = 0.0;
    double zg = 0.0;
    double lat = 0.0;
    double clc = 0.0;
};

/// Throws ValidationError citing `row` (1-based) on invariant violations.
void validate(const Sample &sample, std::size_t row);

/// All eight features, or the six without height and latitude.
enum class FeatureSubset { full, reduced };

[[nodiscard]] std::vector<std::string> subset_columns(FeatureSubset subset);

/// Accepts "full", "reduced" or a comma-separated list of column names.
[[nodiscard]] std::vector<std::string> parse_feature_subset(std::string_view spec);

/// Row-major feature table plus cloud-cover targets. Immutable once built.
class Dataset {
  public:
    explicit Dataset(std::vector<std::string> feature_names);

    void add_row(std::span<const double> features, double target);

    [[nodiscard]] std::size_t size() const noexcept { return targets_.size(); }
    [[nodiscard]] bool empty() const noexcept { return targets_.empty(); }
    [[nodiscard]] std::size_t n_features() const noexcept { return names_.size(); }
    [[nodiscard]] const std::vector<std::string> &feature_names() const noexcept {
        return names_;
    }
    [[nodiscard]] std::optional<std::size_t> feature_index(std::string_view name) const;

    [[nodiscard]] std::span<const double> row(std::size_t i) const;
    [[nodiscard]] double target(std::size_t i) const { return targets_.at(i); }
    [[nodiscard]] std::span<const double> targets() const noexcept { return targets_; }
    [[nodiscard]] double target_mean() const;

    [[nodiscard]] Dataset select_rows(std::span<const std::size_t> rows) const;
    /// Keeps only the named feature columns, in the given order.
    [[nodiscard]] Dataset select_features(const std::vector<std::string> &names) const;

  private:
    std::vector<std::string> names_;
    std::vector<double> features_;
    std::vector<double> targets_;
};

/// Reads a CSV with header qv,qc,qi,ta,pa,hw,zg,lat,clc (any column order)
/// and keeps the requested feature columns.
[[nodiscard]] Dataset load_csv(const std::filesystem::path &path,
                               const std::vector<std::string> &features);

/// Writes the full nine-column schema. Requires all eight features.
void write_csv(const Dataset &dataset, const std::filesystem::path &path);

/// Per-feature affine map of the training range [min, max] onto [lo, hi].
struct FeatureScaling {
    std::vector<double> min;
    std::vector<double> max;
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] std::size_t n_features() const noexcept { return min.size(); }
    [[nodiscard]] std::vector<double> apply(std::span<const double> raw) const;
    void apply_into(std::span<const double> raw, std::span<double> out) const;
    [[nodiscard]] std::vector<double> invert(std::span<const double> scaled) const;
    /// FNV-1a over the stored doubles; identifies the record across phases.
    [[nodiscard]] std::uint64_t checksum() const;
};

/// Fits on `train` only. Throws ValidationError on a constant feature.
[[nodiscard]] FeatureScaling fit_scaling(const Dataset &train, double lo, double hi);

/// Scales every row; values outside the fitted range extrapolate linearly and
/// produce one warning per call.
[[nodiscard]] Dataset apply_scaling(const FeatureScaling &scaling,
                                    const Dataset &dataset);

struct SplitFractions {
    double train = 0.7;
    double validation = 0.1;
    double test = 0.2;
};

struct DatasetSplit {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Sizes are floor(n f_i); leftover rows go to the parts with the largest
/// fractional remainders (ties to the earlier part). Rows are assigned from
/// one seeded permutation.
[[nodiscard]] std::array<std::size_t, 3> split_sizes(std::size_t n,
                                                     const SplitFractions &fractions);
[[nodiscard]] DatasetSplit split(const Dataset &dataset, const SplitFractions &fractions,
                                 std::uint64_t seed);

inline constexpr std::string_view kGeneratorVersion = "1";

struct SynthOptions {
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    double noise_sd = 0.02;
    XuRandallConstants constants{};
};

/// Physically plausible synthetic cloud-cover records:
///   - latitude U(-80, 80) deg, height U(0, 17000) m,
///   - pressure 1e5 exp(-z / H) Pa with H = 17000 / ln 10 and 1% log-normal
///     jitter, clamped to [1e4, 1e5],
///   - temperature 302 - 30 sin^2(lat) - 0.0065 z + N(0, 3) K, clamped to
///     [200, 310],
///   - q_v = r q_sat with r log-uniform on [0.05, 1.1],
///   - condensate present with probability clamp((r - 0.4) / 0.6, 0, 1),
///     total log-uniform on [1e-5, 1e-3] kg/kg, split into liquid and ice
///     linearly between 238.15 K and 273.15 K,
///   - wind U(0, 40) m/s,
/// and clc = clamp(xu_randall + 0.06 sin(2 pi z / 8000)
///                 + 0.04 cos(pi lat / 60) + N(0, noise_sd), 0, 1).
[[nodiscard]] Dataset synthesize_dataset(const SynthOptions &options);

/// JSON sidecar: generator_version, n, seed, noise_sd, xu_randall {p, alpha0, gamma}.
void write_synth_metadata(const SynthOptions &options, const std::filesystem::path &path);

} // namespace qcloud
