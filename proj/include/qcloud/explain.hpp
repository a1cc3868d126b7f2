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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qcloud/data.hpp"
#include "qcloud/model.hpp"

namespace qcloud {

/// Largest feature count for exhaustive coalition enumeration.
inline constexpr std::size_t kMaxExactFeatures = 10;
/// Largest feature count accepted at all.
inline constexpr std::size_t kMaxShapFeatures = 16;

enum class ShapMode { exact, sampled };

struct ShapOptions {
    ShapMode mode = ShapMode::exact;
    /// Coalition draws in sampled mode (empty and full coalitions excluded;
    /// they enter as constraints).
    std::size_t n_coalitions = 2048;
};

/// Shapley values of one instance.
struct ShapRow {
    std::vector<double> values;
    double base_value = 0.0;
    double prediction = 0.0;
    /// Weighted RMS residual of the coalition regression; zero up to rounding
    /// when the model is additive in the features.
    double residual = 0.0;
    /// Singular regression system; values are not meaningful.
    bool degenerate = false;
};

/**
 * KernelSHAP with interventional masking: features outside a coalition take
 * their values from each background row and the model output is averaged
 * over the background.
 *
 * The Shapley-kernel weighted least-squares problem is solved with
 * phi_0 = v(empty) and sum(phi) = f(x) - phi_0 enforced exactly. Exact mode
 * enumerates all 2^M coalitions (M <= 10); sampled mode draws coalitions
 * with probability proportional to the kernel weight.
 */
[[nodiscard]] ShapRow kernel_shap(const PredictFn &model, const Dataset &background,
                                  std::span<const double> instance, const ShapOptions &options,
                                  Rng &rng);

/// Shapley values for a whole dataset.
struct AttributionResult {
    std::vector<std::string> feature_names;
    double base_value = 0.0;
    std::size_t n_instances = 0;
    /// Row-major n_instances x n_features.
    std::vector<double> shap_values;
    std::vector<double> predictions;
    std::vector<double> residuals;
    std::size_t degenerate_rows = 0;

    [[nodiscard]] std::size_t n_features() const noexcept { return feature_names.size(); }
    [[nodiscard]] double value(std::size_t instance, std::size_t feature) const {
        return shap_values.at(instance * n_features() + feature);
    }
};

/// Called after each finished row with (done, total).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// Rows are independent; sampled mode seeds row i from derive_seed(seed, i),
/// so the result does not depend on thread count.
[[nodiscard]] AttributionResult explain_dataset(const PredictFn &model, const Dataset &background,
                                                const Dataset &test, const ShapOptions &options,
                                                std::uint64_t seed,
                                                const ProgressFn &progress = {});

struct ImportanceSummary {
    std::vector<std::string> feature_names;
    /// Mean |shap| over instances.
    std::vector<double> importance;
    /// 1 = most important; ties broken by feature index.
    std::vector<int> rank;
};

[[nodiscard]] ImportanceSummary importance_summary(const AttributionResult &result);

struct StabilityReport {
    /// Label for the model group, e.g. a model kind.
    std::string group = "all";
    std::vector<std::string> feature_names;
    std::vector<AttributionResult> attributions;
    std::vector<ImportanceSummary> summaries;
    /// Per feature, across models.
    std::vector<double> mean_importance;
    std::vector<double> std_importance; // sample standard deviation
};

/// Summaries and across-model spread of per-model attributions (at least two,
/// sharing one feature list).
[[nodiscard]] StabilityReport stability_report(std::vector<AttributionResult> attributions,
                                               std::string group = "all");

/// Runs explain_dataset for each model on a shared background and test set.
[[nodiscard]] StabilityReport ensemble_importance_stability(std::span<const PredictFn> models,
                                                            const Dataset &background,
                                                            const Dataset &test,
                                                            const ShapOptions &options,
                                                            std::uint64_t seed);

/// Deterministic stratified draw by target quantile: rows sorted by target
/// (ties by index) are cut into 10 equal strata and `size / 10` rows (plus
/// one for the first `size % 10` strata) are drawn from each.
[[nodiscard]] Dataset select_background(const Dataset &pool, std::size_t size,
                                        std::uint64_t seed);

/// instance_id,feature_name,shap_value (single model) or with a leading
/// model_id column when `tag_models` is set.
void write_attribution_csv(std::span<const AttributionResult> results,
                           const std::filesystem::path &path, bool tag_models);

/// feature_name,mean_abs_shap,rank (optionally prefixed by model_id).
void write_summary_csv(std::span<const ImportanceSummary> summaries,
                       const std::filesystem::path &path, bool tag_models);

/// group,feature_name,mean_importance,std_importance,variance.
void write_stability_csv(std::span<const StabilityReport> reports,
                         const std::filesystem::path &path);

} // namespace qcloud
