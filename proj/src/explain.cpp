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

#include "qcloud/explain.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>

#include <Eigen/Dense>

#include "format.hpp"
#include "qcloud/error.hpp"
#include "qcloud/random.hpp"

namespace qcloud {

namespace {

using detail::format_double;

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return r;
}

double kernel_weight(std::size_t m, std::size_t s) {
    return static_cast<double>(m - 1) /
           (binomial(m, s) * static_cast<double>(s) * static_cast<double>(m - s));
}

// Mean model output over the background with the coalition's features taken
// from the instance.
class CoalitionValue {
  public:
    CoalitionValue(const PredictFn &model, const Dataset &background,
                   std::span<const double> instance)
        : model_(model), background_(background), instance_(instance),
          mixed_(instance.size()) {}

    double operator()(std::uint32_t mask) {
        double acc = 0.0;
        for (std::size_t b = 0; b < background_.size(); ++b) {
            const auto row = background_.row(b);
            for (std::size_t j = 0; j < mixed_.size(); ++j) {
                mixed_[j] = (mask >> j) & 1U ? instance_[j] : row[j];
            }
            acc += model_(mixed_);
        }
        return acc / static_cast<double>(background_.size());
    }

  private:
    const PredictFn &model_;
    const Dataset &background_;
    std::span<const double> instance_;
    std::vector<double> mixed_;
};

void check_shap_inputs(const Dataset &background, std::size_t m, const ShapOptions &options) {
    if (background.empty()) {
        throw ConfigError("KernelSHAP needs at least one background row");
    }
    if (background.n_features() != m) {
        throw ConfigError("background has " + std::to_string(background.n_features()) +
                          " features, instance has " + std::to_string(m));
    }
    if (m == 0 || m > kMaxShapFeatures) {
        throw ConfigError("KernelSHAP supports 1.." + std::to_string(kMaxShapFeatures) +
                          " features, got " + std::to_string(m));
    }
    if (options.mode == ShapMode::exact && m > kMaxExactFeatures) {
        throw ConfigError("exact KernelSHAP supports at most " +
                          std::to_string(kMaxExactFeatures) + " features, got " +
                          std::to_string(m) + "; use sampled mode");
    }
    if (options.mode == ShapMode::sampled && options.n_coalitions == 0) {
        throw ConfigError("sampled KernelSHAP needs n_coalitions >= 1");
    }
}

// Coalition mask -> regression weight.
std::map<std::uint32_t, double> draw_coalitions(std::size_t m, const ShapOptions &options,
                                                Rng &rng) {
    std::map<std::uint32_t, double> out;
    const std::uint32_t full = (std::uint32_t{1} << m) - 1U;
    if (options.mode == ShapMode::exact) {
        for (std::uint32_t mask = 1; mask < full; ++mask) {
            out.emplace(mask, kernel_weight(m, static_cast<std::size_t>(std::popcount(mask))));
        }
        return out;
    }
    std::vector<double> size_mass;
    for (std::size_t s = 1; s < m; ++s) {
        size_mass.push_back(1.0 / (static_cast<double>(s) * static_cast<double>(m - s)));
    }
    std::discrete_distribution<std::size_t> pick_size(size_mass.begin(), size_mass.end());
    std::vector<std::uint32_t> features(m);
    for (std::size_t draw = 0; draw < options.n_coalitions; ++draw) {
        const std::size_t s = pick_size(rng) + 1;
        std::iota(features.begin(), features.end(), 0U);
        std::uint32_t mask = 0;
        for (std::size_t k = 0; k < s; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, m - 1);
            std::swap(features[k], features[pick(rng)]);
            mask |= std::uint32_t{1} << features[k];
        }
        out[mask] += 1.0;
    }
    return out;
}

ShapRow shap_row(const PredictFn &model, const Dataset &background,
                 std::span<const double> instance, const ShapOptions &options, Rng &rng,
                 std::optional<double> base) {
    const std::size_t m = instance.size();
    check_shap_inputs(background, m, options);
    CoalitionValue value(model, background, instance);

    ShapRow row;
    row.base_value = base ? *base : value(0U);
    row.prediction = model(instance);
    const double total = row.prediction - row.base_value;
    row.values.assign(m, 0.0);
    if (m == 1) {
        row.values[0] = total;
        return row;
    }

    const auto coalitions = draw_coalitions(m, options, rng);
    const std::size_t k = m - 1;
    const std::uint32_t last_bit = std::uint32_t{1} << k;
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                   static_cast<Eigen::Index>(k));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    std::vector<Eigen::VectorXd> designs;
    std::vector<double> targets;
    std::vector<double> weights;
    designs.reserve(coalitions.size());

    for (const auto &[mask, weight] : coalitions) {
        const double z_last = (mask & last_bit) ? 1.0 : 0.0;
        Eigen::VectorXd x(static_cast<Eigen::Index>(k));
        for (std::size_t j = 0; j < k; ++j) {
            x[static_cast<Eigen::Index>(j)] = (((mask >> j) & 1U) ? 1.0 : 0.0) - z_last;
        }
        const double y = value(mask) - row.base_value - z_last * total;
        normal.noalias() += weight * x * x.transpose();
        rhs.noalias() += weight * y * x;
        designs.push_back(std::move(x));
        targets.push_back(y);
        weights.push_back(weight);
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
    if (qr.rank() < static_cast<Eigen::Index>(k)) {
        row.degenerate = true;
        row.values.assign(m, std::numeric_limits<double>::quiet_NaN());
        row.residual = std::numeric_limits<double>::quiet_NaN();
        return row;
    }
    const Eigen::VectorXd beta = qr.solve(rhs);
    double assigned = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        row.values[j] = beta[static_cast<Eigen::Index>(j)];
        assigned += row.values[j];
    }
    row.values[k] = total - assigned;

    double sq = 0.0;
    double wsum = 0.0;
    for (std::size_t c = 0; c < designs.size(); ++c) {
        const double r = targets[c] - designs[c].dot(beta);
        sq += weights[c] * r * r;
        wsum += weights[c];
    }
    row.residual = wsum > 0.0 ? std::sqrt(sq / wsum) : 0.0;
    return row;
}

std::ofstream open_output(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    return out;
}

void finish_output(std::ofstream &out, const std::filesystem::path &path) {
    out.flush();
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

} // namespace

ShapRow kernel_shap(const PredictFn &model, const Dataset &background,
                    std::span<const double> instance, const ShapOptions &options, Rng &rng) {
    return shap_row(model, background, instance, options, rng, std::nullopt);
}

AttributionResult explain_dataset(const PredictFn &model, const Dataset &background,
                                  const Dataset &test, const ShapOptions &options,
                                  std::uint64_t seed, const ProgressFn &progress) {
    check_shap_inputs(background, test.n_features(), options);
    if (test.empty()) {
        throw ValidationError("nothing to explain: empty test set");
    }
    if (test.feature_names() != background.feature_names()) {
        throw ConfigError("background and test sets have different features");
    }
    AttributionResult out;
    out.feature_names = test.feature_names();
    out.n_instances = test.size();
    const std::size_t m = test.n_features();
    out.shap_values.assign(out.n_instances * m, 0.0);
    out.predictions.assign(out.n_instances, 0.0);
    out.residuals.assign(out.n_instances, 0.0);

    {
        double acc = 0.0;
        for (std::size_t b = 0; b < background.size(); ++b) {
            acc += model(background.row(b));
        }
        out.base_value = acc / static_cast<double>(background.size());
    }

    std::vector<unsigned char> degenerate(out.n_instances, 0);
    std::exception_ptr failure;
    std::size_t done = 0;
    const auto n = static_cast<std::ptrdiff_t>(out.n_instances);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const auto idx = static_cast<std::size_t>(i);
            Rng rng(derive_seed(seed, idx));
            const ShapRow row =
                shap_row(model, background, test.row(idx), options, rng, out.base_value);
            std::copy(row.values.begin(), row.values.end(),
                      out.shap_values.begin() + static_cast<std::ptrdiff_t>(idx * m));
            out.predictions[idx] = row.prediction;
            out.residuals[idx] = row.residual;
            degenerate[idx] = row.degenerate ? 1 : 0;
#pragma omp critical(qcloud_shap_progress)
            {
                ++done;
                if (progress) {
                    progress(done, out.n_instances);
                }
            }
        } catch (...) {
#pragma omp critical(qcloud_shap_failure)
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    out.degenerate_rows = static_cast<std::size_t>(
        std::count(degenerate.begin(), degenerate.end(), static_cast<unsigned char>(1)));
    return out;
}

ImportanceSummary importance_summary(const AttributionResult &result) {
    if (result.n_instances == 0) {
        throw ValidationError("importance summary of an empty attribution result");
    }
    const std::size_t m = result.n_features();
    ImportanceSummary s;
    s.feature_names = result.feature_names;
    s.importance.assign(m, 0.0);
    for (std::size_t i = 0; i < result.n_instances; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            s.importance[j] += std::abs(result.value(i, j));
        }
    }
    for (double &v : s.importance) {
        v /= static_cast<double>(result.n_instances);
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return s.importance[a] > s.importance[b];
    });
    s.rank.assign(m, 0);
    for (std::size_t r = 0; r < m; ++r) {
        s.rank[order[r]] = static_cast<int>(r + 1);
    }
    return s;
}

StabilityReport stability_report(std::vector<AttributionResult> attributions,
                                 std::string group) {
    if (attributions.size() < 2) {
        throw ConfigError("stability analysis needs at least two models");
    }
    StabilityReport report;
    report.group = std::move(group);
    report.feature_names = attributions.front().feature_names;
    for (const auto &a : attributions) {
        if (a.feature_names != report.feature_names) {
            throw ConfigError("stability analysis over models with different features");
        }
        report.summaries.push_back(importance_summary(a));
    }
    report.attributions = std::move(attributions);
    const std::size_t m = report.feature_names.size();
    const double n = static_cast<double>(report.summaries.size());
    report.mean_importance.assign(m, 0.0);
    report.std_importance.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double mean = 0.0;
        for (const auto &s : report.summaries) {
            mean += s.importance[j];
        }
        mean /= n;
        double var = 0.0;
        for (const auto &s : report.summaries) {
            var += (s.importance[j] - mean) * (s.importance[j] - mean);
        }
        report.mean_importance[j] = mean;
        report.std_importance[j] = std::sqrt(var / (n - 1.0));
    }
    return report;
}

StabilityReport ensemble_importance_stability(std::span<const PredictFn> models,
                                              const Dataset &background, const Dataset &test,
                                              const ShapOptions &options, std::uint64_t seed) {
    if (models.size() < 2) {
        throw ConfigError("stability analysis needs at least two models");
    }
    std::vector<AttributionResult> attributions;
    for (const auto &model : models) {
        attributions.push_back(explain_dataset(model, background, test, options, seed));
    }
    return stability_report(std::move(attributions));
}

Dataset select_background(const Dataset &pool, std::size_t size, std::uint64_t seed) {
    constexpr std::size_t kStrata = 10;
    if (size == 0) {
        throw ConfigError("background size must be >= 1");
    }
    if (pool.size() < size) {
        throw ValidationError("background of " + std::to_string(size) +
                              " rows requested from a pool of " + std::to_string(pool.size()));
    }
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pool.target(a) < pool.target(b);
    });
    Rng rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(size);
    for (std::size_t k = 0; k < kStrata; ++k) {
        const std::size_t begin = k * pool.size() / kStrata;
        const std::size_t end = (k + 1) * pool.size() / kStrata;
        const std::size_t want = size / kStrata + (k < size % kStrata ? 1 : 0);
        std::vector<std::size_t> stratum(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                         order.begin() + static_cast<std::ptrdiff_t>(end));
        if (stratum.size() < want) {
            throw ValidationError("target stratum " + std::to_string(k + 1) + " has only " +
                                  std::to_string(stratum.size()) + " rows");
        }
        for (std::size_t d = 0; d < want; ++d) {
            std::uniform_int_distribution<std::size_t> pick(d, stratum.size() - 1);
            std::swap(stratum[d], stratum[pick(rng)]);
            chosen.push_back(stratum[d]);
        }
    }
    return pool.select_rows(chosen);
}

void write_attribution_csv(std::span<const AttributionResult> results,
                           const std::filesystem::path &path, bool tag_models) {
    auto out = open_output(path);
    out << (tag_models ? "model_id," : "") << "instance_id,feature_name,shap_value\n";
    for (std::size_t mdl = 0; mdl < results.size(); ++mdl) {
        const auto &r = results[mdl];
        for (std::size_t i = 0; i < r.n_instances; ++i) {
            for (std::size_t j = 0; j < r.n_features(); ++j) {
                if (tag_models) {
                    out << mdl << ',';
                }
                out << i << ',' << r.feature_names[j] << ',' << format_double(r.value(i, j))
                    << '\n';
            }
        }
    }
    finish_output(out, path);
}

void write_summary_csv(std::span<const ImportanceSummary> summaries,
                       const std::filesystem::path &path, bool tag_models) {
    auto out = open_output(path);
    out << (tag_models ? "model_id," : "") << "feature_name,mean_abs_shap,rank\n";
    for (std::size_t mdl = 0; mdl < summaries.size(); ++mdl) {
        const auto &s = summaries[mdl];
        for (std::size_t j = 0; j < s.feature_names.size(); ++j) {
            if (tag_models) {
                out << mdl << ',';
            }
            out << s.feature_names[j] << ',' << format_double(s.importance[j]) << ','
                << s.rank[j] << '\n';
        }
    }
    finish_output(out, path);
}

void write_stability_csv(std::span<const StabilityReport> reports,
                         const std::filesystem::path &path) {
    auto out = open_output(path);
    out << "group,feature_name,mean_importance,std_importance,variance\n";
    for (const auto &report : reports) {
        for (std::size_t j = 0; j < report.feature_names.size(); ++j) {
            const double sd = report.std_importance[j];
            out << report.group << ',' << report.feature_names[j] << ','
                << format_double(report.mean_importance[j]) << ',' << format_double(sd) << ','
                << format_double(sd * sd) << '\n';
        }
    }
    finish_output(out, path);
}

} // namespace qcloud
