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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qcloud/data.hpp"
#include "qcloud/mlp.hpp"
#include "qcloud/qnn.hpp"

namespace qcloud {

enum class ModelKind { qnn, mlp };

[[nodiscard]] std::string_view to_string(ModelKind kind);
[[nodiscard]] ModelKind parse_model_kind(std::string_view text);
[[nodiscard]] std::string_view to_string(Activation activation);
[[nodiscard]] Activation parse_activation(std::string_view text);

/// Shared prediction interface: raw physical features in, cloud cover out.
/// Implementations must be safe to call concurrently.
using PredictFn = std::function<double(std::span<const double>)>;

struct QnnNetwork {
    CircuitConfig config;
    ParameterSet params;
};

/// A regressor bundled with the feature scaling it was trained with.
class Model {
  public:
    Model(QnnNetwork network, FeatureScaling scaling,
          std::vector<std::string> feature_names);
    Model(MlpModel network, FeatureScaling scaling,
          std::vector<std::string> feature_names);

    [[nodiscard]] ModelKind kind() const noexcept;
    [[nodiscard]] const std::vector<std::string> &feature_names() const noexcept {
        return names_;
    }
    [[nodiscard]] std::size_t n_features() const noexcept { return names_.size(); }
    [[nodiscard]] const FeatureScaling &scaling() const noexcept { return scaling_; }
    [[nodiscard]] std::size_t param_count() const noexcept;
    [[nodiscard]] std::span<const double> parameters() const noexcept;
    [[nodiscard]] std::span<double> parameters() noexcept;

    /// Null unless the model is of that kind.
    [[nodiscard]] const QnnNetwork *qnn() const noexcept;
    [[nodiscard]] const MlpModel *mlp() const noexcept;

    /// Prediction from already-scaled inputs (rotation angles for the QNN).
    [[nodiscard]] double predict_scaled(std::span<const double> scaled) const;
    [[nodiscard]] double predict(std::span<const double> raw) const;
    /// Shot-noise prediction; QNN only (ConfigError for the MLP).
    [[nodiscard]] double predict_sampled(std::span<const double> raw,
                                         std::uint64_t n_shots, Rng &rng) const;

    [[nodiscard]] PredictFn predictor() const;

  private:
    std::variant<QnnNetwork, MlpModel> network_;
    FeatureScaling scaling_;
    std::vector<std::string> names_;
};

/// Xu-Randall cloud cover from a raw feature row; the column positions of
/// qv, qc, qi, ta and pa are looked up from `feature_names`.
[[nodiscard]] PredictFn xu_randall_predictor(const std::vector<std::string> &feature_names,
                                             const XuRandallConstants &constants = {});

} // namespace qcloud
