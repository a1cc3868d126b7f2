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
#include <span>
#include <vector>

#include "qcloud/gradients.hpp"
#include "qcloud/statevector.hpp"

namespace qcloud {

enum class Activation { leaky_relu, tanh };

/// Negative-side slope of the leaky ReLU.
inline constexpr double kLeakySlope = 0.01;

/**
 * Fully connected feed-forward regressor. Hidden layers use `activation`,
 * the output layer is the identity.
 *
 * Parameters are stored flat, layer by layer: the weight matrix
 * (fan_out x fan_in, row-major) followed by the bias vector.
 */
class MlpModel {
  public:
    /// `layer_sizes` lists every layer including input and output; the
    /// output size must be 1.
    MlpModel(std::vector<int> layer_sizes, Activation activation);

    /// n_inputs -> 12 -> 6 -> 2 -> 1.
    static MlpModel cloud_cover(int n_inputs,
                                Activation activation = Activation::leaky_relu);

    [[nodiscard]] const std::vector<int> &layer_sizes() const noexcept { return sizes_; }
    [[nodiscard]] Activation activation() const noexcept { return activation_; }
    [[nodiscard]] int n_inputs() const noexcept { return sizes_.front(); }
    [[nodiscard]] std::size_t n_layers() const noexcept { return sizes_.size() - 1; }
    [[nodiscard]] std::size_t param_count() const noexcept { return params_.size(); }

    [[nodiscard]] std::span<double> parameters() noexcept { return params_; }
    [[nodiscard]] std::span<const double> parameters() const noexcept { return params_; }

    [[nodiscard]] std::span<double> weights(std::size_t layer);
    [[nodiscard]] std::span<const double> weights(std::size_t layer) const;
    [[nodiscard]] std::span<double> biases(std::size_t layer);
    [[nodiscard]] std::span<const double> biases(std::size_t layer) const;

    /// Glorot-uniform weights, zero biases.
    void init_glorot(Rng &rng);

  private:
    std::vector<int> sizes_;
    Activation activation_;
    std::vector<double> params_;
    std::vector<std::size_t> offsets_; // start of each layer's weights
};

[[nodiscard]] double mlp_forward(const MlpModel &model, std::span<const double> features);

/// Reverse-mode gradient of the batch MSE, aligned with `parameters()`.
[[nodiscard]] LossGradient mlp_gradient(const MlpModel &model,
                                        std::span<const LabeledRow> batch);

} // namespace qcloud
