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

#include "qcloud/mlp.hpp"

#include <cmath>
#include <string>

#include "qcloud/error.hpp"

namespace qcloud {

namespace {

double activate(Activation a, double v) {
    if (a == Activation::tanh) {
        return std::tanh(v);
    }
    return v >= 0.0 ? v : kLeakySlope * v;
}

// Derivative expressed through the pre-activation value.
double activate_derivative(Activation a, double pre) {
    if (a == Activation::tanh) {
        const double t = std::tanh(pre);
        return 1.0 - t * t;
    }
    return pre >= 0.0 ? 1.0 : kLeakySlope;
}

void check_features(const MlpModel &model, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(model.n_inputs())) {
        throw ConfigError("MLP expects " + std::to_string(model.n_inputs()) +
                          " features, got " + std::to_string(x.size()));
    }
}

} // namespace

MlpModel::MlpModel(std::vector<int> layer_sizes, Activation activation)
    : sizes_(std::move(layer_sizes)), activation_(activation) {
    if (sizes_.size() < 2) {
        throw ConfigError("MLP needs at least an input and an output layer");
    }
    for (int s : sizes_) {
        if (s < 1) {
            throw ConfigError("MLP layer sizes must be positive");
        }
    }
    if (sizes_.back() != 1) {
        throw ConfigError("MLP output layer must have exactly one node");
    }
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_.push_back(total);
        const auto fan_in = static_cast<std::size_t>(sizes_[l]);
        const auto fan_out = static_cast<std::size_t>(sizes_[l + 1]);
        total += fan_out * fan_in + fan_out;
    }
    params_.assign(total, 0.0);
}

MlpModel MlpModel::cloud_cover(int n_inputs, Activation activation) {
    return MlpModel({n_inputs, 12, 6, 2, 1}, activation);
}

std::span<double> MlpModel::weights(std::size_t layer) {
    if (layer >= n_layers()) {
        throw ConfigError("MLP layer index out of range");
    }
    const auto n = static_cast<std::size_t>(sizes_[layer + 1] * sizes_[layer]);
    return std::span<double>(params_).subspan(offsets_[layer], n);
}

std::span<const double> MlpModel::weights(std::size_t layer) const {
    return const_cast<MlpModel *>(this)->weights(layer);
}

std::span<double> MlpModel::biases(std::size_t layer) {
    const auto w = weights(layer);
    return std::span<double>(params_).subspan(
        offsets_[layer] + w.size(), static_cast<std::size_t>(sizes_[layer + 1]));
}

std::span<const double> MlpModel::biases(std::size_t layer) const {
    return const_cast<MlpModel *>(this)->biases(layer);
}

void MlpModel::init_glorot(Rng &rng) {
    for (std::size_t l = 0; l < n_layers(); ++l) {
        const double limit =
            std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double &w : weights(l)) {
            w = dist(rng);
        }
        for (double &b : biases(l)) {
            b = 0.0;
        }
    }
}

double mlp_forward(const MlpModel &model, std::span<const double> features) {
    check_features(model, features);
    const auto &sizes = model.layer_sizes();
    std::vector<double> current(features.begin(), features.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        const auto fan_in = static_cast<std::size_t>(sizes[l]);
        const auto fan_out = static_cast<std::size_t>(sizes[l + 1]);
        const auto w = model.weights(l);
        const auto b = model.biases(l);
        const bool hidden = l + 1 < model.n_layers();
        next.assign(fan_out, 0.0);
        for (std::size_t o = 0; o < fan_out; ++o) {
            double acc = b[o];
            for (std::size_t i = 0; i < fan_in; ++i) {
                acc += w[o * fan_in + i] * current[i];
            }
            next[o] = hidden ? activate(model.activation(), acc) : acc;
        }
        current.swap(next);
    }
    return current.front();
}

LossGradient mlp_gradient(const MlpModel &model, std::span<const LabeledRow> batch) {
    if (batch.empty()) {
        throw ConfigError("MLP gradient needs a non-empty batch");
    }
    const auto &sizes = model.layer_sizes();
    const std::size_t n_layers = model.n_layers();
    LossGradient out;
    out.gradient.assign(model.param_count(), 0.0);
    const double scale = 2.0 / static_cast<double>(batch.size());

    // Per layer: pre-activations and outputs (index 0 holds the input).
    std::vector<std::vector<double>> pre(n_layers);
    std::vector<std::vector<double>> act(n_layers + 1);
    std::vector<double> delta;
    std::vector<double> prev_delta;

    double sse = 0.0;
    for (const auto &row : batch) {
        check_features(model, row.x);
        act[0].assign(row.x.begin(), row.x.end());
        for (std::size_t l = 0; l < n_layers; ++l) {
            const auto fan_in = static_cast<std::size_t>(sizes[l]);
            const auto fan_out = static_cast<std::size_t>(sizes[l + 1]);
            const auto w = model.weights(l);
            const auto b = model.biases(l);
            const bool hidden = l + 1 < n_layers;
            pre[l].assign(fan_out, 0.0);
            act[l + 1].assign(fan_out, 0.0);
            for (std::size_t o = 0; o < fan_out; ++o) {
                double acc = b[o];
                for (std::size_t i = 0; i < fan_in; ++i) {
                    acc += w[o * fan_in + i] * act[l][i];
                }
                pre[l][o] = acc;
                act[l + 1][o] = hidden ? activate(model.activation(), acc) : acc;
            }
        }
        const double residual = act[n_layers][0] - row.y;
        sse += residual * residual;

        // dLoss/d(pre-activation) of the output node.
        delta.assign(1, scale * residual);
        for (std::size_t l = n_layers; l-- > 0;) {
            const auto fan_in = static_cast<std::size_t>(sizes[l]);
            const auto fan_out = static_cast<std::size_t>(sizes[l + 1]);
            const auto w = model.weights(l);
            const std::size_t w_offset =
                static_cast<std::size_t>(w.data() - model.parameters().data());
            const std::size_t b_offset = w_offset + w.size();
            for (std::size_t o = 0; o < fan_out; ++o) {
                for (std::size_t i = 0; i < fan_in; ++i) {
                    out.gradient[w_offset + o * fan_in + i] += delta[o] * act[l][i];
                }
                out.gradient[b_offset + o] += delta[o];
            }
            if (l == 0) {
                break;
            }
            prev_delta.assign(fan_in, 0.0);
            for (std::size_t i = 0; i < fan_in; ++i) {
                double acc = 0.0;
                for (std::size_t o = 0; o < fan_out; ++o) {
                    acc += w[o * fan_in + i] * delta[o];
                }
                prev_delta[i] = acc * activate_derivative(model.activation(), pre[l - 1][i]);
            }
            delta.swap(prev_delta);
        }
    }
    out.mse = sse / static_cast<double>(batch.size());
    return out;
}

} // namespace qcloud
