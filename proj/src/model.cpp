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

#include "qcloud/model.hpp"

#include <algorithm>
#include <array>

#include "qcloud/error.hpp"

namespace qcloud {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

void check_names(const FeatureScaling &scaling, const std::vector<std::string> &names,
                 std::size_t arity) {
    if (names.size() != arity || scaling.n_features() != arity) {
        throw ConfigError("model arity " + std::to_string(arity) +
                          " does not match its feature list (" +
                          std::to_string(names.size()) + ") or scaling (" +
                          std::to_string(scaling.n_features()) + ")");
    }
}

} // namespace

std::string_view to_string(ModelKind kind) { return kind == ModelKind::qnn ? "qnn" : "mlp"; }

ModelKind parse_model_kind(std::string_view text) {
    if (text == "qnn") return ModelKind::qnn;
    if (text == "mlp") return ModelKind::mlp;
    throw ConfigError("unknown model kind '" + std::string(text) + "' (expected qnn or mlp)");
}

std::string_view to_string(Activation activation) {
    return activation == Activation::tanh ? "tanh" : "leaky_relu";
}

Activation parse_activation(std::string_view text) {
    if (text == "leaky_relu") return Activation::leaky_relu;
    if (text == "tanh") return Activation::tanh;
    throw ConfigError("unknown activation '" + std::string(text) +
                      "' (expected leaky_relu or tanh)");
}

Model::Model(QnnNetwork network, FeatureScaling scaling, std::vector<std::string> feature_names)
    : network_(std::move(network)), scaling_(std::move(scaling)), names_(std::move(feature_names)) {
    const auto &q = std::get<QnnNetwork>(network_);
    validate(q.config);
    if (!(q.params.config() == q.config)) {
        throw ConfigError("QNN parameters do not match the circuit configuration");
    }
    check_names(scaling_, names_, static_cast<std::size_t>(q.config.n_qubits));
}

Model::Model(MlpModel network, FeatureScaling scaling, std::vector<std::string> feature_names)
    : network_(std::move(network)), scaling_(std::move(scaling)), names_(std::move(feature_names)) {
    check_names(scaling_, names_,
                static_cast<std::size_t>(std::get<MlpModel>(network_).n_inputs()));
}

ModelKind Model::kind() const noexcept {
    return std::holds_alternative<QnnNetwork>(network_) ? ModelKind::qnn : ModelKind::mlp;
}

std::size_t Model::param_count() const noexcept { return parameters().size(); }

std::span<const double> Model::parameters() const noexcept {
    return std::visit(overloaded{
                          [](const QnnNetwork &q) { return q.params.values(); },
                          [](const MlpModel &m) { return m.parameters(); },
                      },
                      network_);
}

std::span<double> Model::parameters() noexcept {
    return std::visit(overloaded{
                          [](QnnNetwork &q) { return q.params.values(); },
                          [](MlpModel &m) { return m.parameters(); },
                      },
                      network_);
}

const QnnNetwork *Model::qnn() const noexcept { return std::get_if<QnnNetwork>(&network_); }
const MlpModel *Model::mlp() const noexcept { return std::get_if<MlpModel>(&network_); }

double Model::predict_scaled(std::span<const double> scaled) const {
    return std::visit(overloaded{
                          [&](const QnnNetwork &q) { return forward(q.config, q.params, scaled); },
                          [&](const MlpModel &m) { return mlp_forward(m, scaled); },
                      },
                      network_);
}

double Model::predict(std::span<const double> raw) const {
    return predict_scaled(scaling_.apply(raw));
}

double Model::predict_sampled(std::span<const double> raw, std::uint64_t n_shots,
                              Rng &rng) const {
    const auto *q = qnn();
    if (q == nullptr) {
        throw ConfigError("shot-noise prediction is only defined for the QNN");
    }
    return forward_sampled(q->config, q->params, scaling_.apply(raw), n_shots, rng);
}

PredictFn Model::predictor() const {
    return [this](std::span<const double> raw) { return predict(raw); };
}

PredictFn xu_randall_predictor(const std::vector<std::string> &feature_names,
                               const XuRandallConstants &constants) {
    validate(constants);
    std::array<std::size_t, 5> idx{};
    constexpr std::array<std::string_view, 5> kNeeded = {"qv", "qc", "qi", "ta", "pa"};
    for (std::size_t k = 0; k < kNeeded.size(); ++k) {
        const auto it = std::find(feature_names.begin(), feature_names.end(), kNeeded[k]);
        if (it == feature_names.end()) {
            throw ConfigError("Xu-Randall needs feature '" + std::string(kNeeded[k]) + "'");
        }
        idx[k] = static_cast<std::size_t>(it - feature_names.begin());
    }
    const std::size_t arity = feature_names.size();
    return [idx, arity, constants](std::span<const double> raw) {
        if (raw.size() != arity) {
            throw ConfigError("Xu-Randall predictor expects " + std::to_string(arity) +
                              " features");
        }
        return xu_randall_cloud_cover(raw[idx[0]], raw[idx[1]], raw[idx[2]], raw[idx[3]],
                                      raw[idx[4]], constants);
    };
}

} // namespace qcloud
