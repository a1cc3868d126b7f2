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
#include <filesystem>
#include <string>
#include <string_view>

#include "qcloud/data.hpp"
#include "qcloud/model.hpp"
#include "qcloud/training.hpp"

namespace qcloud {

inline constexpr std::string_view kCheckpointFormat = "qcloud-checkpoint";
inline constexpr int kCheckpointVersion = 1;

/// How the training rows were carved out of the input file.
struct SplitRecord {
    SplitFractions fractions{};
    std::uint64_t seed = 0;
};

/// Everything needed to reuse a trained model and to reproduce its run.
struct Checkpoint {
    Model model;
    ModelSpec spec;
    TrainConfig train_config;
    SplitRecord split;
};

/**
 * JSON document:
 *
 *   format, format_version, model_kind, feature_names,
 *   architecture   {n_qubits, n_enc, n_var} | {layer_sizes, activation},
 *   param_count, parameter_order (prose), parameters (flat array),
 *   scaling        {lo, hi, min[], max[], checksum},
 *   experiment     (same keys as the experiment config document),
 *   split          {train, validation, test, seed}.
 *
 * QNN parameter order: encoding blocks k = 1..n_enc (ZZ, XX, YY chains),
 * trailing blocks l = 1..n_var (ZZ, XX, YY chains, RX layer), w, b.
 * Doubles are printed in shortest round-trip form.
 */
void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path);
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path &path);

/**
 * Experiment config document (JSON object). Recognized keys, all optional:
 *
 *   epochs, batches_per_epoch, batch_size, learning_rate,
 *   optimizer ("plain_gd" | "adam"), seed, shots_in_training (int or null),
 *   gradient_method ("adjoint" | "parameter_shift"), patience (int or null),
 *   model: {kind, n_enc, n_var, activation, scale_lo, scale_hi}
 *
 * Keys present in the document override the passed-in values; unknown keys
 * are rejected.
 */
void apply_experiment_config(std::string_view json_text, TrainConfig &config, ModelSpec &spec);

/// Fully resolved experiment document for manifests and checkpoints.
[[nodiscard]] std::string experiment_config_json(const TrainConfig &config,
                                                 const ModelSpec &spec);

} // namespace qcloud
