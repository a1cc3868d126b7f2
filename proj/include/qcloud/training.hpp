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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qcloud/data.hpp"
#include "qcloud/gradients.hpp"
#include "qcloud/model.hpp"

namespace qcloud {

enum class OptimizerKind { plain_gd, adam };

[[nodiscard]] std::string_view to_string(OptimizerKind kind);
[[nodiscard]] OptimizerKind parse_optimizer(std::string_view text);
/// 0.01 for plain gradient descent, 1e-3 for Adam.
[[nodiscard]] double default_learning_rate(OptimizerKind kind);

struct TrainConfig {
    int epochs = 200;
    int batches_per_epoch = 1000;
    int batch_size = 100;
    double learning_rate = 0.01;
    OptimizerKind optimizer = OptimizerKind::plain_gd;
    std::uint64_t seed = 0;
    /// Absent: exact expectations. Present: shot-noise parameter-shift gradients.
    std::optional<std::uint64_t> shots_in_training;
    /// Exact-gradient route for the QNN; both give the same gradient.
    GradientMethod gradient_method = GradientMethod::adjoint;
    /// Early stopping on validation MSE; off when absent.
    std::optional<int> patience;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
};

void validate(const TrainConfig &config);

/// What to build before training.
struct ModelSpec {
    ModelKind kind = ModelKind::qnn;
    /// n_qubits is taken from the dataset arity.
    int n_enc = 5;
    int n_var = 3;
    Activation activation = Activation::leaky_relu;
    /// Target interval of the min-max feature scaling.
    double scale_lo = 0.0;
    double scale_hi = 3.14159265358979323846;
};

/// [0, pi] for the QNN, [-1, 1] for the MLP.
[[nodiscard]] ModelSpec default_model_spec(ModelKind kind);

struct EpochRecord {
    int epoch = 0;
    double train_mse = 0.0;
    double val_mse = std::numeric_limits<double>::quiet_NaN();
    double val_r2 = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t param_hash = 0;
    double wall_seconds = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

/// Writes `epoch,train_mse,val_mse,val_r2`.
void write_history_csv(const TrainHistory &history, const std::filesystem::path &path);

/// Anything the minibatch loop can optimize. Inputs are already scaled.
class Trainable {
  public:
    virtual ~Trainable() = default;
    [[nodiscard]] virtual std::span<double> parameters() = 0;
    [[nodiscard]] virtual double predict(std::span<const double> x) const = 0;
    [[nodiscard]] virtual LossGradient loss_gradient(std::span<const LabeledRow> batch,
                                                     Rng &rng) const = 0;
};

/// Minibatch loop shared by every model kind. Each epoch starts from a fresh
/// seeded permutation of the training rows; a batch that runs past the end
/// continues on a reshuffled stream. After each epoch the full-train MSE and
/// (when `validation` is non-empty) validation MSE and R^2 are recorded.
[[nodiscard]] TrainHistory run_training(Trainable &model, const TrainConfig &config,
                                        const Dataset &train, const Dataset *validation);

struct TrainResult {
    Model model;
    TrainHistory history;
};

/// Fits the scaling on `train`, initializes the model from `config.seed`
/// and trains it. `validation` may be null.
[[nodiscard]] TrainResult train(const ModelSpec &spec, const TrainConfig &config,
                                const Dataset &train, const Dataset *validation = nullptr);

struct Metrics {
    double mse = 0.0;
    /// NaN when the targets have zero variance.
    double r2 = 0.0;
    bool r2_defined = true;
};

/// R^2 = 1 - SS_res / SS_tot around the dataset mean.
[[nodiscard]] Metrics score(std::span<const double> predictions, std::span<const double> targets);

[[nodiscard]] Metrics evaluate(const PredictFn &predict, const Dataset &dataset);

/// With `shots`, every prediction uses an independent shot-noise estimate.
[[nodiscard]] Metrics evaluate(const Model &model, const Dataset &dataset,
                               std::optional<std::uint64_t> shots, Rng &rng);

/// Marks the noiseless (infinite-shot) entry of a shot list.
inline constexpr std::uint64_t kExactShots = 0;

struct ShotSweepRow {
    std::uint64_t n_shots = 0; // kExactShots for the noiseless row
    double mean_r2 = 0.0;
    double std_r2 = 0.0;
    int repeats = 0;
};

/// Evaluates `repeats` times per shot count with fresh seeds derived from
/// (seed, n_shots, repeat). The kExactShots entry is one exact evaluation.
[[nodiscard]] std::vector<ShotSweepRow> shot_sweep(const Model &model, const Dataset &dataset,
                                                   std::span<const std::uint64_t> shots_list,
                                                   int repeats, std::uint64_t seed);

/// Writes `n_shots,mean_r2,std_r2,repeats`; the exact row prints n_shots as inf.
void write_shot_sweep_csv(std::span<const ShotSweepRow> rows, const std::filesystem::path &path);

struct EnsembleResult {
    std::vector<TrainResult> members;
    std::vector<Metrics> metrics;
    double min_r2 = 0.0;
    double mean_r2 = 0.0;
    double max_r2 = 0.0;
};

/// Trains instances with seeds base_seed + i and scores each on `evaluation`.
[[nodiscard]] EnsembleResult ensemble_train(int n_instances, std::uint64_t base_seed,
                                            const ModelSpec &spec, const TrainConfig &config,
                                            const Dataset &train, const Dataset *validation,
                                            const Dataset &evaluation);

} // namespace qcloud
