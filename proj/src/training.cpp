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

#include "qcloud/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>

#include "format.hpp"
#include "qcloud/error.hpp"
#include "qcloud/random.hpp"

namespace qcloud {

namespace {

using detail::format_double;

// Stream ids for derive_seed.
constexpr std::uint64_t kInitStream = 0;
constexpr std::uint64_t kShuffleStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

class QnnTrainable final : public Trainable {
  public:
    QnnTrainable(ParameterSet params, GradientMethod method,
                 std::optional<std::uint64_t> shots)
        : params_(std::move(params)), method_(method), shots_(shots) {}

    std::span<double> parameters() override { return params_.values(); }

    double predict(std::span<const double> x) const override {
        return forward(params_.config(), params_, x);
    }

    LossGradient loss_gradient(std::span<const LabeledRow> batch, Rng &rng) const override {
        if (shots_) {
            return sampled_loss_gradient(params_.config(), params_, batch, *shots_, rng);
        }
        return qcloud::loss_gradient(params_.config(), params_, batch, method_);
    }

    [[nodiscard]] const ParameterSet &params() const noexcept { return params_; }

  private:
    ParameterSet params_;
    GradientMethod method_;
    std::optional<std::uint64_t> shots_;
};

class MlpTrainable final : public Trainable {
  public:
    explicit MlpTrainable(MlpModel model) : model_(std::move(model)) {}

    std::span<double> parameters() override { return model_.parameters(); }

    double predict(std::span<const double> x) const override { return mlp_forward(model_, x); }

    LossGradient loss_gradient(std::span<const LabeledRow> batch, Rng &) const override {
        return mlp_gradient(model_, batch);
    }

    [[nodiscard]] const MlpModel &model() const noexcept { return model_; }

  private:
    MlpModel model_;
};

class Optimizer {
  public:
    Optimizer(const TrainConfig &config, std::size_t n)
        : config_(config), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::span<double> params, std::span<const double> grad) {
        const double lr = config_.learning_rate;
        if (config_.optimizer == OptimizerKind::plain_gd) {
            for (std::size_t j = 0; j < params.size(); ++j) {
                params[j] -= lr * grad[j];
            }
            return;
        }
        ++t_;
        const double b1 = config_.adam_beta1;
        const double b2 = config_.adam_beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
        for (std::size_t j = 0; j < params.size(); ++j) {
            m_[j] = b1 * m_[j] + (1.0 - b1) * grad[j];
            v_[j] = b2 * v_[j] + (1.0 - b2) * grad[j] * grad[j];
            const double m_hat = m_[j] / c1;
            const double v_hat = v_[j] / c2;
            params[j] -= lr * m_hat / (std::sqrt(v_hat) + config_.adam_epsilon);
        }
    }

  private:
    TrainConfig config_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::uint64_t t_ = 0;
};

Metrics score_trainable(const Trainable &model, const Dataset &data) {
    std::vector<double> predictions(data.size());
    const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        predictions[static_cast<std::size_t>(i)] =
            model.predict(data.row(static_cast<std::size_t>(i)));
    }
    return score(predictions, data.targets());
}

void check_same_features(const Model &model, const Dataset &dataset) {
    if (dataset.feature_names() != model.feature_names()) {
        std::string have;
        for (const auto &n : dataset.feature_names()) have += (have.empty() ? "" : ",") + n;
        std::string want;
        for (const auto &n : model.feature_names()) want += (want.empty() ? "" : ",") + n;
        throw ConfigError("feature mismatch: model expects [" + want + "] (" +
                          std::to_string(model.n_features()) + " features), data has [" +
                          have + "] (" + std::to_string(dataset.n_features()) + ")");
    }
}

} // namespace

std::string_view to_string(OptimizerKind kind) {
    return kind == OptimizerKind::adam ? "adam" : "plain_gd";
}

OptimizerKind parse_optimizer(std::string_view text) {
    if (text == "plain_gd") return OptimizerKind::plain_gd;
    if (text == "adam") return OptimizerKind::adam;
    throw ConfigError("unknown optimizer '" + std::string(text) + "' (expected plain_gd or adam)");
}

double default_learning_rate(OptimizerKind kind) {
    return kind == OptimizerKind::adam ? 1e-3 : 0.01;
}

void validate(const TrainConfig &c) {
    if (c.epochs < 0) throw ConfigError("epochs must be >= 0");
    if (c.batches_per_epoch < 1) throw ConfigError("batches_per_epoch must be >= 1");
    if (c.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(c.learning_rate >= 0.0) || !std::isfinite(c.learning_rate)) {
        throw ConfigError("learning_rate must be finite and >= 0");
    }
    if (c.shots_in_training && *c.shots_in_training == 0) {
        throw ConfigError("shots_in_training must be >= 1 when set");
    }
    if (c.patience && *c.patience < 1) throw ConfigError("patience must be >= 1");
}

ModelSpec default_model_spec(ModelKind kind) {
    ModelSpec spec;
    spec.kind = kind;
    if (kind == ModelKind::mlp) {
        spec.scale_lo = -1.0;
        spec.scale_hi = 1.0;
    } else {
        spec.scale_lo = 0.0;
        spec.scale_hi = std::numbers::pi;
    }
    return spec;
}

void write_history_csv(const TrainHistory &history, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << "epoch,train_mse,val_mse,val_r2\n";
    for (const auto &r : history.epochs) {
        out << r.epoch << ',' << format_double(r.train_mse) << ',' << format_double(r.val_mse)
            << ',' << format_double(r.val_r2) << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

TrainHistory run_training(Trainable &model, const TrainConfig &config, const Dataset &train,
                          const Dataset *validation) {
    validate(config);
    if (train.empty()) {
        throw ValidationError("training set is empty");
    }
    Rng shuffle_rng(derive_seed(config.seed, kShuffleStream));
    Rng noise_rng(derive_seed(config.seed, kNoiseStream));

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t cursor = 0;

    auto params = model.parameters();
    Optimizer optimizer(config, params.size());
    std::vector<LabeledRow> batch(static_cast<std::size_t>(config.batch_size));

    TrainHistory history;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        cursor = 0;
        for (int b = 0; b < config.batches_per_epoch; ++b) {
            for (auto &slot : batch) {
                if (cursor == order.size()) {
                    std::shuffle(order.begin(), order.end(), shuffle_rng);
                    cursor = 0;
                }
                const std::size_t r = order[cursor++];
                slot = LabeledRow{train.row(r), train.target(r)};
            }
            const LossGradient lg = model.loss_gradient(batch, noise_rng);
            const bool finite =
                std::isfinite(lg.mse) &&
                std::all_of(lg.gradient.begin(), lg.gradient.end(),
                            [](double g) { return std::isfinite(g); });
            if (!finite) {
                throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) +
                                     ", batch " + std::to_string(b + 1));
            }
            optimizer.step(params, lg.gradient);
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_mse = score_trainable(model, train).mse;
        if (validation != nullptr && !validation->empty()) {
            const Metrics m = score_trainable(model, *validation);
            record.val_mse = m.mse;
            record.val_r2 = m.r2;
        }
        if (!std::isfinite(record.train_mse)) {
            throw NumericalError("non-finite training MSE after epoch " + std::to_string(epoch));
        }
        record.param_hash = hash_doubles(params);
        record.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        history.epochs.push_back(record);

        if (config.patience && validation != nullptr && !validation->empty()) {
            if (record.val_mse < best_val) {
                best_val = record.val_mse;
                since_best = 0;
            } else if (++since_best >= *config.patience) {
                break;
            }
        }
    }
    return history;
}

TrainResult train(const ModelSpec &spec, const TrainConfig &config, const Dataset &train,
                  const Dataset *validation) {
    validate(config);
    if (train.empty()) {
        throw ValidationError("training set is empty");
    }
    if (validation != nullptr && validation->feature_names() != train.feature_names()) {
        throw ConfigError("validation features differ from training features");
    }
    const FeatureScaling scaling = fit_scaling(train, spec.scale_lo, spec.scale_hi);
    const Dataset scaled_train = apply_scaling(scaling, train);
    std::optional<Dataset> scaled_val;
    if (validation != nullptr && !validation->empty()) {
        scaled_val = apply_scaling(scaling, *validation);
    }
    const Dataset *val_ptr = scaled_val ? &*scaled_val : nullptr;
    Rng init_rng(derive_seed(config.seed, kInitStream));
    const int arity = static_cast<int>(train.n_features());

    if (spec.kind == ModelKind::qnn) {
        const CircuitConfig circuit{arity, spec.n_enc, spec.n_var};
        validate(circuit);
        QnnTrainable trainable(init_parameters(circuit, train.target_mean(), init_rng),
                               config.gradient_method, config.shots_in_training);
        TrainHistory history = run_training(trainable, config, scaled_train, val_ptr);
        return TrainResult{Model(QnnNetwork{circuit, trainable.params()}, scaling,
                                 train.feature_names()),
                           std::move(history)};
    }

    if (config.shots_in_training) {
        throw ConfigError("shots_in_training applies to the QNN only");
    }
    MlpModel mlp = MlpModel::cloud_cover(arity, spec.activation);
    mlp.init_glorot(init_rng);
    MlpTrainable trainable(std::move(mlp));
    TrainHistory history = run_training(trainable, config, scaled_train, val_ptr);
    return TrainResult{Model(trainable.model(), scaling, train.feature_names()),
                       std::move(history)};
}

Metrics score(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) {
        throw ConfigError("prediction and target counts differ");
    }
    if (targets.empty()) {
        throw ValidationError("cannot score an empty dataset");
    }
    const double n = static_cast<double>(targets.size());
    const double mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double r = predictions[i] - targets[i];
        const double d = targets[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    Metrics m;
    m.mse = ss_res / n;
    if (ss_tot > 0.0) {
        m.r2 = 1.0 - ss_res / ss_tot;
    } else {
        m.r2 = std::numeric_limits<double>::quiet_NaN();
        m.r2_defined = false;
    }
    return m;
}

Metrics evaluate(const PredictFn &predict, const Dataset &dataset) {
    if (dataset.empty()) {
        throw ValidationError("cannot evaluate on an empty dataset");
    }
    std::vector<double> predictions(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        predictions[i] = predict(dataset.row(i));
    }
    return score(predictions, dataset.targets());
}

Metrics evaluate(const Model &model, const Dataset &dataset, std::optional<std::uint64_t> shots,
                 Rng &rng) {
    check_same_features(model, dataset);
    if (dataset.empty()) {
        throw ValidationError("cannot evaluate on an empty dataset");
    }
    if (shots && *shots == 0) {
        throw ConfigError("shots must be >= 1");
    }
    std::vector<double> predictions(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        predictions[i] = shots ? model.predict_sampled(dataset.row(i), *shots, rng)
                               : model.predict(dataset.row(i));
    }
    return score(predictions, dataset.targets());
}

std::vector<ShotSweepRow> shot_sweep(const Model &model, const Dataset &dataset,
                                     std::span<const std::uint64_t> shots_list, int repeats,
                                     std::uint64_t seed) {
    if (shots_list.empty()) {
        throw ConfigError("shot sweep needs at least one shot count");
    }
    if (repeats < 1) {
        throw ConfigError("repeats must be >= 1");
    }
    check_same_features(model, dataset);
    if (model.kind() != ModelKind::qnn) {
        throw ConfigError("shot sweeps apply to the QNN only");
    }
    std::vector<ShotSweepRow> rows;
    for (const std::uint64_t shots : shots_list) {
        ShotSweepRow row;
        row.n_shots = shots;
        row.repeats = repeats;
        if (shots == kExactShots) {
            Rng unused(seed);
            row.mean_r2 = evaluate(model, dataset, std::nullopt, unused).r2;
            row.std_r2 = 0.0;
            row.repeats = 1;
            rows.push_back(row);
            continue;
        }
        std::vector<double> r2(static_cast<std::size_t>(repeats));
        const auto n_rep = static_cast<std::ptrdiff_t>(repeats);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < n_rep; ++k) {
            Rng rng(derive_seed(derive_seed(seed, shots), static_cast<std::uint64_t>(k)));
            r2[static_cast<std::size_t>(k)] = evaluate(model, dataset, shots, rng).r2;
        }
        const double mean = std::accumulate(r2.begin(), r2.end(), 0.0) / repeats;
        double var = 0.0;
        for (double v : r2) {
            var += (v - mean) * (v - mean);
        }
        row.mean_r2 = mean;
        row.std_r2 = repeats > 1 ? std::sqrt(var / (repeats - 1)) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_shot_sweep_csv(std::span<const ShotSweepRow> rows, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << "n_shots,mean_r2,std_r2,repeats\n";
    for (const auto &r : rows) {
        if (r.n_shots == kExactShots) {
            out << "inf";
        } else {
            out << r.n_shots;
        }
        out << ',' << format_double(r.mean_r2) << ',' << format_double(r.std_r2) << ','
            << r.repeats << '\n';
    }
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

EnsembleResult ensemble_train(int n_instances, std::uint64_t base_seed, const ModelSpec &spec,
                              const TrainConfig &config, const Dataset &train,
                              const Dataset *validation, const Dataset &evaluation) {
    if (n_instances < 2) {
        throw ConfigError("an ensemble needs at least 2 instances");
    }
    EnsembleResult out;
    for (int i = 0; i < n_instances; ++i) {
        TrainConfig member = config;
        member.seed = base_seed + static_cast<std::uint64_t>(i);
        out.members.push_back(qcloud::train(spec, member, train, validation));
        Rng unused(member.seed);
        out.metrics.push_back(evaluate(out.members.back().model, evaluation, std::nullopt, unused));
    }
    out.min_r2 = std::numeric_limits<double>::infinity();
    out.max_r2 = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto &m : out.metrics) {
        out.min_r2 = std::min(out.min_r2, m.r2);
        out.max_r2 = std::max(out.max_r2, m.r2);
        sum += m.r2;
    }
    out.mean_r2 = sum / n_instances;
    return out;
}

} // namespace qcloud
