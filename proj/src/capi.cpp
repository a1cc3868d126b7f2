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


#include "qcloud/qcloud.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "format.hpp"
#include "qcloud/checkpoint.hpp"
#include "qcloud/data.hpp"
#include "qcloud/error.hpp"
#include "qcloud/explain.hpp"
#include "qcloud/model.hpp"
#include "qcloud/training.hpp"

struct qc_dataset {
    qcloud::Dataset data;
    std::string names;
    std::optional<qcloud::SynthOptions> synth;
};

struct qc_model {
    qcloud::Checkpoint checkpoint;
    qcloud::TrainHistory history;
    std::string names;
    std::string experiment;
};

namespace {

using qcloud::detail::format_double;

thread_local std::string g_last_error;
thread_local std::string g_resolved;

std::string join(const std::vector<std::string> &names) {
    std::string out;
    for (const auto &n : names) {
        out += (out.empty() ? "" : ",") + n;
    }
    return out;
}

qc_dataset *wrap(qcloud::Dataset ds) {
    std::string names = join(ds.feature_names());
    return new qc_dataset{std::move(ds), std::move(names), std::nullopt};
}

qc_model *wrap(qcloud::Checkpoint cp, qcloud::TrainHistory history) {
    std::string names = join(cp.model.feature_names());
    std::string experiment = qcloud::experiment_config_json(cp.train_config, cp.spec);
    return new qc_model{std::move(cp), std::move(history), std::move(names),
                        std::move(experiment)};
}

qc_status fail(qc_status code, std::string message) {
    g_last_error = std::move(message);
    return code;
}

template <typename Fn>
qc_status guarded(Fn &&fn) {
    try {
        fn();
        return QC_OK;
    } catch (const qcloud::Error &e) {
        return fail(static_cast<qc_status>(e.code()), e.what());
    } catch (const std::bad_alloc &) {
        return fail(QC_ERR_NUMERICAL, "out of memory");
    } catch (const std::exception &e) {
        return fail(QC_ERR_VALIDATION, e.what());
    } catch (...) {
        return fail(QC_ERR_VALIDATION, "unknown error");
    }
}

void require(bool ok, const std::string &what) {
    if (!ok) {
        throw qcloud::Error(qcloud::ErrorCode::usage, what);
    }
}

qcloud::ModelKind to_kind(qc_model_kind kind) {
    switch (kind) {
    case QC_MODEL_QNN:
        return qcloud::ModelKind::qnn;
    case QC_MODEL_MLP:
        return qcloud::ModelKind::mlp;
    }
    throw qcloud::Error(qcloud::ErrorCode::usage, "unknown model kind");
}

void resolve(qc_model_kind kind, const char *config_json, qcloud::TrainConfig &config,
             qcloud::ModelSpec &spec) {
    spec = qcloud::default_model_spec(to_kind(kind));
    if (config_json != nullptr && *config_json != '\0') {
        qcloud::apply_experiment_config(config_json, config, spec);
    }
    if (spec.kind != to_kind(kind)) {
        throw qcloud::ConfigError("experiment config selects model kind '" +
                                  std::string(qcloud::to_string(spec.kind)) + "' but '" +
                                  std::string(qcloud::to_string(to_kind(kind))) +
                                  "' was requested");
    }
    qcloud::validate(config);
}

// The model's columns taken from `ds`, which may carry extra features.
qcloud::Dataset columns_for(const qcloud::Model &model, const qcloud::Dataset &ds) {
    if (ds.feature_names() == model.feature_names()) {
        return ds;
    }
    for (const auto &name : model.feature_names()) {
        if (!ds.feature_index(name)) {
            throw qcloud::ConfigError("feature mismatch: model expects [" +
                                      join(model.feature_names()) + "] (" +
                                      std::to_string(model.n_features()) +
                                      " features), data has [" + join(ds.feature_names()) +
                                      "] (" + std::to_string(ds.n_features()) + ")");
        }
    }
    return ds.select_features(model.feature_names());
}

void fill(qc_metrics *out, const qcloud::Metrics &m, std::size_t n) {
    out->n = n;
    out->mse = m.mse;
    out->r2 = m.r2;
    out->r2_defined = m.r2_defined ? 1 : 0;
}

std::ofstream open_csv(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw qcloud::IoError("cannot write '" + path + "'");
    }
    return out;
}

void close_csv(std::ofstream &out, const std::string &path) {
    out.close();
    if (!out) {
        throw qcloud::IoError("write to '" + path + "' failed");
    }
}

} // namespace

extern "C" {

const char *qc_version(void) { return QCLOUD_VERSION_STRING; }

const char *qc_generator_version(void) { return qcloud::kGeneratorVersion.data(); }

const char *qc_last_error(void) { return g_last_error.c_str(); }

void qc_set_num_threads(int n) {
#ifdef _OPENMP
    static const int initial = omp_get_max_threads();
    omp_set_num_threads(n > 0 ? n : initial);
#else
    (void)n;
#endif
}

qc_status qc_dataset_synthesize(uint64_t n, uint64_t seed, double noise_sd, qc_dataset **out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        qcloud::SynthOptions options;
        options.n = static_cast<std::size_t>(n);
        options.seed = seed;
        options.noise_sd = noise_sd;
        *out = wrap(qcloud::synthesize_dataset(options));
        (*out)->synth = options;
    });
}

qc_status qc_dataset_save_synth_metadata(const qc_dataset *ds, const char *path) {
    return guarded([&] {
        require(ds != nullptr && path != nullptr, "null argument");
        require(ds->synth.has_value(), "dataset was not produced by the synthetic generator");
        qcloud::write_synth_metadata(*ds->synth, path);
    });
}

qc_status qc_dataset_load_csv(const char *path, const char *features, qc_dataset **out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        const auto names = qcloud::parse_feature_subset(features ? features : "full");
        *out = wrap(qcloud::load_csv(path, names));
    });
}

qc_status qc_dataset_save_csv(const qc_dataset *ds, const char *path) {
    return guarded([&] {
        require(ds != nullptr && path != nullptr, "null argument");
        qcloud::write_csv(ds->data, path);
    });
}

size_t qc_dataset_rows(const qc_dataset *ds) { return ds ? ds->data.size() : 0; }

size_t qc_dataset_num_features(const qc_dataset *ds) { return ds ? ds->data.n_features() : 0; }

const char *qc_dataset_feature_names(const qc_dataset *ds) { return ds ? ds->names.c_str() : ""; }

qc_status qc_dataset_row(const qc_dataset *ds, size_t i, double *features, double *target) {
    return guarded([&] {
        require(ds != nullptr, "null dataset");
        require(i < ds->data.size(), "row " + std::to_string(i) + " out of range for " +
                                         std::to_string(ds->data.size()) + " rows");
        if (features != nullptr) {
            const auto row = ds->data.row(i);
            std::copy(row.begin(), row.end(), features);
        }
        if (target != nullptr) {
            *target = ds->data.target(i);
        }
    });
}

qc_status qc_dataset_split(const qc_dataset *ds, double train, double validation, double test,
                           uint64_t seed, qc_dataset **train_out, qc_dataset **validation_out,
                           qc_dataset **test_out) {
    return guarded([&] {
        require(ds != nullptr, "null dataset");
        auto parts = qcloud::split(ds->data, {train, validation, test}, seed);
        if (train_out) *train_out = wrap(std::move(parts.train));
        if (validation_out) *validation_out = wrap(std::move(parts.validation));
        if (test_out) *test_out = wrap(std::move(parts.test));
    });
}

qc_status qc_dataset_head(const qc_dataset *ds, size_t n, qc_dataset **out) {
    return guarded([&] {
        require(ds != nullptr && out != nullptr, "null argument");
        std::vector<std::size_t> rows(std::min(n, ds->data.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
        *out = wrap(ds->data.select_rows(rows));
    });
}

qc_status qc_dataset_background(const qc_dataset *pool, size_t size, uint64_t seed,
                                qc_dataset **out) {
    return guarded([&] {
        require(pool != nullptr && out != nullptr, "null argument");
        *out = wrap(qcloud::select_background(pool->data, size, seed));
    });
}

void qc_dataset_free(qc_dataset *ds) { delete ds; }

qc_status qc_experiment_resolve(qc_model_kind kind, const char *config_json,
                                const char **resolved) {
    return guarded([&] {
        require(resolved != nullptr, "null output");
        qcloud::TrainConfig config;
        qcloud::ModelSpec spec;
        resolve(kind, config_json, config, spec);
        g_resolved = qcloud::experiment_config_json(config, spec);
        *resolved = g_resolved.c_str();
    });
}

qc_status qc_model_train(qc_model_kind kind, const char *config_json, const qc_dataset *train,
                         const qc_dataset *validation, const qc_split_info *split,
                         qc_model **out) {
    return guarded([&] {
        require(train != nullptr && out != nullptr, "null argument");
        qcloud::TrainConfig config;
        qcloud::ModelSpec spec;
        resolve(kind, config_json, config, spec);
        auto result = qcloud::train(spec, config, train->data,
                                    validation ? &validation->data : nullptr);
        qcloud::SplitRecord record;
        if (split != nullptr) {
            record.fractions = {split->train, split->validation, split->test};
            record.seed = split->seed;
        }
        *out = wrap(qcloud::Checkpoint{std::move(result.model), spec, config, record},
                    std::move(result.history));
    });
}

qc_status qc_model_save(const qc_model *model, const char *path) {
    return guarded([&] {
        require(model != nullptr && path != nullptr, "null argument");
        qcloud::save_checkpoint(model->checkpoint, path);
    });
}

qc_status qc_model_load(const char *path, qc_model **out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = wrap(qcloud::load_checkpoint(path), {});
    });
}

void qc_model_free(qc_model *model) { delete model; }

qc_model_kind qc_model_get_kind(const qc_model *model) {
    return model && model->checkpoint.model.kind() == qcloud::ModelKind::mlp ? QC_MODEL_MLP
                                                                             : QC_MODEL_QNN;
}

size_t qc_model_param_count(const qc_model *model) {
    return model ? model->checkpoint.model.param_count() : 0;
}

size_t qc_model_num_features(const qc_model *model) {
    return model ? model->checkpoint.model.n_features() : 0;
}

const char *qc_model_feature_names(const qc_model *model) {
    return model ? model->names.c_str() : "";
}

const char *qc_model_experiment_json(const qc_model *model) {
    return model ? model->experiment.c_str() : "";
}

qc_split_info qc_model_split_info(const qc_model *model) {
    qc_split_info info{};
    if (model != nullptr) {
        const auto &s = model->checkpoint.split;
        info = {s.fractions.train, s.fractions.validation, s.fractions.test, s.seed};
    }
    return info;
}

size_t qc_model_history_length(const qc_model *model) {
    return model ? model->history.epochs.size() : 0;
}

qc_status qc_model_history_row(const qc_model *model, size_t i, qc_epoch_record *out) {
    return guarded([&] {
        require(model != nullptr && out != nullptr, "null argument");
        require(i < model->history.epochs.size(), "history row out of range");
        const auto &e = model->history.epochs[i];
        *out = {e.epoch, e.train_mse, e.val_mse, e.val_r2};
    });
}

qc_status qc_model_write_history_csv(const qc_model *model, const char *path) {
    return guarded([&] {
        require(model != nullptr && path != nullptr, "null argument");
        qcloud::write_history_csv(model->history, path);
    });
}

qc_status qc_model_predict(const qc_model *model, const double *features, size_t n_features,
                           double *out) {
    return guarded([&] {
        require(model != nullptr && features != nullptr && out != nullptr, "null argument");
        const auto &m = model->checkpoint.model;
        if (n_features != m.n_features()) {
            throw qcloud::ConfigError("model expects " + std::to_string(m.n_features()) +
                                      " features, got " + std::to_string(n_features));
        }
        *out = m.predict(std::span<const double>(features, n_features));
    });
}

qc_status qc_evaluate(const qc_model *model, const qc_dataset *ds, uint64_t shots, uint64_t seed,
                      qc_metrics *out) {
    return guarded([&] {
        require(model != nullptr && ds != nullptr && out != nullptr, "null argument");
        const auto &m = model->checkpoint.model;
        const qcloud::Dataset data = columns_for(m, ds->data);
        qcloud::Rng rng(seed);
        const auto metrics = qcloud::evaluate(
            m, data, shots == QC_EXACT_SHOTS ? std::nullopt : std::optional<std::uint64_t>(shots),
            rng);
        fill(out, metrics, data.size());
    });
}

qc_status qc_evaluate_xu_randall(const qc_dataset *ds, qc_metrics *out) {
    return guarded([&] {
        require(ds != nullptr && out != nullptr, "null argument");
        const auto metrics =
            qcloud::evaluate(qcloud::xu_randall_predictor(ds->data.feature_names()), ds->data);
        fill(out, metrics, ds->data.size());
    });
}

qc_status qc_shot_sweep(const qc_model *model, const qc_dataset *ds, const uint64_t *shots,
                        size_t n_levels, int repeats, uint64_t seed, const char *csv_path,
                        qc_sweep_row *rows) {
    return guarded([&] {
        require(model != nullptr && ds != nullptr && shots != nullptr, "null argument");
        const auto &m = model->checkpoint.model;
        const qcloud::Dataset data = columns_for(m, ds->data);
        const auto result = qcloud::shot_sweep(
            m, data, std::span<const std::uint64_t>(shots, n_levels), repeats, seed);
        if (csv_path != nullptr) {
            qcloud::write_shot_sweep_csv(result, csv_path);
        }
        if (rows != nullptr) {
            for (std::size_t i = 0; i < result.size(); ++i) {
                rows[i] = {result[i].n_shots, result[i].mean_r2, result[i].std_r2,
                           result[i].repeats};
            }
        }
    });
}

void qc_explain_options_init(qc_explain_options *opts) {
    if (opts != nullptr) {
        opts->background_size = 100;
        opts->mode = QC_SHAP_EXACT;
        opts->n_coalitions = qcloud::ShapOptions{}.n_coalitions;
        opts->seed = 0;
    }
}

qc_status qc_explain(const qc_model *const *models, size_t n_models,
                     const qc_dataset *background_pool, const qc_dataset *test,
                     const qc_explain_options *opts, const char *out_prefix) {
    return guarded([&] {
        require(models != nullptr && n_models > 0 && background_pool != nullptr &&
                    test != nullptr && opts != nullptr && out_prefix != nullptr,
                "null argument");
        const auto &names = models[0]->checkpoint.model.feature_names();
        for (std::size_t k = 0; k < n_models; ++k) {
            require(models[k] != nullptr, "null model");
            if (models[k]->checkpoint.model.feature_names() != names) {
                throw qcloud::ConfigError("all explained models must share one feature list");
            }
        }
        const qcloud::Model &first = models[0]->checkpoint.model;
        const qcloud::Dataset pool = columns_for(first, background_pool->data);
        const qcloud::Dataset data = columns_for(first, test->data);
        const qcloud::Dataset background =
            qcloud::select_background(pool, opts->background_size, opts->seed);

        qcloud::ShapOptions options;
        options.mode = opts->mode == QC_SHAP_SAMPLED ? qcloud::ShapMode::sampled
                                                     : qcloud::ShapMode::exact;
        options.n_coalitions = opts->n_coalitions;

        std::vector<qcloud::AttributionResult> results;
        std::vector<qcloud::ImportanceSummary> summaries;
        std::map<std::string, std::vector<qcloud::AttributionResult>> by_kind;
        for (std::size_t k = 0; k < n_models; ++k) {
            const qcloud::Model &model = models[k]->checkpoint.model;
            results.push_back(qcloud::explain_dataset(model.predictor(), background, data,
                                                      options, opts->seed));
            summaries.push_back(qcloud::importance_summary(results.back()));
            by_kind[std::string(qcloud::to_string(model.kind()))].push_back(results.back());
        }

        const std::string prefix(out_prefix);
        const bool tag = n_models > 1;
        qcloud::write_attribution_csv(results, prefix + "values.csv", tag);
        qcloud::write_summary_csv(summaries, prefix + "summary.csv", tag);

        const std::string base_path = prefix + "base.csv";
        auto base = open_csv(base_path);
        base << "model_id,model_kind,base_value,degenerate_rows\n";
        for (std::size_t k = 0; k < n_models; ++k) {
            base << k << ',' << qcloud::to_string(models[k]->checkpoint.model.kind()) << ','
                 << format_double(results[k].base_value) << ',' << results[k].degenerate_rows
                 << '\n';
        }
        close_csv(base, base_path);

        if (n_models > 1) {
            std::vector<qcloud::StabilityReport> reports;
            if (by_kind.size() > 1) {
                reports.push_back(qcloud::stability_report(results, "all"));
            }
            for (auto &[kind, attributions] : by_kind) {
                if (attributions.size() > 1) {
                    reports.push_back(qcloud::stability_report(std::move(attributions), kind));
                }
            }
            qcloud::write_stability_csv(reports, prefix + "stability.csv");
        }
    });
}

qc_status qc_compare(const qc_model *qnn, const qc_model *mlp, const qc_dataset *ds,
                     const char *csv_path, qc_compare_row rows[3]) {
    return guarded([&] {
        require(qnn != nullptr && mlp != nullptr && ds != nullptr, "null argument");
        require(qnn->checkpoint.model.kind() == qcloud::ModelKind::qnn &&
                    mlp->checkpoint.model.kind() == qcloud::ModelKind::mlp,
                "compare expects a QNN and an MLP checkpoint, in that order");
        qcloud::Rng unused(0);
        const char *labels[3] = {"qnn", "mlp", "xu_randall"};
        qcloud::Metrics metrics[3];
        std::size_t n[3];
        for (int k = 0; k < 2; ++k) {
            const auto &m = (k == 0 ? qnn : mlp)->checkpoint.model;
            const qcloud::Dataset data = columns_for(m, ds->data);
            metrics[k] = qcloud::evaluate(m, data, std::nullopt, unused);
            n[k] = data.size();
        }
        metrics[2] =
            qcloud::evaluate(qcloud::xu_randall_predictor(ds->data.feature_names()), ds->data);
        n[2] = ds->data.size();

        if (csv_path != nullptr) {
            const std::string path(csv_path);
            auto out = open_csv(path);
            out << "model,n,mse,r2\n";
            for (int k = 0; k < 3; ++k) {
                out << labels[k] << ',' << n[k] << ',' << format_double(metrics[k].mse) << ','
                    << format_double(metrics[k].r2) << '\n';
            }
            close_csv(out, path);
        }
        if (rows != nullptr) {
            for (int k = 0; k < 3; ++k) {
                std::memset(rows[k].name, 0, sizeof rows[k].name);
                std::strncpy(rows[k].name, labels[k], sizeof rows[k].name - 1);
                fill(&rows[k].metrics, metrics[k], n[k]);
            }
        }
    });
}

} // extern "C"
