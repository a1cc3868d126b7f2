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


/*
 * qcloud C API.
 *
 * Every function returning qc_status reports failure through the status code
 * and a thread-local message available from qc_last_error(). Handles are
 * opaque and owned by the caller; release them with the matching _free.
 * Strings returned as const char* stay valid until the owning handle is
 * freed (or, for qc_last_error, until the next failing call on the thread).
 */

#ifndef QCLOUD_QCLOUD_H
#define QCLOUD_QCLOUD_H

#include <stddef.h>
#include <stdint.h>

#if defined(QCLOUD_BUILDING_LIBRARY)
#define QC_API __attribute__((visibility("default")))
#else
#define QC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qc_status {
    QC_OK = 0,
    QC_ERR_USAGE = 1,
    QC_ERR_VALIDATION = 2,
    QC_ERR_NUMERICAL = 3,
    QC_ERR_IO = 4
} qc_status;

typedef enum qc_model_kind { QC_MODEL_QNN = 0, QC_MODEL_MLP = 1 } qc_model_kind;

typedef enum qc_shap_mode { QC_SHAP_EXACT = 0, QC_SHAP_SAMPLED = 1 } qc_shap_mode;

/* Shot count meaning "exact expectation values". */
#define QC_EXACT_SHOTS 0u

typedef struct qc_dataset qc_dataset;
typedef struct qc_model qc_model;

QC_API const char *qc_version(void);
QC_API const char *qc_generator_version(void);
QC_API const char *qc_last_error(void);
/* Worker threads for row-parallel work; 0 restores the runtime default. */
QC_API void qc_set_num_threads(int n);

/* ---- datasets ---- */

QC_API qc_status qc_dataset_synthesize(uint64_t n, uint64_t seed, double noise_sd,
                                       qc_dataset **out);
/* Sidecar JSON (seed, noise_sd, generator version, Xu-Randall constants);
 * only for datasets made by qc_dataset_synthesize. */
QC_API qc_status qc_dataset_save_synth_metadata(const qc_dataset *ds, const char *path);
/* features: "full", "reduced", a comma-separated column list, or NULL (full). */
QC_API qc_status qc_dataset_load_csv(const char *path, const char *features, qc_dataset **out);
/* Requires all eight feature columns. */
QC_API qc_status qc_dataset_save_csv(const qc_dataset *ds, const char *path);
QC_API size_t qc_dataset_rows(const qc_dataset *ds);
QC_API size_t qc_dataset_num_features(const qc_dataset *ds);
/* Comma-joined feature names. */
QC_API const char *qc_dataset_feature_names(const qc_dataset *ds);
/* Copies row i: num_features values into `features`, the target into `target`. */
QC_API qc_status qc_dataset_row(const qc_dataset *ds, size_t i, double *features, double *target);
/* Any output pointer may be NULL to skip that part. */
QC_API qc_status qc_dataset_split(const qc_dataset *ds, double train, double validation,
                                  double test, uint64_t seed, qc_dataset **train_out,
                                  qc_dataset **validation_out, qc_dataset **test_out);
QC_API qc_status qc_dataset_head(const qc_dataset *ds, size_t n, qc_dataset **out);
/* Target-stratified draw used as the SHAP background. */
QC_API qc_status qc_dataset_background(const qc_dataset *pool, size_t size, uint64_t seed,
                                       qc_dataset **out);
QC_API void qc_dataset_free(qc_dataset *ds);

/* ---- training and checkpoints ---- */

typedef struct qc_split_info {
    double train;
    double validation;
    double test;
    uint64_t seed;
} qc_split_info;

typedef struct qc_epoch_record {
    int epoch;
    double train_mse;
    double val_mse; /* NaN without validation data */
    double val_r2;
} qc_epoch_record;

/*
 * Resolves an experiment config document (JSON object, keys as documented in
 * the README; NULL means all defaults) for a model kind into the complete
 * document. The result is thread-local and valid until the next call.
 */
QC_API qc_status qc_experiment_resolve(qc_model_kind kind, const char *config_json,
                                       const char **resolved);

/*
 * Trains a model described by `config_json` (see qc_experiment_resolve) on
 * `train`; `validation` may be NULL. `split` is recorded in the checkpoint
 * and may be NULL.
 */
QC_API qc_status qc_model_train(qc_model_kind kind, const char *config_json,
                                const qc_dataset *train, const qc_dataset *validation,
                                const qc_split_info *split, qc_model **out);
QC_API qc_status qc_model_save(const qc_model *model, const char *path);
QC_API qc_status qc_model_load(const char *path, qc_model **out);
QC_API void qc_model_free(qc_model *model);

QC_API qc_model_kind qc_model_get_kind(const qc_model *model);
QC_API size_t qc_model_param_count(const qc_model *model);
QC_API size_t qc_model_num_features(const qc_model *model);
QC_API const char *qc_model_feature_names(const qc_model *model);
QC_API const char *qc_model_experiment_json(const qc_model *model);
QC_API qc_split_info qc_model_split_info(const qc_model *model);

/* Training history; empty for models loaded from a checkpoint. */
QC_API size_t qc_model_history_length(const qc_model *model);
QC_API qc_status qc_model_history_row(const qc_model *model, size_t i, qc_epoch_record *out);
QC_API qc_status qc_model_write_history_csv(const qc_model *model, const char *path);

/* Predicts from n_features raw physical values. */
QC_API qc_status qc_model_predict(const qc_model *model, const double *features,
                                  size_t n_features, double *out);

/* ---- analysis ---- */

typedef struct qc_metrics {
    size_t n;
    double mse;
    double r2; /* NaN when the targets have zero variance */
    int r2_defined;
} qc_metrics;

/* shots == QC_EXACT_SHOTS evaluates exactly; otherwise QNN only. */
QC_API qc_status qc_evaluate(const qc_model *model, const qc_dataset *ds, uint64_t shots,
                             uint64_t seed, qc_metrics *out);
QC_API qc_status qc_evaluate_xu_randall(const qc_dataset *ds, qc_metrics *out);

typedef struct qc_sweep_row {
    uint64_t n_shots; /* QC_EXACT_SHOTS for the noiseless row */
    double mean_r2;
    double std_r2;
    int repeats;
} qc_sweep_row;

/* Writes n_shots,mean_r2,std_r2,repeats to csv_path (may be NULL) and fills
 * `rows` (n_levels entries, may be NULL). */
QC_API qc_status qc_shot_sweep(const qc_model *model, const qc_dataset *ds,
                               const uint64_t *shots, size_t n_levels, int repeats,
                               uint64_t seed, const char *csv_path, qc_sweep_row *rows);

typedef struct qc_explain_options {
    size_t background_size;
    qc_shap_mode mode;
    size_t n_coalitions; /* sampled mode only */
    uint64_t seed;
} qc_explain_options;

QC_API void qc_explain_options_init(qc_explain_options *opts);

/*
 * KernelSHAP for every row of `test` under each model. The background is a
 * stratified draw from `background_pool`. Writes
 *   <out_prefix>values.csv     per-instance attributions,
 *   <out_prefix>summary.csv    mean |shap| and rank per feature,
 *   <out_prefix>base.csv       base value and degenerate-row count per model,
 *   <out_prefix>stability.csv  across-model importance spread (n_models > 1).
 * All models must share one feature list.
 */
QC_API qc_status qc_explain(const qc_model *const *models, size_t n_models,
                            const qc_dataset *background_pool, const qc_dataset *test,
                            const qc_explain_options *opts, const char *out_prefix);

typedef struct qc_compare_row {
    char name[16]; /* "qnn", "mlp" or "xu_randall" */
    qc_metrics metrics;
} qc_compare_row;

/* Exact metrics for the two checkpoints and the Xu-Randall scheme on `ds`;
 * writes model,n,mse,r2 to csv_path (may be NULL). */
QC_API qc_status qc_compare(const qc_model *qnn, const qc_model *mlp, const qc_dataset *ds,
                            const char *csv_path, qc_compare_row rows[3]);

#ifdef __cplusplus
}
#endif

#endif /* QCLOUD_QCLOUD_H */
