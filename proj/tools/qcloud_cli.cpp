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


// qcloud command-line driver. Talks to the library through the C API only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcloud/qcloud.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit code carrying an already-formatted message.
struct CliError {
    int code;
    std::string message;
};

void check(qc_status status) {
    if (status != QC_OK) {
        throw CliError{static_cast<int>(status), qc_last_error()};
    }
}

using DatasetPtr = std::unique_ptr<qc_dataset, decltype(&qc_dataset_free)>;
using ModelPtr = std::unique_ptr<qc_model, decltype(&qc_model_free)>;

DatasetPtr own(qc_dataset *ds) { return {ds, &qc_dataset_free}; }
ModelPtr own(qc_model *m) { return {m, &qc_model_free}; }

DatasetPtr load_dataset(const std::string &path, const std::string &features) {
    qc_dataset *ds = nullptr;
    check(qc_dataset_load_csv(path.c_str(), features.c_str(), &ds));
    return own(ds);
}

ModelPtr load_model(const std::string &path) {
    qc_model *m = nullptr;
    check(qc_model_load(path.c_str(), &m));
    return own(m);
}

std::string kind_name(qc_model_kind kind) { return kind == QC_MODEL_QNN ? "qnn" : "mlp"; }

json split_json(const qc_split_info &s) {
    return {{"train", s.train}, {"validation", s.validation}, {"test", s.test}, {"seed", s.seed}};
}

// The rows of `ds` named by `part` under the split the model was trained with.
DatasetPtr select_part(const qc_dataset *ds, const qc_split_info &s, const std::string &part) {
    if (part == "all") {
        qc_dataset *copy = nullptr;
        check(qc_dataset_head(ds, qc_dataset_rows(ds), &copy));
        return own(copy);
    }
    qc_dataset *train = nullptr;
    qc_dataset *val = nullptr;
    qc_dataset *test = nullptr;
    check(qc_dataset_split(ds, s.train, s.validation, s.test, s.seed, &train, &val, &test));
    auto t = own(train);
    auto v = own(val);
    auto e = own(test);
    if (part == "train") return t;
    if (part == "val") return v;
    return e;
}

std::vector<double> parse_fractions(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception &) {
            throw CliError{1, "--split: '" + item + "' is not a number"};
        }
    }
    if (out.size() != 3) {
        throw CliError{1, "--split expects three comma-separated fractions"};
    }
    return out;
}

std::vector<std::uint64_t> parse_shots(const std::string &text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf" || item == "exact") {
            out.push_back(QC_EXACT_SHOTS);
            continue;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size() || v < 1 || v != std::floor(v)) {
                throw std::invalid_argument(item);
            }
            out.push_back(static_cast<std::uint64_t>(v));
        } catch (const std::exception &) {
            throw CliError{1, "--shots: '" + item + "' is neither a positive integer nor inf"};
        }
    }
    if (out.empty()) {
        throw CliError{1, "--shots needs at least one entry"};
    }
    return out;
}

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CliError{4, "cannot read '" + path + "'"};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        throw CliError{4, "cannot write '" + path + "'"};
    }
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Shared state of one command invocation.
struct Run {
    std::string command;
    std::vector<std::string> argv;
    bool force = false;
    std::vector<std::string> outputs;
    std::string manifest_path;
    json manifest = json::object();

    void claim(const std::string &path) { outputs.push_back(path); }

    void check_outputs() const {
        if (force) return;
        std::vector<std::string> all = outputs;
        all.push_back(manifest_path);
        for (const auto &p : all) {
            if (fs::exists(p)) {
                throw CliError{4, "refusing to overwrite '" + p + "' (pass --force)"};
            }
        }
    }

    void finish(double seconds) {
        manifest["command"] = command;
        manifest["argv"] = argv;
        manifest["version"] = qc_version();
        manifest["outputs"] = outputs;
        manifest["wall_clock_seconds"] = seconds;
        manifest["finished_at"] = utc_now();
        manifest["working_directory"] = fs::current_path().string();
        write_text(manifest_path, manifest.dump(2) + "\n");
    }
};

// ---- subcommands ----

struct SynthArgs {
    std::uint64_t n = 1000;
    std::uint64_t seed = 0;
    double noise_sd = 0.02;
    std::string out;
};

void run_synth(Run &run, const SynthArgs &a) {
    const std::string meta_path = a.out + ".meta.json";
    run.manifest_path = a.out + ".manifest.json";
    run.claim(a.out);
    run.claim(meta_path);
    run.check_outputs();
    qc_dataset *raw = nullptr;
    check(qc_dataset_synthesize(a.n, a.seed, a.noise_sd, &raw));
    auto ds = own(raw);
    check(qc_dataset_save_csv(ds.get(), a.out.c_str()));
    check(qc_dataset_save_synth_metadata(ds.get(), meta_path.c_str()));
    run.manifest["config"] = {{"n", a.n}, {"noise_sd", a.noise_sd},
                              {"generator_version", qc_generator_version()}};
    run.manifest["seeds"] = {{"seed", a.seed}};
    run.manifest["inputs"] = json::object();
    std::cout << "wrote " << qc_dataset_rows(ds.get()) << " rows to " << a.out << "\n";
}

struct TrainArgs {
    std::string data;
    std::string model;
    std::string config_path;
    std::string features = "full";
    std::string split = "0.7,0.1,0.2";
    std::uint64_t split_seed = 0;
    std::string out;
    // Experiment overrides; applied on top of --config.
    std::optional<int> epochs, batches_per_epoch, batch_size, n_enc, n_var, patience;
    std::optional<double> learning_rate;
    std::optional<std::string> optimizer, activation, gradient_method;
    std::optional<std::uint64_t> seed, shots_in_training;
};

void run_train(Run &run, const TrainArgs &a) {
    const qc_model_kind kind = a.model == "qnn" ? QC_MODEL_QNN : QC_MODEL_MLP;
    const std::string history_path = a.out + ".history.csv";
    run.manifest_path = a.out + ".manifest.json";
    run.claim(a.out);
    run.claim(history_path);
    run.check_outputs();

    json config = json::object();
    if (!a.config_path.empty()) {
        try {
            config = json::parse(read_text(a.config_path));
        } catch (const json::exception &e) {
            throw CliError{2, "malformed config '" + a.config_path + "': " + e.what()};
        }
        if (!config.is_object()) {
            throw CliError{2, "config '" + a.config_path + "' must hold a JSON object"};
        }
    }
    if (!config.contains("model")) config["model"] = json::object();
    config["model"]["kind"] = a.model;
    if (a.epochs) config["epochs"] = *a.epochs;
    if (a.batches_per_epoch) config["batches_per_epoch"] = *a.batches_per_epoch;
    if (a.batch_size) config["batch_size"] = *a.batch_size;
    if (a.learning_rate) config["learning_rate"] = *a.learning_rate;
    if (a.optimizer) config["optimizer"] = *a.optimizer;
    if (a.seed) config["seed"] = *a.seed;
    if (a.shots_in_training) config["shots_in_training"] = *a.shots_in_training;
    if (a.gradient_method) config["gradient_method"] = *a.gradient_method;
    if (a.patience) config["patience"] = *a.patience;
    if (a.n_enc) config["model"]["n_enc"] = *a.n_enc;
    if (a.n_var) config["model"]["n_var"] = *a.n_var;
    if (a.activation) config["model"]["activation"] = *a.activation;

    const std::string config_text = config.dump();
    const char *resolved = nullptr;
    check(qc_experiment_resolve(kind, config_text.c_str(), &resolved));
    const json resolved_json = json::parse(resolved);

    const auto fractions = parse_fractions(a.split);
    const qc_split_info split{fractions[0], fractions[1], fractions[2], a.split_seed};
    auto ds = load_dataset(a.data, a.features);
    qc_dataset *tr = nullptr;
    qc_dataset *va = nullptr;
    qc_dataset *te = nullptr;
    check(qc_dataset_split(ds.get(), split.train, split.validation, split.test, split.seed, &tr,
                           &va, &te));
    auto train = own(tr);
    auto val = own(va);
    auto test = own(te);

    qc_model *raw = nullptr;
    check(qc_model_train(kind, config_text.c_str(), train.get(),
                         qc_dataset_rows(val.get()) > 0 ? val.get() : nullptr, &split, &raw));
    auto model = own(raw);
    check(qc_model_save(model.get(), a.out.c_str()));
    check(qc_model_write_history_csv(model.get(), history_path.c_str()));

    const std::size_t params = qc_model_param_count(model.get());
    run.manifest["config"] = resolved_json;
    run.manifest["seeds"] = {{"train", resolved_json.at("seed")}, {"split", a.split_seed}};
    run.manifest["inputs"] = {{"data", a.data}, {"config", a.config_path},
                              {"features", qc_model_feature_names(model.get())}};
    run.manifest["split"] = split_json(split);
    run.manifest["model_kind"] = a.model;
    run.manifest["param_count"] = params;

    std::cout << a.model << ": " << params << " parameters";
    const std::size_t n_epochs = qc_model_history_length(model.get());
    if (n_epochs > 0) {
        qc_epoch_record last{};
        check(qc_model_history_row(model.get(), n_epochs - 1, &last));
        std::cout << ", " << n_epochs << " epochs, train MSE " << last.train_mse;
        if (!std::isnan(last.val_r2)) std::cout << ", val R2 " << last.val_r2;
    }
    std::cout << "\n";
}

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    std::string part = "all";
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void run_eval(Run &run, const EvalArgs &a) {
    run.manifest_path = a.out + ".manifest.json";
    run.claim(a.out);
    run.check_outputs();
    auto model = load_model(a.checkpoint);
    auto ds = load_dataset(a.data, qc_model_feature_names(model.get()));
    const qc_split_info split = qc_model_split_info(model.get());
    auto part = select_part(ds.get(), split, a.part);
    qc_metrics m{};
    check(qc_evaluate(model.get(), part.get(), a.shots, a.seed, &m));

    json report = {{"model_kind", kind_name(qc_model_get_kind(model.get()))},
                   {"part", a.part},
                   {"n", m.n},
                   {"mse", m.mse},
                   {"r2", m.r2_defined ? json(m.r2) : json(nullptr)},
                   {"shots", a.shots == 0 ? json(nullptr) : json(a.shots)},
                   {"seed", a.seed}};
    const std::string text = report.dump(2) + "\n";
    write_text(a.out, text);
    std::cout << text;
    run.manifest["config"] = {{"part", a.part}, {"shots", report["shots"]}};
    run.manifest["seeds"] = {{"seed", a.seed}};
    run.manifest["inputs"] = {{"checkpoint", a.checkpoint}, {"data", a.data}};
    run.manifest["split"] = split_json(split);
    run.manifest["param_count"] = qc_model_param_count(model.get());
}

struct SweepArgs {
    std::string checkpoint;
    std::string data;
    std::string part = "test";
    std::string shots = "100,1000,10000,100000,inf";
    int repeats = 10;
    std::uint64_t seed = 0;
    std::string out;
};

void run_sweep(Run &run, const SweepArgs &a) {
    run.manifest_path = a.out + ".manifest.json";
    run.claim(a.out);
    run.check_outputs();
    const auto levels = parse_shots(a.shots);
    auto model = load_model(a.checkpoint);
    auto ds = load_dataset(a.data, qc_model_feature_names(model.get()));
    const qc_split_info split = qc_model_split_info(model.get());
    auto part = select_part(ds.get(), split, a.part);
    std::vector<qc_sweep_row> rows(levels.size());
    check(qc_shot_sweep(model.get(), part.get(), levels.data(), levels.size(), a.repeats, a.seed,
                        a.out.c_str(), rows.data()));
    for (const auto &r : rows) {
        std::cout << (r.n_shots == QC_EXACT_SHOTS ? std::string("inf") : std::to_string(r.n_shots))
                  << ": R2 " << r.mean_r2 << " +- " << r.std_r2 << "\n";
    }
    json shots = json::array();
    for (const auto s : levels) shots.push_back(s == QC_EXACT_SHOTS ? json("inf") : json(s));
    run.manifest["config"] = {{"part", a.part}, {"shots", shots}, {"repeats", a.repeats}};
    run.manifest["seeds"] = {{"seed", a.seed}};
    run.manifest["inputs"] = {{"checkpoint", a.checkpoint}, {"data", a.data}};
    run.manifest["split"] = split_json(split);
    run.manifest["param_count"] = qc_model_param_count(model.get());
}

struct ShapArgs {
    std::vector<std::string> checkpoints;
    std::string data;
    std::string part = "test";
    std::string background_part = "train";
    std::size_t background_size = 100;
    std::string mode = "exact";
    std::size_t coalitions = 2048;
    std::size_t instances = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void run_shap(Run &run, const ShapArgs &a) {
    run.manifest_path = a.out + "manifest.json";
    for (const char *name : {"values.csv", "summary.csv", "base.csv"}) {
        run.claim(a.out + name);
    }
    if (a.checkpoints.size() > 1) run.claim(a.out + "stability.csv");
    run.check_outputs();

    std::vector<ModelPtr> models;
    std::vector<const qc_model *> handles;
    json param_counts = json::array();
    for (const auto &path : a.checkpoints) {
        models.push_back(load_model(path));
        handles.push_back(models.back().get());
        param_counts.push_back(qc_model_param_count(models.back().get()));
    }
    const qc_split_info split = qc_model_split_info(handles.front());
    auto ds = load_dataset(a.data, qc_model_feature_names(handles.front()));
    auto pool = select_part(ds.get(), split, a.background_part);
    auto test = select_part(ds.get(), split, a.part);
    if (a.instances > 0) {
        qc_dataset *head = nullptr;
        check(qc_dataset_head(test.get(), a.instances, &head));
        test = own(head);
    }

    qc_explain_options opts;
    qc_explain_options_init(&opts);
    opts.background_size = a.background_size;
    opts.mode = a.mode == "sampled" ? QC_SHAP_SAMPLED : QC_SHAP_EXACT;
    opts.n_coalitions = a.coalitions;
    opts.seed = a.seed;
    check(qc_explain(handles.data(), handles.size(), pool.get(), test.get(), &opts,
                     a.out.c_str()));
    std::cout << "explained " << qc_dataset_rows(test.get()) << " rows under "
              << handles.size() << " model(s)\n";

    run.manifest["config"] = {{"part", a.part},
                              {"background_part", a.background_part},
                              {"background_size", a.background_size},
                              {"mode", a.mode},
                              {"coalitions", a.coalitions},
                              {"instances", qc_dataset_rows(test.get())}};
    run.manifest["seeds"] = {{"seed", a.seed}};
    run.manifest["inputs"] = {{"checkpoints", a.checkpoints}, {"data", a.data}};
    run.manifest["split"] = split_json(split);
    run.manifest["param_count"] = param_counts;
}

struct CompareArgs {
    std::string qnn;
    std::string mlp;
    std::string data;
    std::string part = "test";
    std::string out;
};

void run_compare(Run &run, const CompareArgs &a) {
    run.manifest_path = a.out + ".manifest.json";
    run.claim(a.out);
    run.check_outputs();
    auto qnn = load_model(a.qnn);
    auto mlp = load_model(a.mlp);
    const qc_split_info split = qc_model_split_info(qnn.get());
    const qc_split_info other = qc_model_split_info(mlp.get());
    if (split.seed != other.seed || split.train != other.train ||
        split.validation != other.validation || split.test != other.test) {
        std::cerr << "qcloud: warning: checkpoints were trained on different splits; using the "
                     "QNN split\n";
    }
    auto ds = load_dataset(a.data, "full");
    auto part = select_part(ds.get(), split, a.part);
    qc_compare_row rows[3];
    check(qc_compare(qnn.get(), mlp.get(), part.get(), a.out.c_str(), rows));
    for (const auto &r : rows) {
        std::cout << r.name << ": MSE " << r.metrics.mse << ", R2 " << r.metrics.r2 << "\n";
    }
    run.manifest["config"] = {{"part", a.part}};
    run.manifest["seeds"] = json::object();
    run.manifest["inputs"] = {{"qnn", a.qnn}, {"mlp", a.mlp}, {"data", a.data}};
    run.manifest["split"] = split_json(split);
    run.manifest["param_count"] = {{"qnn", qc_model_param_count(qnn.get())},
                                   {"mlp", qc_model_param_count(mlp.get())}};
}

int dispatch(std::vector<std::string> args);

// Replays the argv recorded in a manifest.
int run_rerun(const std::string &manifest_path, bool force) {
    json manifest;
    try {
        manifest = json::parse(read_text(manifest_path));
    } catch (const json::exception &e) {
        throw CliError{2, "malformed manifest '" + manifest_path + "': " + e.what()};
    }
    if (!manifest.contains("argv") || !manifest["argv"].is_array()) {
        throw CliError{2, "manifest '" + manifest_path + "' has no argv"};
    }
    auto args = manifest["argv"].get<std::vector<std::string>>();
    if (!args.empty() && args.front() == "rerun") {
        throw CliError{2, "manifest records a rerun; replay its source manifest instead"};
    }
    if (force && std::find(args.begin(), args.end(), "--force") == args.end()) {
        args.push_back("--force");
    }
    // Relative paths in argv refer to the directory the original run used.
    if (manifest.contains("working_directory")) {
        const fs::path dir = manifest["working_directory"].get<std::string>();
        std::error_code ec;
        fs::current_path(dir, ec);
        if (ec) {
            std::cerr << "qcloud: warning: recorded working directory '" << dir.string()
                      << "' is unavailable; resolving paths from the current directory\n";
        }
    }
    return dispatch(std::move(args));
}

int dispatch(std::vector<std::string> args) {
    CLI::App app{"qcloud: quantum and classical cloud-cover regression experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qc_version()));
    int jobs = 0;
    app.add_option("--jobs", jobs, "Worker threads for row-parallel work (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);
    bool force = false;

    const auto parts = CLI::IsMember({"all", "train", "val", "test"});

    SynthArgs synth;
    auto *c_synth = app.add_subcommand("synth", "Generate a synthetic cloud-cover dataset");
    c_synth->add_option("--n", synth.n, "Number of rows")->check(CLI::PositiveNumber);
    c_synth->add_option("--seed", synth.seed, "Generator seed");
    c_synth->add_option("--noise-sd", synth.noise_sd, "Target noise standard deviation")
        ->check(CLI::NonNegativeNumber);
    c_synth->add_option("--out", synth.out, "Output CSV")->required();
    c_synth->add_flag("--force", force, "Overwrite existing outputs");

    TrainArgs train;
    auto *c_train = app.add_subcommand("train", "Train a QNN or MLP and write a checkpoint");
    c_train->add_option("--data", train.data, "Input CSV")->required();
    c_train->add_option("--model", train.model, "Model kind")
        ->required()
        ->check(CLI::IsMember({"qnn", "mlp"}));
    c_train->add_option("--config", train.config_path, "Experiment config (JSON)");
    c_train->add_option("--features", train.features,
                        "full, reduced, or a comma-separated column list");
    c_train->add_option("--split", train.split, "Train,validation,test fractions");
    c_train->add_option("--split-seed", train.split_seed, "Seed of the row split");
    c_train->add_option("--seed", train.seed, "Initialization and shuffling seed");
    c_train->add_option("--epochs", train.epochs);
    c_train->add_option("--batches-per-epoch", train.batches_per_epoch);
    c_train->add_option("--batch-size", train.batch_size);
    c_train->add_option("--lr", train.learning_rate, "Learning rate");
    c_train->add_option("--optimizer", train.optimizer)
        ->check(CLI::IsMember({"plain_gd", "adam"}));
    c_train->add_option("--shots-in-training", train.shots_in_training,
                        "Train on shot-noise gradients (QNN)");
    c_train->add_option("--gradient-method", train.gradient_method)
        ->check(CLI::IsMember({"adjoint", "parameter_shift"}));
    c_train->add_option("--patience", train.patience, "Early-stopping patience in epochs");
    c_train->add_option("--n-enc", train.n_enc, "Encoding layers (QNN)");
    c_train->add_option("--n-var", train.n_var, "Trailing variational layers (QNN)");
    c_train->add_option("--activation", train.activation)
        ->check(CLI::IsMember({"leaky_relu", "tanh"}));
    c_train->add_option("--out", train.out, "Checkpoint path")->required();
    c_train->add_flag("--force", force, "Overwrite existing outputs");

    EvalArgs eval;
    auto *c_eval = app.add_subcommand("eval", "Score a checkpoint on a dataset");
    c_eval->add_option("--checkpoint", eval.checkpoint)->required();
    c_eval->add_option("--data", eval.data)->required();
    c_eval->add_option("--part", eval.part, "Rows to use, from the checkpoint's split")
        ->check(parts);
    c_eval->add_option("--shots", eval.shots, "Shots per expectation (0 = exact)");
    c_eval->add_option("--seed", eval.seed, "Shot-noise seed");
    c_eval->add_option("--out", eval.out, "Report path (JSON)")->required();
    c_eval->add_flag("--force", force, "Overwrite existing outputs");

    SweepArgs sweep;
    auto *c_sweep = app.add_subcommand("shot-sweep", "R2 as a function of the shot count");
    c_sweep->add_option("--checkpoint", sweep.checkpoint)->required();
    c_sweep->add_option("--data", sweep.data)->required();
    c_sweep->add_option("--part", sweep.part)->check(parts);
    c_sweep->add_option("--shots", sweep.shots, "Comma-separated shot counts; inf = exact");
    c_sweep->add_option("--repeats", sweep.repeats)->check(CLI::PositiveNumber);
    c_sweep->add_option("--seed", sweep.seed);
    c_sweep->add_option("--out", sweep.out, "Output CSV")->required();
    c_sweep->add_flag("--force", force, "Overwrite existing outputs");

    ShapArgs shap;
    auto *c_shap = app.add_subcommand("shap", "KernelSHAP attributions for one or more checkpoints");
    c_shap->add_option("--checkpoint", shap.checkpoints, "Repeat for an ensemble")->required();
    c_shap->add_option("--data", shap.data)->required();
    c_shap->add_option("--part", shap.part, "Rows to explain")->check(parts);
    c_shap->add_option("--background-part", shap.background_part, "Background pool")
        ->check(parts);
    c_shap->add_option("--background-size", shap.background_size)->check(CLI::PositiveNumber);
    c_shap->add_option("--mode", shap.mode)->check(CLI::IsMember({"exact", "sampled"}));
    c_shap->add_option("--coalitions", shap.coalitions, "Coalition draws in sampled mode")
        ->check(CLI::PositiveNumber);
    c_shap->add_option("--instances", shap.instances, "Explain only the first N rows (0 = all)");
    c_shap->add_option("--seed", shap.seed);
    c_shap->add_option("--out", shap.out, "Output prefix")->required();
    c_shap->add_flag("--force", force, "Overwrite existing outputs");

    CompareArgs compare;
    auto *c_compare = app.add_subcommand("compare", "QNN vs MLP vs Xu-Randall metrics table");
    c_compare->add_option("--qnn", compare.qnn, "QNN checkpoint")->required();
    c_compare->add_option("--mlp", compare.mlp, "MLP checkpoint")->required();
    c_compare->add_option("--data", compare.data)->required();
    c_compare->add_option("--part", compare.part)->check(parts);
    c_compare->add_option("--out", compare.out, "Output CSV")->required();
    c_compare->add_flag("--force", force, "Overwrite existing outputs");

    std::string manifest_path;
    auto *c_rerun = app.add_subcommand("rerun", "Replay the command recorded in a manifest");
    c_rerun->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    c_rerun->add_flag("--force", force, "Overwrite existing outputs");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(QC_ERR_USAGE);
    }

    if (*c_rerun) {
        return run_rerun(manifest_path, force);
    }

    qc_set_num_threads(jobs);
    Run run;
    run.argv = args;
    run.force = force;
    const auto start = std::chrono::steady_clock::now();
    if (*c_synth) {
        run.command = "synth";
        run_synth(run, synth);
    } else if (*c_train) {
        run.command = "train";
        run_train(run, train);
    } else if (*c_eval) {
        run.command = "eval";
        run_eval(run, eval);
    } else if (*c_sweep) {
        run.command = "shot-sweep";
        run_sweep(run, sweep);
    } else if (*c_shap) {
        run.command = "shap";
        run_shap(run, shap);
    } else if (*c_compare) {
        run.command = "compare";
        run_compare(run, compare);
    }
    run.manifest["jobs"] = jobs;
    run.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(std::move(args));
    } catch (const CliError &e) {
        std::cerr << "qcloud: error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception &e) {
        std::cerr << "qcloud: error: " << e.what() << "\n";
        return static_cast<int>(QC_ERR_VALIDATION);
    }
}
