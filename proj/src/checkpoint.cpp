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

#include "qcloud/checkpoint.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "qcloud/error.hpp"

namespace qcloud {

namespace {

using nlohmann::json;

constexpr std::string_view kQnnOrder =
    "encoding blocks k=1..n_enc, each 3(N-1) angles: ZZ chain, XX chain, YY chain over "
    "pairs (n, n+1); trailing blocks l=1..n_var, each 4N-3 angles: ZZ, XX, YY chains then "
    "RX on every qubit; readout weights w (N); bias b";
constexpr std::string_view kMlpOrder =
    "per layer: weight matrix (fan_out x fan_in, row-major) then bias vector";

std::string_view to_string(GradientMethod m) {
    return m == GradientMethod::adjoint ? "adjoint" : "parameter_shift";
}

GradientMethod parse_gradient_method(std::string_view text) {
    if (text == "adjoint") return GradientMethod::adjoint;
    if (text == "parameter_shift") return GradientMethod::parameter_shift;
    throw ConfigError("unknown gradient_method '" + std::string(text) + "'");
}

json experiment_to_json(const TrainConfig &c, const ModelSpec &s) {
    json j;
    j["epochs"] = c.epochs;
    j["batches_per_epoch"] = c.batches_per_epoch;
    j["batch_size"] = c.batch_size;
    j["learning_rate"] = c.learning_rate;
    j["optimizer"] = to_string(c.optimizer);
    j["seed"] = c.seed;
    j["shots_in_training"] = c.shots_in_training ? json(*c.shots_in_training) : json(nullptr);
    j["gradient_method"] = to_string(c.gradient_method);
    j["patience"] = c.patience ? json(*c.patience) : json(nullptr);
    j["model"] = {
        {"kind", to_string(s.kind)},
        {"n_enc", s.n_enc},
        {"n_var", s.n_var},
        {"activation", to_string(s.activation)},
        {"scale_lo", s.scale_lo},
        {"scale_hi", s.scale_hi},
    };
    return j;
}

void reject_unknown(const json &j, const std::set<std::string> &known, const char *where) {
    for (const auto &[key, _] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError(std::string("unknown key '") + key + "' in " + where);
        }
    }
}

void experiment_from_json(const json &j, TrainConfig &c, ModelSpec &s) {
    if (!j.is_object()) {
        throw ConfigError("experiment config must be a JSON object");
    }
    reject_unknown(j,
                   {"epochs", "batches_per_epoch", "batch_size", "learning_rate", "optimizer",
                    "seed", "shots_in_training", "gradient_method", "patience", "model"},
                   "experiment config");
    if (j.contains("optimizer")) {
        c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
        if (!j.contains("learning_rate")) {
            c.learning_rate = default_learning_rate(c.optimizer);
        }
    }
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
    if (j.contains("batches_per_epoch")) c.batches_per_epoch = j.at("batches_per_epoch").get<int>();
    if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<int>();
    if (j.contains("learning_rate")) c.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("shots_in_training")) {
        const auto &v = j.at("shots_in_training");
        c.shots_in_training = v.is_null() ? std::nullopt
                                          : std::optional<std::uint64_t>(v.get<std::uint64_t>());
    }
    if (j.contains("gradient_method")) {
        c.gradient_method = parse_gradient_method(j.at("gradient_method").get<std::string>());
    }
    if (j.contains("patience")) {
        const auto &v = j.at("patience");
        c.patience = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
    }
    if (j.contains("model")) {
        const json &m = j.at("model");
        if (!m.is_object()) {
            throw ConfigError("'model' must be a JSON object");
        }
        reject_unknown(m, {"kind", "n_enc", "n_var", "activation", "scale_lo", "scale_hi"},
                       "model section");
        if (m.contains("kind")) {
            const ModelKind kind = parse_model_kind(m.at("kind").get<std::string>());
            if (kind != s.kind) {
                const ModelSpec fresh = default_model_spec(kind);
                s.kind = kind;
                s.scale_lo = fresh.scale_lo;
                s.scale_hi = fresh.scale_hi;
            }
        }
        if (m.contains("n_enc")) s.n_enc = m.at("n_enc").get<int>();
        if (m.contains("n_var")) s.n_var = m.at("n_var").get<int>();
        if (m.contains("activation")) {
            s.activation = parse_activation(m.at("activation").get<std::string>());
        }
        if (m.contains("scale_lo")) s.scale_lo = m.at("scale_lo").get<double>();
        if (m.contains("scale_hi")) s.scale_hi = m.at("scale_hi").get<double>();
    }
    validate(c);
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

} // namespace

void apply_experiment_config(std::string_view json_text, TrainConfig &config, ModelSpec &spec) {
    try {
        experiment_from_json(json::parse(json_text), config, spec);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    }
}

std::string experiment_config_json(const TrainConfig &config, const ModelSpec &spec) {
    return experiment_to_json(config, spec).dump(2);
}

void save_checkpoint(const Checkpoint &cp, const std::filesystem::path &path) {
    const Model &model = cp.model;
    json j;
    j["format"] = kCheckpointFormat;
    j["format_version"] = kCheckpointVersion;
    j["model_kind"] = to_string(model.kind());
    j["feature_names"] = model.feature_names();
    if (const auto *q = model.qnn()) {
        j["architecture"] = {{"n_qubits", q->config.n_qubits},
                             {"n_enc", q->config.n_enc},
                             {"n_var", q->config.n_var}};
        j["parameter_order"] = kQnnOrder;
    } else {
        const auto *m = model.mlp();
        j["architecture"] = {{"layer_sizes", m->layer_sizes()},
                             {"activation", to_string(m->activation())}};
        j["parameter_order"] = kMlpOrder;
    }
    j["param_count"] = model.param_count();
    const auto params = model.parameters();
    j["parameters"] = std::vector<double>(params.begin(), params.end());
    const auto &s = model.scaling();
    j["scaling"] = {{"lo", s.lo}, {"hi", s.hi}, {"min", s.min}, {"max", s.max},
                    {"checksum", hex64(s.checksum())}};
    j["experiment"] = experiment_to_json(cp.train_config, cp.spec);
    j["split"] = {{"train", cp.split.fractions.train},
                  {"validation", cp.split.fractions.validation},
                  {"test", cp.split.fractions.test},
                  {"seed", cp.split.seed}};

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write checkpoint '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint '" + path.string() + "'");
    }
    try {
        const json j = json::parse(in);
        if (j.at("format").get<std::string>() != kCheckpointFormat) {
            throw ValidationError("'" + path.string() + "' is not a qcloud checkpoint");
        }
        if (j.at("format_version").get<int>() != kCheckpointVersion) {
            throw ValidationError("unsupported checkpoint version in '" + path.string() + "'");
        }
        const ModelKind kind = parse_model_kind(j.at("model_kind").get<std::string>());
        auto names = j.at("feature_names").get<std::vector<std::string>>();
        const auto params = j.at("parameters").get<std::vector<double>>();
        if (params.size() != j.at("param_count").get<std::size_t>()) {
            throw ValidationError("checkpoint param_count disagrees with parameter array");
        }
        FeatureScaling scaling;
        const json &sj = j.at("scaling");
        scaling.lo = sj.at("lo").get<double>();
        scaling.hi = sj.at("hi").get<double>();
        scaling.min = sj.at("min").get<std::vector<double>>();
        scaling.max = sj.at("max").get<std::vector<double>>();
        if (sj.contains("checksum") &&
            sj.at("checksum").get<std::string>() != hex64(scaling.checksum())) {
            throw ValidationError("scaling checksum mismatch in '" + path.string() + "'");
        }

        TrainConfig train_config;
        ModelSpec spec = default_model_spec(kind);
        experiment_from_json(j.at("experiment"), train_config, spec);

        const json &arch = j.at("architecture");
        std::optional<Model> model;
        if (kind == ModelKind::qnn) {
            const CircuitConfig circuit{arch.at("n_qubits").get<int>(), arch.at("n_enc").get<int>(),
                                        arch.at("n_var").get<int>()};
            model.emplace(QnnNetwork{circuit, ParameterSet::unflatten(circuit, params)}, scaling,
                          std::move(names));
        } else {
            MlpModel mlp(arch.at("layer_sizes").get<std::vector<int>>(),
                         parse_activation(arch.at("activation").get<std::string>()));
            if (mlp.param_count() != params.size()) {
                throw ValidationError("MLP parameter array has the wrong length");
            }
            std::copy(params.begin(), params.end(), mlp.parameters().begin());
            model.emplace(std::move(mlp), scaling, std::move(names));
        }

        SplitRecord split;
        const json &sp = j.at("split");
        split.fractions = {sp.at("train").get<double>(), sp.at("validation").get<double>(),
                           sp.at("test").get<double>()};
        split.seed = sp.at("seed").get<std::uint64_t>();
        return Checkpoint{std::move(*model), spec, train_config, split};
    } catch (const json::exception &e) {
        throw ValidationError("malformed checkpoint '" + path.string() + "': " + e.what());
    }
}

} // namespace qcloud
