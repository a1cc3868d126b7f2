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


#include "doctest.h"
#include "helpers.hpp"

#include "json.hpp"
#include "qcloud/checkpoint.hpp"
#include "qcloud/error.hpp"

using namespace qcloud;

namespace {

Checkpoint make(ModelKind kind) {
    const Dataset d = synthesize_dataset({.n = 60, .seed = 1}).select_features(subset_columns(FeatureSubset::reduced));
    ModelSpec spec = default_model_spec(kind);
    spec.n_enc = 2;
    spec.n_var = 1;
    spec.activation = Activation::tanh;
    TrainConfig c;
    c.epochs = 1;
    c.batches_per_epoch = 2;
    c.batch_size = 8;
    c.seed = 9;
    c.patience = 4;
    return Checkpoint{train(spec, c, d).model, spec, c, SplitRecord{{0.6, 0.2, 0.2}, 77}};
}

} // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("round trip is exact") {
    testing::TempDir dir;
    const Dataset probe = synthesize_dataset({.n = 20, .seed = 2}).select_features(subset_columns(FeatureSubset::reduced));
    for (auto kind : {ModelKind::qnn, ModelKind::mlp}) {
        const Checkpoint cp = make(kind);
        save_checkpoint(cp, dir / "c.json");
        const Checkpoint back = load_checkpoint(dir / "c.json");
        CHECK(back.model.kind() == kind);
        CHECK(back.model.feature_names() == cp.model.feature_names());
        CHECK(std::equal(back.model.parameters().begin(), back.model.parameters().end(),
                         cp.model.parameters().begin(), cp.model.parameters().end()));
        CHECK(back.model.scaling().checksum() == cp.model.scaling().checksum());
        CHECK(back.split.seed == 77);
        CHECK(back.split.fractions.validation == 0.2);
        CHECK(back.train_config.seed == 9);
        CHECK(back.train_config.patience == 4);
        CHECK(back.spec.activation == Activation::tanh);
        for (std::size_t i = 0; i < probe.size(); ++i) CHECK(back.model.predict(probe.row(i)) == cp.model.predict(probe.row(i)));
        // saving again reproduces the bytes
        save_checkpoint(back, dir / "d.json");
        CHECK(testing::read_file(dir / "c.json") == testing::read_file(dir / "d.json"));
    }
}

TEST_CASE("document layout") {
    testing::TempDir dir;
    save_checkpoint(make(ModelKind::qnn), dir / "c.json");
    const auto j = nlohmann::json::parse(testing::read_file(dir / "c.json"));
    CHECK(j.at("format") == "qcloud-checkpoint");
    CHECK(j.at("architecture").at("n_qubits") == 6);
    CHECK(j.at("parameters").size() == j.at("param_count").get<std::size_t>());
    CHECK(j.at("experiment").at("model").at("kind") == "qnn");
    CHECK(j.at("split").at("seed") == 77);
    CHECK(j.contains("parameter_order"));
}

TEST_CASE("tampering is detected") {
    testing::TempDir dir;
    save_checkpoint(make(ModelKind::mlp), dir / "c.json");
    auto j = nlohmann::json::parse(testing::read_file(dir / "c.json"));

    auto bad = j;
    bad["scaling"]["min"][0] = -123.0;
    testing::write_file(dir / "s.json", bad.dump());
    CHECK_THROWS_AS((void)load_checkpoint(dir / "s.json"), ValidationError);

    bad = j;
    bad["parameters"].erase(0);
    testing::write_file(dir / "p.json", bad.dump());
    CHECK_THROWS_AS((void)load_checkpoint(dir / "p.json"), ValidationError);

    bad = j;
    bad["format"] = "other";
    testing::write_file(dir / "f.json", bad.dump());
    CHECK_THROWS_AS((void)load_checkpoint(dir / "f.json"), ValidationError);

    testing::write_file(dir / "t.json", "{ not json");
    CHECK_THROWS_AS((void)load_checkpoint(dir / "t.json"), ValidationError);
    CHECK_THROWS_AS((void)load_checkpoint(dir / "missing.json"), IoError);
}

TEST_CASE("experiment config") {
    TrainConfig c;
    ModelSpec s = default_model_spec(ModelKind::qnn);
    apply_experiment_config(R"({"epochs": 7, "optimizer": "adam", "shots_in_training": 500,
                                "model": {"n_enc": 4, "activation": "tanh"}})",
                            c, s);
    CHECK(c.epochs == 7);
    CHECK(c.optimizer == OptimizerKind::adam);
    CHECK(c.learning_rate == 1e-3);
    CHECK(c.shots_in_training == 500u);
    CHECK(s.n_enc == 4);
    CHECK(s.n_var == 3);
    CHECK(s.activation == Activation::tanh);

    apply_experiment_config(R"({"optimizer": "plain_gd", "learning_rate": 0.5, "shots_in_training": null})", c, s);
    CHECK(c.learning_rate == 0.5);
    CHECK_FALSE(c.shots_in_training.has_value());

    apply_experiment_config(R"({"model": {"kind": "mlp"}})", c, s);
    CHECK(s.kind == ModelKind::mlp);
    CHECK(s.scale_lo == -1.0);

    CHECK_THROWS_AS(apply_experiment_config(R"({"epoch": 3})", c, s), ConfigError);
    CHECK_THROWS_AS(apply_experiment_config(R"({"model": {"depth": 3}})", c, s), ConfigError);
    CHECK_THROWS_AS(apply_experiment_config(R"({"epochs": "three"})", c, s), ConfigError);
    CHECK_THROWS_AS(apply_experiment_config(R"([1, 2])", c, s), ConfigError);
    CHECK_THROWS_AS(apply_experiment_config(R"({"gradient_method": "magic"})", c, s), ConfigError);

    // the resolved document reproduces the config
    TrainConfig c2;
    ModelSpec s2 = default_model_spec(ModelKind::qnn);
    apply_experiment_config(experiment_config_json(c, s), c2, s2);
    CHECK(experiment_config_json(c2, s2) == experiment_config_json(c, s));
}

TEST_CASE("model wrapper") {
    const Checkpoint q = make(ModelKind::qnn);
    const Checkpoint m = make(ModelKind::mlp);
    CHECK(q.model.qnn() != nullptr);
    CHECK(q.model.mlp() == nullptr);
    CHECK(m.model.param_count() == 179);
    CHECK(q.model.param_count() == q.model.qnn()->params.size());
    const Dataset d = synthesize_dataset({.n = 3, .seed = 5}).select_features(subset_columns(FeatureSubset::reduced));
    const auto scaled = q.model.scaling().apply(d.row(0));
    CHECK(q.model.predict(d.row(0)) == q.model.predict_scaled(scaled));
    CHECK(q.model.predictor()(d.row(0)) == q.model.predict(d.row(0)));
    Rng rng(1);
    CHECK(std::abs(q.model.predict_sampled(d.row(0), 1000000, rng) - q.model.predict(d.row(0))) < 0.05);
    CHECK_THROWS_AS((void)m.model.predict_sampled(d.row(0), 100, rng), ConfigError);
    CHECK(parse_model_kind("mlp") == ModelKind::mlp);
    CHECK_THROWS_AS((void)parse_model_kind("cnn"), ConfigError);
    CHECK(parse_activation("leaky_relu") == Activation::leaky_relu);
}

TEST_CASE("xu-randall predictor reads columns by name") {
    const Dataset d = synthesize_dataset({.n = 20, .seed = 6});
    const PredictFn full = xu_randall_predictor(d.feature_names());
    const std::vector<std::string> order{"pa", "ta", "qi", "qc", "qv"};
    const Dataset shuffled = d.select_features(order);
    const PredictFn part = xu_randall_predictor(order);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto x = d.row(i);
        CHECK(full(x) == xu_randall_cloud_cover(x[0], x[1], x[2], x[3], x[4]));
        CHECK(part(shuffled.row(i)) == full(x));
    }
    CHECK_THROWS_AS((void)xu_randall_predictor({"qv", "qc", "qi", "ta"}), ConfigError);
}

} // TEST_SUITE
