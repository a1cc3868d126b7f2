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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Sandbox {
    fs::path dir;
    explicit Sandbox(const std::string &tag)
        : dir(fs::temp_directory_path() / ("qcloud_cli_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }

    // Runs the CLI inside `dir`; returns the exit code, output in `last_output`.
    int run(const std::string &args) {
        const std::string cmd = "cd '" + dir.string() + "' && '" QCLOUD_CLI_PATH "' " + args + " > out.txt 2>&1";
        const int status = std::system(cmd.c_str());
        last_output = read("out.txt");
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    [[nodiscard]] std::string read(const std::string &name) const {
        std::ifstream in(dir / name, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }
    [[nodiscard]] bool has(const std::string &name) const { return fs::exists(dir / name); }

    std::string last_output;
};

const std::string kQuickQnn =
    "--model qnn --epochs 3 --batches-per-epoch 4 --batch-size 16 --n-enc 2 --n-var 1 --optimizer adam --lr 0.01";
const std::string kQuickMlp = "--model mlp --epochs 3 --batches-per-epoch 4 --batch-size 16";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
    Sandbox s("codes");
    CHECK(s.run("") == 1);
    CHECK(s.run("frobnicate") == 1);
    CHECK(s.run("synth") == 1);                      // missing --out
    CHECK(s.run("synth --n x --out d.csv") == 1);     // unparsable value
    CHECK(s.run("train --data d.csv --model cnn --out m.json") == 1);
    CHECK(s.run("--version") == 0);
    CHECK(s.run("synth --n 0 --out d.csv") == 1);
    CHECK(s.run("eval --checkpoint none.json --data none.csv --out e.json") == 4);
    REQUIRE(s.run("synth --n 60 --seed 1 --out d.csv") == 0);
    CHECK(s.run("train --data d.csv " + kQuickQnn + " --features qv,foo --out q.json") == 2);
    CHECK(s.last_output.find("qcloud: error:") != std::string::npos);
    CHECK(s.run("train --data d.csv " + kQuickQnn + " --split 0.5,0.1,0.1 --out q.json") == 2);
    {
        std::ofstream(s.dir / "bad.json") << R"({"learning_rat": 0.1})";
    }
    CHECK(s.run("train --data d.csv --model qnn --config bad.json --out q.json") == 2);
    CHECK(s.last_output.find("learning_rat") != std::string::npos);
    {
        std::ofstream(s.dir / "bad.csv") << "qv,qc,qi,ta,pa,hw,zg,lat,clc\n0.001,0,0,280,80000,1,100,0,1.5\n";
    }
    CHECK(s.run("train --data bad.csv " + kQuickQnn + " --out q.json") == 2);
    CHECK(s.last_output.find("row 1") != std::string::npos);
}

TEST_CASE("synth writes data, sidecar and manifest") {
    Sandbox s("synth");
    REQUIRE(s.run("synth --n 40 --seed 3 --noise-sd 0.01 --out d.csv") == 0);
    CHECK(s.read("d.csv").rfind("qv,qc,qi,ta,pa,hw,zg,lat,clc\n", 0) == 0);
    const json meta = json::parse(s.read("d.csv.meta.json"));
    CHECK(meta.at("seed") == 3);
    CHECK(meta.at("noise_sd") == 0.01);
    CHECK(meta.at("generator_version") == "1");
    CHECK(meta.at("xu_randall").at("gamma") == 0.49);
    const json man = json::parse(s.read("d.csv.manifest.json"));
    for (const char *key : {"command", "argv", "version", "outputs", "config", "seeds", "inputs",
                            "wall_clock_seconds", "working_directory"}) {
        CHECK_MESSAGE(man.contains(key), key);
    }
    CHECK(man.at("command") == "synth");
}

TEST_CASE("refuses to overwrite without --force") {
    Sandbox s("force");
    REQUIRE(s.run("synth --n 30 --out d.csv") == 0);
    const std::string before = s.read("d.csv");
    CHECK(s.run("synth --n 31 --out d.csv") == 4);
    CHECK(s.read("d.csv") == before);
    // an existing manifest alone also blocks the run
    fs::remove(s.dir / "d.csv");
    fs::remove(s.dir / "d.csv.meta.json");
    CHECK(s.run("synth --n 31 --out d.csv") == 4);
    CHECK(s.run("synth --n 31 --out d.csv --force") == 0);
    CHECK(s.read("d.csv") != before);
}

TEST_CASE("train, eval, rerun") {
    Sandbox s("train");
    REQUIRE(s.run("synth --n 200 --seed 2 --out d.csv") == 0);
    REQUIRE(s.run("train --data d.csv " + kQuickQnn + " --seed 5 --out q.json") == 0);
    CHECK(s.has("q.json.history.csv"));
    CHECK(s.has("q.json.manifest.json"));
    const json man = json::parse(s.read("q.json.manifest.json"));
    CHECK(man.at("param_count") == 80);
    CHECK(man.at("seeds").at("train") == 5);
    CHECK(man.at("split").at("seed") == 0);

    // eval on the recorded training part reproduces the last history MSE
    REQUIRE(s.run("eval --checkpoint q.json --data d.csv --part train --out e.json") == 0);
    const json e = json::parse(s.read("e.json"));
    CHECK(e.at("n") == 140);
    std::string history = s.read("q.json.history.csv");
    history.pop_back();
    const std::string last = history.substr(history.rfind('\n') + 1);
    const double hist_mse = std::stod(last.substr(last.find(',') + 1));
    CHECK(std::abs(e.at("mse").get<double>() - hist_mse) < 1e-10);
    REQUIRE(s.run("eval --checkpoint q.json --data d.csv --part test --shots 1000 --seed 4 --out e2.json") == 0);
    CHECK(json::parse(s.read("e2.json")).at("n") == 40);

    const std::string ckpt = s.read("q.json");
    const std::string hist = s.read("q.json.history.csv");
    CHECK(s.run("rerun --manifest q.json.manifest.json") == 4);
    REQUIRE(s.run("rerun --manifest q.json.manifest.json --force") == 0);
    CHECK(s.read("q.json") == ckpt);
    CHECK(s.read("q.json.history.csv") == hist);

    // replay from another directory
    Sandbox other("elsewhere");
    REQUIRE(other.run("rerun --manifest '" + (s.dir / "q.json.manifest.json").string() + "' --force") == 0);
    CHECK(s.read("q.json") == ckpt);
}

TEST_CASE("results do not depend on the thread count") {
    Sandbox s("jobs");
    REQUIRE(s.run("synth --n 150 --seed 4 --out d.csv") == 0);
    REQUIRE(s.run("--jobs 1 train --data d.csv " + kQuickQnn + " --out a.json") == 0);
    REQUIRE(s.run("--jobs 3 train --data d.csv " + kQuickQnn + " --out b.json") == 0);
    CHECK(s.read("a.json") == s.read("b.json"));
    REQUIRE(s.run("--jobs 1 shap --checkpoint a.json --data d.csv --instances 4 --background-size 20 "
                  "--mode sampled --coalitions 64 --out x_") == 0);
    REQUIRE(s.run("--jobs 3 shap --checkpoint a.json --data d.csv --instances 4 --background-size 20 "
                  "--mode sampled --coalitions 64 --out y_") == 0);
    CHECK(s.read("x_values.csv") == s.read("y_values.csv"));
}

TEST_CASE("shot sweep, shap and compare outputs") {
    Sandbox s("outputs");
    REQUIRE(s.run("synth --n 200 --seed 6 --out d.csv") == 0);
    REQUIRE(s.run("train --data d.csv " + kQuickQnn + " --features reduced --out q.json") == 0);
    REQUIRE(s.run("train --data d.csv " + kQuickMlp + " --features reduced --seed 1 --out m1.json") == 0);
    REQUIRE(s.run("train --data d.csv " + kQuickMlp + " --features reduced --seed 2 --out m2.json") == 0);

    REQUIRE(s.run("shot-sweep --checkpoint q.json --data d.csv --shots 100,1000,inf --repeats 2 --out sweep.csv") ==
            0);
    const std::string sweep = s.read("sweep.csv");
    CHECK(sweep.rfind("n_shots,mean_r2,std_r2,repeats\n100,", 0) == 0);
    CHECK(sweep.find("\ninf,") != std::string::npos);
    CHECK(s.run("shot-sweep --checkpoint m1.json --data d.csv --out sweep2.csv") == 2);

    REQUIRE(s.run("shap --checkpoint m1.json --checkpoint m2.json --data d.csv --instances 3 "
                  "--background-size 20 --out shap_") == 0);
    const std::string values = s.read("shap_values.csv");
    CHECK(values.rfind("model_id,instance_id,feature_name,shap_value\n", 0) == 0);
    // 2 models x 3 instances x 6 features
    CHECK(std::count(values.begin(), values.end(), '\n') == 1 + 36);
    CHECK(s.read("shap_summary.csv").rfind("model_id,feature_name,mean_abs_shap,rank\n", 0) == 0);
    CHECK(s.read("shap_stability.csv").find("\nmlp,qv,") != std::string::npos);
    CHECK(s.has("shap_manifest.json"));

    REQUIRE(s.run("compare --qnn q.json --mlp m1.json --data d.csv --out cmp.csv") == 0);
    const std::string cmp = s.read("cmp.csv");
    CHECK(cmp.rfind("model,n,mse,r2\nqnn,40,", 0) == 0);
    CHECK(cmp.find("\nxu_randall,40,") != std::string::npos);
    CHECK(s.run("compare --qnn m1.json --mlp q.json --data d.csv --out cmp2.csv") == 1);
}

} // TEST_SUITE
