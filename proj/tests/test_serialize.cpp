#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "lorank/errors.hpp"
#include "lorank/io.hpp"
#include "lorank/jsonw.hpp"
#include "lorank/model.hpp"
#include "lorank/rng.hpp"
#include "lorank/serialize.hpp"

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "lorank_test_serialize";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("json writer emits fields in insertion order") {
  lorank::JsonWriter w;
  w.begin_object();
  w.key("b");
  w.value(2.5);
  w.key("a");
  w.begin_array();
  w.value(1);
  w.value(true);
  w.value(std::string("x\"y"));
  w.end_array();
  w.key("n");
  w.value(std::numeric_limits<double>::quiet_NaN());  // serialized as null
  w.end_object();
  CHECK(w.str() == R"({"b":2.5,"a":[1,true,"x\"y"],"n":null})");
}

TEST_CASE("train config json round trips through parse and emit") {
  lorank::TrainConfig config;
  config.epochs = 33;
  config.batch_size = 61;
  config.learning_rate_init = 3e-3;
  config.learning_rate_final = 1e-5;
  config.optimizer = lorank::Optimizer::sgd_momentum;
  config.gamma = 0.13;
  config.eta_reg = 2.5e-3;
  config.refresh_period = 4;
  config.seed = 99;
  config.model.extractor = lorank::ExtractorKind::mlp;
  config.model.feature_dim = 12;
  config.model.hidden_dim = 20;
  config.model.train_extractor = false;

  const std::string json = lorank::train_config_to_json(config);
  const lorank::TrainConfig back = lorank::train_config_from_json(json);
  CHECK(back.epochs == 33);
  CHECK(back.batch_size == 61);
  CHECK(back.learning_rate_init == 3e-3);
  CHECK(back.learning_rate_final == 1e-5);
  CHECK(back.optimizer == lorank::Optimizer::sgd_momentum);
  CHECK(back.gamma == 0.13);
  CHECK(back.eta_reg == 2.5e-3);
  CHECK(back.refresh_period == 4);
  CHECK(back.seed == 99);
  CHECK(back.model.extractor == lorank::ExtractorKind::mlp);
  CHECK(back.model.feature_dim == 12);
  CHECK(back.model.hidden_dim == 20);
  CHECK_FALSE(back.model.train_extractor);

  // Missing fields keep the provided defaults.
  const lorank::TrainConfig sparse =
      lorank::train_config_from_json(R"({"epochs": 5})");
  CHECK(sparse.epochs == 5);
  CHECK(sparse.batch_size == 2048);
  CHECK(sparse.gamma == 0.05);

  // Unknown fields are typo protection, malformed json is a config error.
  CHECK_THROWS_AS(lorank::train_config_from_json(R"({"epocs": 5})"),
                  lorank::config_error);
  CHECK_THROWS_AS(lorank::train_config_from_json("{epochs:"),
                  lorank::config_error);
  CHECK_THROWS_AS(lorank::train_config_from_json(R"({"epochs": "many"})"),
                  lorank::config_error);
  CHECK_THROWS_AS(lorank::train_config_from_json(R"({"epochs": -3})"),
                  lorank::config_error);
}

TEST_CASE("grid spec json accepts partial overrides") {
  const lorank::GridSpec grid = lorank::grid_from_json(
      R"({"gamma_values": [0.1, 0.2], "folds": 3, "seed": 5})");
  CHECK(grid.gamma_values == std::vector<double>{0.1, 0.2});
  CHECK(grid.eta_values.size() == 5);  // default untouched
  CHECK(grid.folds == 3);
  CHECK(grid.seed == 5);
  CHECK_THROWS_AS(lorank::grid_from_json(R"({"gammas": [0.1]})"),
                  lorank::config_error);
}

TEST_CASE("train log jsonl has one stable record per epoch") {
  lorank::TrainLog log;
  log.epochs.push_back({1, 1.5, 10.25, 0.125, false});
  log.epochs.push_back({2, 1.25, 9.5, 0.0625, true});
  const std::string jsonl = lorank::train_log_to_jsonl(log);
  CHECK(jsonl ==
        "{\"epoch\":1,\"loss\":1.5,\"tnn_exact\":10.25,\"lr\":0.125,\"refreshed\":false}\n"
        "{\"epoch\":2,\"loss\":1.25,\"tnn_exact\":9.5,\"lr\":0.0625,\"refreshed\":true}\n");
}

TEST_CASE("checkpoints round trip parameters bitwise") {
  const auto dir = (temp_dir() / "ckpt").string();
  lorank::ModelConfig config;
  config.extractor = lorank::ExtractorKind::mlp;
  config.feature_dim = 5;
  config.hidden_dim = 7;
  lorank::ModelParams params = lorank::init_params(config, 9, 3, 55);
  lorank::Rng rng(56);
  for (std::size_t i = 0; i < params.head.rows(); ++i)
    for (std::size_t j = 0; j < params.head.cols(); ++j)
      params.head(i, j) = rng.normal();

  lorank::save_checkpoint(dir, params);
  const lorank::ModelParams back = lorank::load_checkpoint(dir);
  CHECK(back.extractor == params.extractor);
  CHECK(back.extractor_trainable == params.extractor_trainable);
  CHECK(back.a1 == params.a1);
  CHECK(back.a2 == params.a2);
  CHECK(back.head == params.head);

  CHECK_THROWS_AS(lorank::load_checkpoint((temp_dir() / "missing").string()),
                  lorank::io_error);
}

TEST_CASE("identity checkpoints carry no extractor tensors") {
  const auto dir = (temp_dir() / "ckpt_id").string();
  lorank::ModelConfig config;
  config.extractor = lorank::ExtractorKind::identity;
  const lorank::ModelParams params = lorank::init_params(config, 4, 2, 0);
  lorank::save_checkpoint(dir, params);
  const lorank::ModelParams back = lorank::load_checkpoint(dir);
  CHECK(back.extractor == lorank::ExtractorKind::identity);
  CHECK(back.a1.empty());
  CHECK(back.a2.empty());
  CHECK(back.head.rows() == 4);
}

TEST_CASE("file digest is stable and content-sensitive") {
  const auto dir = temp_dir();
  const auto path_a = (dir / "dig_a.txt").string();
  const auto path_b = (dir / "dig_b.txt").string();
  lorank::write_file(path_a, "hello");
  lorank::write_file(path_b, "hello");
  CHECK(lorank::file_digest(path_a) == lorank::file_digest(path_b));
  CHECK(lorank::file_digest(path_a).size() == 16);  // 64-bit hex
  lorank::write_file(path_b, "hello!");
  CHECK(lorank::file_digest(path_a) != lorank::file_digest(path_b));
  // Frozen FNV-1a reference value so the digest never drifts silently.
  CHECK(lorank::file_digest(path_a) == "a430d84680aabd0b");
}

TEST_CASE("manifest json carries the reproduction recipe") {
  lorank::RunManifest manifest;
  manifest.command = "train";
  manifest.config_json = R"({"epochs":1})";
  manifest.seed = 3;
  manifest.inputs = {{"x.csv", "00ff00ff00ff00ff"}};
  manifest.outputs = {"out/log.jsonl"};
  manifest.tool_version = "lorank 1.0.0";
  manifest.duration_seconds = 0.5;
  manifest.threads = 2;
  const std::string json = lorank::manifest_to_json(manifest);
  CHECK(json.find("\"command\":\"train\"") != std::string::npos);
  CHECK(json.find("\"config\":{\"epochs\":1}") != std::string::npos);
  CHECK(json.find("\"seed\":3") != std::string::npos);
  CHECK(json.find("\"fnv1a64\":\"00ff00ff00ff00ff\"") != std::string::npos);
  CHECK(json.find("\"threads\":2") != std::string::npos);
}
