#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lorank/io.hpp"
#include "lorank/matrix.hpp"

#ifndef LORANK_BIN
#error "LORANK_BIN must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "lorank_test_cli";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string command =
      std::string(LORANK_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("cli: synth, train, eval round trip through the filesystem") {
  const fs::path dir = work_dir() / "roundtrip";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = (dir / "data").string();
  const std::string runout = (dir / "run").string();
  const std::string evalout = (dir / "eval").string();

  CHECK(run("synth --out " + data +
            " --n 80 --d 10 --classes 2 --k-signal 3 --noise 0.5 --seed 5") == 0);
  CHECK(fs::exists(data + "/features.csv"));
  CHECK(fs::exists(data + "/labels.csv"));
  CHECK(fs::exists(data + "/manifest.json"));

  CHECK(run("train --features " + data + "/features.csv --labels " + data +
            "/labels.csv --out " + runout +
            " --epochs 4 --gamma 0.2 --eta 0.001 --lr-init 0.01 --lr-final 0.001") == 0);
  CHECK(fs::exists(runout + "/train_log.jsonl"));
  CHECK(fs::exists(runout + "/checkpoint/params.json"));
  CHECK(fs::exists(runout + "/checkpoint/head.lrfm"));
  CHECK(fs::exists(runout + "/manifest.json"));

  // Four epochs logged, one json object per line.
  std::ifstream log(runout + "/train_log.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(log, line)) {
    CHECK(line.front() == '{');
    CHECK(line.back() == '}');
    ++lines;
  }
  CHECK(lines == 4);

  CHECK(run("eval --features " + data + "/features.csv --labels " + data +
            "/labels.csv --checkpoint " + runout + "/checkpoint --out " + evalout) == 0);
  CHECK(fs::exists(evalout + "/eval.json"));
  const std::string eval_json = lorank::read_file(evalout + "/eval.json");
  CHECK(eval_json.find("\"mean_auc\"") != std::string::npos);

  // The manifest names both inputs with their digests.
  const std::string manifest = lorank::read_file(runout + "/manifest.json");
  CHECK(manifest.find("\"command\":\"train\"") != std::string::npos);
  CHECK(manifest.find("features.csv") != std::string::npos);
  CHECK(manifest.find("\"fnv1a64\"") != std::string::npos);
}

TEST_CASE("cli: reruns with the same seed are byte-identical") {
  const fs::path dir = work_dir() / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = (dir / "data").string();
  CHECK(run("synth --out " + data + " --n 50 --d 8 --classes 2 --k-signal 2 "
            "--noise 0.4 --seed 1 --format lrfm") == 0);

  const std::string train_flags =
      " --features " + data + "/features.lrfm --labels " + data +
      "/labels.lrfm --format lrfm --epochs 5 --seed 42 --gamma 0.25 --eta 0.002"
      " --lr-init 0.005 --lr-final 0.0005";
  const std::string out_a = (dir / "a").string();
  const std::string out_b = (dir / "b").string();
  CHECK(run("train --out " + out_a + train_flags) == 0);
  CHECK(run("train --out " + out_b + train_flags) == 0);

  CHECK(lorank::read_file(out_a + "/train_log.jsonl") ==
        lorank::read_file(out_b + "/train_log.jsonl"));
  CHECK(lorank::read_file(out_a + "/checkpoint/params.json") ==
        lorank::read_file(out_b + "/checkpoint/params.json"));
  CHECK(lorank::read_file(out_a + "/checkpoint/a1.lrfm") ==
        lorank::read_file(out_b + "/checkpoint/a1.lrfm"));
  CHECK(lorank::read_file(out_a + "/checkpoint/head.lrfm") ==
        lorank::read_file(out_b + "/checkpoint/head.lrfm"));
}

TEST_CASE("cli: exit codes distinguish config, data, and numerical failures") {
  const fs::path dir = work_dir() / "exitcodes";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = (dir / "data").string();
  REQUIRE(run("synth --out " + data + " --n 30 --d 6 --classes 2 --k-signal 2 "
              "--noise 0.3 --seed 2") == 0);
  const std::string io_flags =
      " --features " + data + "/features.csv --labels " + data + "/labels.csv";

  // Config errors: bad flag, bad enum value, bad hyperparameter.
  CHECK(run("train --no-such-flag") == 1);
  CHECK(run("train" + io_flags + " --out x --gamma 2.0") == 1);
  CHECK(run("train" + io_flags + " --out x --optimizer sgd") == 1);
  CHECK(run("nonexistent-command") == 1);

  // Data errors: missing file, malformed content.
  CHECK(run("train --features missing.csv --labels " + data +
            "/labels.csv --out x") == 2);
  std::ofstream bad(dir / "bad.csv");
  bad << "1,2\n3,not_a_number\n";
  bad.close();
  CHECK(run("spectrum --features " + (dir / "bad.csv").string() + " --labels " +
            data + "/labels.csv --out x") == 2);

  // Non-binary labels are a data error too (features fed as labels).
  CHECK(run("train --features " + data + "/features.csv --labels " + data +
            "/features.csv --out x") == 2);

  // Numerical failure: an absurd learning rate combined with weight decay
  // overflows the parameters to infinity within two updates, and the run
  // aborts with exit code 3.
  std::ofstream cfg(dir / "blowup.json");
  cfg << R"({"optimizer": "sgd-momentum", "weight_decay": 1.0,)"
      << R"( "learning_rate_init": 1e200, "learning_rate_final": 1.0})";
  cfg.close();
  CHECK(run("train" + io_flags + " --out " + (dir / "blowup").string() +
            " --config " + (dir / "blowup.json").string() +
            " --epochs 3 --batch-size 8") == 3);
}

TEST_CASE("cli: spectrum of identity features reports a flat unit spectrum") {
  const fs::path dir = work_dir() / "spectrum";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Features = I(4): kernel eigenvalues are all 1/n = 0.25.
  lorank::DenseMatrix eye(4, 4, 0.0);
  for (std::size_t i = 0; i < 4; ++i) eye(i, i) = 1.0;
  lorank::DenseMatrix labels(4, 1, 0.0);
  labels(0, 0) = 1.0;
  labels(2, 0) = 1.0;
  lorank::write_csv((dir / "f.csv").string(), eye);
  lorank::write_csv((dir / "y.csv").string(), labels);

  CHECK(run("spectrum --features " + (dir / "f.csv").string() + " --labels " +
            (dir / "y.csv").string() + " --out " + dir.string()) == 0);
  const std::string csv = lorank::read_file((dir / "spectrum.csv").string());
  CHECK(csv.rfind("rank,eigenvalue,projection,concentration", 0) == 0);
  // Four data lines, each with eigenvalue 0.25.
  int value_lines = 0;
  std::istringstream stream(csv);
  std::string line;
  std::getline(stream, line);  // header
  while (std::getline(stream, line)) {
    CHECK(line.find(",0.25,") != std::string::npos);
    ++value_lines;
  }
  CHECK(value_lines == 4);

  CHECK(run("bound --features " + (dir / "f.csv").string() + " --labels " +
            (dir / "y.csv").string() + " --lr 0.1 --t 3 --out " + dir.string()) == 0);
  const std::string bound_json = lorank::read_file((dir / "bound.json").string());
  CHECK(bound_json.find("\"label_residual\":0") != std::string::npos);
  CHECK(bound_json.find("\"tail_comparison\"") != std::string::npos);
}
