#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lorank/analysis.hpp"
#include "lorank/dataset.hpp"
#include "lorank/errors.hpp"
#include "lorank/io.hpp"
#include "lorank/lrfl.hpp"
#include "lorank/metrics.hpp"
#include "lorank/serialize.hpp"
#include "lorank/tuning.hpp"

namespace {

constexpr const char* kVersion = "lorank 1.0.0";

// Exit codes: 0 success, 1 configuration error, 2 data error, 3 numerical
// failure — one-line diagnostic on stderr for each.
enum ExitCode { kOk = 0, kConfigError = 1, kDataError = 2, kNumericalError = 3 };

std::uint64_t threads_from_env() {
  const char* env = std::getenv("LORANK_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0' || v == 0) {
    throw lorank::config_error("LORANK_THREADS must be a positive integer");
  }
  return v;
}

struct ManifestClock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

void write_manifest(const std::string& out_dir, lorank::RunManifest manifest,
                    const ManifestClock& clock) {
  manifest.tool_version = kVersion;
  manifest.threads = threads_from_env();
  manifest.duration_seconds = clock.seconds();
  lorank::write_file(out_dir + "/manifest.json", lorank::manifest_to_json(manifest));
}

struct CommonArgs {
  std::string features;
  std::string labels;
  std::string out_dir = ".";
  std::string format = "csv";
  bool header = false;
};

void add_data_options(CLI::App* cmd, CommonArgs& args, bool required = true) {
  auto* f = cmd->add_option("--features", args.features, "Feature matrix path");
  auto* l = cmd->add_option("--labels", args.labels, "Label matrix path");
  if (required) {
    f->required();
    l->required();
  }
  cmd->add_option("--format", args.format, "Matrix file format: csv or lrfm")
      ->check(CLI::IsMember({"csv", "lrfm"}));
  cmd->add_flag("--header", args.header, "Skip the first CSV line");
  cmd->add_option("--out", args.out_dir, "Output directory");
}

lorank::LabeledDataset load_data(const CommonArgs& args) {
  return lorank::load_dataset(args.features, args.labels, args.format, args.header);
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw lorank::io_error("cannot create output directory " + dir);
}

void print_eval_table(const lorank::EvalReport& report,
                      const std::vector<std::string>& class_names) {
  std::printf("%-16s %8s\n", "class", "auc");
  for (std::size_t c = 0; c < report.per_class_auc.size(); ++c) {
    const std::string name =
        c < class_names.size() ? class_names[c] : "class" + std::to_string(c);
    if (std::isnan(report.per_class_auc[c])) {
      std::printf("%-16s %8s\n", name.c_str(), "excl");
    } else {
      std::printf("%-16s %8.4f\n", name.c_str(), report.per_class_auc[c]);
    }
  }
  std::printf("%-16s %8.4f\n", "mean", report.mean_auc);
  if (report.top1.has_value()) {
    std::printf("%-16s %8.4f\n", "top1_accuracy", *report.top1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank feature learning: training, tuning, and spectral diagnostics"};
  app.require_subcommand(1);

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "Train a model with the low-rank surrogate");
  CommonArgs train_args;
  add_data_options(train_cmd, train_args);
  std::string train_config_path;
  train_cmd->add_option("--config", train_config_path, "JSON config file");
  std::optional<std::uint64_t> train_seed;
  train_cmd->add_option("--seed", train_seed, "Override the config seed");
  std::optional<std::uint64_t> ov_epochs, ov_batch, ov_refresh, ov_feature_dim, ov_hidden_dim;
  std::optional<double> ov_gamma, ov_eta, ov_lr_init, ov_lr_final;
  std::optional<std::string> ov_optimizer, ov_extractor;
  bool freeze_extractor = false;
  train_cmd->add_option("--epochs", ov_epochs, "Override epochs");
  train_cmd->add_option("--batch-size", ov_batch, "Override batch size");
  train_cmd->add_option("--gamma", ov_gamma, "Override rank ratio gamma");
  train_cmd->add_option("--eta", ov_eta, "Override regularizer weight eta_reg");
  train_cmd->add_option("--lr-init", ov_lr_init, "Override initial learning rate");
  train_cmd->add_option("--lr-final", ov_lr_final, "Override final learning rate");
  train_cmd->add_option("--optimizer", ov_optimizer, "adam or sgd-momentum");
  train_cmd->add_option("--extractor", ov_extractor, "identity, linear, or mlp");
  train_cmd->add_option("--feature-dim", ov_feature_dim, "Extractor output dim");
  train_cmd->add_option("--hidden-dim", ov_hidden_dim, "MLP hidden dim");
  train_cmd->add_option("--refresh-period", ov_refresh, "Snapshot refresh period");
  train_cmd->add_flag("--freeze-extractor", freeze_extractor,
                      "Keep extractor weights at initialization");
  std::string preset;
  train_cmd->add_option("--preset", preset,
                        "Hyperparameter preset: nih, covidx, or chexpert");

  // ---- tune ----
  auto* tune_cmd = app.add_subcommand("tune", "Grid search / experiment harnesses");
  CommonArgs tune_args;
  add_data_options(tune_cmd, tune_args);
  std::string tune_config_path, tune_grid_path;
  std::string tune_mode = "cv";
  std::string test_features, test_labels;
  std::vector<double> tune_fractions{0.05, 0.1, 0.15, 0.2, 0.25, 0.5};
  tune_cmd->add_option("--config", tune_config_path, "Base train config JSON");
  tune_cmd->add_option("--grid", tune_grid_path, "Grid spec JSON");
  tune_cmd->add_option("--mode", tune_mode, "cv, rank-sweep, or small-data")
      ->check(CLI::IsMember({"cv", "rank-sweep", "small-data"}));
  tune_cmd->add_option("--test-features", test_features,
                       "Held-out features (rank-sweep / small-data)");
  tune_cmd->add_option("--test-labels", test_labels,
                       "Held-out labels (rank-sweep / small-data)");
  tune_cmd->add_option("--fractions", tune_fractions,
                       "Train fractions for small-data mode");
  std::optional<std::uint64_t> tune_seed;
  tune_cmd->add_option("--seed", tune_seed, "Override grid and config seed");

  // ---- spectrum ----
  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "Eigen-spectrum and label-projection report");
  CommonArgs spectrum_args;
  add_data_options(spectrum_cmd, spectrum_args);

  // ---- bound ----
  auto* bound_cmd =
      app.add_subcommand("bound", "Computable generalization-bound terms");
  CommonArgs bound_args;
  add_data_options(bound_cmd, bound_args);
  double bound_lr = 1e-3;
  std::uint64_t bound_t = 100;
  lorank::BoundConstants bound_constants;
  double bound_gamma = 0.05;
  bound_cmd->add_option("--lr", bound_lr, "Learning rate in the optimization term");
  bound_cmd->add_option("--t", bound_t, "Iteration count in the optimization term");
  bound_cmd->add_option("--x", bound_constants.x, "Confidence parameter");
  bound_cmd->add_option("--c1", bound_constants.c1, "Optimization-term constant");
  bound_cmd->add_option("--c2", bound_constants.c2, "Complexity-term constant");
  bound_cmd->add_option("--c3", bound_constants.c3, "Confidence-term constant");
  bound_cmd->add_option("--gamma", bound_gamma,
                        "Rank ratio for the tail comparison report");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  CommonArgs eval_args;
  add_data_options(eval_cmd, eval_args);
  std::string eval_checkpoint;
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint directory")
      ->required();

  // ---- synth ----
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a planted-subspace synthetic dataset");
  std::string synth_out = ".";
  std::string synth_format = "csv";
  std::uint64_t synth_n = 400, synth_d = 40, synth_classes = 3, synth_k = 5;
  double synth_noise = 1.0;
  std::uint64_t synth_seed = 0;
  synth_cmd->add_option("--out", synth_out, "Output directory");
  synth_cmd->add_option("--format", synth_format, "csv or lrfm")
      ->check(CLI::IsMember({"csv", "lrfm"}));
  synth_cmd->add_option("--n", synth_n, "Number of rows");
  synth_cmd->add_option("--d", synth_d, "Feature dimension");
  synth_cmd->add_option("--classes", synth_classes, "Number of label columns");
  synth_cmd->add_option("--k-signal", synth_k, "Planted signal rank");
  synth_cmd->add_option("--noise", synth_noise, "Isotropic noise scale");
  synth_cmd->add_option("--seed", synth_seed, "Generation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  const ManifestClock clock;
  try {
    if (train_cmd->parsed()) {
      lorank::TrainConfig config;
      if (!train_config_path.empty()) {
        config = lorank::train_config_from_file(train_config_path, config);
      }
      if (!preset.empty()) {
        const lorank::HyperPreset p = lorank::hyperparameter_preset(preset);
        config.gamma = p.gamma;
        config.eta_reg = p.eta;
      }
      if (train_seed) config.seed = *train_seed;
      if (ov_epochs) config.epochs = *ov_epochs;
      if (ov_batch) config.batch_size = *ov_batch;
      if (ov_gamma) config.gamma = *ov_gamma;
      if (ov_eta) config.eta_reg = *ov_eta;
      if (ov_lr_init) config.learning_rate_init = *ov_lr_init;
      if (ov_lr_final) config.learning_rate_final = *ov_lr_final;
      if (ov_optimizer) config.optimizer = lorank::optimizer_from_string(*ov_optimizer);
      if (ov_extractor) config.model.extractor = lorank::extractor_from_string(*ov_extractor);
      if (ov_feature_dim) config.model.feature_dim = *ov_feature_dim;
      if (ov_hidden_dim) config.model.hidden_dim = *ov_hidden_dim;
      if (ov_refresh) config.refresh_period = *ov_refresh;
      if (freeze_extractor) config.model.train_extractor = false;
      config.validate();

      const lorank::LabeledDataset ds = load_data(train_args);
      ensure_out_dir(train_args.out_dir);

      const lorank::TrainResult result = lorank::train(ds, config);
      lorank::save_checkpoint(train_args.out_dir + "/checkpoint", result.params);
      lorank::write_file(train_args.out_dir + "/train_log.jsonl",
                         lorank::train_log_to_jsonl(result.log));

      lorank::RunManifest manifest;
      manifest.command = "train";
      manifest.config_json = lorank::train_config_to_json(config);
      manifest.seed = config.seed;
      manifest.inputs = {{train_args.features, lorank::file_digest(train_args.features)},
                         {train_args.labels, lorank::file_digest(train_args.labels)}};
      manifest.outputs = {train_args.out_dir + "/checkpoint",
                          train_args.out_dir + "/train_log.jsonl"};
      write_manifest(train_args.out_dir, manifest, clock);

      if (result.aborted) {
        std::fprintf(stderr, "lorank train: aborted: %s\n",
                     result.abort_reason.c_str());
        return kNumericalError;
      }
      std::printf("trained %zu epochs, rank T=%zu, final loss %.6g\n",
                  result.log.epochs.size(), result.rank_t,
                  result.log.epochs.empty() ? 0.0 : result.log.epochs.back().loss);
      return kOk;
    }

    if (tune_cmd->parsed()) {
      lorank::TrainConfig base;
      if (!tune_config_path.empty()) {
        base = lorank::train_config_from_file(tune_config_path, base);
      }
      lorank::GridSpec grid;
      if (!tune_grid_path.empty()) grid = lorank::grid_from_file(tune_grid_path, grid);
      if (tune_seed) {
        base.seed = *tune_seed;
        grid.seed = *tune_seed;
      }
      base.validate();

      const lorank::LabeledDataset ds = load_data(tune_args);
      ensure_out_dir(tune_args.out_dir);

      lorank::RunManifest manifest;
      manifest.command = "tune:" + tune_mode;
      manifest.config_json = lorank::train_config_to_json(base);
      manifest.seed = grid.seed;
      manifest.inputs = {{tune_args.features, lorank::file_digest(tune_args.features)},
                         {tune_args.labels, lorank::file_digest(tune_args.labels)}};

      if (tune_mode == "cv") {
        const lorank::TuneResult result = lorank::tune(ds, grid, base);
        lorank::write_file(tune_args.out_dir + "/tune.json",
                           lorank::tune_result_to_json(result));
        manifest.outputs = {tune_args.out_dir + "/tune.json"};
        write_manifest(tune_args.out_dir, manifest, clock);
        std::printf("best gamma %.17g, best eta %.17g\n", result.best_gamma,
                    result.best_eta);
        return kOk;
      }

      if (test_features.empty() || test_labels.empty()) {
        throw lorank::config_error(
            "--test-features and --test-labels are required for mode " + tune_mode);
      }
      lorank::LabeledDataset test_ds = lorank::load_dataset(
          test_features, test_labels, tune_args.format, tune_args.header);
      manifest.inputs.emplace_back(test_features, lorank::file_digest(test_features));
      manifest.inputs.emplace_back(test_labels, lorank::file_digest(test_labels));

      if (tune_mode == "rank-sweep") {
        const auto rows = lorank::rank_sweep(ds, test_ds, grid.gamma_values, base);
        lorank::write_file(tune_args.out_dir + "/rank_sweep.csv",
                           lorank::rank_sweep_to_csv(rows));
        manifest.outputs = {tune_args.out_dir + "/rank_sweep.csv"};
        write_manifest(tune_args.out_dir, manifest, clock);
        return kOk;
      }

      const auto rows =
          lorank::small_data_experiment(ds, test_ds, tune_fractions, base);
      lorank::write_file(tune_args.out_dir + "/small_data.csv",
                         lorank::small_data_to_csv(rows));
      manifest.outputs = {tune_args.out_dir + "/small_data.csv"};
      write_manifest(tune_args.out_dir, manifest, clock);
      return kOk;
    }

    if (spectrum_cmd->parsed()) {
      const lorank::LabeledDataset ds = load_data(spectrum_args);
      ensure_out_dir(spectrum_args.out_dir);
      const lorank::SpectrumReport report =
          lorank::spectrum_report(ds.features, ds.labels);
      lorank::write_file(spectrum_args.out_dir + "/spectrum.json",
                         lorank::spectrum_report_to_json(report));
      lorank::write_file(spectrum_args.out_dir + "/spectrum.csv",
                         lorank::spectrum_report_to_csv(report));

      lorank::RunManifest manifest;
      manifest.command = "spectrum";
      manifest.inputs = {{spectrum_args.features, lorank::file_digest(spectrum_args.features)},
                         {spectrum_args.labels, lorank::file_digest(spectrum_args.labels)}};
      manifest.outputs = {spectrum_args.out_dir + "/spectrum.json",
                          spectrum_args.out_dir + "/spectrum.csv"};
      write_manifest(spectrum_args.out_dir, manifest, clock);
      return kOk;
    }

    if (bound_cmd->parsed()) {
      const lorank::LabeledDataset ds = load_data(bound_args);
      ensure_out_dir(bound_args.out_dir);
      const lorank::BoundTerms terms = lorank::bound_terms(
          ds.features, ds.labels, bound_lr, bound_t, bound_constants);
      const std::size_t gap_rank = lorank::rank_from_gamma(
          bound_gamma, ds.features.rows(), ds.features.cols());
      const lorank::RemarkGap gap = lorank::remark1_gap(ds.features, gap_rank);
      lorank::write_file(bound_args.out_dir + "/bound.json",
                         lorank::bound_terms_to_json(terms, gap, gap_rank));

      lorank::RunManifest manifest;
      manifest.command = "bound";
      manifest.inputs = {{bound_args.features, lorank::file_digest(bound_args.features)},
                         {bound_args.labels, lorank::file_digest(bound_args.labels)}};
      manifest.outputs = {bound_args.out_dir + "/bound.json"};
      write_manifest(bound_args.out_dir, manifest, clock);
      return kOk;
    }

    if (eval_cmd->parsed()) {
      const lorank::LabeledDataset ds = load_data(eval_args);
      const lorank::ModelParams params = lorank::load_checkpoint(eval_checkpoint);
      ensure_out_dir(eval_args.out_dir);
      const lorank::ForwardCache cache = lorank::forward(params, ds.features);
      const lorank::EvalReport report =
          lorank::evaluate(cache.probabilities, ds.labels);
      lorank::write_file(eval_args.out_dir + "/eval.json",
                         lorank::eval_report_to_json(report, ds.class_names));
      print_eval_table(report, ds.class_names);

      lorank::RunManifest manifest;
      manifest.command = "eval";
      manifest.inputs = {{eval_args.features, lorank::file_digest(eval_args.features)},
                         {eval_args.labels, lorank::file_digest(eval_args.labels)},
                         {eval_checkpoint + "/params.json",
                          lorank::file_digest(eval_checkpoint + "/params.json")}};
      manifest.outputs = {eval_args.out_dir + "/eval.json"};
      write_manifest(eval_args.out_dir, manifest, clock);
      return kOk;
    }

    if (synth_cmd->parsed()) {
      const lorank::LabeledDataset ds = lorank::synth_planted_subspace(
          synth_n, synth_d, synth_classes, synth_k, synth_noise, synth_seed);
      ensure_out_dir(synth_out);
      const std::string ext = synth_format == "lrfm" ? ".lrfm" : ".csv";
      lorank::write_matrix(synth_out + "/features" + ext, ds.features, synth_format);
      lorank::write_matrix(synth_out + "/labels" + ext, ds.labels, synth_format);

      lorank::RunManifest manifest;
      manifest.command = "synth";
      manifest.seed = synth_seed;
      manifest.outputs = {synth_out + "/features" + ext, synth_out + "/labels" + ext};
      write_manifest(synth_out, manifest, clock);
      std::printf("wrote %zu x %zu features, %zu classes\n", ds.size(),
                  ds.input_dim(), ds.num_classes());
      return kOk;
    }

    throw lorank::config_error("no subcommand given");
  } catch (const lorank::config_error& e) {
    std::fprintf(stderr, "lorank: %s\n", e.what());
    return kConfigError;
  } catch (const lorank::numerical_error& e) {
    std::fprintf(stderr, "lorank: %s\n", e.what());
    return kNumericalError;
  } catch (const lorank::error& e) {
    // io/parse/shape/invalid-input: problems with the data supplied.
    std::fprintf(stderr, "lorank: %s\n", e.what());
    return kDataError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lorank: internal error: %s\n", e.what());
    return kNumericalError;
  }
}
