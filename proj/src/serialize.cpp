#include "lorank/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "lorank/errors.hpp"
#include "lorank/io.hpp"
#include "lorank/jsonw.hpp"

namespace lorank {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw config_error("malformed JSON in " + what);
  if (!j.is_object()) throw config_error(what + " must be a JSON object");
  return j;
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& what) {
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) {
      throw config_error(what + ": unknown field '" + key + "'");
    }
  }
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw config_error(std::string(key) + " must be a number");
  return j[key].get<double>();
}

std::uint64_t get_count(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_unsigned()) {
    throw config_error(std::string(key) + " must be a non-negative integer");
  }
  return j[key].get<std::uint64_t>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw config_error(std::string(key) + " must be a string");
  return j[key].get<std::string>();
}

bool get_bool(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw config_error(std::string(key) + " must be a boolean");
  return j[key].get<bool>();
}

std::vector<double> get_number_list(const json& j, const char* key,
                                    const std::vector<double>& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_array()) throw config_error(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw config_error(std::string(key) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void emit_double_array(JsonWriter& w, const std::vector<double>& values) {
  w.begin_array();
  for (double v : values) w.value(v);
  w.end_array();
}

void emit_index_array(JsonWriter& w, const std::vector<std::size_t>& values) {
  w.begin_array();
  for (std::size_t v : values) w.value(v);
  w.end_array();
}

}  // namespace

TrainConfig train_config_from_json(const std::string& json_text,
                                   const TrainConfig& defaults) {
  const json j = parse_json(json_text, "train config");
  reject_unknown(j,
                 {"epochs", "batch_size", "learning_rate_init",
                  "learning_rate_final", "momentum", "weight_decay", "optimizer",
                  "adam_beta1", "adam_beta2", "adam_epsilon", "gamma", "eta_reg",
                  "refresh_period", "seed", "extractor", "feature_dim",
                  "hidden_dim", "train_extractor"},
                 "train config");

  TrainConfig c = defaults;
  c.epochs = get_count(j, "epochs", c.epochs);
  c.batch_size = get_count(j, "batch_size", c.batch_size);
  c.learning_rate_init = get_number(j, "learning_rate_init", c.learning_rate_init);
  c.learning_rate_final = get_number(j, "learning_rate_final", c.learning_rate_final);
  c.momentum = get_number(j, "momentum", c.momentum);
  c.weight_decay = get_number(j, "weight_decay", c.weight_decay);
  c.optimizer = optimizer_from_string(get_string(j, "optimizer", to_string(c.optimizer)));
  c.adam_beta1 = get_number(j, "adam_beta1", c.adam_beta1);
  c.adam_beta2 = get_number(j, "adam_beta2", c.adam_beta2);
  c.adam_epsilon = get_number(j, "adam_epsilon", c.adam_epsilon);
  c.gamma = get_number(j, "gamma", c.gamma);
  c.eta_reg = get_number(j, "eta_reg", c.eta_reg);
  c.refresh_period = get_count(j, "refresh_period", c.refresh_period);
  c.seed = get_count(j, "seed", c.seed);
  c.model.extractor =
      extractor_from_string(get_string(j, "extractor", to_string(c.model.extractor)));
  c.model.feature_dim = get_count(j, "feature_dim", c.model.feature_dim);
  c.model.hidden_dim = get_count(j, "hidden_dim", c.model.hidden_dim);
  c.model.train_extractor = get_bool(j, "train_extractor", c.model.train_extractor);
  return c;
}

TrainConfig train_config_from_file(const std::string& path,
                                   const TrainConfig& defaults) {
  return train_config_from_json(read_file(path), defaults);
}

GridSpec grid_from_json(const std::string& json_text, const GridSpec& defaults) {
  const json j = parse_json(json_text, "grid spec");
  reject_unknown(j, {"gamma_values", "eta_values", "folds", "cv_fraction",
                     "cv_epochs", "seed"},
                 "grid spec");
  GridSpec g = defaults;
  g.gamma_values = get_number_list(j, "gamma_values", g.gamma_values);
  g.eta_values = get_number_list(j, "eta_values", g.eta_values);
  g.folds = get_count(j, "folds", g.folds);
  g.cv_fraction = get_number(j, "cv_fraction", g.cv_fraction);
  g.cv_epochs = get_count(j, "cv_epochs", g.cv_epochs);
  g.seed = get_count(j, "seed", g.seed);
  return g;
}

GridSpec grid_from_file(const std::string& path, const GridSpec& defaults) {
  return grid_from_json(read_file(path), defaults);
}

std::string train_config_to_json(const TrainConfig& config) {
  JsonWriter w;
  w.begin_object();
  w.key("epochs").value(config.epochs);
  w.key("batch_size").value(config.batch_size);
  w.key("learning_rate_init").value(config.learning_rate_init);
  w.key("learning_rate_final").value(config.learning_rate_final);
  w.key("momentum").value(config.momentum);
  w.key("weight_decay").value(config.weight_decay);
  w.key("optimizer").value(to_string(config.optimizer));
  w.key("adam_beta1").value(config.adam_beta1);
  w.key("adam_beta2").value(config.adam_beta2);
  w.key("adam_epsilon").value(config.adam_epsilon);
  w.key("gamma").value(config.gamma);
  w.key("eta_reg").value(config.eta_reg);
  w.key("refresh_period").value(config.refresh_period);
  w.key("seed").value(config.seed);
  w.key("extractor").value(to_string(config.model.extractor));
  w.key("feature_dim").value(config.model.feature_dim);
  w.key("hidden_dim").value(config.model.hidden_dim);
  w.key("train_extractor").value(config.model.train_extractor);
  w.end_object();
  return w.str();
}

std::string train_log_to_jsonl(const TrainLog& log) {
  std::string out;
  for (const EpochRecord& r : log.epochs) {
    JsonWriter w;
    w.begin_object();
    w.key("epoch").value(r.epoch);
    w.key("loss").value(r.loss);
    w.key("tnn_exact").value(r.tnn_exact);
    w.key("lr").value(r.lr);
    w.key("refreshed").value(r.refreshed);
    w.end_object();
    out += w.str();
    out.push_back('\n');
  }
  return out;
}

void save_checkpoint(const std::string& dir, const ModelParams& params) {
  std::filesystem::create_directories(dir);
  JsonWriter w;
  w.begin_object();
  w.key("extractor").value(to_string(params.extractor));
  w.key("extractor_trainable").value(params.extractor_trainable);
  w.key("tensors").begin_array();
  const auto save_tensor = [&](const char* name, const DenseMatrix& m) {
    if (m.empty()) return;
    w.begin_object();
    w.key("name").value(name);
    w.key("rows").value(m.rows());
    w.key("cols").value(m.cols());
    w.key("file").value(std::string(name) + ".lrfm");
    w.end_object();
    write_lrfm(dir + "/" + name + ".lrfm", m);
  };
  save_tensor("a1", params.a1);
  save_tensor("a2", params.a2);
  save_tensor("head", params.head);
  w.end_array();
  w.end_object();
  write_file(dir + "/params.json", w.str());
}

ModelParams load_checkpoint(const std::string& dir) {
  const json j = parse_json(read_file(dir + "/params.json"), "checkpoint");
  ModelParams p;
  p.extractor = extractor_from_string(get_string(j, "extractor", "identity"));
  p.extractor_trainable = get_bool(j, "extractor_trainable", false);
  if (!j.contains("tensors") || !j["tensors"].is_array()) {
    throw config_error("checkpoint: missing tensors list");
  }
  for (const auto& t : j["tensors"]) {
    const std::string name = t.at("name").get<std::string>();
    const std::string file = t.at("file").get<std::string>();
    DenseMatrix m = read_lrfm(dir + "/" + file);
    if (m.rows() != t.at("rows").get<std::size_t>() ||
        m.cols() != t.at("cols").get<std::size_t>()) {
      throw parse_error(dir + "/" + file, 1, "tensor shape mismatch vs params.json");
    }
    if (name == "a1") p.a1 = std::move(m);
    else if (name == "a2") p.a2 = std::move(m);
    else if (name == "head") p.head = std::move(m);
    else throw config_error("checkpoint: unknown tensor '" + name + "'");
  }
  if (p.head.empty()) throw config_error("checkpoint: missing head tensor");
  return p;
}

std::string split_plan_to_json(const SplitPlan& plan) {
  JsonWriter w;
  w.begin_object();
  w.key("seed").value(plan.seed);
  w.key("fraction").value(plan.fraction);
  w.key("train");
  emit_index_array(w, plan.train_indices);
  w.key("val");
  emit_index_array(w, plan.val_indices);
  w.key("test");
  emit_index_array(w, plan.test_indices);
  w.end_object();
  return w.str();
}

std::string eval_report_to_json(const EvalReport& report,
                                const std::vector<std::string>& class_names) {
  JsonWriter w;
  w.begin_object();
  w.key("n_eval").value(report.n_eval);
  w.key("mean_auc").value(report.mean_auc);
  w.key("per_class_auc");
  emit_double_array(w, report.per_class_auc);
  w.key("excluded_classes");
  emit_index_array(w, report.excluded_classes);
  w.key("class_names").begin_array();
  for (const std::string& name : class_names) w.value(name);
  w.end_array();
  if (report.top1.has_value()) {
    w.key("top1_accuracy").value(*report.top1);
    w.key("per_class_sensitivity");
    emit_double_array(w, report.per_class_sensitivity);
  }
  w.end_object();
  return w.str();
}

std::string spectrum_report_to_json(const SpectrumReport& report) {
  JsonWriter w;
  w.begin_object();
  w.key("eigenvalues");
  emit_double_array(w, report.eigenvalues);
  w.key("eigen_projection");
  emit_double_array(w, report.eigen_projection);
  w.key("concentration");
  emit_double_array(w, report.concentration);
  w.key("complexity_value").value(report.complexity_value);
  w.key("complexity_argmin_h").value(report.complexity_argmin_h);
  w.key("tail_sigma_sum");
  emit_double_array(w, report.tail_sigma_sum);
  w.end_object();
  return w.str();
}

std::string spectrum_report_to_csv(const SpectrumReport& report) {
  std::string out = "rank,eigenvalue,projection,concentration\n";
  char buf[160];
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i + 1,
                  report.eigenvalues[i], report.eigen_projection[i],
                  report.concentration[i]);
    out += buf;
  }
  return out;
}

std::string bound_terms_to_json(const BoundTerms& terms, const RemarkGap& gap,
                                std::size_t gap_rank) {
  JsonWriter w;
  w.begin_object();
  w.key("label_residual").value(terms.label_residual);
  w.key("optimization_term").value(terms.optimization_term);
  w.key("complexity_term").value(terms.complexity_term);
  w.key("confidence_term").value(terms.confidence_term);
  w.key("total").value(terms.total);
  w.key("rank_used").value(terms.rank_used);
  w.key("constants").begin_object();
  w.key("c1").value(terms.constants.c1);
  w.key("c2").value(terms.constants.c2);
  w.key("c3").value(terms.constants.c3);
  w.key("x").value(terms.constants.x);
  w.end_object();
  w.key("tail_comparison").begin_object();
  w.key("rank").value(gap_rank);
  w.key("sqrt_mean_tail_eigenvalues").value(gap.lhs);
  w.key("mean_tail_singular_values").value(gap.rhs);
  w.key("holds").value(gap.holds);
  w.end_object();
  w.end_object();
  return w.str();
}

std::string tune_result_to_json(const TuneResult& result) {
  JsonWriter w;
  w.begin_object();
  w.key("best_gamma").value(result.best_gamma);
  w.key("best_eta").value(result.best_eta);
  w.key("cells").begin_array();
  for (const CellScore& cell : result.table) {
    w.begin_object();
    w.key("gamma").value(cell.gamma);
    w.key("eta").value(cell.eta);
    w.key("failed").value(cell.failed);
    w.key("mean_score").value(cell.mean_score);
    w.key("fold_scores");
    emit_double_array(w, cell.fold_scores);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.str();
}

std::string rank_sweep_to_csv(const std::vector<RankSweepRow>& rows) {
  std::string out = "gamma,rank_t,mean_auc\n";
  char buf[120];
  for (const RankSweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%zu,%.17g\n", r.gamma, r.rank_t,
                  r.mean_auc);
    out += buf;
  }
  return out;
}

std::string small_data_to_csv(const std::vector<SmallDataRow>& rows) {
  std::string out = "fraction,mean_auc_baseline,mean_auc_lrfl\n";
  char buf[160];
  for (const SmallDataRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r.fraction,
                  r.mean_auc_baseline, r.mean_auc_lrfl);
    out += buf;
  }
  return out;
}

std::string file_digest(const std::string& path) {
  const std::string bytes = read_file(path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string manifest_to_json(const RunManifest& manifest) {
  JsonWriter w;
  w.begin_object();
  w.key("command").value(manifest.command);
  w.key("tool_version").value(manifest.tool_version);
  w.key("seed").value(manifest.seed);
  w.key("threads").value(manifest.threads);
  w.key("config").value_raw(manifest.config_json.empty() ? "{}" : manifest.config_json);
  w.key("inputs").begin_array();
  for (const auto& [path, digest] : manifest.inputs) {
    w.begin_object();
    w.key("path").value(path);
    w.key("fnv1a64").value(digest);
    w.end_object();
  }
  w.end_array();
  w.key("outputs").begin_array();
  for (const std::string& path : manifest.outputs) w.value(path);
  w.end_array();
  w.key("duration_seconds").value(manifest.duration_seconds);
  w.end_object();
  return w.str();
}

}  // namespace lorank
