#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lorank/analysis.hpp"
#include "lorank/dataset.hpp"
#include "lorank/lrfl.hpp"
#include "lorank/metrics.hpp"
#include "lorank/model.hpp"
#include "lorank/tuning.hpp"

namespace lorank {

/// Parses a TrainConfig from a JSON file; missing fields keep their
/// defaults, unknown fields are a config_error (typo protection).
TrainConfig train_config_from_json(const std::string& json_text,
                                   const TrainConfig& defaults = {});
TrainConfig train_config_from_file(const std::string& path,
                                   const TrainConfig& defaults = {});

GridSpec grid_from_json(const std::string& json_text, const GridSpec& defaults = {});
GridSpec grid_from_file(const std::string& path, const GridSpec& defaults = {});

/// Deterministic JSON snapshot of the merged effective config.
std::string train_config_to_json(const TrainConfig& config);

/// One JSON object per line, floats at 17 significant digits.
std::string train_log_to_jsonl(const TrainLog& log);

/// Checkpoint = params.json (shapes, extractor kind, tensor file list)
/// plus one LRFM blob per tensor, all inside dir.
void save_checkpoint(const std::string& dir, const ModelParams& params);
ModelParams load_checkpoint(const std::string& dir);

std::string split_plan_to_json(const SplitPlan& plan);
std::string eval_report_to_json(const EvalReport& report,
                                const std::vector<std::string>& class_names);
std::string spectrum_report_to_json(const SpectrumReport& report);
/// CSV with columns rank, eigenvalue, projection, concentration.
std::string spectrum_report_to_csv(const SpectrumReport& report);
std::string bound_terms_to_json(const BoundTerms& terms, const RemarkGap& gap,
                                std::size_t gap_rank);
std::string tune_result_to_json(const TuneResult& result);
std::string rank_sweep_to_csv(const std::vector<RankSweepRow>& rows);
std::string small_data_to_csv(const std::vector<SmallDataRow>& rows);

/// FNV-1a 64-bit digest of a file's bytes, as 16 lowercase hex digits.
std::string file_digest(const std::string& path);

struct RunManifest {
  std::string command;
  std::string config_json;  // pre-serialized effective config (may be "{}")
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, digest
  std::vector<std::string> outputs;
  std::string tool_version;
  double duration_seconds = 0.0;
  std::uint64_t threads = 1;
};

std::string manifest_to_json(const RunManifest& manifest);

}  // namespace lorank
