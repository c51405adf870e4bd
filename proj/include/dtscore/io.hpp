#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtscore/data_model.hpp"
#include "dtscore/embedding.hpp"
#include "dtscore/provider.hpp"
#include "dtscore/scoring.hpp"

namespace dtscore {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct RunConfig {
  std::vector<ModelConfig> models;
  std::size_t top_k = 3;
  StandardizeScope standardize_scope = StandardizeScope::PerPrompt;
  bool elaboration_cjk_only = false;
  std::filesystem::path cache_dir;
  std::filesystem::path output_dir;
  std::map<std::string, std::string> prompts;  // prompt_id -> prompt_text
  std::vector<std::string> ensemble_models;    // defaults to every model
  std::string digest;                          // SHA-256 of the canonical JSON
};

// Parses run.json. Relative paths resolve against `base_dir`. Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// CSV with header subject_id,prompt_id,order,response_text[,group_label].
// Errors carry the data row number (header = row 0).
std::vector<ResponseRecord> parse_responses(const std::filesystem::path& path);
std::vector<ResponseRecord> parse_responses_text(const std::string& content);

// CSV with header subject_id,prompt_id,order,rater_id,rating,rating_kind.
// rating_kind is "originality" (0-4) or "flexibility" (1-5; order 0 means
// the rating applies to the whole trial).
std::vector<HumanRating> parse_ratings(const std::filesystem::path& path);
std::vector<HumanRating> parse_ratings_text(const std::string& content);

// Subject-level rows read back from subject_scores.csv.
std::vector<SubjectScoreRow> read_subject_scores(const std::filesystem::path& path);

struct ModelRunStats {
  ModelConfig model;
  EmbedStats stats;
};

struct RunManifest {
  std::string config_digest;
  std::string dataset_digest;
  std::string tool_version = kToolVersion;
  std::size_t top_k = 3;
  StandardizeScope standardize_scope = StandardizeScope::PerPrompt;
  bool cache_enabled = true;
  std::vector<ModelRunStats> models;
  std::string timestamp;  // ISO 8601 UTC
};

// Current UTC time, or SOURCE_DATE_EPOCH when set (reproducible builds convention).
std::string manifest_timestamp();
std::string manifest_json(const RunManifest& manifest);

std::string response_scores_csv(const ScoreTable& table);
std::string subject_scores_csv(const ScoreTable& table);
std::string ensemble_scores_csv(const ScoreTable& table);

// Writes response_scores.csv, subject_scores.csv, ensemble_scores.csv and
// run_manifest.json into `dir`, creating it if needed. Throws IoError.
std::vector<std::filesystem::path> export_scores(const ScoreTable& table, const RunManifest& manifest,
                                                 const std::filesystem::path& dir);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::string& bytes);

}  // namespace dtscore
