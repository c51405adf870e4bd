#include "dtscore/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "dtscore/csv.hpp"
#include "dtscore/digest.hpp"
#include "dtscore/error.hpp"
#include "dtscore/text.hpp"

namespace dtscore {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::ConfigError, where + ": field '" + key + "' has the wrong type");
  }
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw Error(Errc::ConfigError, where + ": unknown field '" + key + "'");
  }
}

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::size_t require_column(const csv::Table& t, std::string_view name) {
  const auto c = t.column(name);
  if (!c) throw Error(Errc::SchemaError, "row 0: missing column '" + std::string(name) + "'");
  return *c;
}

std::string row_tag(std::size_t r) { return "row " + std::to_string(r + 1); }

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigError, std::string("run config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ConfigError, "run config must be a JSON object");
  reject_unknown_keys(doc,
                      {"schema_version", "top_k", "standardize_scope", "elaboration_cjk_only", "cache_dir",
                       "output_dir", "prompts", "models", "ensemble_models"},
                      "run config");

  RunConfig cfg;
  cfg.digest = sha256_hex(doc.dump());
  const int version = get_or<int>(doc, "schema_version", kConfigSchemaVersion, "run config");
  if (version != kConfigSchemaVersion) {
    throw Error(Errc::ConfigError, "unsupported schema_version " + std::to_string(version));
  }
  const auto top_k = get_or<long long>(doc, "top_k", 3, "run config");
  if (top_k < 1) throw Error(Errc::ConfigError, "top_k must be >= 1");
  cfg.top_k = static_cast<std::size_t>(top_k);

  const auto scope = get_or<std::string>(doc, "standardize_scope", "per_prompt", "run config");
  if (scope == "per_prompt") {
    cfg.standardize_scope = StandardizeScope::PerPrompt;
  } else if (scope == "global") {
    cfg.standardize_scope = StandardizeScope::Global;
  } else {
    throw Error(Errc::ConfigError, "standardize_scope must be 'per_prompt' or 'global'");
  }
  cfg.elaboration_cjk_only = get_or<bool>(doc, "elaboration_cjk_only", false, "run config");
  cfg.cache_dir = resolve(base_dir, get_or<std::string>(doc, "cache_dir", "cache", "run config"));
  cfg.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "out", "run config"));

  const auto prompts = doc.find("prompts");
  if (prompts == doc.end() || !prompts->is_object() || prompts->empty()) {
    throw Error(Errc::ConfigError, "run config needs a nonempty 'prompts' object");
  }
  for (const auto& [id, value] : prompts->items()) {
    if (id.empty() || !value.is_string() || text::trim(value.get<std::string>()).empty()) {
      throw Error(Errc::ConfigError, "prompt '" + id + "' must map a nonempty id to nonempty text");
    }
    cfg.prompts.emplace(id, value.get<std::string>());
  }

  const auto models = doc.find("models");
  if (models == doc.end() || !models->is_array() || models->empty()) {
    throw Error(Errc::ConfigError, "run config needs a nonempty 'models' array");
  }
  std::set<std::string> seen;
  for (const auto& m : *models) {
    if (!m.is_object()) throw Error(Errc::ConfigError, "each model entry must be an object");
    ModelConfig mc;
    mc.model_id = get_or<std::string>(m, "model_id", "", "model");
    const std::string where = "model '" + mc.model_id + "'";
    reject_unknown_keys(m,
                        {"model_id", "backend", "pooling", "dim", "stopword_list", "endpoint", "artifact_path",
                         "batch_size", "max_retries", "backoff_ms"},
                        where);
    const auto backend = parse_backend(get_or<std::string>(m, "backend", "", where));
    if (!backend) throw Error(Errc::ConfigError, where + ": backend must be test, remote or local");
    mc.backend = *backend;
    const auto pooling = parse_pooling(get_or<std::string>(m, "pooling", "mean", where));
    if (!pooling) throw Error(Errc::ConfigError, where + ": pooling must be mean or cls");
    mc.pooling = *pooling;
    const auto dim = get_or<long long>(m, "dim", 0, where);
    if (dim <= 0) throw Error(Errc::ConfigError, where + ": dim must be > 0");
    mc.dim = static_cast<std::size_t>(dim);
    if (m.contains("stopword_list")) mc.stopword_list = resolve(base_dir, get_or<std::string>(m, "stopword_list", "", where));
    if (m.contains("endpoint")) mc.endpoint = get_or<std::string>(m, "endpoint", "", where);
    if (m.contains("artifact_path")) mc.artifact_path = resolve(base_dir, get_or<std::string>(m, "artifact_path", "", where));
    const auto batch = get_or<long long>(m, "batch_size", 32, where);
    if (batch < 1) throw Error(Errc::ConfigError, where + ": batch_size must be >= 1");
    mc.batch_size = static_cast<std::size_t>(batch);
    mc.max_retries = get_or<int>(m, "max_retries", 3, where);
    mc.backoff_ms = get_or<int>(m, "backoff_ms", 200, where);
    validate(mc);
    if (!seen.insert(mc.model_id).second) throw Error(Errc::ConfigError, "duplicate model_id '" + mc.model_id + "'");
    cfg.models.push_back(std::move(mc));
  }

  if (const auto ens = doc.find("ensemble_models"); ens != doc.end()) {
    if (!ens->is_array() || ens->empty()) throw Error(Errc::ConfigError, "ensemble_models must be a nonempty array");
    std::set<std::string> listed;
    for (const auto& id : *ens) {
      if (!id.is_string() || !seen.contains(id.get<std::string>())) {
        throw Error(Errc::ConfigError, "ensemble_models lists an unknown model " + id.dump());
      }
      if (!listed.insert(id.get<std::string>()).second) {
        throw Error(Errc::ConfigError, "ensemble_models lists " + id.dump() + " twice");
      }
      cfg.ensemble_models.push_back(id.get<std::string>());
    }
  } else {
    for (const auto& m : cfg.models) cfg.ensemble_models.push_back(m.model_id);
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file_bytes(path), path.parent_path());
}

std::vector<ResponseRecord> parse_responses_text(const std::string& content) {
  const auto table = csv::parse(content);
  if (table.header.empty()) throw Error(Errc::SchemaError, "row 0: missing header");
  const auto c_subject = require_column(table, "subject_id");
  const auto c_prompt = require_column(table, "prompt_id");
  const auto c_order = require_column(table, "order");
  const auto c_text = require_column(table, "response_text");
  const auto c_group = table.column("group_label");

  std::vector<ResponseRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ResponseRecord rec;
    rec.subject_id = text::trim(row[c_subject]);
    rec.prompt_id = text::trim(row[c_prompt]);
    const auto order = parse_int(text::trim(row[c_order]));
    if (!order || *order < 1 || *order > std::numeric_limits<int>::max()) {
      throw Error(Errc::ParseError, row_tag(r) + ": order '" + row[c_order] + "' is not a positive integer");
    }
    rec.order = static_cast<int>(*order);
    rec.response_text = row[c_text];
    if (c_group) {
      auto g = text::trim(row[*c_group]);
      if (!g.empty()) rec.group_label = std::move(g);
    }
    if (text::trim(rec.response_text).empty()) throw Error(Errc::ParseError, row_tag(r) + ": empty response_text");
    try {
      out.push_back(validate_record(std::move(rec)));
    } catch (const Error& e) {
      throw Error(Errc::ParseError, row_tag(r) + ": " + e.detail());
    }
  }
  return out;
}

std::vector<ResponseRecord> parse_responses(const std::filesystem::path& path) {
  try {
    return parse_responses_text(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() == Errc::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::vector<HumanRating> parse_ratings_text(const std::string& content) {
  const auto table = csv::parse(content);
  if (table.header.empty()) throw Error(Errc::SchemaError, "row 0: missing header");
  const auto c_subject = require_column(table, "subject_id");
  const auto c_prompt = require_column(table, "prompt_id");
  const auto c_order = require_column(table, "order");
  const auto c_rater = require_column(table, "rater_id");
  const auto c_rating = require_column(table, "rating");
  const auto c_kind = require_column(table, "rating_kind");

  std::vector<HumanRating> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    HumanRating h;
    h.subject_id = text::trim(row[c_subject]);
    h.prompt_id = text::trim(row[c_prompt]);
    h.rater_id = text::trim(row[c_rater]);
    if (h.subject_id.empty() || h.prompt_id.empty() || h.rater_id.empty()) {
      throw Error(Errc::ParseError, row_tag(r) + ": subject_id, prompt_id and rater_id must be nonempty");
    }
    const auto kind = parse_rating_kind(text::trim(row[c_kind]));
    if (!kind) {
      throw Error(Errc::ParseError, row_tag(r) + ": rating_kind '" + row[c_kind] +
                                        "' must be originality or flexibility");
    }
    h.kind = *kind;
    const auto order = parse_int(text::trim(row[c_order]));
    const long long min_order = h.kind == RatingKind::Originality ? 1 : 0;
    if (!order || *order < min_order || *order > std::numeric_limits<int>::max()) {
      throw Error(Errc::ParseError, row_tag(r) + ": invalid order '" + row[c_order] + "'");
    }
    h.order = static_cast<int>(*order);
    const auto rating = parse_double(text::trim(row[c_rating]));
    if (!rating) throw Error(Errc::ParseError, row_tag(r) + ": rating '" + row[c_rating] + "' is not a number");
    const auto scale = rating_scale(h.kind);
    if (*rating < scale.min || *rating > scale.max) {
      throw Error(Errc::RangeError, row_tag(r) + ": " + std::string(rating_kind_name(h.kind)) + " rating " +
                                        csv::format_number(*rating) + " outside [" + csv::format_number(scale.min) +
                                        ", " + csv::format_number(scale.max) + "]");
    }
    h.rating = *rating;
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<HumanRating> parse_ratings(const std::filesystem::path& path) {
  try {
    return parse_ratings_text(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() == Errc::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::vector<SubjectScoreRow> read_subject_scores(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const auto where = path.string() + ": ";
  if (table.header.empty()) throw Error(Errc::SchemaError, where + "row 0: missing header");
  std::size_t cols[6];
  const char* names[6] = {"subject_id", "prompt_id", "model_id", "originality_topk", "flexibility_sum", "fluency"};
  for (int i = 0; i < 6; ++i) {
    const auto c = table.column(names[i]);
    if (!c) throw Error(Errc::SchemaError, where + "row 0: missing column '" + names[i] + "'");
    cols[i] = *c;
  }
  std::vector<SubjectScoreRow> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto orig = parse_double(row[cols[3]]);
    const auto flex = parse_double(row[cols[4]]);
    const auto flu = parse_int(row[cols[5]]);
    if (!orig || !flex || !flu) throw Error(Errc::ParseError, where + row_tag(r) + ": malformed numeric field");
    out.push_back(SubjectScoreRow{row[cols[0]], row[cols[1]], row[cols[2]], *orig, *flex, static_cast<int>(*flu)});
  }
  return out;
}

std::string manifest_timestamp() {
  std::time_t t = 0;
  const char* sde = std::getenv("SOURCE_DATE_EPOCH");
  if (const auto v = sde ? parse_int(sde) : std::nullopt; v) {
    t = static_cast<std::time_t>(*v);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  json doc;
  doc["schema_version"] = kManifestSchemaVersion;
  doc["tool_version"] = m.tool_version;
  doc["config_digest"] = m.config_digest;
  doc["dataset_digest"] = m.dataset_digest;
  doc["top_k"] = m.top_k;
  doc["standardize_scope"] = std::string(scope_name(m.standardize_scope));
  doc["cache_enabled"] = m.cache_enabled;
  doc["timestamp"] = m.timestamp;
  json models = json::array();
  for (const auto& entry : m.models) {
    models.push_back({{"model_id", entry.model.model_id},
                      {"backend", std::string(backend_name(entry.model.backend))},
                      {"pooling", std::string(pooling_name(entry.model.pooling))},
                      {"dim", entry.model.dim},
                      {"embeddings", entry.stats.embeddings},
                      {"cache_hits", entry.stats.cache_hits},
                      {"cache_misses", entry.stats.cache_misses},
                      {"cache_corrupt", entry.stats.cache_corrupt}});
  }
  doc["models"] = std::move(models);
  return doc.dump(2) + "\n";
}

std::string response_scores_csv(const ScoreTable& table) {
  auto rows = table.response_scores;
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.subject_id, a.prompt_id, a.order, a.model_id) <
           std::tie(b.subject_id, b.prompt_id, b.order, b.model_id);
  });
  std::string out = csv::format_row(
      {"subject_id", "prompt_id", "order", "model_id", "originality_distance", "elaboration"});
  for (const auto& r : rows) {
    out += csv::format_row({r.subject_id, r.prompt_id, std::to_string(r.order), r.model_id,
                            csv::format_number(r.originality_distance), std::to_string(r.elaboration)});
  }
  return out;
}

std::string subject_scores_csv(const ScoreTable& table) {
  auto rows = table.subject_scores;
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.subject_id, a.prompt_id, a.model_id) < std::tie(b.subject_id, b.prompt_id, b.model_id);
  });
  std::string out = csv::format_row(
      {"subject_id", "prompt_id", "model_id", "originality_topk", "flexibility_sum", "fluency"});
  for (const auto& r : rows) {
    out += csv::format_row({r.subject_id, r.prompt_id, r.model_id, csv::format_number(r.originality_topk),
                            csv::format_number(r.flexibility_sum), std::to_string(r.fluency)});
  }
  return out;
}

std::string ensemble_scores_csv(const ScoreTable& table) {
  auto rows = table.ensemble_scores;
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.subject_id, a.prompt_id) < std::tie(b.subject_id, b.prompt_id);
  });
  std::string out = csv::format_row(
      {"subject_id", "prompt_id", "originality_z_mean", "flexibility_z_mean", "group_label"});
  for (const auto& r : rows) {
    out += csv::format_row({r.subject_id, r.prompt_id, csv::format_number(r.originality_z_mean),
                            csv::format_number(r.flexibility_z_mean), r.group_label});
  }
  return out;
}

std::vector<std::filesystem::path> export_scores(const ScoreTable& table, const RunManifest& manifest,
                                                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());
  const std::vector<std::pair<std::string, std::string>> files = {
      {"response_scores.csv", response_scores_csv(table)},
      {"subject_scores.csv", subject_scores_csv(table)},
      {"ensemble_scores.csv", ensemble_scores_csv(table)},
      {"run_manifest.json", manifest_json(manifest)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [name, bytes] : files) {
    write_file_bytes(dir / name, bytes);
    written.push_back(dir / name);
  }
  return written;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace dtscore
