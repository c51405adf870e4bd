#include "dtscore/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "dtscore/error.hpp"
#include "dtscore/text.hpp"

#include <httplib.h>
#include <json.hpp>

namespace dtscore {

std::vector<std::vector<double>> TestBackend::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const auto v = test_embed(t, dim_);
    out.emplace_back(v.values().begin(), v.values().end());
  }
  return out;
}

RemoteBackend::RemoteBackend(std::string endpoint, std::string model_id, std::optional<std::string> bearer_token,
                             int max_retries, int backoff_ms)
    : model_id_(std::move(model_id)),
      token_(std::move(bearer_token)),
      max_retries_(max_retries),
      backoff_ms_(backoff_ms) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::ConfigError, "endpoint '" + endpoint + "' must include a scheme (http:// or https://)");
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = endpoint;
    path_.clear();
  } else {
    scheme_host_port_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/embed";
}

std::vector<std::vector<double>> RemoteBackend::attempt(std::span<const std::string> texts) const {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(60, 0);
  httplib::Headers headers;
  if (token_) headers.emplace("Authorization", "Bearer " + *token_);

  nlohmann::json body = {{"model", model_id_}, {"texts", nlohmann::json::array()}};
  for (const auto& t : texts) body["texts"].push_back(t);

  const auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(Errc::BackendUnavailable, scheme_host_port_ + path_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(Errc::BackendUnavailable, scheme_host_port_ + path_ + ": HTTP " + std::to_string(res->status));
  }

  std::vector<std::vector<double>> vectors;
  try {
    const auto reply = nlohmann::json::parse(res->body);
    const auto& arr = reply.at("vectors");
    if (!arr.is_array()) throw std::runtime_error("'vectors' is not an array");
    for (const auto& row : arr) {
      if (!row.is_array()) throw std::runtime_error("vector entry is not an array");
      std::vector<double> v;
      v.reserve(row.size());
      for (const auto& x : row) {
        if (!x.is_number()) throw std::runtime_error("non-numeric vector component");
        v.push_back(x.get<double>());
      }
      vectors.push_back(std::move(v));
    }
  } catch (const std::exception& e) {
    throw Error(Errc::BackendUnavailable, "malformed response body: " + std::string(e.what()));
  }
  if (vectors.size() != texts.size()) {
    throw Error(Errc::BackendUnavailable, "backend returned " + std::to_string(vectors.size()) +
                                              " vectors for " + std::to_string(texts.size()) + " texts");
  }
  return vectors;
}

std::vector<std::vector<double>> RemoteBackend::embed(std::span<const std::string> texts) {
  int delay = backoff_ms_;
  for (int tries = 0;; ++tries) {
    try {
      return attempt(texts);
    } catch (const Error& e) {
      if (tries >= max_retries_) {
        throw Error(Errc::BackendUnavailable, "giving up after " + std::to_string(tries + 1) +
                                                  " attempts; last error: " + e.what());
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    delay *= 2;
  }
}

StaticVectorBackend::StaticVectorBackend(const std::filesystem::path& table, std::size_t dim,
                                         PoolingStrategy pooling, std::optional<StopwordList> stopwords)
    : dim_(dim), pooling_(pooling), stopwords_(std::move(stopwords)) {
  std::ifstream in(table, std::ios::binary);
  if (!in) throw Error(Errc::BackendUnavailable, "cannot open word-vector table " + table.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;
    std::vector<double> values;
    double x = 0.0;
    while (ss >> x) values.push_back(x);
    if (line_no == 1 && values.size() == 1) continue;  // "count dim" header
    if (values.size() != dim_) {
      throw Error(Errc::DimensionMismatch, table.string() + ":" + std::to_string(line_no) + ": expected " +
                                               std::to_string(dim_) + " components, got " +
                                               std::to_string(values.size()));
    }
    max_token_chars_ = std::max(max_token_chars_, text::decode_utf8(token).size());
    table_.insert_or_assign(token, EmbeddingVector(std::move(values)));
  }
  if (table_.empty()) throw Error(Errc::BackendUnavailable, "word-vector table " + table.string() + " is empty");
}

std::vector<std::string> StaticVectorBackend::tokenize(std::string_view input) const {
  std::vector<std::string> tokens;
  const auto cps = text::decode_utf8(input);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (text::is_whitespace(cps[i])) {
      ++i;
      continue;
    }
    std::size_t chunk_end = i;
    while (chunk_end < cps.size() && !text::is_whitespace(cps[chunk_end])) ++chunk_end;
    // Forward maximum matching within the whitespace-delimited chunk.
    while (i < chunk_end) {
      const std::size_t longest = std::min(max_token_chars_, chunk_end - i);
      bool matched = false;
      for (std::size_t len = longest; len >= 1; --len) {
        std::string candidate;
        for (std::size_t k = i; k < i + len; ++k) candidate += text::encode_utf8(cps[k]);
        if (table_.contains(candidate)) {
          tokens.push_back(std::move(candidate));
          i += len;
          matched = true;
          break;
        }
      }
      if (!matched) ++i;  // out of vocabulary
    }
  }
  return tokens;
}

std::vector<std::vector<double>> StaticVectorBackend::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto tokens = tokenize(t);
    if (stopwords_) tokens = filter_stopwords(tokens, *stopwords_);
    if (tokens.empty()) {
      throw Error(Errc::EmptyInput, "no in-vocabulary tokens left in '" + t + "'");
    }
    std::vector<EmbeddingVector> token_vectors;
    token_vectors.reserve(tokens.size());
    for (const auto& tok : tokens) token_vectors.push_back(table_.at(tok));
    const auto pooled = pool(token_vectors, pooling_);
    out.emplace_back(pooled.values().begin(), pooled.values().end());
  }
  return out;
}

std::unique_ptr<EmbeddingBackend> make_backend(const ModelConfig& config) {
  validate(config);
  switch (config.backend) {
    case BackendKind::Test:
      return std::make_unique<TestBackend>(config.dim);
    case BackendKind::Remote: {
      std::optional<std::string> token;
      if (const char* env = std::getenv("EMBED_API_TOKEN"); env != nullptr && *env != '\0') token = env;
      return std::make_unique<RemoteBackend>(*config.endpoint, config.model_id, token, config.max_retries,
                                             config.backoff_ms);
    }
    case BackendKind::Local: {
      std::optional<StopwordList> stopwords;
      if (config.stopword_list) stopwords = StopwordList::load(*config.stopword_list);
      return std::make_unique<StaticVectorBackend>(*config.artifact_path, config.dim, config.pooling,
                                                   std::move(stopwords));
    }
  }
  throw Error(Errc::ConfigError, "unknown backend");
}

}  // namespace dtscore
