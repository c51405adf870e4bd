#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtscore/embedding.hpp"

namespace dtscore {

// Produces one raw sentence vector per input text. Implementations must be
// safe to call from several threads at once.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
};

class TestBackend final : public EmbeddingBackend {
 public:
  explicit TestBackend(std::size_t dim) : dim_(dim) {}
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;

 private:
  std::size_t dim_;
};

// POST {endpoint}/embed with {"model": id, "texts": [...]}, expecting
// {"vectors": [[...], ...]}. Transport failures, non-200 replies and malformed
// bodies are retried with exponential backoff, then BackendUnavailable.
class RemoteBackend final : public EmbeddingBackend {
 public:
  RemoteBackend(std::string endpoint, std::string model_id, std::optional<std::string> bearer_token,
                int max_retries, int backoff_ms);
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;

 private:
  std::vector<std::vector<double>> attempt(std::span<const std::string> texts) const;

  std::string scheme_host_port_;
  std::string path_;
  std::string model_id_;
  std::optional<std::string> token_;
  int max_retries_;
  int backoff_ms_;
};

// Static word-vector table (word2vec text format: optional "count dim"
// header line, then "token v1 ... vdim" per line). Text is split on
// whitespace and each chunk is segmented by forward maximum matching against
// the vocabulary; out-of-vocabulary characters are dropped. Optional stop
// words are removed before pooling.
class StaticVectorBackend final : public EmbeddingBackend {
 public:
  StaticVectorBackend(const std::filesystem::path& table, std::size_t dim, PoolingStrategy pooling,
                      std::optional<StopwordList> stopwords);
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;

  std::vector<std::string> tokenize(std::string_view text) const;
  std::size_t vocabulary_size() const noexcept { return table_.size(); }

 private:
  std::unordered_map<std::string, EmbeddingVector> table_;
  std::size_t max_token_chars_ = 1;
  std::size_t dim_;
  PoolingStrategy pooling_;
  std::optional<StopwordList> stopwords_;
};

// Reads EMBED_API_TOKEN for the remote backend.
std::unique_ptr<EmbeddingBackend> make_backend(const ModelConfig& config);

}  // namespace dtscore
