#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dtscore/data_model.hpp"

namespace dtscore {

enum class PoolingStrategy { Mean, Cls };
enum class BackendKind { Test, Remote, Local };

std::string_view pooling_name(PoolingStrategy p) noexcept;
std::string_view backend_name(BackendKind b) noexcept;
std::optional<PoolingStrategy> parse_pooling(std::string_view s) noexcept;
std::optional<BackendKind> parse_backend(std::string_view s) noexcept;

struct ModelConfig {
  std::string model_id;
  BackendKind backend = BackendKind::Test;
  PoolingStrategy pooling = PoolingStrategy::Mean;
  std::size_t dim = 0;
  std::optional<std::filesystem::path> stopword_list;
  std::optional<std::string> endpoint;                  // REMOTE
  std::optional<std::filesystem::path> artifact_path;  // LOCAL
  std::size_t batch_size = 32;
  int max_retries = 3;
  int backoff_ms = 200;  // first retry delay, doubled each attempt
};

// Throws ConfigError when a backend-specific field is missing or dim == 0.
void validate(const ModelConfig& config);

class StopwordList {
 public:
  StopwordList() = default;
  // Throws InvalidArgument on an empty entry.
  explicit StopwordList(std::unordered_set<std::string> entries);

  // UTF-8, one token per line; '#' lines and blank lines are skipped.
  static StopwordList load(const std::filesystem::path& path);

  bool contains(std::string_view token) const;
  std::size_t count() const noexcept { return entries_.size(); }

 private:
  std::unordered_set<std::string> entries_;
};

std::vector<std::string> filter_stopwords(std::span<const std::string> tokens, const StopwordList& list);

// Component-wise mean. Throws EmptyInput / DimensionMismatch.
EmbeddingVector mean_pool(std::span<const EmbeddingVector> token_vectors);
// First token vector. Throws EmptyInput.
EmbeddingVector cls_pool(std::span<const EmbeddingVector> token_vectors);
EmbeddingVector pool(std::span<const EmbeddingVector> token_vectors, PoolingStrategy strategy);

// Deterministic oracle embedding: signed, weighted character-bigram hashing
// (FNV-1a 64 + splitmix64 finalizer) into `dim` buckets, L2-normalized.
// Text is bracketed by U+0002/U+0003 so a single character still yields two
// bigrams. Throws EmptyInput for empty text, InvalidArgument for dim == 0.
EmbeddingVector test_embed(std::string_view text, std::size_t dim);

// Rounds every component to binary32. Backend output passes through this so
// cached and freshly computed vectors are bit-identical.
EmbeddingVector quantize_f32(const EmbeddingVector& v);

}  // namespace dtscore
