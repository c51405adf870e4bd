#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dtscore/backend.hpp"
#include "dtscore/cache.hpp"
#include "dtscore/embedding.hpp"

namespace dtscore {

struct EmbedStats {
  std::size_t embeddings = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::size_t cache_corrupt = 0;
};

// Cache-fronted embedding for one model. embed_batch may be called from
// several threads; output order always follows input order.
class EmbeddingProvider {
 public:
  // `cache` may be null (caching disabled) and must outlive the provider.
  EmbeddingProvider(ModelConfig config, std::unique_ptr<EmbeddingBackend> backend, EmbeddingCache* cache);

  // Texts are NFC-normalized and trimmed before lookup and embedding. Throws
  // EmptyInput for an empty batch or empty text, DimensionMismatch when the
  // backend disagrees with config.dim, BackendUnavailable from the backend.
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts);

  EmbedStats stats() const noexcept;
  const ModelConfig& config() const noexcept { return config_; }

 private:
  ModelConfig config_;
  std::unique_ptr<EmbeddingBackend> backend_;
  EmbeddingCache* cache_;
  std::atomic<std::size_t> embeddings_{0};
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
  std::atomic<std::size_t> corrupt_{0};
};

// Convenience wrapper constructing the backend from the config.
std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts, const ModelConfig& config,
                                         EmbeddingCache* cache = nullptr);

}  // namespace dtscore
