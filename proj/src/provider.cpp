#include "dtscore/provider.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "dtscore/error.hpp"
#include "dtscore/text.hpp"

namespace dtscore {

EmbeddingProvider::EmbeddingProvider(ModelConfig config, std::unique_ptr<EmbeddingBackend> backend,
                                     EmbeddingCache* cache)
    : config_(std::move(config)), backend_(std::move(backend)), cache_(cache) {
  validate(config_);
  if (!backend_) throw Error(Errc::ConfigError, "model '" + config_.model_id + "' has no backend");
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_batch(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(Errc::EmptyInput, "embed_batch called with no texts");

  std::vector<std::string> normalized;
  normalized.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto n = text::normalize(texts[i]);
    if (n.empty()) throw Error(Errc::EmptyInput, "text #" + std::to_string(i) + " is empty");
    normalized.push_back(std::move(n));
  }

  std::vector<std::optional<EmbeddingVector>> results(texts.size());
  std::vector<CacheKey> keys(texts.size());
  // Distinct normalized texts still to compute, each mapped to its input slots.
  std::vector<std::string> pending;
  std::unordered_map<std::string, std::vector<std::size_t>> slots;

  for (std::size_t i = 0; i < normalized.size(); ++i) {
    if (cache_ != nullptr) {
      keys[i] = make_cache_key(config_.model_id, config_.pooling, normalized[i]);
      try {
        if (auto hit = cache_->get(keys[i]); hit && hit->dim() == config_.dim) {
          results[i] = std::move(*hit);
          ++hits_;
          continue;
        }
      } catch (const Error& e) {
        if (e.code() != Errc::CacheCorrupt) throw;
        ++corrupt_;
      }
      ++misses_;
    }
    auto [it, inserted] = slots.try_emplace(normalized[i]);
    if (inserted) pending.push_back(normalized[i]);
    it->second.push_back(i);
  }

  for (std::size_t start = 0; start < pending.size(); start += config_.batch_size) {
    const std::size_t count = std::min(config_.batch_size, pending.size() - start);
    const std::span<const std::string> chunk(pending.data() + start, count);
    auto raw = backend_->embed(chunk);
    if (raw.size() != count) {
      throw Error(Errc::BackendUnavailable, "model '" + config_.model_id + "' returned " +
                                                std::to_string(raw.size()) + " vectors for " +
                                                std::to_string(count) + " texts");
    }
    for (std::size_t j = 0; j < count; ++j) {
      if (raw[j].size() != config_.dim) {
        throw Error(Errc::DimensionMismatch, "model '" + config_.model_id + "' returned dim " +
                                                 std::to_string(raw[j].size()) + ", config says " +
                                                 std::to_string(config_.dim));
      }
      EmbeddingVector vec = [&] {
        try {
          return quantize_f32(EmbeddingVector(std::move(raw[j])));
        } catch (const Error& e) {
          throw Error(Errc::BackendUnavailable, "model '" + config_.model_id + "' returned an invalid vector: " +
                                                    e.what());
        }
      }();
      const auto& idx = slots.at(chunk[j]);
      if (cache_ != nullptr) cache_->put(keys[idx.front()], vec);
      for (std::size_t i : idx) results[i] = vec;
    }
  }

  embeddings_ += texts.size();
  std::vector<EmbeddingVector> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

EmbedStats EmbeddingProvider::stats() const noexcept {
  return EmbedStats{embeddings_.load(), hits_.load(), misses_.load(), corrupt_.load()};
}

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts, const ModelConfig& config,
                                         EmbeddingCache* cache) {
  EmbeddingProvider provider(config, make_backend(config), cache);
  return provider.embed_batch(texts);
}

}  // namespace dtscore
