#pragma once

#include <array>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "dtscore/data_model.hpp"
#include "dtscore/embedding.hpp"

namespace dtscore {

// SHA-256 over model_id, pooling name and NFC-normalized, trimmed text,
// joined with NUL separators.
struct CacheKey {
  std::string hex;

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

CacheKey make_cache_key(std::string_view model_id, PoolingStrategy pooling, std::string_view text);

// One file per key under the root. Entry layout, all little-endian:
//   bytes 0-3   magic "DTEC"
//   bytes 4-7   u32 format version (1)
//   bytes 8-11  u32 dim
//   bytes 12-15 u32 reserved (0)
//   then dim x binary32 payload
// Writes go through a temp file and rename; writes to the same key are
// serialized in-process via striped locks.
class EmbeddingCache {
 public:
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kHeaderBytes = 16;

  explicit EmbeddingCache(std::filesystem::path root);

  // Missing entry -> nullopt. A malformed entry is deleted and CacheCorrupt
  // is thrown so the caller recomputes.
  std::optional<EmbeddingVector> get(const CacheKey& key) const;
  void put(const CacheKey& key, const EmbeddingVector& vector);

  std::filesystem::path entry_path(const CacheKey& key) const;
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::mutex& lock_for(const CacheKey& key) const;

  std::filesystem::path root_;
  mutable std::array<std::mutex, 64> stripes_;
};

}  // namespace dtscore
