#include "dtscore/cache.hpp"

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <vector>

#include "dtscore/digest.hpp"
#include "dtscore/error.hpp"
#include "dtscore/text.hpp"

namespace dtscore {

namespace {

constexpr char kMagic[4] = {'D', 'T', 'E', 'C'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

}  // namespace

CacheKey make_cache_key(std::string_view model_id, PoolingStrategy pooling, std::string_view input) {
  std::string material(model_id);
  material.push_back('\0');
  material.append(pooling_name(pooling));
  material.push_back('\0');
  material.append(text::normalize(input));
  return CacheKey{sha256_hex(material)};
}

EmbeddingCache::EmbeddingCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path EmbeddingCache::entry_path(const CacheKey& key) const {
  // Two-level fan-out keeps directories small.
  return root_ / key.hex.substr(0, 2) / (key.hex + ".emb");
}

std::mutex& EmbeddingCache::lock_for(const CacheKey& key) const {
  return stripes_[std::hash<std::string>{}(key.hex) % stripes_.size()];
}

std::optional<EmbeddingVector> EmbeddingCache::get(const CacheKey& key) const {
  const auto path = entry_path(key);
  std::string bytes;
  {
    std::lock_guard lock(lock_for(key));
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    bytes = ss.str();
  }

  auto corrupt = [&](const std::string& why) -> Error {
    std::error_code ec;
    {
      std::lock_guard lock(lock_for(key));
      std::filesystem::remove(path, ec);
    }
    return Error(Errc::CacheCorrupt, path.string() + ": " + why);
  };

  if (bytes.size() < kHeaderBytes) throw corrupt("truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw corrupt("bad magic");
  if (get_u32(bytes.data() + 4) != kVersion) throw corrupt("unsupported version");
  const std::uint32_t dim = get_u32(bytes.data() + 8);
  if (dim == 0) throw corrupt("zero dim");
  if (bytes.size() != kHeaderBytes + 4ULL * dim) throw corrupt("payload size does not match dim");

  std::vector<double> values(dim);
  for (std::uint32_t i = 0; i < dim; ++i) {
    const std::uint32_t raw = get_u32(bytes.data() + kHeaderBytes + 4ULL * i);
    const float f = std::bit_cast<float>(raw);
    values[i] = static_cast<double>(f);
  }
  try {
    return EmbeddingVector(std::move(values));
  } catch (const Error&) {
    throw corrupt("non-finite payload");
  }
}

void EmbeddingCache::put(const CacheKey& key, const EmbeddingVector& vector) {
  std::string bytes(kMagic, 4);
  put_u32(bytes, kVersion);
  put_u32(bytes, static_cast<std::uint32_t>(vector.dim()));
  put_u32(bytes, 0);
  for (double x : vector.values()) put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(x)));

  const auto path = entry_path(key);
  static std::atomic<std::uint64_t> counter{0};
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id())
           << '.' << counter.fetch_add(1);

  std::lock_guard lock(lock_for(key));
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw Error(Errc::IoError, "cannot create cache directory " + path.parent_path().string());
  const auto tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::IoError, "cannot write cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::IoError, "cannot commit cache entry " + path.string());
  }
}

}  // namespace dtscore
