#include "dtscore/embedding.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "dtscore/error.hpp"
#include "dtscore/text.hpp"

namespace dtscore {

std::string_view pooling_name(PoolingStrategy p) noexcept {
  return p == PoolingStrategy::Mean ? "mean" : "cls";
}

std::string_view backend_name(BackendKind b) noexcept {
  switch (b) {
    case BackendKind::Test: return "test";
    case BackendKind::Remote: return "remote";
    case BackendKind::Local: return "local";
  }
  return "unknown";
}

std::optional<PoolingStrategy> parse_pooling(std::string_view s) noexcept {
  if (s == "mean") return PoolingStrategy::Mean;
  if (s == "cls") return PoolingStrategy::Cls;
  return std::nullopt;
}

std::optional<BackendKind> parse_backend(std::string_view s) noexcept {
  if (s == "test") return BackendKind::Test;
  if (s == "remote") return BackendKind::Remote;
  if (s == "local") return BackendKind::Local;
  return std::nullopt;
}

void validate(const ModelConfig& config) {
  const std::string who = "model '" + config.model_id + "': ";
  if (config.model_id.empty()) throw Error(Errc::ConfigError, "model_id must be nonempty");
  if (config.dim == 0) throw Error(Errc::ConfigError, who + "dim must be > 0");
  if (config.batch_size == 0) throw Error(Errc::ConfigError, who + "batch_size must be > 0");
  if (config.max_retries < 0) throw Error(Errc::ConfigError, who + "max_retries must be >= 0");
  if (config.backend == BackendKind::Remote && (!config.endpoint || config.endpoint->empty())) {
    throw Error(Errc::ConfigError, who + "remote backend requires an endpoint");
  }
  if (config.backend == BackendKind::Local && !config.artifact_path) {
    throw Error(Errc::ConfigError, who + "local backend requires an artifact_path");
  }
  if (config.stopword_list && config.backend != BackendKind::Local) {
    throw Error(Errc::ConfigError, who + "stop-word filtering applies only to the local word-vector backend");
  }
}

StopwordList::StopwordList(std::unordered_set<std::string> entries) : entries_(std::move(entries)) {
  if (entries_.contains("")) throw Error(Errc::InvalidArgument, "stop-word list contains an empty entry");
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open stop-word list " + path.string());
  std::unordered_set<std::string> entries;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    first = false;
    if (line.starts_with("#")) continue;
    line = text::trim(line);
    if (line.empty()) continue;
    entries.insert(line);
  }
  return StopwordList(std::move(entries));
}

bool StopwordList::contains(std::string_view token) const {
  return entries_.contains(std::string(token));
}

std::vector<std::string> filter_stopwords(std::span<const std::string> tokens, const StopwordList& list) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!list.contains(t)) out.push_back(t);
  }
  return out;
}

EmbeddingVector mean_pool(std::span<const EmbeddingVector> token_vectors) {
  if (token_vectors.empty()) throw Error(Errc::EmptyInput, "mean_pool of zero token vectors");
  const std::size_t dim = token_vectors.front().dim();
  std::vector<double> sum(dim, 0.0);
  for (const auto& v : token_vectors) {
    if (v.dim() != dim) {
      throw Error(Errc::DimensionMismatch,
                  "token vector dim " + std::to_string(v.dim()) + " != " + std::to_string(dim));
    }
    for (std::size_t i = 0; i < dim; ++i) sum[i] += v[i];
  }
  const auto n = static_cast<double>(token_vectors.size());
  for (auto& x : sum) x /= n;
  return EmbeddingVector(std::move(sum));
}

EmbeddingVector cls_pool(std::span<const EmbeddingVector> token_vectors) {
  if (token_vectors.empty()) throw Error(Errc::EmptyInput, "cls_pool of zero token vectors");
  return token_vectors.front();
}

EmbeddingVector pool(std::span<const EmbeddingVector> token_vectors, PoolingStrategy strategy) {
  return strategy == PoolingStrategy::Mean ? mean_pool(token_vectors) : cls_pool(token_vectors);
}

namespace {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

EmbeddingVector test_embed(std::string_view input, std::size_t dim) {
  if (dim == 0) throw Error(Errc::InvalidArgument, "test_embed dim must be > 0");
  if (input.empty()) throw Error(Errc::EmptyInput, "test_embed of empty text");

  std::vector<char32_t> seq{U'\x02'};
  const auto cps = text::decode_utf8(input);
  seq.insert(seq.end(), cps.begin(), cps.end());
  seq.push_back(U'\x03');

  std::vector<double> v(dim, 0.0);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const std::string bigram = text::encode_utf8(seq[i]) + text::encode_utf8(seq[i + 1]);
    const std::uint64_t h = splitmix64(fnv1a64(bigram));
    const double sign = (h >> 63) ? -1.0 : 1.0;
    const double weight = 1.0 + static_cast<double>((h >> 32) & 0xFFFF) / 65536.0;
    v[h % dim] += sign * weight;
  }

  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm == 0.0) {
    // All contributions cancelled; fall back to the first basis vector.
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = 1.0;
  } else {
    for (auto& x : v) x /= norm;
  }
  return EmbeddingVector(std::move(v));
}

EmbeddingVector quantize_f32(const EmbeddingVector& v) {
  std::vector<double> out(v.values().begin(), v.values().end());
  for (auto& x : out) x = static_cast<double>(static_cast<float>(x));
  return EmbeddingVector(std::move(out));
}

}  // namespace dtscore
