#include "dtscore/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

#include "dtscore/error.hpp"
#include "dtscore/text.hpp"

namespace dtscore {

namespace {

constexpr double kClampSlack = 1e-9;

}  // namespace

double semantic_distance(const EmbeddingVector& p, const EmbeddingVector& r) {
  if (p.dim() != r.dim()) {
    throw Error(Errc::DimensionMismatch,
                "semantic_distance of dims " + std::to_string(p.dim()) + " and " + std::to_string(r.dim()));
  }
  double dot = 0.0;
  double pp = 0.0;
  double rr = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    dot += p[i] * r[i];
    pp += p[i] * p[i];
    rr += r[i] * r[i];
  }
  if (pp == 0.0 || rr == 0.0) throw Error(Errc::DegenerateVector, "zero-norm embedding");
  const double d = 1.0 - dot / (std::sqrt(pp) * std::sqrt(rr));
  if (d < 0.0 && d >= -kClampSlack) return 0.0;
  if (d > 2.0 && d <= 2.0 + kClampSlack) return 2.0;
  return d;
}

double subject_originality(std::span<const double> distances, std::size_t k) {
  if (distances.empty()) throw Error(Errc::EmptyInput, "subject_originality of zero distances");
  if (k == 0) throw Error(Errc::InvalidArgument, "top-k requires k >= 1");
  std::vector<double> sorted(distances.begin(), distances.end());
  const std::size_t m = std::min(k, sorted.size());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m), sorted.end(),
                    std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) sum += sorted[i];
  return sum / static_cast<double>(m);
}

double flexibility(std::span<const EmbeddingVector> embeddings) {
  if (embeddings.empty()) throw Error(Errc::EmptyInput, "flexibility of zero responses");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < embeddings.size(); ++i) {
    try {
      sum += semantic_distance(embeddings[i], embeddings[i + 1]);
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateVector) throw;
      double norm_i = 0.0;
      for (double x : embeddings[i].values()) norm_i += x * x;
      const std::size_t bad = norm_i == 0.0 ? i : i + 1;
      throw Error(Errc::DegenerateVector, "response at order " + std::to_string(bad + 1) + " has a zero-norm embedding");
    }
  }
  if (embeddings.size() == 1) {
    // Still reject a lone degenerate vector.
    double norm = 0.0;
    for (double x : embeddings.front().values()) norm += x * x;
    if (norm == 0.0) throw Error(Errc::DegenerateVector, "response at order 1 has a zero-norm embedding");
  }
  return sum;
}

int fluency(const SubjectTrial& trial) noexcept {
  return static_cast<int>(trial.responses.size());
}

int elaboration(std::string_view response_text, bool cjk_only) {
  int count = 0;
  for (char32_t cp : text::decode_utf8(response_text)) {
    if (cjk_only ? text::is_cjk_unified_ideograph(cp) : !text::is_whitespace(cp)) ++count;
  }
  return count;
}

std::vector<double> standardize(std::span<const double> scores) {
  const std::size_t n = scores.size();
  if (n < 2) throw Error(Errc::InsufficientData, "standardize needs at least 2 scores, got " + std::to_string(n));
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : scores) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0) || sd <= 1e-12 * std::abs(mean)) {
    throw Error(Errc::ZeroVariance, "standardize of constant scores");
  }
  std::vector<double> z;
  z.reserve(n);
  for (double x : scores) z.push_back((x - mean) / sd);
  return z;
}

std::string_view scope_name(StandardizeScope s) noexcept {
  return s == StandardizeScope::PerPrompt ? "per_prompt" : "global";
}

std::vector<double> ensemble(const std::map<std::string, std::vector<double>>& per_model_scores,
                             const EnsembleSpec& spec, std::span<const std::string> strata) {
  if (spec.model_ids.empty()) throw Error(Errc::InvalidArgument, "ensemble needs at least one model");
  if (std::set<std::string>(spec.model_ids.begin(), spec.model_ids.end()).size() != spec.model_ids.size()) {
    throw Error(Errc::InvalidArgument, "ensemble model_ids must be distinct");
  }

  std::size_t n = 0;
  for (std::size_t m = 0; m < spec.model_ids.size(); ++m) {
    const auto it = per_model_scores.find(spec.model_ids[m]);
    if (it == per_model_scores.end()) {
      throw Error(Errc::AlignmentError, "no scores for model '" + spec.model_ids[m] + "'");
    }
    if (m == 0) n = it->second.size();
    if (it->second.size() != n) {
      throw Error(Errc::AlignmentError, "model '" + spec.model_ids[m] + "' has " +
                                            std::to_string(it->second.size()) + " scores, expected " +
                                            std::to_string(n));
    }
  }
  if (!strata.empty() && strata.size() != n) {
    throw Error(Errc::AlignmentError, "strata length " + std::to_string(strata.size()) + " != " + std::to_string(n));
  }

  // Row indices per stratum, in first-seen order.
  std::vector<std::vector<std::size_t>> groups;
  if (spec.standardize_scope == StandardizeScope::Global || strata.empty()) {
    groups.emplace_back(n);
    std::iota(groups.front().begin(), groups.front().end(), std::size_t{0});
  } else {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, inserted] = index.try_emplace(strata[i], groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(i);
    }
  }

  std::vector<double> out(n, 0.0);
  for (const auto& model_id : spec.model_ids) {
    const auto& scores = per_model_scores.at(model_id);
    for (const auto& rows : groups) {
      std::vector<double> subset;
      subset.reserve(rows.size());
      for (std::size_t i : rows) subset.push_back(scores[i]);
      std::vector<double> z;
      try {
        z = standardize(subset);
      } catch (const Error& e) {
        std::string where = "model '" + model_id + "'";
        if (groups.size() > 1) where += ", stratum '" + strata[rows.front()] + "'";
        throw Error(e.code(), where + ": " + e.detail());
      }
      for (std::size_t j = 0; j < rows.size(); ++j) out[rows[j]] += z[j];
    }
  }
  const auto models = static_cast<double>(spec.model_ids.size());
  for (auto& x : out) x /= models;
  return out;
}

}  // namespace dtscore
