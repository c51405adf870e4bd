#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dtscore/data_model.hpp"

namespace dtscore {

// Semantic distance 1 - cos(p, r), in [0, 2]. Floating-point overshoot of at
// most 1e-9 past either bound is clamped. Throws DimensionMismatch or
// DegenerateVector (zero norm).
double semantic_distance(const EmbeddingVector& p, const EmbeddingVector& r);

// Mean of the min(k, n) largest distances. Throws EmptyInput; k must be >= 1.
double subject_originality(std::span<const double> distances, std::size_t k = 3);

// Sum of semantic distances between consecutive embeddings in generation
// order; 0 for a single response. DegenerateVector names the 1-based order.
double flexibility(std::span<const EmbeddingVector> embeddings);

// Number of responses, duplicates included.
int fluency(const SubjectTrial& trial) noexcept;

// Non-whitespace code points; with cjk_only, CJK Unified Ideographs only.
int elaboration(std::string_view response_text, bool cjk_only = false);

// Sample (n-1) z-scores. Throws InsufficientData (n < 2) or ZeroVariance.
std::vector<double> standardize(std::span<const double> scores);

enum class StandardizeScope { PerPrompt, Global };
enum class CombineMethod { ZMean };

std::string_view scope_name(StandardizeScope s) noexcept;

struct EnsembleSpec {
  std::vector<std::string> model_ids;
  StandardizeScope standardize_scope = StandardizeScope::PerPrompt;
  CombineMethod combine = CombineMethod::ZMean;
};

// Standardizes each listed model's scores, then averages element-wise.
// Under PerPrompt, `strata` (aligned with the score lists) partitions the
// rows and z-scores are computed within each stratum; an empty `strata`
// means a single stratum. Throws AlignmentError, InvalidArgument for a bad
// spec, and ZeroVariance / InsufficientData naming the model.
std::vector<double> ensemble(const std::map<std::string, std::vector<double>>& per_model_scores,
                             const EnsembleSpec& spec, std::span<const std::string> strata = {});

}  // namespace dtscore
