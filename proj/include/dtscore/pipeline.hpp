#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dtscore/data_model.hpp"
#include "dtscore/io.hpp"

namespace dtscore {

struct ScoreOptions {
  std::size_t jobs = 1;       // concurrent embedding batches
  bool cache_enabled = true;  // cache lives under RunConfig::cache_dir
};

struct ScoreRun {
  ScoreTable table;
  std::vector<ModelRunStats> model_stats;  // in config order
};

// Per-trial scores for one model given its prompt embedding and the trial's
// response embeddings (generation order).
void score_trial(const SubjectTrial& trial, const std::string& model_id, const EmbeddingVector& prompt,
                 std::span<const EmbeddingVector> responses, std::size_t top_k, bool cjk_only, ScoreTable& out);

// Full scoring: embed prompts and responses for every model (bounded worker
// pool, cache first), score each trial, then ensemble across models. The
// result depends only on the records and config; worker count and cache
// state do not change it. Throws ConfigError for a prompt_id absent from the
// config, plus any data-model, embedding or scoring error.
ScoreRun score_dataset(std::span<const ResponseRecord> records, const RunConfig& config,
                       const ScoreOptions& options);

}  // namespace dtscore
