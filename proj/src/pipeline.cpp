#include "dtscore/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "dtscore/error.hpp"
#include "dtscore/provider.hpp"
#include "dtscore/scoring.hpp"
#include "dtscore/text.hpp"

namespace dtscore {

namespace {

struct WorkUnit {
  std::size_t model = 0;
  std::size_t begin = 0;  // into the model's unique text list
  std::size_t end = 0;
};

// Runs every unit on at most `jobs` threads. The first failure by unit index
// is rethrown so error reporting does not depend on scheduling.
template <typename Fn>
void run_bounded(std::size_t units, std::size_t jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(units);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < units && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(units, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void score_trial(const SubjectTrial& trial, const std::string& model_id, const EmbeddingVector& prompt,
                 std::span<const EmbeddingVector> responses, std::size_t top_k, bool cjk_only, ScoreTable& out) {
  if (responses.size() != trial.responses.size()) {
    throw Error(Errc::AlignmentError, "trial and embedding counts differ");
  }
  std::vector<double> distances;
  distances.reserve(responses.size());
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const auto& rec = trial.responses[i];
    double d = 0.0;
    try {
      d = semantic_distance(prompt, responses[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "subject '" + trial.subject_id + "', prompt '" + trial.prompt_id + "', order " +
                                std::to_string(rec.order) + ", model '" + model_id + "': " + e.detail());
    }
    distances.push_back(d);
    out.response_scores.push_back(
        ResponseScoreRow{rec.subject_id, rec.prompt_id, rec.order, model_id, d, elaboration(rec.response_text, cjk_only)});
  }
  double flex = 0.0;
  try {
    flex = flexibility(responses);
  } catch (const Error& e) {
    throw Error(e.code(), "subject '" + trial.subject_id + "', prompt '" + trial.prompt_id + "', model '" +
                              model_id + "': " + e.detail());
  }
  out.subject_scores.push_back(SubjectScoreRow{trial.subject_id, trial.prompt_id, model_id,
                                               subject_originality(distances, top_k), flex, fluency(trial)});
}

ScoreRun score_dataset(std::span<const ResponseRecord> records, const RunConfig& config,
                       const ScoreOptions& options) {
  for (const auto& r : records) {
    if (!config.prompts.contains(r.prompt_id)) {
      throw Error(Errc::ConfigError, "prompt_id '" + r.prompt_id + "' (subject '" + r.subject_id +
                                         "') is not declared in the run config");
    }
  }
  const auto trials = build_trials(records);

  std::map<std::string, std::string> subject_group;
  for (const auto& r : records) {
    if (!r.group_label) continue;
    auto [it, inserted] = subject_group.try_emplace(r.subject_id, *r.group_label);
    if (!inserted && it->second != *r.group_label) {
      throw Error(Errc::InvalidRecord, "subject '" + r.subject_id + "' has conflicting group labels '" + it->second +
                                           "' and '" + *r.group_label + "'");
    }
  }

  // Unique normalized texts: prompts used by the data, then responses.
  std::vector<std::string> texts;
  std::unordered_map<std::string, std::size_t> text_index;
  auto intern = [&](const std::string& raw) {
    auto norm = text::normalize(raw);
    auto [it, inserted] = text_index.try_emplace(norm, texts.size());
    if (inserted) texts.push_back(std::move(norm));
    return it->second;
  };
  std::map<std::string, std::size_t> prompt_slot;
  for (const auto& t : trials) {
    if (!prompt_slot.contains(t.prompt_id)) prompt_slot[t.prompt_id] = intern(config.prompts.at(t.prompt_id));
  }
  std::vector<std::vector<std::size_t>> response_slot(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    for (const auto& r : trials[i].responses) response_slot[i].push_back(intern(r.response_text));
  }

  std::unique_ptr<EmbeddingCache> cache;
  if (options.cache_enabled) cache = std::make_unique<EmbeddingCache>(config.cache_dir);

  std::vector<std::unique_ptr<EmbeddingProvider>> providers;
  for (const auto& m : config.models) {
    providers.push_back(std::make_unique<EmbeddingProvider>(m, make_backend(m), cache.get()));
  }

  std::vector<std::vector<std::optional<EmbeddingVector>>> vectors(
      config.models.size(), std::vector<std::optional<EmbeddingVector>>(texts.size()));
  std::vector<WorkUnit> units;
  for (std::size_t m = 0; m < config.models.size(); ++m) {
    const std::size_t batch = config.models[m].batch_size;
    for (std::size_t b = 0; b < texts.size(); b += batch) {
      units.push_back(WorkUnit{m, b, std::min(b + batch, texts.size())});
    }
  }
  run_bounded(units.size(), options.jobs, [&](std::size_t u) {
    const auto& unit = units[u];
    const std::span<const std::string> chunk(texts.data() + unit.begin, unit.end - unit.begin);
    auto out = providers[unit.model]->embed_batch(chunk);
    for (std::size_t j = 0; j < out.size(); ++j) vectors[unit.model][unit.begin + j] = std::move(out[j]);
  });

  ScoreRun run;
  for (std::size_t m = 0; m < config.models.size(); ++m) {
    const auto& model_id = config.models[m].model_id;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      std::vector<EmbeddingVector> resp;
      resp.reserve(response_slot[i].size());
      for (std::size_t slot : response_slot[i]) resp.push_back(*vectors[m][slot]);
      score_trial(trials[i], model_id, *vectors[m][prompt_slot.at(trials[i].prompt_id)], resp, config.top_k,
                  config.elaboration_cjk_only, run.table);
    }
    run.model_stats.push_back(ModelRunStats{config.models[m], providers[m]->stats()});
  }

  if (!trials.empty()) {
    // subject_scores were appended model-major, trial-minor.
    std::map<std::string, std::vector<double>> originality;
    std::map<std::string, std::vector<double>> flex;
    for (std::size_t m = 0; m < config.models.size(); ++m) {
      const auto& id = config.models[m].model_id;
      for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& row = run.table.subject_scores[m * trials.size() + i];
        originality[id].push_back(row.originality_topk);
        flex[id].push_back(row.flexibility_sum);
      }
    }
    std::vector<std::string> strata;
    strata.reserve(trials.size());
    for (const auto& t : trials) strata.push_back(t.prompt_id);
    const EnsembleSpec spec{config.ensemble_models, config.standardize_scope, CombineMethod::ZMean};
    std::vector<double> orig_z;
    std::vector<double> flex_z;
    try {
      orig_z = ensemble(originality, spec, strata);
    } catch (const Error& e) {
      throw Error(e.code(), std::string("originality ensemble: ") + e.detail());
    }
    try {
      flex_z = ensemble(flex, spec, strata);
    } catch (const Error& e) {
      throw Error(e.code(), std::string("flexibility ensemble: ") + e.detail());
    }
    for (std::size_t i = 0; i < trials.size(); ++i) {
      const auto g = subject_group.find(trials[i].subject_id);
      run.table.ensemble_scores.push_back(EnsembleScoreRow{trials[i].subject_id, trials[i].prompt_id, orig_z[i],
                                                           flex_z[i],
                                                           g == subject_group.end() ? std::string() : g->second});
    }
  }
  return run;
}

}  // namespace dtscore
