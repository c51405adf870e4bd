#include "dtscore/cli.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include <json.hpp>

#include "dtscore/csv.hpp"
#include "dtscore/digest.hpp"
#include "dtscore/error.hpp"
#include "dtscore/io.hpp"
#include "dtscore/pipeline.hpp"
#include "dtscore/psychometrics.hpp"
#include "dtscore/scoring.hpp"

namespace dtscore::cli {

using nlohmann::json;

namespace {

json ci_json(double lo, double hi) { return json::array({lo, hi}); }

std::string alternative_name(Alternative a) {
  switch (a) {
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
    case Alternative::TwoSided: break;
  }
  return "two-sided";
}

// Linear-interpolation quantile on sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

json distribution_summary(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {{"n", values.size()},
          {"mean", mean},
          {"sd", values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0},
          {"min", values.front()},
          {"q1", quantile(values, 0.25)},
          {"median", quantile(values, 0.5)},
          {"q3", quantile(values, 0.75)},
          {"max", values.back()}};
}

void write_outputs(const std::optional<std::filesystem::path>& dir,
                   const std::vector<std::pair<std::string, std::string>>& files) {
  if (!dir) return;
  std::error_code ec;
  std::filesystem::create_directories(*dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create output directory " + dir->string() + ": " + ec.message());
  for (const auto& [name, bytes] : files) write_file_bytes(*dir / name, bytes);
}

}  // namespace

int report_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::BackendUnavailable:
      case Errc::DimensionMismatch:
        return kBackendError;
      default:
        return kValidationError;
    }
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  } catch (...) {
    err << "internal error: unknown exception\n";
    return kInternalError;
  }
}

int run_score(const ScoreCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const auto config = load_run_config(cmd.config);
    const auto data_bytes = read_file_bytes(cmd.data);
    std::vector<ResponseRecord> records;
    try {
      records = parse_responses_text(data_bytes);
    } catch (const Error& e) {
      throw Error(e.code(), cmd.data.string() + ": " + e.detail());
    }

    const auto run = score_dataset(records, config, ScoreOptions{std::max<std::size_t>(cmd.jobs, 1), !cmd.cache_off});

    RunManifest manifest;
    manifest.config_digest = config.digest;
    manifest.dataset_digest = sha256_hex(data_bytes);
    manifest.top_k = config.top_k;
    manifest.standardize_scope = config.standardize_scope;
    manifest.cache_enabled = !cmd.cache_off;
    manifest.models = run.model_stats;
    manifest.timestamp = manifest_timestamp();

    const auto dir = cmd.out_dir.value_or(config.output_dir);
    const auto written = export_scores(run.table, manifest, dir);
    err << fmt::format("scored {} responses in {} trials with {} model(s); wrote {}\n", records.size(),
                       run.table.subject_scores.size() / std::max<std::size_t>(config.models.size(), 1),
                       config.models.size(), dir.string());
    out << manifest_json(manifest);
    return kSuccess;
  } catch (...) {
    return report_current_exception(err);
  }
}

int run_validate(const ValidateCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const auto scores = read_subject_scores(cmd.scores);
    const auto ratings = parse_ratings(cmd.ratings);

    // Human subject-level scores: top-k mean for originality, plain mean for flexibility.
    using Key = std::tuple<std::string, std::string, std::string>;  // rater, subject, prompt
    std::map<Key, std::vector<double>> by_trial;
    std::set<std::string> raters;
    for (const auto& h : ratings) {
      if (h.kind != cmd.measure) continue;
      by_trial[{h.rater_id, h.subject_id, h.prompt_id}].push_back(h.rating);
      raters.insert(h.rater_id);
    }
    if (raters.empty()) {
      throw Error(Errc::InsufficientData, "no " + std::string(rating_kind_name(cmd.measure)) + " ratings in " +
                                              cmd.ratings.string());
    }
    std::map<Key, double> human;
    for (const auto& [key, values] : by_trial) {
      human[key] = cmd.measure == RatingKind::Originality
                       ? subject_originality(values, cmd.top_k)
                       : std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    }

    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> model_scores;  // (model, prompt)
    std::set<std::string> models;
    std::set<std::string> prompts;
    for (const auto& s : scores) {
      model_scores[{s.model_id, s.prompt_id}][s.subject_id] =
          cmd.measure == RatingKind::Originality ? s.originality_topk : s.flexibility_sum;
      models.insert(s.model_id);
      prompts.insert(s.prompt_id);
    }

    json report;
    report["measure"] = std::string(rating_kind_name(cmd.measure));
    report["threshold"] = cmd.threshold;
    report["top_k"] = cmd.top_k;
    json corr_rows = json::array();
    CorrTable table;
    std::string text = fmt::format("{:<16} {:<14} {:<10} {:>5} {:>8} {:>10} {:>18}\n", "model", "prompt", "rater",
                                   "n", "r", "p", "95% CI");
    for (const auto& model : models) {
      for (const auto& prompt : prompts) {
        const auto ms = model_scores.find({model, prompt});
        if (ms == model_scores.end()) continue;
        for (const auto& rater : raters) {
          std::vector<double> x;
          std::vector<double> y;
          for (const auto& [subject, value] : ms->second) {
            const auto h = human.find({rater, subject, prompt});
            if (h == human.end()) continue;
            x.push_back(value);
            y.push_back(h->second);
          }
          if (x.size() < 3) {
            throw Error(Errc::InsufficientData, "model '" + model + "', prompt '" + prompt + "', rater '" + rater +
                                                    "' joins only " + std::to_string(x.size()) + " subjects");
          }
          CorrResult c;
          try {
            c = pearson(x, y);
          } catch (const Error& e) {
            throw Error(e.code(), "model '" + model + "', prompt '" + prompt + "', rater '" + rater + "': " + e.detail());
          }
          table[{model, prompt, rater}] = c.r;
          corr_rows.push_back({{"model_id", model},
                               {"prompt_id", prompt},
                               {"rater_id", rater},
                               {"n", c.n},
                               {"r", c.r},
                               {"t", c.t_stat},
                               {"p_two_tailed", c.p_two_tailed},
                               {"ci95", ci_json(c.ci95_lo, c.ci95_hi)}});
          text += fmt::format("{:<16} {:<14} {:<10} {:>5} {:>8.3f} {:>10.3g} {:>18}\n", model, prompt, rater, c.n, c.r,
                              c.p_two_tailed, fmt::format("[{:.2f}, {:.2f}]", c.ci95_lo, c.ci95_hi));
        }
      }
    }
    report["correlations"] = std::move(corr_rows);

    // ICC(2,k) per prompt over the raters' response-level (or trial-level) ratings.
    json icc_rows = json::array();
    text += "\nICC(2,k)\n";
    std::set<std::string> rated_prompts;
    for (const auto& h : ratings) {
      if (h.kind == cmd.measure) rated_prompts.insert(h.prompt_id);
    }
    for (const auto& prompt : rated_prompts) {
      std::map<std::pair<std::string, int>, std::map<std::string, std::vector<double>>> cells;
      for (const auto& h : ratings) {
        if (h.kind != cmd.measure || h.prompt_id != prompt) continue;
        const int target = cmd.measure == RatingKind::Originality ? h.order : 0;
        cells[{h.subject_id, target}][h.rater_id].push_back(h.rating);
      }
      std::vector<std::vector<double>> matrix;
      std::size_t dropped = 0;
      for (const auto& [target, by_rater] : cells) {
        if (by_rater.size() != raters.size()) {
          ++dropped;
          continue;
        }
        std::vector<double> row;
        for (const auto& rater : raters) {
          const auto& v = by_rater.at(rater);
          row.push_back(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
        }
        matrix.push_back(std::move(row));
      }
      json entry = {{"prompt_id", prompt}};
      std::string skip;
      if (raters.size() < 2) {
        skip = "ICC needs at least 2 raters";
      } else if (matrix.size() < 2) {
        skip = "fewer than 2 fully rated targets";
      } else {
        if (dropped > 0) {
          err << fmt::format("warning: prompt '{}': {} target(s) lack ratings from every rater and were left out of ICC\n",
                             prompt, dropped);
        }
        try {
          const auto icc = icc_2k(matrix);
          entry.update({{"icc2k", icc.icc2k},
                        {"ms_rows", icc.ms_rows},
                        {"ms_cols", icc.ms_cols},
                        {"ms_error", icc.ms_error},
                        {"n_targets", icc.n_targets},
                        {"k_raters", icc.k_raters}});
          text += fmt::format("{:<14} ICC2k = {:.3f} (n = {}, k = {})\n", prompt, icc.icc2k, icc.n_targets, icc.k_raters);
        } catch (const Error& e) {
          if (e.code() != Errc::DegenerateAnova) throw;
          skip = e.what();
        }
      }
      if (!skip.empty()) {
        err << "warning: prompt '" << prompt << "': ICC skipped: " << skip << '\n';
        entry["skipped"] = skip;
        text += fmt::format("{:<14} skipped ({})\n", prompt, skip);
      }
      icc_rows.push_back(std::move(entry));
    }
    report["icc"] = std::move(icc_rows);

    const auto passing = passing_cells(table, cmd.threshold);
    const auto selection = select_models(table, cmd.threshold);
    json pass_json = json::array();
    for (const auto& [m, p] : passing) pass_json.push_back({m, p});
    json retained = json::array();
    for (const auto& [m, p] : selection.retained) retained.push_back({m, p});
    report["passing_cells"] = std::move(pass_json);
    report["selection"] = {{"models", selection.models}, {"prompts", selection.prompts}, {"retained", retained}};
    text += fmt::format("\nSelection at r > {:.2f}: models [{}], prompts [{}]\n", cmd.threshold,
                        fmt::join(selection.models, ", "), fmt::join(selection.prompts, ", "));

    const auto body = report.dump(2) + "\n";
    write_outputs(cmd.out_dir, {{"validation.json", body}, {"validation.txt", text}});
    out << body;
    return kSuccess;
  } catch (...) {
    return report_current_exception(err);
  }
}

int run_compare(const CompareCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const auto table = csv::read_file(cmd.scores);
    const auto c_subject = table.column("subject_id");
    const std::string measure_col = cmd.measure + "_z_mean";
    if (cmd.measure != "originality" && cmd.measure != "flexibility") {
      throw Error(Errc::InvalidArgument, "measure must be originality or flexibility");
    }
    const auto c_measure = table.column(measure_col);
    if (!c_subject || !c_measure) {
      throw Error(Errc::SchemaError, cmd.scores.string() + ": row 0: needs subject_id and " + measure_col);
    }

    std::map<std::string, std::string> group_of;
    const auto c_group = table.column(cmd.group_col);
    if (!c_group || std::all_of(table.rows.begin(), table.rows.end(),
                                [&](const auto& row) { return row[*c_group].empty(); })) {
      if (!cmd.data) {
        throw Error(Errc::SchemaError, cmd.scores.string() + ": no '" + cmd.group_col +
                                           "' values; pass --data with a labelled responses file");
      }
      for (const auto& r : parse_responses(*cmd.data)) {
        if (r.group_label) group_of[r.subject_id] = *r.group_label;
      }
    }

    // Subject score: mean over that subject's prompts.
    std::map<std::string, std::vector<double>> per_subject;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(row[*c_measure], &used);
        if (used != row[*c_measure].size()) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw Error(Errc::ParseError, cmd.scores.string() + ": row " + std::to_string(r + 1) + ": bad " + measure_col);
      }
      const auto& subject = row[*c_subject];
      per_subject[subject].push_back(v);
      if (c_group && !row[*c_group].empty()) {
        auto [it, inserted] = group_of.try_emplace(subject, row[*c_group]);
        if (!inserted && it->second != row[*c_group]) {
          throw Error(Errc::InvalidRecord, "subject '" + subject + "' has conflicting group labels");
        }
      }
    }

    std::map<std::string, std::vector<std::pair<std::string, double>>> groups;
    std::size_t unlabelled = 0;
    for (const auto& [subject, values] : per_subject) {
      const auto g = group_of.find(subject);
      if (g == group_of.end() || g->second.empty()) {
        ++unlabelled;
        continue;
      }
      groups[g->second].emplace_back(
          subject, std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size()));
    }
    if (unlabelled > 0) err << "warning: " << unlabelled << " subject(s) without a group label were skipped\n";
    if (groups.size() != 2) {
      throw Error(Errc::GroupCountError, "expected exactly 2 groups, found " + std::to_string(groups.size()));
    }

    std::string first = groups.begin()->first;
    std::string second = std::next(groups.begin())->first;
    TTestOptions opt;
    opt.welch = cmd.welch;
    opt.d_ci = cmd.d_ci;
    if (cmd.tails == Tails::One) {
      if (cmd.expect_greater) {
        if (!groups.contains(*cmd.expect_greater)) {
          throw Error(Errc::InvalidArgument, "--expect-greater names unknown group '" + *cmd.expect_greater + "'");
        }
        if (*cmd.expect_greater != first) std::swap(first, second);
        opt.alternative = Alternative::Greater;
      } else {
        err << "warning: one-tailed test requested without --expect-greater; reporting a two-tailed p\n";
      }
    }

    std::vector<double> g1;
    std::vector<double> g2;
    for (const auto& [s, v] : groups[first]) g1.push_back(v);
    for (const auto& [s, v] : groups[second]) g2.push_back(v);
    const auto cmp = t_test_pooled(g1, g2, opt);

    json report = {{"measure", cmd.measure},
                   {"group1", first},
                   {"group2", second},
                   {"mean1", cmp.mean1},
                   {"sd1", cmp.sd1},
                   {"n1", cmp.n1},
                   {"mean2", cmp.mean2},
                   {"sd2", cmp.sd2},
                   {"n2", cmp.n2},
                   {"t", cmp.t_stat},
                   {"df", cmp.df},
                   {"p", cmp.p},
                   {"alternative", alternative_name(cmp.alternative)},
                   {"welch", cmp.welch},
                   {"cohens_d", cmp.cohens_d},
                   {"d_ci95", ci_json(cmp.d_ci95_lo, cmp.d_ci95_hi)},
                   {"d_ci_method", cmp.d_ci_method == DCiMethod::Normal ? "normal" : "noncentral_t"},
                   {"distribution", {{first, distribution_summary(g1)}, {second, distribution_summary(g2)}}}};

    std::string text = fmt::format(
        "{} ({}): M = {:.2f}, SD = {:.2f}, n = {}\n{} ({}): M = {:.2f}, SD = {:.2f}, n = {}\n"
        "t({:.4g}) = {:.2f}, p = {:.3g} ({}), Cohen's d = {:.2f}, 95% CI of d = [{:.2f}, {:.2f}]\n",
        first, cmd.measure, cmp.mean1, cmp.sd1, cmp.n1, second, cmd.measure, cmp.mean2, cmp.sd2, cmp.n2, cmp.df,
        cmp.t_stat, cmp.p, alternative_name(cmp.alternative), cmp.cohens_d, cmp.d_ci95_lo, cmp.d_ci95_hi);

    std::string long_csv = csv::format_row({"group", "subject_id", "value"});
    for (const auto& label : {first, second}) {
      for (const auto& [s, v] : groups[label]) long_csv += csv::format_row({label, s, csv::format_number(v)});
    }

    const auto body = report.dump(2) + "\n";
    write_outputs(cmd.out_dir, {{"comparison.json", body}, {"comparison.txt", text}, {"groups_long.csv", long_csv}});
    out << body;
    return kSuccess;
  } catch (...) {
    return report_current_exception(err);
  }
}

int run_power(const PowerCommand& cmd, std::ostream& out, std::ostream& err) {
  try {
    const auto& req = cmd.request;
    const std::size_t n = min_n_per_group(req);
    json report = {{"d", req.d},
                   {"alpha", req.alpha},
                   {"target_power", req.power},
                   {"tails", req.tails == Tails::One ? "one" : "two"},
                   {"n_per_group", n},
                   {"power_at_n", two_sample_power(n, req.d, req.alpha, req.tails)}};
    if (n > 2) report["power_at_n_minus_1"] = two_sample_power(n - 1, req.d, req.alpha, req.tails);
    out << report.dump(2) << '\n';
    return kSuccess;
  } catch (...) {
    return report_current_exception(err);
  }
}

}  // namespace dtscore::cli
