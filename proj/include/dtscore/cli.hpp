#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "dtscore/data_model.hpp"
#include "dtscore/psychometrics.hpp"

namespace dtscore::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kValidationError = 1,
  kBackendError = 2,
  kInternalError = 3,
};

// Maps the active exception (call from a catch block) to an exit status and
// writes a one-line diagnostic to `err`.
int report_current_exception(std::ostream& err);

struct ScoreCommand {
  std::filesystem::path config;
  std::filesystem::path data;
  bool cache_off = false;
  std::optional<std::filesystem::path> out_dir;  // overrides RunConfig::output_dir
  std::size_t jobs = 1;
};

struct ValidateCommand {
  std::filesystem::path scores;   // subject_scores.csv
  std::filesystem::path ratings;  // ratings.csv
  RatingKind measure = RatingKind::Originality;
  std::size_t top_k = 3;
  double threshold = 0.30;
  std::optional<std::filesystem::path> out_dir;
};

struct CompareCommand {
  std::filesystem::path scores;  // ensemble_scores.csv
  std::string group_col = "group_label";
  std::string measure = "originality";  // or "flexibility"
  Tails tails = Tails::Two;
  std::optional<std::string> expect_greater;  // group hypothesized higher
  std::optional<std::filesystem::path> data;  // responses.csv, when scores lack the group column
  bool welch = false;
  DCiMethod d_ci = DCiMethod::Normal;
  std::optional<std::filesystem::path> out_dir;
};

struct PowerCommand {
  PowerRequest request;
};

// Each command writes machine-readable JSON to `out`, diagnostics to `err`,
// and returns an ExitStatus.
int run_score(const ScoreCommand& cmd, std::ostream& out, std::ostream& err);
int run_validate(const ValidateCommand& cmd, std::ostream& out, std::ostream& err);
int run_compare(const CompareCommand& cmd, std::ostream& out, std::ostream& err);
int run_power(const PowerCommand& cmd, std::ostream& out, std::ostream& err);

}  // namespace dtscore::cli
