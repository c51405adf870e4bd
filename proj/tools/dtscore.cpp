// dtscore: semantic-distance scoring of Alternate Uses Task responses plus
// the validation statistics (correlations, ICC, group comparison, power).

#include <CLI11.hpp>

#include <iostream>
#include <thread>

#include "dtscore/cli.hpp"

int main(int argc, char** argv) {
  using namespace dtscore;
  CLI::App app{"Divergent-thinking scoring engine"};
  app.require_subcommand(1);

  cli::ScoreCommand score;
  score.jobs = std::max(1U, std::thread::hardware_concurrency());
  std::string score_out;
  auto* score_cmd = app.add_subcommand("score", "Embed responses and write score tables");
  score_cmd->add_option("--config", score.config, "run.json")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--data", score.data, "responses CSV")->required()->check(CLI::ExistingFile);
  score_cmd->add_flag("--cache-off", score.cache_off, "Bypass the embedding cache");
  score_cmd->add_option("--out", score_out, "Output directory (overrides output_dir in the config)");
  score_cmd->add_option("--jobs", score.jobs, "Concurrent embedding batches")->check(CLI::PositiveNumber);

  cli::ValidateCommand validate;
  std::string validate_measure = "originality";
  std::string validate_out;
  auto* validate_cmd = app.add_subcommand("validate", "Correlate model scores with human ratings");
  validate_cmd->add_option("--scores", validate.scores, "subject_scores.csv")->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--ratings", validate.ratings, "ratings CSV")->required()->check(CLI::ExistingFile);
  validate_cmd->add_option("--measure", validate_measure, "originality or flexibility")
      ->check(CLI::IsMember({"originality", "flexibility"}));
  validate_cmd->add_option("--top-k", validate.top_k, "Top-k for human originality")->check(CLI::PositiveNumber);
  validate_cmd->add_option("--threshold", validate.threshold, "Selection threshold on r");
  validate_cmd->add_option("--out", validate_out, "Directory for validation.json / validation.txt");

  cli::CompareCommand compare;
  std::string tails = "two";
  std::string expect_greater;
  std::string data_path;
  std::string d_ci = "normal";
  std::string compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Known-group comparison on ensemble scores");
  compare_cmd->add_option("--scores", compare.scores, "ensemble_scores.csv")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--group-col", compare.group_col, "Group label column");
  compare_cmd->add_option("--measure", compare.measure, "originality or flexibility")
      ->check(CLI::IsMember({"originality", "flexibility"}));
  compare_cmd->add_option("--tails", tails, "one or two")->check(CLI::IsMember({"one", "two"}));
  compare_cmd->add_option("--expect-greater", expect_greater, "Group hypothesized to score higher (one-tailed)");
  compare_cmd->add_option("--data", data_path, "Responses CSV supplying group labels")->check(CLI::ExistingFile);
  compare_cmd->add_flag("--welch", compare.welch, "Welch t test instead of pooled variance");
  compare_cmd->add_option("--d-ci", d_ci, "normal or noncentral")->check(CLI::IsMember({"normal", "noncentral"}));
  compare_cmd->add_option("--out", compare_out, "Directory for comparison.json / .txt / groups_long.csv");

  cli::PowerCommand power;
  std::string power_tails = "two";
  auto* power_cmd = app.add_subcommand("power", "Minimum n per group for a two-sample t test");
  power_cmd->add_option("--d", power.request.d, "Effect size (Cohen's d)")->required();
  power_cmd->add_option("--alpha", power.request.alpha, "Significance level");
  power_cmd->add_option("--power", power.request.power, "Target power");
  power_cmd->add_option("--tails", power_tails, "one or two")->check(CLI::IsMember({"one", "two"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kSuccess : cli::kValidationError;
  }

  if (*score_cmd) {
    if (!score_out.empty()) score.out_dir = score_out;
    return cli::run_score(score, std::cout, std::cerr);
  }
  if (*validate_cmd) {
    validate.measure = validate_measure == "flexibility" ? RatingKind::Flexibility : RatingKind::Originality;
    if (!validate_out.empty()) validate.out_dir = validate_out;
    return cli::run_validate(validate, std::cout, std::cerr);
  }
  if (*compare_cmd) {
    compare.tails = tails == "one" ? Tails::One : Tails::Two;
    if (!expect_greater.empty()) compare.expect_greater = expect_greater;
    if (!data_path.empty()) compare.data = data_path;
    compare.d_ci = d_ci == "noncentral" ? DCiMethod::NoncentralT : DCiMethod::Normal;
    if (!compare_out.empty()) compare.out_dir = compare_out;
    return cli::run_compare(compare, std::cout, std::cerr);
  }
  power.request.tails = power_tails == "one" ? Tails::One : Tails::Two;
  return cli::run_power(power, std::cout, std::cerr);
}
