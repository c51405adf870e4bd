#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace dtscore {

struct CorrResult {
  double r = 0.0;
  std::size_t n = 0;
  double t_stat = 0.0;
  double p_two_tailed = 1.0;
  double ci95_lo = -1.0;
  double ci95_hi = 1.0;
};

// Product-moment correlation with t = r sqrt(n-2) / sqrt(1-r^2), two-tailed
// p on n-2 df, and a Fisher-z 95% interval. Requires n >= 3.
// Throws AlignmentError, InsufficientData, ZeroVariance.
CorrResult pearson(std::span<const double> x, std::span<const double> y);

// Significance of a given r at sample size n (same t, p and interval as pearson).
CorrResult correlation_significance(double r, std::size_t n);

struct ZTest {
  double z = 0.0;
  double p_two_tailed = 1.0;
};

// Difference of two independent correlations via Fisher's z.
// Throws DegenerateCorrelation for |r| >= 1, InsufficientData for n < 4.
ZTest fisher_z_independent(double r1, std::size_t n1, double r2, std::size_t n2);

// Steiger's (1980) Z* for dependent correlations r13 and r23 sharing
// variable 3, with r12 linking the other two; uses the pooled mean of r13
// and r23 in the asymptotic covariance. Throws InvalidCorrelationMatrix if
// the triple is not positive semidefinite.
ZTest steiger_z_dependent(double r13, double r23, double r12, std::size_t n);

struct IccResult {
  double icc2k = 0.0;
  double ms_rows = 0.0;
  double ms_cols = 0.0;
  double ms_error = 0.0;
  std::size_t n_targets = 0;
  std::size_t k_raters = 0;
};

// ICC(2,k): two-way random effects, absolute agreement, average of k raters.
// Rows are targets, columns raters. NaN cells or ragged rows throw
// IncompleteMatrix; a vanishing denominator throws DegenerateAnova.
IccResult icc_2k(const std::vector<std::vector<double>>& ratings);

// Which mean is hypothesized larger. A one-tailed p is only reported when a
// direction is declared.
enum class Alternative { TwoSided, Greater, Less };
enum class DCiMethod { Normal, NoncentralT };

struct TTestOptions {
  Alternative alternative = Alternative::TwoSided;
  bool welch = false;
  DCiMethod d_ci = DCiMethod::Normal;
};

struct GroupComparison {
  double mean1 = 0.0, sd1 = 0.0;
  std::size_t n1 = 0;
  double mean2 = 0.0, sd2 = 0.0;
  std::size_t n2 = 0;
  double t_stat = 0.0;
  double df = 0.0;
  double p = 1.0;
  Alternative alternative = Alternative::TwoSided;
  bool welch = false;
  double cohens_d = 0.0;  // always on the pooled SD
  double d_ci95_lo = 0.0;
  double d_ci95_hi = 0.0;
  DCiMethod d_ci_method = DCiMethod::Normal;
};

GroupComparison t_test_from_summary(double mean1, double sd1, std::size_t n1, double mean2, double sd2,
                                    std::size_t n2, const TTestOptions& options = {});
GroupComparison t_test_pooled(std::span<const double> group1, std::span<const double> group2,
                              const TTestOptions& options = {});

enum class Tails { One, Two };

struct PowerRequest {
  double d = 0.5;
  double alpha = 0.05;
  double power = 0.80;
  Tails tails = Tails::Two;
};

// Power of a balanced two-sample t test: df = 2n - 2, noncentrality d sqrt(n/2).
double two_sample_power(std::size_t n_per_group, double d, double alpha, Tails tails);

// Smallest n with power >= target. Throws NotAttainable beyond 10^7.
std::size_t min_n_per_group(const PowerRequest& request);

// (model_id, prompt_id, rater_id) -> r
using CorrTable = std::map<std::tuple<std::string, std::string, std::string>, double>;
using ModelPrompt = std::pair<std::string, std::string>;

// Cells whose correlation exceeds the threshold (strictly) for every rater.
// Every (model, prompt) combination must carry every rater seen in the table,
// otherwise IncompleteTable.
std::set<ModelPrompt> passing_cells(const CorrTable& table, double threshold = 0.30);

struct ModelSelection {
  std::vector<std::string> models;
  std::vector<std::string> prompts;
  std::set<ModelPrompt> retained;  // models x prompts
};

// Retained scoring system: the largest full models x prompts block in which
// every cell passes. Ties prefer more models, then the lexicographically
// smallest model and prompt lists.
ModelSelection select_models(const CorrTable& table, double threshold = 0.30);

}  // namespace dtscore
