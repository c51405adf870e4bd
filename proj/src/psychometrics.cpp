#include "dtscore/psychometrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "dtscore/distributions.hpp"
#include "dtscore/error.hpp"

namespace dtscore {

namespace {

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double p_for(double t, double df, Alternative alt) {
  switch (alt) {
    case Alternative::Greater: return dist::student_t_sf(t, df);
    case Alternative::Less: return dist::student_t_cdf(t, df);
    case Alternative::TwoSided: break;
  }
  return std::min(1.0, 2.0 * dist::student_t_sf(std::abs(t), df));
}

GroupComparison compare(double m1, double s1, std::size_t n1, double m2, double s2, std::size_t n2,
                        const TTestOptions& opt) {
  if (n1 < 2 || n2 < 2) throw Error(Errc::InsufficientData, "t test needs at least 2 observations per group");
  if (!std::isfinite(m1) || !std::isfinite(m2) || !std::isfinite(s1) || !std::isfinite(s2) || s1 < 0.0 || s2 < 0.0) {
    throw Error(Errc::InvalidArgument, "t test summaries must be finite with nonnegative SDs");
  }
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double pooled_df = a + b - 2.0;
  const double sp = std::sqrt(((a - 1.0) * s1 * s1 + (b - 1.0) * s2 * s2) / pooled_df);
  if (!(sp > 0.0)) throw Error(Errc::ZeroVariance, "both groups have zero variance");

  GroupComparison g;
  g.mean1 = m1;
  g.sd1 = s1;
  g.n1 = n1;
  g.mean2 = m2;
  g.sd2 = s2;
  g.n2 = n2;
  g.alternative = opt.alternative;
  g.welch = opt.welch;
  g.d_ci_method = opt.d_ci;

  const double diff = m1 - m2;
  const double pooled_t = diff / (sp * std::sqrt(1.0 / a + 1.0 / b));
  if (opt.welch) {
    const double v1 = s1 * s1 / a;
    const double v2 = s2 * s2 / b;
    g.t_stat = diff / std::sqrt(v1 + v2);
    g.df = (v1 + v2) * (v1 + v2) / (v1 * v1 / (a - 1.0) + v2 * v2 / (b - 1.0));
  } else {
    g.t_stat = pooled_t;
    g.df = pooled_df;
  }
  g.p = p_for(g.t_stat, g.df, opt.alternative);

  g.cohens_d = diff / sp;
  if (opt.d_ci == DCiMethod::Normal) {
    const double se = std::sqrt((a + b) / (a * b) + g.cohens_d * g.cohens_d / (2.0 * (a + b)));
    const double z = dist::normal_quantile(0.975);
    g.d_ci95_lo = g.cohens_d - z * se;
    g.d_ci95_hi = g.cohens_d + z * se;
  } else {
    const double scale = std::sqrt(1.0 / a + 1.0 / b);
    g.d_ci95_lo = dist::noncentral_t_delta_for_cdf(pooled_t, pooled_df, 0.975) * scale;
    g.d_ci95_hi = dist::noncentral_t_delta_for_cdf(pooled_t, pooled_df, 0.025) * scale;
  }
  return g;
}

}  // namespace

CorrResult correlation_significance(double r, std::size_t n) {
  if (n < 3) throw Error(Errc::InsufficientData, "correlation needs n >= 3, got " + std::to_string(n));
  if (!(r >= -1.0 && r <= 1.0)) throw Error(Errc::InvalidArgument, "correlation must lie in [-1, 1]");
  CorrResult res;
  res.r = r;
  res.n = n;
  const double df = static_cast<double>(n) - 2.0;
  if (std::abs(r) == 1.0) {
    res.t_stat = std::copysign(std::numeric_limits<double>::infinity(), r);
    res.p_two_tailed = 0.0;
    res.ci95_lo = r;
    res.ci95_hi = r;
    return res;
  }
  res.t_stat = r * std::sqrt(df) / std::sqrt(1.0 - r * r);
  res.p_two_tailed = std::min(1.0, 2.0 * dist::student_t_sf(std::abs(res.t_stat), df));
  if (n > 3) {
    const double half = dist::normal_quantile(0.975) / std::sqrt(static_cast<double>(n) - 3.0);
    res.ci95_lo = std::tanh(std::atanh(r) - half);
    res.ci95_hi = std::tanh(std::atanh(r) + half);
  }
  return res;
}

CorrResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(Errc::AlignmentError,
                "pearson series lengths differ (" + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) throw Error(Errc::InsufficientData, "pearson needs n >= 3, got " + std::to_string(x.size()));
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(Errc::ZeroVariance, "pearson series has zero variance");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return correlation_significance(r, x.size());
}

ZTest fisher_z_independent(double r1, std::size_t n1, double r2, std::size_t n2) {
  if (!(std::abs(r1) < 1.0) || !(std::abs(r2) < 1.0)) {
    throw Error(Errc::DegenerateCorrelation, "Fisher z requires |r| < 1");
  }
  if (n1 < 4 || n2 < 4) throw Error(Errc::InsufficientData, "Fisher z requires n >= 4 per sample");
  const double se = std::sqrt(1.0 / (static_cast<double>(n1) - 3.0) + 1.0 / (static_cast<double>(n2) - 3.0));
  const double z = (std::atanh(r1) - std::atanh(r2)) / se;
  return ZTest{z, std::min(1.0, 2.0 * dist::normal_sf(std::abs(z)))};
}

ZTest steiger_z_dependent(double r13, double r23, double r12, std::size_t n) {
  for (double r : {r13, r23, r12}) {
    if (!(std::abs(r) < 1.0)) throw Error(Errc::DegenerateCorrelation, "Steiger test requires |r| < 1");
  }
  if (n < 4) throw Error(Errc::InsufficientData, "Steiger test requires n >= 4");
  const double det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23;
  if (det < -1e-12) {
    throw Error(Errc::InvalidCorrelationMatrix, "correlation triple is not positive semidefinite (det = " +
                                                    std::to_string(det) + ")");
  }
  const double rbar = 0.5 * (r13 + r23);
  const double rbar2 = rbar * rbar;
  const double psi = r12 * (1.0 - 2.0 * rbar2) - 0.5 * rbar2 * (1.0 - 2.0 * rbar2 - r12 * r12);
  const double c = psi / ((1.0 - rbar2) * (1.0 - rbar2));
  if (!(2.0 - 2.0 * c > 0.0)) {
    throw Error(Errc::InvalidCorrelationMatrix, "dependent correlations have zero sampling variance");
  }
  const double z = (std::atanh(r13) - std::atanh(r23)) * std::sqrt(static_cast<double>(n) - 3.0) /
                   std::sqrt(2.0 - 2.0 * c);
  return ZTest{z, std::min(1.0, 2.0 * dist::normal_sf(std::abs(z)))};
}

IccResult icc_2k(const std::vector<std::vector<double>>& ratings) {
  const std::size_t n = ratings.size();
  if (n < 2) throw Error(Errc::InsufficientData, "ICC needs at least 2 targets");
  const std::size_t k = ratings.front().size();
  if (k < 2) throw Error(Errc::InsufficientData, "ICC needs at least 2 raters");
  for (std::size_t i = 0; i < n; ++i) {
    if (ratings[i].size() != k) {
      throw Error(Errc::IncompleteMatrix, "target " + std::to_string(i) + " has " +
                                              std::to_string(ratings[i].size()) + " ratings, expected " +
                                              std::to_string(k));
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(ratings[i][j])) {
        throw Error(Errc::IncompleteMatrix,
                    "missing rating at target " + std::to_string(i) + ", rater " + std::to_string(j));
      }
    }
  }

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  std::vector<double> row_mean(n, 0.0);
  std::vector<double> col_mean(k, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += ratings[i][j];
      col_mean[j] += ratings[i][j];
      grand += ratings[i][j];
    }
  }
  for (auto& m : row_mean) m /= kd;
  for (auto& m : col_mean) m /= nd;
  grand /= nd * kd;

  double ss_rows = 0.0;
  double ss_cols = 0.0;
  double ss_err = 0.0;
  double ss_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss_rows += (row_mean[i] - grand) * (row_mean[i] - grand);
  for (std::size_t j = 0; j < k; ++j) ss_cols += (col_mean[j] - grand) * (col_mean[j] - grand);
  ss_rows *= kd;
  ss_cols *= nd;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double e = ratings[i][j] - row_mean[i] - col_mean[j] + grand;
      ss_err += e * e;
      ss_total += (ratings[i][j] - grand) * (ratings[i][j] - grand);
    }
  }

  IccResult res;
  res.n_targets = n;
  res.k_raters = k;
  res.ms_rows = ss_rows / (nd - 1.0);
  res.ms_cols = ss_cols / (kd - 1.0);
  res.ms_error = ss_err / ((nd - 1.0) * (kd - 1.0));
  const double denom = res.ms_rows + (res.ms_cols - res.ms_error) / nd;
  if (!(std::abs(denom) > 1e-12 * std::max(1.0, ss_total)) || ss_total == 0.0) {
    throw Error(Errc::DegenerateAnova, "ICC(2,k) denominator vanishes (no variance in ratings)");
  }
  res.icc2k = (res.ms_rows - res.ms_error) / denom;
  return res;
}

GroupComparison t_test_from_summary(double mean1, double sd1, std::size_t n1, double mean2, double sd2,
                                    std::size_t n2, const TTestOptions& options) {
  if (!(sd1 > 0.0) || !(sd2 > 0.0)) throw Error(Errc::ZeroVariance, "summary SDs must be > 0");
  return compare(mean1, sd1, n1, mean2, sd2, n2, options);
}

GroupComparison t_test_pooled(std::span<const double> group1, std::span<const double> group2,
                              const TTestOptions& options) {
  if (group1.size() < 2 || group2.size() < 2) {
    throw Error(Errc::InsufficientData, "t test needs at least 2 observations per group");
  }
  const double m1 = mean_of(group1);
  const double m2 = mean_of(group2);
  return compare(m1, sample_sd(group1, m1), group1.size(), m2, sample_sd(group2, m2), group2.size(), options);
}

double two_sample_power(std::size_t n_per_group, double d, double alpha, Tails tails) {
  if (n_per_group < 2) throw Error(Errc::InvalidArgument, "power needs n >= 2 per group");
  const double n = static_cast<double>(n_per_group);
  const double df = 2.0 * n - 2.0;
  const double delta = d * std::sqrt(n / 2.0);
  if (tails == Tails::One) {
    const double crit = dist::student_t_quantile(1.0 - alpha, df);
    return dist::noncentral_t_sf(crit, df, delta);
  }
  const double crit = dist::student_t_quantile(1.0 - alpha / 2.0, df);
  return dist::noncentral_t_sf(crit, df, delta) + dist::noncentral_t_cdf(-crit, df, delta);
}

std::size_t min_n_per_group(const PowerRequest& req) {
  if (!(req.d > 0.0) || !std::isfinite(req.d)) throw Error(Errc::InvalidArgument, "effect size d must be > 0");
  if (!(req.alpha > 0.0 && req.alpha < 1.0)) throw Error(Errc::InvalidArgument, "alpha must be in (0, 1)");
  if (!(req.power > 0.0 && req.power < 1.0)) throw Error(Errc::InvalidArgument, "power must be in (0, 1)");
  constexpr std::size_t kCap = 10'000'000;
  auto ok = [&](std::size_t n) { return two_sample_power(n, req.d, req.alpha, req.tails) >= req.power; };

  if (ok(2)) return 2;
  std::size_t lo = 2;  // fails
  std::size_t hi = 4;
  while (!ok(hi)) {
    if (hi >= kCap) throw Error(Errc::NotAttainable, "power target not reached with n <= 10^7 per group");
    lo = hi;
    hi = std::min(hi * 2, kCap);
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (ok(mid)) hi = mid; else lo = mid;
  }
  return hi;
}

std::set<ModelPrompt> passing_cells(const CorrTable& table, double threshold) {
  std::set<std::string> models;
  std::set<std::string> prompts;
  std::set<std::string> raters;
  for (const auto& [key, r] : table) {
    models.insert(std::get<0>(key));
    prompts.insert(std::get<1>(key));
    raters.insert(std::get<2>(key));
  }
  std::set<ModelPrompt> out;
  for (const auto& m : models) {
    for (const auto& p : prompts) {
      bool pass = true;
      for (const auto& rater : raters) {
        const auto it = table.find({m, p, rater});
        if (it == table.end()) {
          throw Error(Errc::IncompleteTable, "no correlation for model '" + m + "', prompt '" + p + "', rater '" +
                                                 rater + "'");
        }
        pass = pass && it->second > threshold;
      }
      if (pass) out.emplace(m, p);
    }
  }
  return out;
}

ModelSelection select_models(const CorrTable& table, double threshold) {
  const auto pass = passing_cells(table, threshold);
  std::set<std::string> model_set;
  std::set<std::string> prompt_set;
  for (const auto& [key, r] : table) {
    model_set.insert(std::get<0>(key));
    prompt_set.insert(std::get<1>(key));
  }
  const std::vector<std::string> models(model_set.begin(), model_set.end());
  const std::vector<std::string> prompts(prompt_set.begin(), prompt_set.end());

  // Enumerate subsets of the shorter axis; the other axis is then determined.
  const bool by_prompt = prompts.size() <= models.size();
  const auto& axis = by_prompt ? prompts : models;
  const auto& other = by_prompt ? models : prompts;
  if (axis.size() > 24) {
    throw Error(Errc::InvalidArgument, "select_models supports at most 24 models or prompts on the shorter axis");
  }
  auto passes = [&](const std::string& a, const std::string& o) {
    return by_prompt ? pass.contains({o, a}) : pass.contains({a, o});
  };

  ModelSelection best;
  std::size_t best_area = 0;
  for (std::uint32_t mask = 1; mask < (1U << axis.size()); ++mask) {
    std::vector<std::string> chosen;
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (mask & (1U << i)) chosen.push_back(axis[i]);
    }
    std::vector<std::string> partners;
    for (const auto& o : other) {
      if (std::all_of(chosen.begin(), chosen.end(), [&](const std::string& a) { return passes(a, o); })) {
        partners.push_back(o);
      }
    }
    if (partners.empty()) continue;
    ModelSelection cand;
    cand.models = by_prompt ? partners : chosen;
    cand.prompts = by_prompt ? chosen : partners;
    const std::size_t area = cand.models.size() * cand.prompts.size();
    const bool better = area > best_area ||
                        (area == best_area && (cand.models.size() > best.models.size() ||
                                               (cand.models.size() == best.models.size() &&
                                                std::tie(cand.models, cand.prompts) < std::tie(best.models, best.prompts))));
    if (better) {
      best = std::move(cand);
      best_area = area;
    }
  }
  for (const auto& m : best.models) {
    for (const auto& p : best.prompts) best.retained.emplace(m, p);
  }
  return best;
}

}  // namespace dtscore
