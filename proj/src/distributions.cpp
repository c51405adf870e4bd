#include "dtscore/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "dtscore/error.hpp"

namespace dtscore::dist {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error(Errc::InvalidArgument, "incomplete beta continued fraction did not converge");
}

}  // namespace

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error(Errc::InvalidArgument, "normal_quantile requires 0 <= p <= 1");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x = 0.0;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against erfc.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(Errc::InvalidArgument, "incomplete_beta requires a, b > 0 and x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_pdf(double t, double df) {
  if (!(df > 0.0)) throw Error(Errc::InvalidArgument, "t distribution requires df > 0");
  const double log_pdf = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                         0.5 * std::log(df * std::numbers::pi) - (df + 1.0) / 2.0 * std::log1p(t * t / df);
  return std::exp(log_pdf);
}

double student_t_sf(double t, double df) {
  if (!(df > 0.0)) throw Error(Errc::InvalidArgument, "t distribution requires df > 0");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  // Tail beyond |t| = 0.5 * I_{df/(df+t^2)}(df/2, 1/2).
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
  return t > 0.0 ? tail : 1.0 - tail;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw Error(Errc::InvalidArgument, "t distribution requires df > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::InvalidArgument, "student_t_quantile requires 0 < p < 1");
  if (!(df > 0.0)) throw Error(Errc::InvalidArgument, "t distribution requires df > 0");
  if (p == 0.5) return 0.0;
  // Bracket, then safeguarded Newton.
  double lo = -1.0;
  double hi = 1.0;
  while (student_t_cdf(lo, df) > p) lo *= 2.0;
  while (student_t_cdf(hi, df) < p) hi *= 2.0;
  double x = std::clamp(normal_quantile(p), lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = student_t_cdf(x, df) - p;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    const double pdf = student_t_pdf(x, df);
    double next = pdf > 0.0 ? x - f / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  return x;
}

namespace {

// F(t; df, delta) for t >= 0.
double noncentral_t_cdf_nonneg(double t, double df, double delta) {
  const double x = t * t / (t * t + df);
  const double lambda = delta * delta / 2.0;
  double sum = 0.0;
  if (x > 0.0) {
    if (lambda == 0.0) {
      sum = incomplete_beta(0.5, df / 2.0, x);
    } else {
      const double log_lambda = std::log(lambda);
      const double log_half_abs_delta = std::log(std::abs(delta)) - 0.5 * std::log(2.0);
      const double sign = delta < 0.0 ? -1.0 : 1.0;
      auto term = [&](int j) {
        const double lp = -lambda + j * log_lambda;
        const double p = std::exp(lp - std::lgamma(j + 1.0));
        const double q = sign * std::exp(log_half_abs_delta + lp - std::lgamma(j + 1.5));
        const double tb = p * incomplete_beta(j + 0.5, df / 2.0, x) + q * incomplete_beta(j + 1.0, df / 2.0, x);
        // |tb| <= p + |q| bounds what this and later terms can add.
        return std::pair{tb, p + std::abs(q)};
      };
      const int mode = static_cast<int>(std::floor(lambda));
      for (int j = mode; j >= 0; --j) {
        const auto [tb, bound] = term(j);
        sum += tb;
        if (bound < 1e-18 && j < mode) break;
      }
      for (int j = mode + 1; j < mode + 100000; ++j) {
        const auto [tb, bound] = term(j);
        sum += tb;
        if (bound < 1e-18) break;
      }
    }
  }
  const double value = normal_cdf(-delta) + 0.5 * sum;
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

double noncentral_t_cdf(double t, double df, double noncentrality) {
  if (!(df > 0.0)) throw Error(Errc::InvalidArgument, "t distribution requires df > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  if (t >= 0.0) return noncentral_t_cdf_nonneg(t, df, noncentrality);
  return 1.0 - noncentral_t_cdf_nonneg(-t, df, -noncentrality);
}

double noncentral_t_sf(double t, double df, double noncentrality) {
  if (!(df > 0.0)) throw Error(Errc::InvalidArgument, "t distribution requires df > 0");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  if (t < 0.0) return noncentral_t_cdf_nonneg(-t, df, -noncentrality);
  return 1.0 - noncentral_t_cdf_nonneg(t, df, noncentrality);
}

double noncentral_t_delta_for_cdf(double t, double df, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(Errc::InvalidArgument, "target probability must be in (0, 1)");
  double lo = t - 10.0;
  double hi = t + 10.0;
  while (noncentral_t_cdf(t, df, lo) < p) lo -= 10.0;
  while (noncentral_t_cdf(t, df, hi) > p) hi += 10.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (noncentral_t_cdf(t, df, mid) > p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dtscore::dist
