#include "dtscore/distributions.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <random>

namespace dtscore::dist {
namespace {

// Noncentral t cdf by direct quadrature over the chi-square mixing variable,
// s = u^2: F(t) = int_0^inf Phi(t u / sqrt(df) - delta) f_chi2(u^2) 2u du.
double nct_cdf_by_quadrature(double t, double df, double delta) {
  const double log_norm = -(df / 2.0) * std::log(2.0) - std::lgamma(df / 2.0);
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double s = u * u;
    const double log_pdf = log_norm + (df / 2.0 - 1.0) * std::log(s) - s / 2.0;
    const double phi = 0.5 * std::erfc(-(t * u / std::sqrt(df) - delta) / std::sqrt(2.0));
    return phi * std::exp(log_pdf) * 2.0 * u;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14);
}

TEST(Normal, KnownValues) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(normal_sf(2.0), 0.02275013194817922, 1e-16);
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-9);
}

TEST(Normal, QuantileRoundTrip) {
  for (double p = 1e-8; p < 1.0; p = p < 0.01 ? p * 7 : p + 0.013) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-13 + 1e-12 * p) << p;
  }
}

// scipy.stats.t.cdf
TEST(StudentT, MatchesScipy) {
  EXPECT_NEAR(student_t_cdf(2.0, 5), 0.9490302605850709, 1e-13);
  EXPECT_NEAR(student_t_cdf(-1.3, 12), 0.10900858554175712, 1e-13);
  EXPECT_NEAR(student_t_cdf(0.5, 1), 0.6475836176504333, 1e-13);
}

TEST(StudentT, AgreesWithBoostAndRoundTrips) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> tt(-8.0, 8.0), dd(0.5, 400.0), pp(1e-6, 1.0 - 1e-6);
  for (int i = 0; i < 500; ++i) {
    const double t = tt(rng), df = dd(rng);
    const boost::math::students_t ref(df);
    EXPECT_NEAR(student_t_cdf(t, df), boost::math::cdf(ref, t), 1e-12);
    EXPECT_NEAR(student_t_sf(t, df), boost::math::cdf(boost::math::complement(ref, t)), 1e-12);
    const double p = pp(rng);
    EXPECT_NEAR(student_t_cdf(student_t_quantile(p, df), df), p, 1e-10);
  }
}

TEST(IncompleteBeta, Edges) {
  EXPECT_EQ(incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(incomplete_beta(2.0, 3.0, 1.0), 1.0);
  // I_x(1, 1) = x; I_x(a, 1) = x^a.
  EXPECT_NEAR(incomplete_beta(1.0, 1.0, 0.37), 0.37, 1e-15);
  EXPECT_NEAR(incomplete_beta(3.5, 1.0, 0.6), std::pow(0.6, 3.5), 1e-14);
}

// scipy.stats.nct.cdf
TEST(NoncentralT, MatchesScipy) {
  struct Case {
    double t, df, delta, cdf;
  };
  const Case cases[] = {
      {1.5, 10, 1.0, 0.6695168482153548},        {-0.7, 5, 0.5, 0.12711672415994998},
      {2.0, 100, 2.5, 0.3085182146931649},       {3.0, 30, -1.0, 0.9999011883614846},
      {0.0, 3, 2.0, 0.02275013194817922},        {1.6577, 100, 3.5355, 0.030802553683351712},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(noncentral_t_cdf(c.t, c.df, c.delta), c.cdf, 1e-11) << c.t << " " << c.df << " " << c.delta;
  }
}

TEST(NoncentralT, AgreesWithQuadratureAndBoost) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> tt(-6.0, 10.0), dd(1.0, 300.0), nc(-4.0, 8.0);
  for (int i = 0; i < 150; ++i) {
    const double t = tt(rng), df = dd(rng), delta = nc(rng);
    const double ours = noncentral_t_cdf(t, df, delta);
    EXPECT_NEAR(ours, nct_cdf_by_quadrature(t, df, delta), 1e-9) << t << " " << df << " " << delta;
    const boost::math::non_central_t ref(df, delta);
    EXPECT_NEAR(ours, boost::math::cdf(ref, t), 1e-9) << t << " " << df << " " << delta;
    EXPECT_NEAR(noncentral_t_sf(t, df, delta), 1.0 - ours, 1e-12);
  }
}

TEST(NoncentralT, ZeroNoncentralityIsCentral) {
  for (double t : {-3.0, -0.4, 0.0, 1.1, 5.0}) {
    EXPECT_NEAR(noncentral_t_cdf(t, 17, 0.0), student_t_cdf(t, 17), 1e-13);
  }
}

TEST(NoncentralT, DeltaInversionRoundTrips) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> tt(-3.0, 6.0), dd(2.0, 200.0), pp(0.01, 0.99);
  for (int i = 0; i < 100; ++i) {
    const double t = tt(rng), df = dd(rng), p = pp(rng);
    const double delta = noncentral_t_delta_for_cdf(t, df, p);
    EXPECT_NEAR(noncentral_t_cdf(t, df, delta), p, 1e-9);
  }
}

}  // namespace
}  // namespace dtscore::dist
