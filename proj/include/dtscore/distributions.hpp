#pragma once

// Central and noncentral distribution functions used by the validation
// statistics. Implemented in-repo: regularized incomplete beta by Lentz's
// continued fraction, noncentral t by the Poisson-weighted incomplete-beta
// series summed outward from the Poisson mode.
namespace dtscore::dist {

double normal_cdf(double x) noexcept;
double normal_sf(double x) noexcept;
// Acklam's rational approximation refined by one Halley step.
double normal_quantile(double p);

// I_x(a, b). Requires a, b > 0 and 0 <= x <= 1.
double incomplete_beta(double a, double b, double x);

double student_t_pdf(double t, double df);
double student_t_cdf(double t, double df);
// Upper tail 1 - cdf, computed without cancellation.
double student_t_sf(double t, double df);
double student_t_quantile(double p, double df);

double noncentral_t_cdf(double t, double df, double noncentrality);
double noncentral_t_sf(double t, double df, double noncentrality);

// Noncentrality delta with noncentral_t_cdf(t, df, delta) == p. The cdf is
// strictly decreasing in delta, so the root is unique.
double noncentral_t_delta_for_cdf(double t, double df, double p);

}  // namespace dtscore::dist
