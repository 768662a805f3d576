#pragma once

#include <span>
#include <vector>

namespace winshift {

double norm_cdf(double x);
double norm_quantile(double p);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double logit(double p);

double mean(std::span<const double> xs);
// Sample standard deviation, divisor n-1.
double sample_sd(std::span<const double> xs);

double pearson(std::span<const double> x, std::span<const double> y);

// Linear-interpolation quantile of an already sorted vector.
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace winshift
