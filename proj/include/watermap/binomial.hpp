// binomial.hpp
// Lower confidence bounds for binomial window counts: the normal
// approximation used as the default decision boundary, and the exact
// binomial quantile it approximates.

#pragma once

namespace watermap {

// Standard normal CDF.
double std_normal_cdf(double x);

// n*p - z*sqrt(n*p*(1-p)).
double normal_lower_bound(int n, double p, double z);

// Largest k with CDF(k; n, p) <= alpha, or -1 when even k = 0 exceeds alpha.
// A count is "low" at confidence alpha iff count <= the returned k.
int binomial_lower_quantile(int n, double p, double alpha);

}  // namespace watermap
