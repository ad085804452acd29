#include "watermap/binomial.hpp"

#include <cmath>
#include <stdexcept>

namespace watermap {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_lower_bound(int n, double p, double z) {
  return n * p - z * std::sqrt(n * p * (1.0 - p));
}

int binomial_lower_quantile(int n, double p, double alpha) {
  if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_lower_quantile");
  if (p == 0.0) return alpha >= 1.0 ? n : -1;  // CDF(0) = 1
  if (p == 1.0) return alpha >= 1.0 ? n : n - 1;  // CDF(k) = 0 for k < n

  // Accumulate pmf terms in log space via lgamma until the CDF passes alpha.
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double lg_n1 = std::lgamma(n + 1.0);
  double cdf = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double log_pmf =
        lg_n1 - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * log_p + (n - k) * log_q;
    cdf += std::exp(log_pmf);
    if (cdf > alpha) return k - 1;
  }
  return n;
}

}  // namespace watermap
