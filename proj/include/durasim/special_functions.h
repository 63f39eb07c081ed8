#pragma once

#include <cstdint>

namespace durasim {

// Regularized lower incomplete gamma P(s, x) and its complement Q(s, x).
// Series expansion for x < s + 1, Lentz continued fraction otherwise.
double gamma_p(double s, double x);
double gamma_q(double s, double x);

// CDF at x of the Gamma distribution with the given shape and rate.
double gamma_cdf(double shape, double rate, double x);

// P(Binomial(n, p) >= d), summed in log space over the shorter tail.
double binomial_upper_tail(std::int64_t n, std::int64_t d, double p);

}  // namespace durasim
