#pragma once

namespace rngaudit {

// Regularized incomplete gamma functions, P(s,x) = gamma(s,x)/Gamma(s) and
// Q(s,x) = 1 - P(s,x). Series expansion below x = s+1, continued fraction
// above, with the prefactor kept in log space so the upper tail stays
// representable down to ~1e-300. NaN on domain violations (s <= 0, x < 0).
//
// https://en.wikipedia.org/wiki/Incomplete_gamma_function

double regularized_gamma_p(double s, double x);
double regularized_gamma_q(double s, double x);

}  // namespace rngaudit
