#include "rngaudit/incgamma.hpp"

#include <cmath>
#include <limits>

namespace rngaudit {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

double log_prefactor(double s, double x) {
    return -x + s * std::log(x) - std::lgamma(s);
}

// Lower series: P(s,x) = x^s e^-x / Gamma(s) * sum_n x^n / (s(s+1)...(s+n)).
double gamma_p_series(double s, double x) {
    double ap = s;
    double term = 1.0 / s;
    double sum = term;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(log_prefactor(s, x));
}

// Upper continued fraction via modified Lentz.
double gamma_q_cf(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(log_prefactor(s, x));
}

}  // namespace

double regularized_gamma_p(double s, double x) {
    if (!(s > 0.0) || !(x >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return gamma_p_series(s, x);
    return 1.0 - gamma_q_cf(s, x);
}

double regularized_gamma_q(double s, double x) {
    if (!(s > 0.0) || !(x >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_cf(s, x);
}

}  // namespace rngaudit
