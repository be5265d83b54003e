#include "mmwc/gamma.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmwc {

namespace {

// Lower series: P(a,x) = x^a e^-x / Gamma(a+1) * sum_{n>=0} x^n / ((a+1)...(a+n))
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("reg_lower_gamma: series did not converge");
}

// Upper continued fraction (modified Lentz): Q(a,x), returns P = 1 - Q.
double gamma_p_contfrac(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) {
            double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
            return 1.0 - q;
        }
    }
    throw std::runtime_error("reg_lower_gamma: continued fraction did not converge");
}

} // namespace

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("reg_lower_gamma: a must be positive");
    if (x < 0.0) throw std::domain_error("reg_lower_gamma: x must be nonnegative");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : gamma_p_contfrac(a, x);
}

double log_falling_factorial(double n, int k) {
    if (k < 0) throw std::domain_error("log_falling_factorial: k < 0");
    if (n < k) throw std::domain_error("log_falling_factorial: need n >= k");
    return std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0);
}

} // namespace mmwc
