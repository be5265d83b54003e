#pragma once

namespace mmwc {

/// Regularized lower incomplete gamma P(a, x) = γ(a,x)/Γ(a).
/// Series expansion for x < a+1, continued fraction otherwise;
/// target relative error 1e-12.
double reg_lower_gamma(double a, double x);

/// log of the falling factorial (n)_k = n(n-1)...(n-k+1).
double log_falling_factorial(double n, int k);

} // namespace mmwc
