#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace mmwc::spectral {

using cplx = std::complex<double>;

/// Branch-k Lambert W, W_k(z) e^{W_k(z)} = z, branches closed in the
/// direction of increasing Im w. Real z < 0 is evaluated on the cut as the
/// limit from above; negative branches there mirror to conjugates of the
/// matching nonnegative branch. Exactly -1 at the branch point for k in
/// {0,-1}.
cplx lambert_w(int k, cplx z);

/// Tree function T(z) = -W_0(-z); T = z exp(T).
cplx tree_function(cplx z);

/// Characteristic function tau(s) = 1/lambda - e^s + s e^s.
cplx tau(double lambda, cplx s);

struct GClosed {
    double value = 0.0;
    double err_estimate = 0.0;
    bool cancellation_alarm = false;
};

/// Closed-form eigenfunction g_lambda(x) = e^x sum (x-k)^k / (-lambda e)^k k!.
/// Evaluated in double-double arithmetic so the alternating cancellation is
/// harmless until x is large; the alarm trips when the error estimate
/// exceeds 1e-8 |value|.
GClosed g_closed_checked(double lambda, double x);

/// Same, but throws on cancellation alarm (use the pole series instead).
double g_closed(double lambda, double x);

struct GSeries {
    double value = 0.0;
    double tail_bound = 0.0;
};

/// Truncated pole series g = f_lambda + 2 sum_{k=1..K} Re(e^{s_k x}/s_k),
/// f = 2 Re(e^{s_0 x}/s_0) for lambda < 1 and 2(x+1/3) at lambda = 1.
/// Reports the analytic tail bound C_x / (x K^x).
GSeries g_series(double lambda, double x, int K = 50);

/// Evaluation strategy: closed form for x <= 12, pole series beyond.
double g_eval(double lambda, double x);

/// Principal eigenvalue solve with its root set.
struct SpectralSolution {
    double lambda = 0.0;
    double delta = 0.0; // -ln lambda
    double H = 0.0;
    int K = 50;
    std::vector<cplx> roots; // s_j for j in [-K, K]; roots[j + K]

    cplx root(int j) const { return roots[static_cast<std::size_t>(j + K)]; }
};

/// lambda_H: H/e exactly for H <= 1, else the largest root in (0,1) of
/// g_lambda(H+1) = 0 (descending bracket scan + Brent to 1e-12).
SpectralSolution principal_lambda(double H, int K = 50);

/// Real eigenvalues in (0,1) for the lambda(H) curve, descending.
std::vector<double> real_eigenvalues(double H, int max_count);

/// Max over an x-grid of |lambda g(x) - e^{x-1} int_{x-1}^H g e^-u du|,
/// normalized by max |g|; adaptive panel quadrature split at integers.
double eigen_residual(double lambda, double H, int quad_points = 21);

/// Interval height for a target delta = -ln lambda, via the smallest
/// positive zero x* of g_lambda beyond x' = 3; H = x* - 1. Supported for
/// 0 < delta <= 0.05; round-trip with principal_lambda asserted to 1e-10.
double height_for_delta(double delta);

/// (c_circ, c_star) at size n: 1/(e lambda_{log n}) and the closed formula.
std::pair<double, double> c_critical(std::uint64_t n);

/// Right eigenfunction x -> g_lambda(H - x); throws unless the right-eigen
/// quadrature residual is <= 1e-8.
std::function<double(double)> right_eigenfunction(double lambda, double H);

/// Residual of the right eigen-equation for f = g_lambda(H - .).
double right_eigen_residual(double lambda, double H, int quad_points = 21);

/// L2[0,H] inner product <R_H g_{l1}, R_H-reflected g_{l2}> used by the
/// biorthogonality check: integral of g_{l1}(x) g_{l2}(H-x) dx.
double reflected_inner_product(double lambda1, double lambda2, double H, int quad_points = 21);

} // namespace mmwc::spectral
