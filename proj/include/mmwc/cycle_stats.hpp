#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace mmwc {

/// Tilted bridge of a weight sequence: W_j = sum_{i<=j} (n w_i - cbar - D/k),
/// started at 0 and ending at -D.
struct BridgeView {
    std::vector<double> increments;
    std::vector<double> prefix; // k+1 values, prefix[0] = 0
    double range = 0.0;
    double tilt = 0.0;
    double cbar = 0.0;
};

/// Parameters for the first-moment formulas.
struct MomentQuery {
    std::uint64_t n = 0;
    int k = 2;
    double c = 0.0;
    double delta = -1.0; // optional, in (0,1)
    double A = -1.0;     // optional, > 0
};

/// c-excedance of a weight sequence: sum_i (n w_i / c - 1) = k(cbar/c - 1).
double excedance(const std::vector<double>& weights, double c, std::uint64_t n);

/// True iff no cyclic subpath (window of length 1..k-1) has c-excedance
/// outside [-A, A]; closed comparison. O(k) when c == cbar via the
/// bridge-range equivalence, monotone-deque window scan otherwise.
bool is_uniform(const std::vector<double>& weights, std::uint64_t n, double c, double A);

/// Largest |c-excedance| over cyclic subpaths (the quantity is_uniform
/// compares against A).
double max_abs_cyclic_excedance(const std::vector<double>& weights, std::uint64_t n, double c);

BridgeView untilted_bridge(const std::vector<double>& weights, std::uint64_t n, double D = 0.0);

/// Exact E Z^k_c = (n)_k / k * P(Gam(k) <= ck/n); log-space falling factorial.
double expected_light_cycles(const MomentQuery& q);

/// Exact E Zbar^k_c = (n)_{k+1} / n^k * stuff is not needed; this is the
/// k-path first moment (n)_{k+1} * P(Gam(k) <= ck/n) used by tests.
double expected_light_paths(const MomentQuery& q);

/// E Z^k_c(A) = E Z^k_c * R, with R an external estimate of R^k_A in [0,1].
double expected_uniform_light_cycles(const MomentQuery& q, double R);

/// Index intervals [start, end] (prefix indices) of the extracted subpaths
/// of Lemma-style drop extraction; at least 1 + floor(A - A') of them when
/// the path's c-excedance is < -A and 2 <= A' <= A.
std::vector<std::pair<int, int>> extract_uniform_subpaths(const std::vector<double>& weights,
                                                          std::uint64_t n, double c, double A,
                                                          double A_prime);

/// Boundary-distance profile 1{0<=x<=A} [(x+1) ^ (A-x+1)].
double delta_profile(double x, double A);

/// Delta-goodness predicate: weight window, range bound on the X process,
/// and the per-level visit cap Delta * delta_A(x)^4 for integer levels
/// 1..A, where A = ceil(log n) - Delta and c solves c e lambda_A = 1.
/// lambda_for_height resolves H -> principal eigenvalue.
bool is_good(const std::vector<double>& weights, std::uint64_t n, int Delta,
             const std::function<double(double)>& lambda_for_height);

} // namespace mmwc
