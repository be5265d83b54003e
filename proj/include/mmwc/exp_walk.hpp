#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace mmwc {

/// Finite trajectory of an exp-minus-one walk or bridge.
struct WalkPath {
    double start = 0.0;
    std::vector<double> increments;
    std::vector<double> prefix; // k+1 running values, prefix[0] = start
    int k = 0;
};

/// Monte Carlo estimate with its standard error.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    double acceptance_rate = -1.0; // < 0 when not applicable
};

struct KernelEstimate {
    std::vector<McEstimate> conditional;   // phi-hat per bin (density)
    std::vector<McEstimate> unconditional; // p-hat = phi-hat * survival
    McEstimate survival;
    double bin_width = 0.0;
};

struct LocalTimeProfile {
    std::vector<McEstimate> bins; // mean visits per accepted bridge
    McEstimate acceptance;
    std::uint64_t accepted = 0;
    double bin_width = 0.0;
};

/// k i.i.d. Exp(1)-1 increments from the substream of `seed`.
WalkPath sample_walk(double start, int k, std::uint64_t seed);

/// Exact k-bridge: e_1..e_k i.i.d. Exp(1), increments e_i * k / sum(e) - 1.
/// Ends at 0 (to compensated-summation accuracy).
WalkPath sample_bridge(int k, std::uint64_t seed);

/// P(range of the k-bridge <= A), plain Monte Carlo with binomial errors.
McEstimate estimate_range_prob(int k, double A, std::uint64_t samples, std::uint64_t seed);

/// P(walk from x stays in [0,A] through step k).
McEstimate estimate_survival(double x, double A, int k, std::uint64_t samples, std::uint64_t seed);

/// Binned terminal density of surviving walks.
KernelEstimate estimate_kernel(double x, double A, int k, int bins, std::uint64_t samples,
                               std::uint64_t seed);

/// Average visit counts per bin of the recentered accepted bridge,
/// conditional on range <= A. Refuses runs whose predicted acceptance
/// (fitted range-probability envelope) is below 1e-5.
LocalTimeProfile local_time_profile(int k, double A, int bins, std::uint64_t samples,
                                    std::uint64_t seed);

/// Fitted multiplicative constant of the bridge range-probability envelope
/// R^k_A ~ const * lambda_A^k k^{3/2} / A^3 (calibrated by simulation).
double range_prob_envelope_const();

/// Predicted bridge acceptance for the feasibility guard.
double predicted_range_prob(int k, double A);

/// Completed up-crossings (below x -> above y) and down-crossings
/// (above y -> below x). Cyclic indexing when `cyclic` is set (bridges).
std::pair<int, int> count_crossings(const WalkPath& path, double x, double y, bool cyclic = false);

} // namespace mmwc
