#include "mmwc/cycle_stats.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "mmwc/gamma.hpp"
#include "mmwc/graph.hpp"

namespace mmwc {

double excedance(const std::vector<double>& weights, double c, std::uint64_t n) {
    if (!(c > 0.0)) throw std::domain_error("excedance: c must be positive");
    std::vector<double> inc(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) inc[i] = static_cast<double>(n) * weights[i] / c - 1.0;
    return compensated_sum(inc);
}

namespace {

std::vector<double> prefix_process(const std::vector<double>& weights, std::uint64_t n, double c) {
    std::vector<double> W(weights.size() + 1);
    double sum = 0.0, comp = 0.0;
    W[0] = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        double x = static_cast<double>(n) * weights[i] / c - 1.0;
        double t = sum + x;
        comp += (std::fabs(sum) >= std::fabs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
        W[i + 1] = sum + comp;
    }
    return W;
}

} // namespace

double max_abs_cyclic_excedance(const std::vector<double>& weights, std::uint64_t n, double c) {
    const std::size_t k = weights.size();
    if (k == 0) return 0.0;
    std::vector<double> W = prefix_process(weights, n, c);
    const double total = W[k];

    if (k == 1) return std::fabs(W[1]);

    // zero-drift case: every ordered pair of prefix points is a window
    if (total == 0.0) {
        auto [mn, mx] = std::minmax_element(W.begin(), W.begin() + static_cast<long>(k));
        return *mx - *mn;
    }

    // doubled prefix sequence Y_j (period shift = total); windows of length
    // 1..k-1 ending at j draw their start from a sliding range of size k-1
    auto Y = [&](std::size_t j) { return j <= k ? W[j] : W[j - k] + total; };
    std::deque<std::size_t> qmin, qmax;
    double worst = 0.0;
    for (std::size_t j = 1; j < 2 * k; ++j) {
        std::size_t lo = j >= k - 1 ? j - (k - 1) : 0; // window starts in [lo, j-1]
        std::size_t new_i = j - 1;
        while (!qmin.empty() && Y(qmin.back()) >= Y(new_i)) qmin.pop_back();
        qmin.push_back(new_i);
        while (!qmax.empty() && Y(qmax.back()) <= Y(new_i)) qmax.pop_back();
        qmax.push_back(new_i);
        while (qmin.front() < lo) qmin.pop_front();
        while (qmax.front() < lo) qmax.pop_front();
        worst = std::max(worst, Y(j) - Y(qmin.front()));
        worst = std::max(worst, Y(qmax.front()) - Y(j));
    }
    return worst;
}

bool is_uniform(const std::vector<double>& weights, std::uint64_t n, double c, double A) {
    if (!(A > 0.0)) throw std::domain_error("is_uniform: A must be positive");
    return max_abs_cyclic_excedance(weights, n, c) <= A;
}

BridgeView untilted_bridge(const std::vector<double>& weights, std::uint64_t n, double D) {
    const std::size_t k = weights.size();
    BridgeView b;
    b.tilt = D;
    double total = compensated_sum(weights);
    b.cbar = k == 0 ? 0.0 : static_cast<double>(n) * total / static_cast<double>(k);
    b.increments.resize(k);
    for (std::size_t i = 0; i < k; ++i)
        b.increments[i] = static_cast<double>(n) * weights[i] - b.cbar - D / static_cast<double>(k);
    b.prefix.resize(k + 1);
    b.prefix[0] = 0.0;
    double sum = 0.0, comp = 0.0;
    double mn = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double x = b.increments[i];
        double t = sum + x;
        comp += (std::fabs(sum) >= std::fabs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
        b.prefix[i + 1] = sum + comp;
        mn = std::min(mn, b.prefix[i + 1]);
        mx = std::max(mx, b.prefix[i + 1]);
    }
    b.range = mx - mn;
    return b;
}

double expected_light_cycles(const MomentQuery& q) {
    if (q.k < 2 || static_cast<std::uint64_t>(q.k) > q.n)
        throw std::domain_error("expected_light_cycles: need 2 <= k <= n");
    if (q.c < 0.0 || q.c > 2.0)
        throw std::domain_error("expected_light_cycles: c out of [0,2]");
    if (q.c == 0.0) return 0.0;
    double log_count = log_falling_factorial(static_cast<double>(q.n), q.k) - std::log(static_cast<double>(q.k));
    double p = reg_lower_gamma(static_cast<double>(q.k), q.c * q.k / static_cast<double>(q.n));
    if (p == 0.0) return 0.0;
    return std::exp(log_count + std::log(p));
}

double expected_light_paths(const MomentQuery& q) {
    if (q.k < 1 || static_cast<std::uint64_t>(q.k) + 1 > q.n)
        throw std::domain_error("expected_light_paths: need 1 <= k <= n-1");
    if (q.c == 0.0) return 0.0;
    double log_count = log_falling_factorial(static_cast<double>(q.n), q.k + 1);
    double p = reg_lower_gamma(static_cast<double>(q.k), q.c * q.k / static_cast<double>(q.n));
    if (p == 0.0) return 0.0;
    return std::exp(log_count + std::log(p));
}

double expected_uniform_light_cycles(const MomentQuery& q, double R) {
    if (!(R >= 0.0 && R <= 1.0))
        throw std::domain_error("expected_uniform_light_cycles: R must be in [0,1]");
    return expected_light_cycles(q) * R;
}

std::vector<std::pair<int, int>> extract_uniform_subpaths(const std::vector<double>& weights,
                                                          std::uint64_t n, double c, double A,
                                                          double A_prime) {
    if (!(A_prime >= 2.0) || !(A_prime <= A))
        throw std::domain_error("extract_uniform_subpaths: need 2 <= A' <= A");
    if (!(c > 0.0)) throw std::domain_error("extract_uniform_subpaths: c must be positive");
    std::vector<double> W = prefix_process(weights, n, c);
    const int k = static_cast<int>(weights.size());
    if (!(W[k] < -A))
        throw std::domain_error("extract_uniform_subpaths: path c-excedance must be < -A");

    std::vector<std::pair<int, int>> out;
    const int count = 1 + static_cast<int>(std::floor(A - A_prime));
    for (int i = 0; i < count; ++i) {
        const double x = -static_cast<double>(i);
        const double y = x - A_prime;
        // minimal [eta, tau]: eta = last visit to (x-1, x] before the first
        // subsequent visit to (y, y+1]
        int eta = -1, tau = -1;
        for (int t = 0; t <= k; ++t) {
            if (W[t] > x - 1.0 && W[t] <= x) eta = t;
            if (eta >= 0 && t > eta && W[t] > y && W[t] <= y + 1.0) {
                tau = t;
                break;
            }
        }
        if (eta < 0 || tau < 0)
            throw std::runtime_error("extract_uniform_subpaths: window not hit (increments below -1?)");
        out.emplace_back(eta, tau);
    }
    return out;
}

double delta_profile(double x, double A) {
    if (x < 0.0 || x > A) return 0.0;
    return std::min(x + 1.0, A - x + 1.0);
}

bool is_good(const std::vector<double>& weights, std::uint64_t n, int Delta,
             const std::function<double(double)>& lambda_for_height) {
    const double logn = std::log(static_cast<double>(n));
    if (Delta < 1 || static_cast<double>(Delta) > logn / 2.0)
        throw std::domain_error("is_good: Delta out of range (1 <= Delta <= log(n)/2)");
    const int k = static_cast<int>(weights.size());
    if (k < 2) throw std::domain_error("is_good: need a cycle of length >= 2");

    const double A = std::ceil(logn) - Delta; // integer by construction
    const double lambda_A = lambda_for_height(A);
    const double c = 1.0 / (std::exp(1.0) * lambda_A);

    // (i) weight window
    double total = compensated_sum(weights);
    double cbar = static_cast<double>(n) * total / k;
    if (!(cbar <= c && cbar >= c * (1.0 - 1.0 / k))) return false;

    // (ii) range of the prefix process with increments (n w_i / c - 1)
    std::vector<double> X = prefix_process(weights, n, c);
    auto [mn_it, mx_it] = std::minmax_element(X.begin(), X.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx - mn <= A - 2.0)) return false;

    // (iii) visit caps for the recentered process
    const double shift = (A - mx - mn) / 2.0;
    const int levels = static_cast<int>(A);
    std::vector<int> visits(levels + 1, 0);
    for (int t = 1; t <= k; ++t) {
        double v = X[t] + shift;
        // bin (x-1, x] for integer x
        double cx = std::ceil(v);
        if (cx >= 1.0 && cx <= A) ++visits[static_cast<int>(cx)];
    }
    for (int x = 1; x <= levels; ++x) {
        double cap = static_cast<double>(Delta) * std::pow(delta_profile(x, A), 4.0);
        if (static_cast<double>(visits[x]) > cap) return false;
    }
    return true;
}

} // namespace mmwc
