#include "mmwc/exp_walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mmwc/rng.hpp"
#include "mmwc/spectral.hpp"

namespace mmwc {

namespace {

// Partition [0, total) into chunks handled by worker threads. Results must
// be merged by commutative sums so the outcome is independent of the split.
template <class Fn>
void parallel_chunks(std::uint64_t total, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    unsigned workers = std::min<unsigned>(std::max(1u, hw), 8u);
    if (total < 8192 || workers == 1) {
        fn(0, total, 0);
        return;
    }
    std::uint64_t chunk = (total + workers - 1) / workers;
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < workers; ++t) {
        std::uint64_t b = t * chunk, e = std::min(total, b + chunk);
        if (b >= e) break;
        threads.emplace_back([&fn, b, e, t] { fn(b, e, t); });
    }
    for (auto& th : threads) th.join();
}

double binom_se(double p, std::uint64_t n) {
    return n == 0 ? 0.0 : std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

} // namespace

WalkPath sample_walk(double start, int k, std::uint64_t seed) {
    if (k < 0) throw std::domain_error("sample_walk: k must be >= 0");
    WalkPath p;
    p.start = start;
    p.k = k;
    p.increments.resize(k);
    p.prefix.resize(k + 1);
    p.prefix[0] = start;
    for (int i = 0; i < k; ++i)
        p.prefix[i + 1] = p.prefix[i] + (rng::exponential(seed, static_cast<std::uint64_t>(i)) - 1.0);
    // store increments as the exact prefix differences so the path identity
    // X_j - X_{j-1} = increments[j-1] holds bitwise
    for (int i = 0; i < k; ++i) p.increments[i] = p.prefix[i + 1] - p.prefix[i];
    return p;
}

WalkPath sample_bridge(int k, std::uint64_t seed) {
    if (k < 1) throw std::domain_error("sample_bridge: k must be >= 1");
    WalkPath p;
    p.start = 0.0;
    p.k = k;
    p.increments.resize(k);
    p.prefix.resize(k + 1);
    p.prefix[0] = 0.0;
    double total = 0.0, comp = 0.0;
    for (int i = 0; i < k; ++i) {
        double e = rng::exponential(seed, static_cast<std::uint64_t>(i));
        p.increments[i] = e; // temporarily the raw draw
        double t = total + e;
        comp += (std::fabs(total) >= e) ? (total - t) + e : (e - t) + total;
        total = t;
    }
    total += comp;
    const double scale = static_cast<double>(k) / total;
    double sum = 0.0;
    comp = 0.0;
    for (int i = 0; i < k; ++i) {
        double x = p.increments[i] * scale - 1.0;
        double t = sum + x;
        comp += (std::fabs(sum) >= std::fabs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
        p.prefix[i + 1] = sum + comp;
    }
    for (int i = 0; i < k; ++i) p.increments[i] = p.prefix[i + 1] - p.prefix[i];
    return p;
}

McEstimate estimate_range_prob(int k, double A, std::uint64_t samples, std::uint64_t seed) {
    if (samples < 1) throw std::domain_error("estimate_range_prob: samples must be >= 1");
    if (k < 1) throw std::domain_error("estimate_range_prob: k must be >= 1");
    std::vector<std::uint64_t> hits(8, 0);
    parallel_chunks(samples, [&](std::uint64_t b, std::uint64_t e, unsigned t) {
        std::uint64_t h = 0;
        std::vector<double> raw(k);
        for (std::uint64_t i = b; i < e; ++i) {
            std::uint64_t sub = rng::substream(seed, i);
            double total = 0.0;
            for (int j = 0; j < k; ++j) {
                raw[j] = rng::exponential(sub, static_cast<std::uint64_t>(j));
                total += raw[j];
            }
            const double scale = static_cast<double>(k) / total;
            double run = 0.0, mn = 0.0, mx = 0.0;
            for (int j = 0; j < k; ++j) {
                run += raw[j] * scale - 1.0;
                mn = std::min(mn, run);
                mx = std::max(mx, run);
            }
            if (mx - mn <= A) ++h;
        }
        hits[t] += h;
    });
    std::uint64_t total_hits = 0;
    for (auto h : hits) total_hits += h;
    McEstimate est;
    est.samples = samples;
    est.value = static_cast<double>(total_hits) / static_cast<double>(samples);
    est.std_error = binom_se(est.value, samples);
    return est;
}

McEstimate estimate_survival(double x, double A, int k, std::uint64_t samples, std::uint64_t seed) {
    if (!(x >= 0.0 && x <= A)) throw std::domain_error("estimate_survival: need 0 <= x <= A");
    if (samples < 1) throw std::domain_error("estimate_survival: samples must be >= 1");
    if (k == 0) return {1.0, 0.0, samples, -1.0};
    std::vector<std::uint64_t> hits(8, 0);
    parallel_chunks(samples, [&](std::uint64_t b, std::uint64_t e, unsigned t) {
        std::uint64_t h = 0;
        for (std::uint64_t i = b; i < e; ++i) {
            std::uint64_t sub = rng::substream(seed, i);
            double pos = x;
            bool alive = true;
            for (int j = 0; j < k; ++j) {
                pos += rng::exponential(sub, static_cast<std::uint64_t>(j)) - 1.0;
                if (pos < 0.0 || pos > A) {
                    alive = false;
                    break;
                }
            }
            if (alive) ++h;
        }
        hits[t] += h;
    });
    std::uint64_t total_hits = 0;
    for (auto h : hits) total_hits += h;
    McEstimate est;
    est.samples = samples;
    est.value = static_cast<double>(total_hits) / static_cast<double>(samples);
    est.std_error = binom_se(est.value, samples);
    return est;
}

KernelEstimate estimate_kernel(double x, double A, int k, int bins, std::uint64_t samples,
                               std::uint64_t seed) {
    if (bins < 1) throw std::domain_error("estimate_kernel: bins must be >= 1");
    if (!(x >= 0.0 && x <= A)) throw std::domain_error("estimate_kernel: need 0 <= x <= A");
    if (samples < 1) throw std::domain_error("estimate_kernel: samples must be >= 1");
    const double width = A / bins;
    std::vector<std::vector<std::uint64_t>> counts(8, std::vector<std::uint64_t>(bins, 0));
    std::vector<std::uint64_t> surv(8, 0);
    parallel_chunks(samples, [&](std::uint64_t b, std::uint64_t e, unsigned t) {
        for (std::uint64_t i = b; i < e; ++i) {
            std::uint64_t sub = rng::substream(seed, i);
            double pos = x;
            bool alive = true;
            for (int j = 0; j < k; ++j) {
                pos += rng::exponential(sub, static_cast<std::uint64_t>(j)) - 1.0;
                if (pos < 0.0 || pos > A) {
                    alive = false;
                    break;
                }
            }
            if (!alive) continue;
            ++surv[t];
            int bi = std::min(bins - 1, static_cast<int>(pos / width));
            ++counts[t][bi];
        }
    });
    std::uint64_t survivors = 0;
    std::vector<std::uint64_t> bin_counts(bins, 0);
    for (unsigned t = 0; t < 8; ++t) {
        survivors += surv[t];
        for (int b = 0; b < bins; ++b) bin_counts[b] += counts[t][b];
    }

    KernelEstimate out;
    out.bin_width = width;
    out.survival.samples = samples;
    out.survival.value = static_cast<double>(survivors) / static_cast<double>(samples);
    out.survival.std_error = binom_se(out.survival.value, samples);
    out.conditional.resize(bins);
    out.unconditional.resize(bins);
    for (int b = 0; b < bins; ++b) {
        double pc = survivors ? static_cast<double>(bin_counts[b]) / static_cast<double>(survivors) : 0.0;
        out.conditional[b] = {pc / width, binom_se(pc, survivors) / width, survivors, -1.0};
        double pu = static_cast<double>(bin_counts[b]) / static_cast<double>(samples);
        out.unconditional[b] = {pu / width, binom_se(pu, samples) / width, samples, -1.0};
    }
    return out;
}

double range_prob_envelope_const() { return 15.5; }

double predicted_range_prob(int k, double A) {
    double lam = spectral::principal_lambda(A).lambda;
    return range_prob_envelope_const() * std::exp(static_cast<double>(k) * std::log(lam)) *
           std::pow(static_cast<double>(k), 1.5) / (A * A * A);
}

LocalTimeProfile local_time_profile(int k, double A, int bins, std::uint64_t samples,
                                    std::uint64_t seed) {
    if (bins < 1) throw std::domain_error("local_time_profile: bins must be >= 1");
    if (k < 1) throw std::domain_error("local_time_profile: k must be >= 1");
    if (samples < 1) throw std::domain_error("local_time_profile: samples must be >= 1");
    double predicted = predicted_range_prob(k, A);
    if (predicted < 1e-5)
        throw std::runtime_error(
            "local_time_profile: predicted acceptance " + std::to_string(predicted) +
            " below 1e-5; reduce k or k/A^2");

    const double width = A / bins;
    std::vector<std::vector<std::uint64_t>> vsum(8, std::vector<std::uint64_t>(bins, 0));
    std::vector<std::vector<std::uint64_t>> vsq(8, std::vector<std::uint64_t>(bins, 0));
    std::vector<std::uint64_t> acc(8, 0);

    parallel_chunks(samples, [&](std::uint64_t b, std::uint64_t e, unsigned t) {
        std::vector<double> raw(k), X(k);
        std::vector<std::uint32_t> visits(bins);
        for (std::uint64_t i = b; i < e; ++i) {
            std::uint64_t sub = rng::substream(seed, i);
            double total = 0.0;
            for (int j = 0; j < k; ++j) {
                raw[j] = rng::exponential(sub, static_cast<std::uint64_t>(j));
                total += raw[j];
            }
            const double scale = static_cast<double>(k) / total;
            double run = 0.0, mn = 0.0, mx = 0.0;
            for (int j = 0; j < k; ++j) {
                run += raw[j] * scale - 1.0;
                X[j] = run;
                mn = std::min(mn, run);
                mx = std::max(mx, run);
            }
            if (mx - mn > A) continue;
            ++acc[t];
            const double shift = (A - mx - mn) / 2.0;
            std::fill(visits.begin(), visits.end(), 0u);
            for (int j = 0; j < k; ++j) {
                double v = X[j] + shift;
                int bi = std::min(bins - 1, std::max(0, static_cast<int>(v / width)));
                ++visits[bi];
            }
            for (int bi = 0; bi < bins; ++bi) {
                vsum[t][bi] += visits[bi];
                vsq[t][bi] += static_cast<std::uint64_t>(visits[bi]) * visits[bi];
            }
        }
    });

    std::uint64_t accepted = 0;
    std::vector<std::uint64_t> sum(bins, 0), sq(bins, 0);
    for (unsigned t = 0; t < 8; ++t) {
        accepted += acc[t];
        for (int b = 0; b < bins; ++b) {
            sum[b] += vsum[t][b];
            sq[b] += vsq[t][b];
        }
    }
    LocalTimeProfile out;
    out.bin_width = width;
    out.accepted = accepted;
    out.acceptance.samples = samples;
    out.acceptance.value = static_cast<double>(accepted) / static_cast<double>(samples);
    out.acceptance.std_error = binom_se(out.acceptance.value, samples);
    out.bins.resize(bins);
    for (int b = 0; b < bins; ++b) {
        if (accepted == 0) {
            out.bins[b] = {0.0, 0.0, 0, out.acceptance.value};
            continue;
        }
        double mean = static_cast<double>(sum[b]) / static_cast<double>(accepted);
        double var = static_cast<double>(sq[b]) / static_cast<double>(accepted) - mean * mean;
        out.bins[b] = {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(accepted)), accepted,
                       out.acceptance.value};
    }
    return out;
}

std::pair<int, int> count_crossings(const WalkPath& path, double x, double y, bool cyclic) {
    if (!(x < y)) throw std::domain_error("count_crossings: need x < y");
    const auto& v = path.prefix;
    if (v.empty()) return {0, 0};

    auto run = [&](auto value_at, std::size_t count) {
        int up = 0, down = 0;
        int last = 0; // 0 none, -1 below, +1 above
        for (std::size_t i = 0; i < count; ++i) {
            double val = value_at(i);
            if (val < x) {
                if (last == 1) ++down;
                last = -1;
            } else if (val > y) {
                if (last == -1) ++up;
                last = 1;
            }
        }
        return std::make_pair(up, down);
    };

    if (!cyclic) return run([&](std::size_t i) { return v[i]; }, v.size());

    // bridges: rotate so the traversal starts at the global minimum, then
    // scan one full cyclic period (the endpoint duplicates the start).
    const std::size_t k = v.size() - 1;
    if (k == 0) return {0, 0};
    std::size_t s = 0;
    for (std::size_t i = 1; i < k; ++i)
        if (v[i] < v[s]) s = i;
    return run([&](std::size_t i) { return v[(s + i) % k]; }, k + 1);
}

} // namespace mmwc
