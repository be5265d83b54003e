#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mmwc/cycle_stats.hpp"
#include "mmwc/exp_walk.hpp"
#include "mmwc/spectral.hpp"
#include "test_util.hpp"

using namespace mmwc;

TEST_CASE("sample_walk basics") {
    WalkPath p0 = sample_walk(1.5, 0, 7);
    CHECK(p0.prefix == std::vector<double>{1.5});

    for (int trial = 0; trial < 50; ++trial) {
        WalkPath p = sample_walk(0.0, 64, rng::substream(42, trial));
        for (double inc : p.increments) CHECK(inc > -1.0);
        for (int j = 1; j <= p.k; ++j)
            CHECK(p.prefix[j] - p.prefix[j - 1] == p.increments[j - 1]);
    }
}

TEST_CASE("walk displacement is mean zero (CLT band)") {
    const int k = 100;
    const int N = 100000;
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
        std::uint64_t sub = rng::substream(90210, i);
        double x = 0.0;
        for (int j = 0; j < k; ++j) x += rng::exponential(sub, j) - 1.0;
        sum += x;
    }
    double mean = sum / N;
    CHECK(std::fabs(mean) < 3.0 * std::sqrt(static_cast<double>(k) / N));
}

TEST_CASE("sample_bridge returns to zero and obeys the k=2 range bound") {
    for (int trial = 0; trial < 100; ++trial) {
        int k = 1 + static_cast<int>(rng::at(555, trial) % 200);
        WalkPath b = sample_bridge(k, rng::substream(556, trial));
        CHECK(std::fabs(b.prefix.back()) < 1e-12);
    }
    for (int trial = 0; trial < 200; ++trial) {
        WalkPath b = sample_bridge(2, rng::substream(557, trial));
        CHECK(std::fabs(b.prefix[1]) < 1.0);
    }
    CHECK(estimate_range_prob(2, 1.0, 20000, 99).value == 1.0);
}

TEST_CASE("bridge midpoint variance matches the Brownian bridge limit") {
    const int k = 50, N = 100000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < N; ++i) {
        WalkPath b = sample_bridge(k, rng::substream(31415, i));
        double v = b.prefix[25] / std::sqrt(50.0);
        s += v;
        ss += v * v;
    }
    double var = ss / N - (s / N) * (s / N);
    // Var X_{k/2}/sqrt(k) -> t(1-t) = 1/4; MC band ~ 3 sqrt(2/N) * var
    CHECK(std::fabs(var - 0.25) < 3.0 * 0.25 * std::sqrt(2.0 / N) + 0.003);
}

TEST_CASE("range probability: deterministic bounds and monotonicity") {
    CHECK(estimate_range_prob(4, 4.5, 5000, 1).value == 1.0); // A >= k forces acceptance
    McEstimate a1 = estimate_range_prob(32, 6.0, 200000, 5);
    McEstimate a2 = estimate_range_prob(64, 6.0, 200000, 6);
    CHECK(a1.value - a2.value > -3.0 * std::hypot(a1.std_error, a2.std_error)); // noninc in k
    McEstimate b1 = estimate_range_prob(48, 5.0, 200000, 7);
    McEstimate b2 = estimate_range_prob(48, 7.0, 200000, 8);
    CHECK(b2.value - b1.value > -3.0 * std::hypot(b1.std_error, b2.std_error)); // nondec in A
}

TEST_CASE("estimators are deterministic given seed and samples") {
    McEstimate a = estimate_range_prob(32, 5.0, 50000, 12345);
    McEstimate b = estimate_range_prob(32, 5.0, 50000, 12345);
    CHECK(a.value == b.value);
    McEstimate c = estimate_survival(2.0, 6.0, 20, 50000, 4);
    McEstimate d = estimate_survival(2.0, 6.0, 20, 50000, 4);
    CHECK(c.value == d.value);
}

TEST_CASE("bridge range decay matches the spectral eigenvalue (light version)") {
    const double A = 8.0;
    double log_lambda = std::log(spectral::principal_lambda(A).lambda);
    std::vector<double> xs, ys;
    for (int k : {64, 128, 192}) {
        McEstimate e = estimate_range_prob(k, A, 300000, 1000 + k);
        REQUIRE(e.value > 0.0);
        xs.push_back(k);
        ys.push_back(std::log(e.value) - 1.5 * std::log(static_cast<double>(k)));
    }
    double slope = testutil::ls_slope(xs, ys);
    CHECK(std::fabs(slope - log_lambda) < 0.07 * std::fabs(log_lambda));
}

TEST_CASE("one-step survival equals the exact integral") {
    // from x=2 in [0,4]: stay iff u in [-1, 3]+1, P = 1 - e^-3
    McEstimate e = estimate_survival(2.0, 4.0, 1, 2000000, 2024);
    double exact = 1.0 - std::exp(-3.0);
    CHECK(std::fabs(e.value - exact) < 4.0 * e.std_error);
    // general one-step law at an asymmetric point
    McEstimate e2 = estimate_survival(1.0, 4.0, 1, 2000000, 2025);
    double exact2 = std::exp(-std::max(0.0, 1.0 - 1.0)) - std::exp(-(4.0 + 1.0 - 1.0));
    CHECK(std::fabs(e2.value - exact2) < 4.0 * e2.std_error);
    CHECK(estimate_survival(2.0, 4.0, 0, 10, 1).value == 1.0);
    CHECK_THROWS_AS(estimate_survival(5.0, 4.0, 1, 10, 1), std::domain_error);
}

TEST_CASE("survival decay rate approaches log lambda_A") {
    const double A = 10.0;
    double log_lambda = std::log(spectral::principal_lambda(A).lambda);
    std::vector<double> xs, ys;
    for (int k : {60, 120, 180, 240}) {
        McEstimate e = estimate_survival(5.0, A, k, 600000, 3000 + k);
        REQUIRE(e.value > 0.0);
        xs.push_back(k);
        ys.push_back(std::log(e.value));
    }
    double slope = testutil::ls_slope(xs, ys);
    CHECK(std::fabs(slope - log_lambda) < 0.05 * std::fabs(log_lambda));
}

TEST_CASE("survival decay exponents are nondecreasing in A") {
    std::vector<double> slopes;
    for (double A : {6.0, 8.0, 10.0, 12.0}) {
        std::vector<double> xs, ys;
        int base = static_cast<int>(A * A);
        for (int m = 1; m <= 3; ++m) {
            int k = base * m;
            McEstimate e = estimate_survival(A / 2.0, A, k, 400000, 4000 + k);
            REQUIRE(e.value > 0.0);
            xs.push_back(k);
            ys.push_back(std::log(e.value));
        }
        slopes.push_back(testutil::ls_slope(xs, ys));
    }
    for (std::size_t i = 1; i < slopes.size(); ++i) CHECK(slopes[i] >= slopes[i - 1] - 1e-3);
}

TEST_CASE("kernel estimate: k=0 mass, shape envelope and symmetry") {
    KernelEstimate k0 = estimate_kernel(3.3, 10.0, 0, 10, 5000, 6);
    CHECK(k0.survival.value == 1.0);
    CHECK(k0.conditional[3].value == doctest::Approx(1.0 / k0.bin_width));

    const double A = 10.0;
    const int k = 150, bins = 10;
    KernelEstimate ke = estimate_kernel(5.0, A, k, bins, 2000000, 77);
    REQUIRE(ke.survival.value > 0.0);
    // conditional profile vs delta_A(y)/A^2 shape over the central 80%
    double mn = 1e300, mx = 0.0;
    for (int b = 1; b < bins - 1; ++b) {
        double y = (b + 0.5) * ke.bin_width;
        double r = ke.conditional[b].value / delta_profile(y, A);
        mn = std::min(mn, r);
        mx = std::max(mx, r);
    }
    CHECK(mx / mn <= 4.0);
    // the relaxed conditional profile is the left eigenfunction of the
    // killed kernel, x -> g_lambda(A - x), by the reflection duality
    double lam = spectral::principal_lambda(A).lambda;
    auto g_at = [&](double y) { return spectral::g_eval(lam, A - y + 1e-12); };
    double norm = testutil::simpson(g_at, 0.0, A, 4000);
    for (int b = 0; b < bins; ++b) {
        double lo = b * ke.bin_width, hi = lo + ke.bin_width;
        double pred = testutil::simpson(g_at, lo, hi, 500) / (norm * ke.bin_width);
        CHECK(std::fabs(ke.conditional[b].value - pred) <=
              4.0 * ke.conditional[b].std_error + 0.01 * pred);
    }
}

TEST_CASE("local time profile: per-sample mass, envelope and boundary suppression") {
    const double A = 8.0;
    const int k = 128, bins = 8;
    LocalTimeProfile lt = local_time_profile(k, A, bins, 400000, 5);
    REQUIRE(lt.accepted > 100);
    double mass = 0.0;
    for (const auto& b : lt.bins) mass += b.value;
    CHECK(mass == doctest::Approx(static_cast<double>(k)).epsilon(1e-9));
    // per-step envelope (1+|S|) max delta^2 with one fitted constant
    double cmax = 0.0;
    for (int b = 0; b < bins; ++b) {
        double lo = b * lt.bin_width, hi = lo + lt.bin_width;
        double dmax = std::max(mmwc::delta_profile(lo, A), mmwc::delta_profile(hi, A));
        cmax = std::max(cmax, lt.bins[b].value * (A * A * A / k) /
                                  ((1.0 + lt.bin_width) * dmax * dmax));
    }
    CHECK(cmax < 4.0); // fitted constant is O(1)
    double boundary = std::max(lt.bins.front().value, lt.bins.back().value);
    double center = lt.bins[bins / 2].value;
    CHECK(boundary / center <= 0.2);
}

TEST_CASE("local time profile refuses infeasible runs") {
    CHECK_THROWS_AS(local_time_profile(2000, 6.0, 6, 1000, 1), std::runtime_error);
}

TEST_CASE("bridge exchangeability: reversed increments leave the range law unchanged") {
    const int k = 40, N = 4000;
    std::vector<double> r1, r2;
    for (int i = 0; i < N; ++i) {
        WalkPath b = sample_bridge(k, rng::substream(606, i));
        double mn = 0.0, mx = 0.0, run = 0.0;
        for (int j = 0; j < k; ++j) {
            run += b.increments[j];
            mn = std::min(mn, run);
            mx = std::max(mx, run);
        }
        r1.push_back(mx - mn);
        // fixed permutation: reversal
        mn = mx = run = 0.0;
        for (int j = k - 1; j >= 0; --j) {
            run += b.increments[j];
            mn = std::min(mn, run);
            mx = std::max(mx, run);
        }
        r2.push_back(mx - mn);
    }
    double d = testutil::ks_two_sample(r1, r2);
    // two-sample KS critical value at alpha = 0.01
    double crit = 1.62762 * std::sqrt(2.0 / N);
    CHECK(d < crit);
}

TEST_CASE("count_crossings on constructed paths") {
    WalkPath mono;
    mono.prefix = {0.0, 1.0, 2.0, 3.0, 4.0};
    mono.k = 4;
    auto [u1, d1] = count_crossings(mono, 1.0, 3.0);
    CHECK(u1 <= 1);
    CHECK(d1 == 0);

    WalkPath saw;
    saw.prefix = {0.0, 4.0, 0.0, 4.0, 0.0};
    saw.k = 4;
    auto [u2, d2] = count_crossings(saw, 1.0, 3.0);
    CHECK(u2 == 2);
    CHECK(d2 == 2);

    CHECK_THROWS_AS(count_crossings(saw, 3.0, 1.0), std::domain_error);
}

TEST_CASE("cyclic crossings alternate on random bridges") {
    for (int trial = 0; trial < 500; ++trial) {
        int k = 6 + static_cast<int>(rng::at(707, trial) % 120);
        WalkPath b = sample_bridge(k, rng::substream(708, trial));
        double mn = *std::min_element(b.prefix.begin(), b.prefix.end());
        double mx = *std::max_element(b.prefix.begin(), b.prefix.end());
        if (mx - mn < 0.5) continue;
        double x = mn + 0.3 * (mx - mn), y = mn + 0.7 * (mx - mn);
        auto [up, down] = count_crossings(b, x, y, true);
        CHECK(std::abs(up - down) <= 1);
    }
}
