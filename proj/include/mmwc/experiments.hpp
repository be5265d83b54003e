#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmwc/solver.hpp"

namespace mmwc {

/// One simulation outcome row of the phase experiment.
struct ExperimentRecord {
    std::uint32_t n = 0;
    std::uint64_t seed = 0;
    double nW = 0.0; // n * W_n (scaled mean weight of the MMWC)
    int L = 0;       // MMWC length
    bool supercritical = false;
    double w_resid_cstar = 0.0; // (nW - c_star(n)) (log n)^3
    double w_resid_ccirc = 0.0; // (nW - c_circ(n)) (log n)^3
    double L_scaled = 0.0;      // L / (log n)^3
    double cbar = 0.0;
    double uniform_A = -1.0; // smallest grid A with the MMWC A-uniform; -1 if none
    int good_Delta = -1;     // smallest grid Delta with the MMWC Delta-good; -1 if none
    int cross_up = 0;        // cyclic crossings of the band [range/4, 3 range/4]
    int cross_down = 0;
    bool failed = false;
    std::string error;
};

struct ExperimentConfig {
    std::vector<std::uint32_t> n_values{256, 512, 1024, 2048, 4096};
    int seeds_per_n = 200;
    Solver solver = Solver::howard;
    std::uint64_t master_seed = 1;
    int parallelism = 2;
    std::string out_csv;
    std::vector<double> A_grid;
    std::vector<int> Delta_grid{1, 2, 3, 4};
};

ExperimentConfig config_from_json_file(const std::string& path);

struct PhaseSummary {
    std::uint32_t n = 0;
    int records = 0;
    int failures = 0;
    double fraction_supercritical = 0.0;
    // conditional on supercritical
    double w_resid_cstar_q10 = 0.0, w_resid_cstar_q50 = 0.0, w_resid_cstar_q90 = 0.0;
    double w_resid_ccirc_q10 = 0.0, w_resid_ccirc_q50 = 0.0, w_resid_ccirc_q90 = 0.0;
    double L_scaled_q10 = 0.0, L_scaled_q50 = 0.0, L_scaled_q90 = 0.0;
    double median_subcritical_L = 0.0;
};

struct PhaseResult {
    std::vector<ExperimentRecord> records;
    std::vector<PhaseSummary> summary;
};

/// Solve one mean-field instance per (n, seed) task and summarize per n.
/// Per-record failures are isolated; a failure rate above 1% aborts.
PhaseResult run_phase(const ExperimentConfig& config);

void write_phase_csv(const PhaseResult& result, const std::string& path);
std::string phase_summary_json(const PhaseResult& result);

/// Exact-vs-Monte-Carlo first moment comparison at enumeration scale.
struct MomentRow {
    int k = 0;
    double exact = 0.0;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double z = 0.0;
};
struct MomentReport {
    std::uint32_t n = 0;
    double c = 0.0;
    int seeds = 0;
    std::vector<MomentRow> rows;
};
MomentReport run_moment_check(std::uint32_t n, double c, int seeds, std::uint64_t master_seed = 7);

/// Range-probability slope regression and local-time envelope checks.
struct WalkSuiteConfig {
    std::uint64_t master_seed = 1;
    std::string out_csv;
    double range_A = 8.0;
    std::vector<int> range_ks{64, 128, 192, 256};
    std::uint64_t range_samples = 1000000;
    double lt_A = 8.0;
    std::vector<int> lt_ks{128, 256};
    std::uint64_t lt_samples = 1000000;
};
WalkSuiteConfig walk_suite_config_from_json_file(const std::string& path);

struct RangeProbRow {
    int k = 0;
    double estimate = 0.0;
    double std_error = 0.0;
};
struct LocalTimeRow {
    int k = 0;
    double envelope_const = 0.0;   // max_b mean_visits_b / ((1+|S|) max delta^2)
    double boundary_center_ratio = 0.0;
    std::uint64_t accepted = 0;
};
struct WalkSuiteReport {
    double range_A = 0.0;
    std::vector<RangeProbRow> range_rows;
    double fitted_slope = 0.0;   // slope of ln R - 1.5 ln k vs k
    double log_lambda = 0.0;     // spectral oracle
    double slope_rel_err = 0.0;
    double lt_A = 0.0;
    std::vector<LocalTimeRow> lt_rows;
};
WalkSuiteReport run_walk_suite(const WalkSuiteConfig& config);
void write_walk_suite_csv(const WalkSuiteReport& report, const std::string& path);

/// Uniformity / goodness / crossing diagnostics aggregated per n over the
/// supercritical records of a phase run.
struct DiagnosticsRow {
    std::uint32_t n = 0;
    int supercritical_records = 0;
    double frac_uniform_within_logn_plus10 = 0.0; // among near-critical long cycles
    int near_critical_long = 0;
    double frac_short_supercritical = 0.0; // L < 0.5 (log n)^2 and cbar in (1/e, c_circ]
    double mean_up_crossings = 0.0;
    double mean_down_crossings = 0.0;
    int max_crossing_imbalance = 0;
};
std::vector<DiagnosticsRow> run_diagnostics(const PhaseResult& phase);

/// Type-7 linear-interpolation quantile of a sorted copy of xs.
double quantile(std::vector<double> xs, double p);

} // namespace mmwc
