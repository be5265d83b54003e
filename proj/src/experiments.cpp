#include "mmwc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mmwc/cycle_stats.hpp"
#include "mmwc/exp_walk.hpp"
#include "mmwc/mean_field.hpp"
#include "mmwc/rng.hpp"
#include "mmwc/spectral.hpp"

namespace mmwc {

using nlohmann::json;

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) return std::nan("");
    std::sort(xs.begin(), xs.end());
    double idx = p * static_cast<double>(xs.size() - 1);
    std::size_t lo = static_cast<std::size_t>(idx);
    if (lo + 1 >= xs.size()) return xs.back();
    double frac = idx - static_cast<double>(lo);
    return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
}

namespace {

// memoized lambda_A resolver shared by good-cycle evaluation
class LambdaCache {
public:
    double operator()(double H) {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find(H);
        if (it != cache_.end()) return it->second;
        double lam = spectral::principal_lambda(H).lambda;
        cache_.emplace(H, lam);
        return lam;
    }

private:
    std::mutex mu_;
    std::map<double, double> cache_;
};

void run_tasks(std::size_t count, int parallelism, const std::function<void(std::size_t)>& task) {
    int workers = std::max(1, parallelism);
    if (workers == 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < workers; ++t)
        threads.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                task(i);
            }
        });
    for (auto& th : threads) th.join();
}

} // namespace

ExperimentConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config_from_json_file: cannot open " + path);
    json j = json::parse(in);
    ExperimentConfig c;
    if (j.contains("n")) c.n_values = j.at("n").get<std::vector<std::uint32_t>>();
    if (j.contains("seeds_per_n")) c.seeds_per_n = j.at("seeds_per_n").get<int>();
    if (j.contains("solver")) {
        std::string s = j.at("solver").get<std::string>();
        if (s == "karp") c.solver = Solver::karp;
        else if (s == "howard") c.solver = Solver::howard;
        else throw std::runtime_error("config: unknown solver " + s);
    }
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("parallelism")) c.parallelism = j.at("parallelism").get<int>();
    if (j.contains("out_csv")) c.out_csv = j.at("out_csv").get<std::string>();
    if (j.contains("A_grid")) c.A_grid = j.at("A_grid").get<std::vector<double>>();
    if (j.contains("Delta_grid")) c.Delta_grid = j.at("Delta_grid").get<std::vector<int>>();
    if (c.seeds_per_n < 1) throw std::runtime_error("config: seeds_per_n must be >= 1");
    for (auto n : c.n_values)
        if (n < 8) throw std::runtime_error("config: all n must be >= 8");
    return c;
}

PhaseResult run_phase(const ExperimentConfig& config) {
    const std::size_t per_n = static_cast<std::size_t>(config.seeds_per_n);
    const std::size_t total = config.n_values.size() * per_n;

    // c_star / c_circ per n, computed once up front
    std::vector<double> cstar(config.n_values.size()), ccirc(config.n_values.size());
    for (std::size_t i = 0; i < config.n_values.size(); ++i) {
        auto [cc, cs] = spectral::c_critical(config.n_values[i]);
        ccirc[i] = cc;
        cstar[i] = cs;
    }

    std::vector<double> a_grid = config.A_grid;
    std::sort(a_grid.begin(), a_grid.end());
    std::vector<int> d_grid = config.Delta_grid;
    std::sort(d_grid.begin(), d_grid.end());

    auto lambda_cache = std::make_shared<LambdaCache>();

    PhaseResult out;
    out.records.resize(total);

    run_tasks(total, config.parallelism, [&](std::size_t idx) {
        const std::size_t ni = idx / per_n;
        const std::uint32_t n = config.n_values[ni];
        const double logn = std::log(static_cast<double>(n));
        const double logn3 = logn * logn * logn;
        ExperimentRecord& rec = out.records[idx];
        rec.n = n;
        rec.seed = rng::substream(config.master_seed, idx);
        try {
            WeightedDigraph g = mean_field_instance({n, true, rec.seed});
            MmwcResult res = solve_mmc(g, config.solver);
            rec.nW = res.scaled_mean;
            rec.L = res.length;
            rec.cbar = res.cycle.cbar;
            rec.supercritical = rec.nW > std::exp(-1.0);
            rec.w_resid_cstar = (rec.nW - cstar[ni]) * logn3;
            rec.w_resid_ccirc = (rec.nW - ccirc[ni]) * logn3;
            rec.L_scaled = static_cast<double>(rec.L) / logn3;

            std::vector<double> w = res.cycle.arc_weights(g);
            double worst = max_abs_cyclic_excedance(w, n, res.cycle.cbar);
            for (double A : a_grid)
                if (worst <= A) {
                    rec.uniform_A = A;
                    break;
                }
            for (int Delta : d_grid) {
                if (Delta < 1 || static_cast<double>(Delta) > logn / 2.0) continue;
                if (is_good(w, n, Delta, [&](double H) { return (*lambda_cache)(H); })) {
                    rec.good_Delta = Delta;
                    break;
                }
            }
            // band crossings of the untilted bridge, shifted to minimum zero
            BridgeView b = untilted_bridge(w, n, 0.0);
            double mn = *std::min_element(b.prefix.begin(), b.prefix.end());
            WalkPath path;
            path.k = static_cast<int>(w.size());
            path.prefix = b.prefix;
            for (double& v : path.prefix) v -= mn;
            double range = b.range;
            auto [up, down] = count_crossings(path, range / 4.0, 3.0 * range / 4.0, true);
            rec.cross_up = up;
            rec.cross_down = down;
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
        }
    });

    // summaries
    std::size_t failures_total = 0;
    for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
        PhaseSummary s;
        s.n = config.n_values[ni];
        std::vector<double> wr_star, wr_circ, lsc, sub_L;
        int super = 0;
        for (std::size_t i = ni * per_n; i < (ni + 1) * per_n; ++i) {
            const ExperimentRecord& r = out.records[i];
            if (r.failed) {
                ++s.failures;
                ++failures_total;
                continue;
            }
            ++s.records;
            if (r.supercritical) {
                ++super;
                wr_star.push_back(r.w_resid_cstar);
                wr_circ.push_back(r.w_resid_ccirc);
                lsc.push_back(r.L_scaled);
            } else {
                sub_L.push_back(static_cast<double>(r.L));
            }
        }
        s.fraction_supercritical = s.records ? static_cast<double>(super) / s.records : 0.0;
        s.w_resid_cstar_q10 = quantile(wr_star, 0.10);
        s.w_resid_cstar_q50 = quantile(wr_star, 0.50);
        s.w_resid_cstar_q90 = quantile(wr_star, 0.90);
        s.w_resid_ccirc_q10 = quantile(wr_circ, 0.10);
        s.w_resid_ccirc_q50 = quantile(wr_circ, 0.50);
        s.w_resid_ccirc_q90 = quantile(wr_circ, 0.90);
        s.L_scaled_q10 = quantile(lsc, 0.10);
        s.L_scaled_q50 = quantile(lsc, 0.50);
        s.L_scaled_q90 = quantile(lsc, 0.90);
        s.median_subcritical_L = quantile(sub_L, 0.50);
        out.summary.push_back(s);
    }
    if (static_cast<double>(failures_total) > 0.01 * static_cast<double>(total))
        throw std::runtime_error("run_phase: failure rate above 1% (" +
                                 std::to_string(failures_total) + "/" + std::to_string(total) + ")");
    if (!config.out_csv.empty()) write_phase_csv(out, config.out_csv);
    return out;
}

void write_phase_csv(const PhaseResult& result, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_phase_csv: cannot open " + path);
    std::fprintf(f, "n,seed,nW,L,supercritical,w_resid_cstar,w_resid_ccirc,L_scaled,uniform_A,good_Delta\n");
    for (const auto& r : result.records) {
        if (r.failed) continue;
        std::fprintf(f, "%u,%llu,%.12g,%d,%d,%.12g,%.12g,%.12g,", r.n,
                     static_cast<unsigned long long>(r.seed), r.nW, r.L, r.supercritical ? 1 : 0,
                     r.w_resid_cstar, r.w_resid_ccirc, r.L_scaled);
        if (r.uniform_A >= 0.0)
            std::fprintf(f, "%.12g,", r.uniform_A);
        else
            std::fprintf(f, "NA,");
        if (r.good_Delta >= 0)
            std::fprintf(f, "%d\n", r.good_Delta);
        else
            std::fprintf(f, "NA\n");
    }
    std::fclose(f);
}

std::string phase_summary_json(const PhaseResult& result) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : result.summary) {
        nlohmann::ordered_json row;
        row["n"] = s.n;
        row["records"] = s.records;
        row["failures"] = s.failures;
        row["fraction_supercritical"] = s.fraction_supercritical;
        row["w_resid_cstar_q10"] = s.w_resid_cstar_q10;
        row["w_resid_cstar_q50"] = s.w_resid_cstar_q50;
        row["w_resid_cstar_q90"] = s.w_resid_cstar_q90;
        row["w_resid_ccirc_q10"] = s.w_resid_ccirc_q10;
        row["w_resid_ccirc_q50"] = s.w_resid_ccirc_q50;
        row["w_resid_ccirc_q90"] = s.w_resid_ccirc_q90;
        row["L_scaled_q10"] = s.L_scaled_q10;
        row["L_scaled_q50"] = s.L_scaled_q50;
        row["L_scaled_q90"] = s.L_scaled_q90;
        row["median_subcritical_L"] = s.median_subcritical_L;
        j.push_back(row);
    }
    return j.dump(2);
}

MomentReport run_moment_check(std::uint32_t n, double c, int seeds, std::uint64_t master_seed) {
    if (n > 9) throw std::domain_error("run_moment_check: n must be <= 9 (enumeration-based)");
    if (n < 2) throw std::domain_error("run_moment_check: n must be >= 2");
    if (seeds < 2) throw std::domain_error("run_moment_check: need at least 2 seeds");

    // cycle structure of the complete digraph is instance-independent
    WeightedDigraph structure = mean_field_instance({n, true, 0});
    std::vector<Cycle> cycles = enumerate_simple_cycles(structure, 9);

    const int kmax = static_cast<int>(n);
    std::vector<double> sum(kmax + 1, 0.0), sumsq(kmax + 1, 0.0);
    std::vector<int> counts(kmax + 1);
    for (int s = 0; s < seeds; ++s) {
        WeightedDigraph g = mean_field_instance({n, true, rng::substream(master_seed, static_cast<std::uint64_t>(s))});
        std::fill(counts.begin(), counts.end(), 0);
        for (const Cycle& cyc : cycles) {
            double w = 0.0;
            for (std::size_t i = 0; i < cyc.vertices.size(); ++i)
                w += g.arc_weight(cyc.vertices[i], cyc.vertices[(i + 1) % cyc.vertices.size()]);
            double cbar = static_cast<double>(n) * w / cyc.length;
            if (cbar <= c) ++counts[cyc.length];
        }
        for (int k = 2; k <= kmax; ++k) {
            sum[k] += counts[k];
            sumsq[k] += static_cast<double>(counts[k]) * counts[k];
        }
    }

    MomentReport rep;
    rep.n = n;
    rep.c = c;
    rep.seeds = seeds;
    for (int k = 2; k <= kmax; ++k) {
        MomentRow row;
        row.k = k;
        MomentQuery q;
        q.n = n;
        q.k = k;
        q.c = c;
        row.exact = expected_light_cycles(q);
        row.mc_mean = sum[k] / seeds;
        double var = sumsq[k] / seeds - row.mc_mean * row.mc_mean;
        row.mc_se = std::sqrt(std::max(var, 0.0) / seeds);
        row.z = row.mc_se > 0.0 ? (row.mc_mean - row.exact) / row.mc_se
                                : (row.mc_mean == row.exact ? 0.0 : std::nan(""));
        rep.rows.push_back(row);
    }
    return rep;
}

WalkSuiteConfig walk_suite_config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("walk_suite_config: cannot open " + path);
    json j = json::parse(in);
    WalkSuiteConfig c;
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("out_csv")) c.out_csv = j.at("out_csv").get<std::string>();
    if (j.contains("range_prob")) {
        auto& r = j.at("range_prob");
        if (r.contains("A")) c.range_A = r.at("A").get<double>();
        if (r.contains("k")) c.range_ks = r.at("k").get<std::vector<int>>();
        if (r.contains("samples")) c.range_samples = r.at("samples").get<std::uint64_t>();
    }
    if (j.contains("local_time")) {
        auto& r = j.at("local_time");
        if (r.contains("A")) c.lt_A = r.at("A").get<double>();
        if (r.contains("k")) c.lt_ks = r.at("k").get<std::vector<int>>();
        if (r.contains("samples")) c.lt_samples = r.at("samples").get<std::uint64_t>();
    }
    return c;
}

WalkSuiteReport run_walk_suite(const WalkSuiteConfig& config) {
    WalkSuiteReport rep;
    rep.range_A = config.range_A;
    rep.lt_A = config.lt_A;
    rep.log_lambda = std::log(spectral::principal_lambda(config.range_A).lambda);

    // slope of ln R - 1.5 ln k against k
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < config.range_ks.size(); ++i) {
        int k = config.range_ks[i];
        McEstimate est = estimate_range_prob(k, config.range_A, config.range_samples,
                                             rng::substream(config.master_seed, i));
        rep.range_rows.push_back({k, est.value, est.std_error});
        if (est.value > 0.0) {
            double x = k, y = std::log(est.value) - 1.5 * std::log(static_cast<double>(k));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
    }
    if (m >= 2) rep.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.slope_rel_err = std::fabs(rep.fitted_slope - rep.log_lambda) / std::fabs(rep.log_lambda);

    for (std::size_t i = 0; i < config.lt_ks.size(); ++i) {
        int k = config.lt_ks[i];
        int bins = static_cast<int>(std::ceil(config.lt_A));
        LocalTimeProfile prof = local_time_profile(k, config.lt_A, bins, config.lt_samples,
                                                   rng::substream(config.master_seed, 1000 + i));
        LocalTimeRow row;
        row.k = k;
        row.accepted = prof.accepted;
        // per-step profile constant (local times carry total mass k)
        double per_step = config.lt_A * config.lt_A * config.lt_A / k;
        double env = 0.0;
        for (int b = 0; b < bins; ++b) {
            double lo = b * prof.bin_width, hi = lo + prof.bin_width;
            double dmax = std::max(delta_profile(lo, config.lt_A), delta_profile(hi, config.lt_A));
            double mid = 0.5 * (lo + hi);
            dmax = std::max(dmax, delta_profile(mid, config.lt_A));
            double bound = (1.0 + prof.bin_width) * dmax * dmax;
            env = std::max(env, prof.bins[b].value * per_step / bound);
        }
        row.envelope_const = env;
        double boundary = std::max(prof.bins.front().value, prof.bins.back().value);
        double center = prof.bins[bins / 2].value;
        row.boundary_center_ratio = center > 0.0 ? boundary / center : std::nan("");
        rep.lt_rows.push_back(row);
    }
    if (!config.out_csv.empty()) write_walk_suite_csv(rep, config.out_csv);
    return rep;
}

void write_walk_suite_csv(const WalkSuiteReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_walk_suite_csv: cannot open " + path);
    std::fprintf(f, "section,A,k,estimate,std_error,extra\n");
    for (const auto& r : report.range_rows)
        std::fprintf(f, "range_prob,%.12g,%d,%.12g,%.12g,\n", report.range_A, r.k, r.estimate,
                     r.std_error);
    std::fprintf(f, "range_slope,%.12g,,%.12g,,log_lambda=%.12g\n", report.range_A,
                 report.fitted_slope, report.log_lambda);
    for (const auto& r : report.lt_rows)
        std::fprintf(f, "local_time,%.12g,%d,%.12g,,boundary_center_ratio=%.12g\n", report.lt_A, r.k,
                     r.envelope_const, r.boundary_center_ratio);
    std::fclose(f);
}

std::vector<DiagnosticsRow> run_diagnostics(const PhaseResult& phase) {
    std::map<std::uint32_t, DiagnosticsRow> rows;
    std::map<std::uint32_t, std::pair<double, double>> crit; // n -> (c_circ, _)
    for (const auto& r : phase.records) {
        if (r.failed || !r.supercritical) continue;
        auto& row = rows[r.n];
        row.n = r.n;
        ++row.supercritical_records;
        double logn = std::log(static_cast<double>(r.n));
        auto itc = crit.find(r.n);
        if (itc == crit.end()) itc = crit.emplace(r.n, spectral::c_critical(r.n)).first;
        double c_circ = itc->second.first;

        bool near_critical = r.cbar <= c_circ + 1.0 / (logn * logn * logn);
        bool long_cycle = static_cast<double>(r.L) >= logn * logn;
        if (near_critical && long_cycle) {
            ++row.near_critical_long;
            if (r.uniform_A >= 0.0 && r.uniform_A <= logn + 10.0)
                row.frac_uniform_within_logn_plus10 += 1.0;
        }
        if (r.cbar > std::exp(-1.0) && r.cbar <= c_circ &&
            static_cast<double>(r.L) < 0.5 * logn * logn)
            row.frac_short_supercritical += 1.0;
        row.mean_up_crossings += r.cross_up;
        row.mean_down_crossings += r.cross_down;
        row.max_crossing_imbalance =
            std::max(row.max_crossing_imbalance, std::abs(r.cross_up - r.cross_down));
    }
    std::vector<DiagnosticsRow> out;
    for (auto& [n, row] : rows) {
        if (row.near_critical_long > 0) row.frac_uniform_within_logn_plus10 /= row.near_critical_long;
        if (row.supercritical_records > 0) {
            row.frac_short_supercritical /= row.supercritical_records;
            row.mean_up_crossings /= row.supercritical_records;
            row.mean_down_crossings /= row.supercritical_records;
        }
        out.push_back(row);
    }
    return out;
}

} // namespace mmwc
