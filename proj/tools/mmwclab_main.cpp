#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmwc/cycle_stats.hpp"
#include "mmwc/exp_walk.hpp"
#include "mmwc/experiments.hpp"
#include "mmwc/graph.hpp"
#include "mmwc/mean_field.hpp"
#include "mmwc/solver.hpp"
#include "mmwc/spectral.hpp"

using nlohmann::ordered_json;

namespace {

int cmd_gen(std::uint64_t n, std::uint64_t seed, bool undirected, const std::string& out) {
    mmwc::InstanceSpec spec;
    spec.n = static_cast<std::uint32_t>(n);
    spec.directed = !undirected;
    spec.seed = seed;
    mmwc::WeightedDigraph g = mmwc::mean_field_instance(spec);
    mmwc::write_edge_list(g, out);
    std::fprintf(stderr, "wrote %zu arcs to %s\n", g.arc_count(), out.c_str());
    return 0;
}

int cmd_solve(const std::string& input, const std::string& solver, bool as_json) {
    mmwc::WeightedDigraph g = mmwc::load_edge_list(input);
    mmwc::Solver s = solver == "karp" ? mmwc::Solver::karp : mmwc::Solver::howard;
    mmwc::MmwcResult res = mmwc::solve_mmc(g, s);
    if (as_json) {
        ordered_json j;
        j["mu_star"] = res.mu_star;
        j["length"] = res.length;
        j["cycle"] = res.cycle.vertices;
        j["scaled_mean"] = res.scaled_mean;
        std::cout << j.dump() << "\n";
    } else {
        std::printf("mu_star %.17g length %d scaled_mean %.17g\n", res.mu_star, res.length,
                    res.scaled_mean);
    }
    return 0;
}

int cmd_moments(std::uint64_t n, int k, double c, double delta, double A, double R) {
    mmwc::MomentQuery q;
    q.n = n;
    q.k = k;
    q.c = c;
    ordered_json j;
    j["n"] = n;
    j["k"] = k;
    j["c"] = c;
    j["expected_light_cycles"] = mmwc::expected_light_cycles(q);
    if (delta >= 0.0) {
        mmwc::MomentQuery q2 = q;
        q2.c = c * (1.0 - delta);
        j["delta"] = delta;
        j["expected_light_cycles_shrunk"] = mmwc::expected_light_cycles(q2);
    }
    if (A >= 0.0 && R >= 0.0) {
        q.A = A;
        j["A"] = A;
        j["R"] = R;
        j["expected_uniform_light_cycles"] = mmwc::expected_uniform_light_cycles(q, R);
    }
    std::cout << j.dump() << "\n";
    return 0;
}

void print_estimate_csv(std::FILE* f, const char* op, double k, double A, double x, double bin,
                        const mmwc::McEstimate& e) {
    std::fprintf(f, "%s,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%llu,", op, k, A, x, bin, e.value,
                 e.std_error, static_cast<unsigned long long>(e.samples));
    if (e.acceptance_rate >= 0.0)
        std::fprintf(f, "%.12g\n", e.acceptance_rate);
    else
        std::fprintf(f, "\n");
}

int cmd_walk(const std::string& which, int k, double A, double x, int bins, std::uint64_t samples,
             std::uint64_t seed, const std::string& csv) {
    std::FILE* f = csv.empty() ? stdout : std::fopen(csv.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + csv);
    std::fprintf(f, "op,k,A,x,bin,estimate,std_error,samples,acceptance_rate\n");
    if (which == "range-prob") {
        mmwc::McEstimate e = mmwc::estimate_range_prob(k, A, samples, seed);
        print_estimate_csv(f, "range-prob", k, A, 0.0, 0.0, e);
    } else if (which == "survival") {
        mmwc::McEstimate e = mmwc::estimate_survival(x, A, k, samples, seed);
        print_estimate_csv(f, "survival", k, A, x, 0.0, e);
    } else if (which == "kernel") {
        mmwc::KernelEstimate ke = mmwc::estimate_kernel(x, A, k, bins, samples, seed);
        print_estimate_csv(f, "kernel-survival", k, A, x, 0.0, ke.survival);
        for (int b = 0; b < bins; ++b) {
            print_estimate_csv(f, "kernel-phi", k, A, x, (b + 0.5) * ke.bin_width, ke.conditional[b]);
            print_estimate_csv(f, "kernel-p", k, A, x, (b + 0.5) * ke.bin_width, ke.unconditional[b]);
        }
    } else if (which == "localtime") {
        mmwc::LocalTimeProfile lt = mmwc::local_time_profile(k, A, bins, samples, seed);
        print_estimate_csv(f, "localtime-acceptance", k, A, 0.0, 0.0, lt.acceptance);
        for (int b = 0; b < bins; ++b)
            print_estimate_csv(f, "localtime", k, A, 0.0, (b + 0.5) * lt.bin_width, lt.bins[b]);
    } else {
        throw std::runtime_error("unknown walk estimator " + which);
    }
    if (f != stdout) std::fclose(f);
    return 0;
}

int cmd_spectral_lambda(double H) {
    mmwc::spectral::SpectralSolution sol = mmwc::spectral::principal_lambda(H);
    ordered_json j;
    j["H"] = H;
    j["lambda"] = sol.lambda;
    j["delta"] = sol.delta;
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_spectral_height(double delta) {
    double H = mmwc::spectral::height_for_delta(delta);
    ordered_json j;
    j["delta"] = delta;
    j["H"] = H;
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_spectral_g(double lambda, double x, int K) {
    ordered_json j;
    j["lambda"] = lambda;
    j["x"] = x;
    mmwc::spectral::GClosed c = mmwc::spectral::g_closed_checked(lambda, x);
    j["g_closed"] = c.value;
    j["g_closed_err_estimate"] = c.err_estimate;
    j["cancellation_alarm"] = c.cancellation_alarm;
    if (x > 0.0) {
        mmwc::spectral::GSeries s = mmwc::spectral::g_series(lambda, x, K);
        j["g_series"] = s.value;
        j["g_series_tail_bound"] = s.tail_bound;
        j["K"] = K;
    }
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_spectral_roots(double lambda, int K) {
    ordered_json j;
    j["lambda"] = lambda;
    j["K"] = K;
    ordered_json roots = ordered_json::array();
    const std::complex<double> z(-1.0 / (std::exp(1.0) * lambda), 0.0);
    for (int k = -K; k <= K; ++k) {
        std::complex<double> s = 1.0 + mmwc::spectral::lambert_w(k, z);
        roots.push_back({{"k", k}, {"re", s.real()}, {"im", s.imag()}});
    }
    j["roots"] = roots;
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_spectral_curve(double Hmin, double Hmax, double step, const std::string& csv) {
    std::FILE* f = csv.empty() ? stdout : std::fopen(csv.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + csv);
    std::fprintf(f, "H,lambda_principal,lambda_2,lambda_3,lambda_4\n");
    for (double H = Hmin; H <= Hmax + 1e-12; H += step) {
        std::vector<double> ls = mmwc::spectral::real_eigenvalues(H, 4);
        std::fprintf(f, "%.12g", H);
        for (int i = 0; i < 4; ++i) {
            if (i < static_cast<int>(ls.size()))
                std::fprintf(f, ",%.12g", ls[i]);
            else
                std::fprintf(f, ",");
        }
        std::fprintf(f, "\n");
    }
    if (f != stdout) std::fclose(f);
    return 0;
}

int cmd_sim_phase(const std::string& config_path) {
    mmwc::ExperimentConfig cfg = mmwc::config_from_json_file(config_path);
    mmwc::PhaseResult res = mmwc::run_phase(cfg);
    std::cout << mmwc::phase_summary_json(res) << "\n";
    return 0;
}

int cmd_sim_walk_suite(const std::string& config_path) {
    mmwc::WalkSuiteConfig cfg = mmwc::walk_suite_config_from_json_file(config_path);
    mmwc::WalkSuiteReport rep = mmwc::run_walk_suite(cfg);
    ordered_json j;
    j["range_A"] = rep.range_A;
    j["fitted_slope"] = rep.fitted_slope;
    j["log_lambda"] = rep.log_lambda;
    j["slope_rel_err"] = rep.slope_rel_err;
    ordered_json lt = ordered_json::array();
    for (const auto& r : rep.lt_rows)
        lt.push_back({{"k", r.k},
                      {"envelope_const", r.envelope_const},
                      {"boundary_center_ratio", r.boundary_center_ratio},
                      {"accepted", r.accepted}});
    j["local_time"] = lt;
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum mean-weight cycle laboratory"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a mean-field instance");
    std::uint64_t gen_n = 0, gen_seed = 0;
    bool gen_undirected = false;
    std::string gen_out;
    gen->add_option("--n", gen_n, "vertex count")->required();
    gen->add_option("--seed", gen_seed, "instance seed")->required();
    gen->add_flag("--undirected", gen_undirected, "undirected model");
    gen->add_option("--out", gen_out, "output edge list")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "solve minimum mean-weight cycle");
    std::string solve_input, solve_solver = "howard";
    bool solve_json = false;
    solve->add_option("--input", solve_input, "edge-list file")->required();
    solve->add_option("--solver", solve_solver, "karp|howard")
        ->check(CLI::IsMember({"karp", "howard"}));
    solve->add_flag("--json", solve_json, "JSON output");

    // moments
    auto* moments = app.add_subcommand("moments", "exact first-moment formulas");
    std::uint64_t mom_n = 0;
    int mom_k = 2;
    double mom_c = 0.0, mom_delta = -1.0, mom_A = -1.0, mom_R = -1.0;
    moments->add_option("--n", mom_n)->required();
    moments->add_option("--k", mom_k)->required();
    moments->add_option("--c", mom_c)->required();
    moments->add_option("--delta", mom_delta);
    moments->add_option("--A", mom_A);
    moments->add_option("--R", mom_R);

    // walk
    auto* walk = app.add_subcommand("walk", "random walk Monte Carlo estimators");
    walk->require_subcommand(1);
    int wk_k = 1, wk_bins = 0;
    double wk_A = 1.0, wk_x = 0.0;
    std::uint64_t wk_samples = 10000, wk_seed = 1;
    std::string wk_csv;
    std::vector<CLI::App*> walk_subs;
    for (const char* name : {"range-prob", "survival", "kernel", "localtime"}) {
        auto* sc = walk->add_subcommand(name);
        sc->add_option("--k", wk_k)->required();
        sc->add_option("--A", wk_A)->required();
        sc->add_option("--x", wk_x);
        sc->add_option("--bins", wk_bins);
        sc->add_option("--samples", wk_samples)->required();
        sc->add_option("--seed", wk_seed)->required();
        sc->add_option("--csv", wk_csv);
        walk_subs.push_back(sc);
    }

    // spectral
    auto* spectral = app.add_subcommand("spectral", "eigenvalue and eigenfunction numerics");
    spectral->require_subcommand(1);
    double sp_H = 1.0, sp_delta = 0.01, sp_lambda = 1.0, sp_x = 1.0;
    int sp_K = 50;
    double sp_Hmin = 1.0, sp_Hmax = 10.0, sp_step = 0.5;
    std::string sp_csv;
    auto* sp_lam = spectral->add_subcommand("lambda", "principal eigenvalue for height H");
    sp_lam->add_option("--H", sp_H)->required();
    auto* sp_h = spectral->add_subcommand("height", "height for target delta");
    sp_h->add_option("--delta", sp_delta)->required();
    auto* sp_g = spectral->add_subcommand("g", "eigenfunction values");
    sp_g->add_option("--lambda", sp_lambda)->required();
    sp_g->add_option("--x", sp_x)->required();
    sp_g->add_option("--K", sp_K);
    auto* sp_r = spectral->add_subcommand("roots", "characteristic roots s_k");
    sp_r->add_option("--lambda", sp_lambda)->required();
    sp_r->add_option("--K", sp_K);
    auto* sp_c = spectral->add_subcommand("curve", "lambda(H) eigenvalue curve CSV");
    sp_c->add_option("--Hmin", sp_Hmin)->required();
    sp_c->add_option("--Hmax", sp_Hmax)->required();
    sp_c->add_option("--step", sp_step)->required();
    sp_c->add_option("--csv", sp_csv);

    // sim
    auto* sim = app.add_subcommand("sim", "experiment suites");
    sim->require_subcommand(1);
    std::string sim_config;
    auto* sim_phase = sim->add_subcommand("phase", "phase-transition statistics");
    sim_phase->add_option("--config", sim_config)->required();
    auto* sim_ws = sim->add_subcommand("walk-suite", "random walk estimate suites");
    sim_ws->add_option("--config", sim_config)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return cmd_gen(gen_n, gen_seed, gen_undirected, gen_out);
        if (*solve) return cmd_solve(solve_input, solve_solver, solve_json);
        if (*moments) return cmd_moments(mom_n, mom_k, mom_c, mom_delta, mom_A, mom_R);
        if (*walk) {
            for (std::size_t i = 0; i < walk_subs.size(); ++i)
                if (*walk_subs[i])
                    return cmd_walk(walk_subs[i]->get_name(), wk_k, wk_A, wk_x,
                                    wk_bins > 0 ? wk_bins : static_cast<int>(std::ceil(wk_A)),
                                    wk_samples, wk_seed, wk_csv);
        }
        if (*spectral) {
            if (*sp_lam) return cmd_spectral_lambda(sp_H);
            if (*sp_h) return cmd_spectral_height(sp_delta);
            if (*sp_g) return cmd_spectral_g(sp_lambda, sp_x, sp_K);
            if (*sp_r) return cmd_spectral_roots(sp_lambda, sp_K);
            if (*sp_c) return cmd_spectral_curve(sp_Hmin, sp_Hmax, sp_step, sp_csv);
        }
        if (*sim) {
            if (*sim_phase) return cmd_sim_phase(sim_config);
            if (*sim_ws) return cmd_sim_walk_suite(sim_config);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
