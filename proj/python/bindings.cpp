#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmwc/cycle_stats.hpp"
#include "mmwc/exp_walk.hpp"
#include "mmwc/experiments.hpp"
#include "mmwc/graph.hpp"
#include "mmwc/mean_field.hpp"
#include "mmwc/solver.hpp"
#include "mmwc/spectral.hpp"

namespace py = pybind11;
using namespace mmwc;

PYBIND11_MODULE(_core, m) {
    m.doc() = "minimum mean-weight cycle laboratory";

    py::class_<WeightedDigraph>(m, "WeightedDigraph")
        .def(py::init([](std::uint32_t n, const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& arcs) {
                 std::vector<Arc> as;
                 as.reserve(arcs.size());
                 for (const auto& [t, h, w] : arcs) as.push_back({t, h, w});
                 return WeightedDigraph(n, std::move(as));
             }),
             py::arg("n"), py::arg("arcs"))
        .def_property_readonly("n", &WeightedDigraph::vertex_count)
        .def_property_readonly("arc_count", &WeightedDigraph::arc_count)
        .def("arc_weight", &WeightedDigraph::arc_weight)
        .def("has_arc", &WeightedDigraph::has_arc)
        .def("arcs", [](const WeightedDigraph& g) {
            std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> out;
            for (const Arc& a : g.arcs()) out.emplace_back(a.tail, a.head, a.weight);
            return out;
        });

    py::class_<Cycle>(m, "Cycle")
        .def_readonly("vertices", &Cycle::vertices)
        .def_readonly("length", &Cycle::length)
        .def_readonly("total_weight", &Cycle::total_weight)
        .def_readonly("cbar", &Cycle::cbar)
        .def("arc_weights", &Cycle::arc_weights);

    py::class_<MmwcResult>(m, "MmwcResult")
        .def_readonly("mu_star", &MmwcResult::mu_star)
        .def_readonly("cycle", &MmwcResult::cycle)
        .def_readonly("scaled_mean", &MmwcResult::scaled_mean)
        .def_readonly("length", &MmwcResult::length);

    m.def("load_edge_list", &load_edge_list, py::arg("path"));
    m.def("write_edge_list", &write_edge_list, py::arg("graph"), py::arg("path"));
    m.def("cycle_from_vertices", &cycle_from_vertices, py::arg("graph"), py::arg("vertices"));
    m.def("enumerate_simple_cycles", &enumerate_simple_cycles, py::arg("graph"),
          py::arg("max_n") = 9);

    m.def(
        "mean_field_instance",
        [](std::uint32_t n, std::uint64_t seed, bool directed) {
            return mean_field_instance({n, directed, seed});
        },
        py::arg("n"), py::arg("seed"), py::arg("directed") = true);
    m.def("exp_stream", &exp_stream, py::arg("seed"), py::arg("count"));

    m.def("karp_mmc", &karp_mmc, py::arg("graph"));
    m.def("howard_mmc", &howard_mmc, py::arg("graph"));
    m.def(
        "solve_mean_field",
        [](std::uint32_t n, std::uint64_t seed, const std::string& solver) {
            return solve_mean_field(n, seed, solver == "karp" ? Solver::karp : Solver::howard);
        },
        py::arg("n"), py::arg("seed"), py::arg("solver") = "howard");

    m.def("excedance", &excedance, py::arg("weights"), py::arg("c"), py::arg("n"));
    m.def("is_uniform", &is_uniform, py::arg("weights"), py::arg("n"), py::arg("c"), py::arg("A"));
    m.def("max_abs_cyclic_excedance", &max_abs_cyclic_excedance, py::arg("weights"), py::arg("n"),
          py::arg("c"));
    m.def(
        "untilted_bridge",
        [](const std::vector<double>& w, std::uint64_t n, double D) {
            BridgeView b = untilted_bridge(w, n, D);
            return py::make_tuple(b.increments, b.prefix, b.range);
        },
        py::arg("weights"), py::arg("n"), py::arg("D") = 0.0);
    m.def(
        "expected_light_cycles",
        [](std::uint64_t n, int k, double c) {
            MomentQuery q;
            q.n = n;
            q.k = k;
            q.c = c;
            return expected_light_cycles(q);
        },
        py::arg("n"), py::arg("k"), py::arg("c"));
    m.def(
        "expected_uniform_light_cycles",
        [](std::uint64_t n, int k, double c, double R) {
            MomentQuery q;
            q.n = n;
            q.k = k;
            q.c = c;
            return expected_uniform_light_cycles(q, R);
        },
        py::arg("n"), py::arg("k"), py::arg("c"), py::arg("R"));
    m.def("extract_uniform_subpaths", &extract_uniform_subpaths, py::arg("weights"), py::arg("n"),
          py::arg("c"), py::arg("A"), py::arg("A_prime"));
    m.def("delta_profile", &delta_profile, py::arg("x"), py::arg("A"));
    m.def(
        "is_good",
        [](const std::vector<double>& w, std::uint64_t n, int Delta) {
            return is_good(w, n, Delta,
                           [](double H) { return spectral::principal_lambda(H).lambda; });
        },
        py::arg("weights"), py::arg("n"), py::arg("Delta"));

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("value", &McEstimate::value)
        .def_readonly("std_error", &McEstimate::std_error)
        .def_readonly("samples", &McEstimate::samples)
        .def_readonly("acceptance_rate", &McEstimate::acceptance_rate);

    m.def(
        "sample_walk",
        [](double start, int k, std::uint64_t seed) { return sample_walk(start, k, seed).prefix; },
        py::arg("start"), py::arg("k"), py::arg("seed"));
    m.def(
        "sample_bridge",
        [](int k, std::uint64_t seed) { return sample_bridge(k, seed).prefix; }, py::arg("k"),
        py::arg("seed"));
    m.def("estimate_range_prob", &estimate_range_prob, py::arg("k"), py::arg("A"),
          py::arg("samples"), py::arg("seed"));
    m.def("estimate_survival", &estimate_survival, py::arg("x"), py::arg("A"), py::arg("k"),
          py::arg("samples"), py::arg("seed"));
    m.def(
        "local_time_profile",
        [](int k, double A, int bins, std::uint64_t samples, std::uint64_t seed) {
            LocalTimeProfile p = local_time_profile(k, A, bins, samples, seed);
            std::vector<double> means, ses;
            for (const auto& b : p.bins) {
                means.push_back(b.value);
                ses.push_back(b.std_error);
            }
            return py::make_tuple(means, ses, p.acceptance.value, p.accepted);
        },
        py::arg("k"), py::arg("A"), py::arg("bins"), py::arg("samples"), py::arg("seed"));
    m.def(
        "count_crossings",
        [](const std::vector<double>& prefix, double x, double y, bool cyclic) {
            WalkPath p;
            p.prefix = prefix;
            p.k = static_cast<int>(prefix.size()) - 1;
            return count_crossings(p, x, y, cyclic);
        },
        py::arg("prefix"), py::arg("x"), py::arg("y"), py::arg("cyclic") = false);

    auto sp = m.def_submodule("spectral", "eigenvalue and eigenfunction numerics");
    sp.def("lambert_w", &spectral::lambert_w, py::arg("k"), py::arg("z"));
    sp.def("tree_function", &spectral::tree_function, py::arg("z"));
    sp.def("tau", &spectral::tau, py::arg("lam"), py::arg("s"));
    sp.def("g_closed", &spectral::g_closed, py::arg("lam"), py::arg("x"));
    sp.def(
        "g_series",
        [](double lam, double x, int K) {
            spectral::GSeries s = spectral::g_series(lam, x, K);
            return py::make_tuple(s.value, s.tail_bound);
        },
        py::arg("lam"), py::arg("x"), py::arg("K") = 50);
    sp.def(
        "principal_lambda",
        [](double H) {
            spectral::SpectralSolution sol = spectral::principal_lambda(H);
            return py::make_tuple(sol.lambda, sol.delta, sol.roots);
        },
        py::arg("H"));
    sp.def("eigen_residual", &spectral::eigen_residual, py::arg("lam"), py::arg("H"),
           py::arg("quad_points") = 21);
    sp.def("height_for_delta", &spectral::height_for_delta, py::arg("delta"));
    sp.def("c_critical", &spectral::c_critical, py::arg("n"));
    sp.def("real_eigenvalues", &spectral::real_eigenvalues, py::arg("H"), py::arg("max_count"));

    py::class_<MomentRow>(m, "MomentRow")
        .def_readonly("k", &MomentRow::k)
        .def_readonly("exact", &MomentRow::exact)
        .def_readonly("mc_mean", &MomentRow::mc_mean)
        .def_readonly("mc_se", &MomentRow::mc_se)
        .def_readonly("z", &MomentRow::z);
    py::class_<MomentReport>(m, "MomentReport")
        .def_readonly("n", &MomentReport::n)
        .def_readonly("c", &MomentReport::c)
        .def_readonly("seeds", &MomentReport::seeds)
        .def_readonly("rows", &MomentReport::rows);
    m.def("run_moment_check", &run_moment_check, py::arg("n"), py::arg("c"), py::arg("seeds"),
          py::arg("master_seed") = 7);

    py::class_<ExperimentRecord>(m, "ExperimentRecord")
        .def_readonly("n", &ExperimentRecord::n)
        .def_readonly("seed", &ExperimentRecord::seed)
        .def_readonly("nW", &ExperimentRecord::nW)
        .def_readonly("L", &ExperimentRecord::L)
        .def_readonly("supercritical", &ExperimentRecord::supercritical)
        .def_readonly("w_resid_cstar", &ExperimentRecord::w_resid_cstar)
        .def_readonly("w_resid_ccirc", &ExperimentRecord::w_resid_ccirc)
        .def_readonly("L_scaled", &ExperimentRecord::L_scaled)
        .def_readonly("uniform_A", &ExperimentRecord::uniform_A)
        .def_readonly("good_Delta", &ExperimentRecord::good_Delta);
    py::class_<PhaseSummary>(m, "PhaseSummary")
        .def_readonly("n", &PhaseSummary::n)
        .def_readonly("records", &PhaseSummary::records)
        .def_readonly("failures", &PhaseSummary::failures)
        .def_readonly("fraction_supercritical", &PhaseSummary::fraction_supercritical)
        .def_readonly("L_scaled_q50", &PhaseSummary::L_scaled_q50)
        .def_readonly("median_subcritical_L", &PhaseSummary::median_subcritical_L);
    py::class_<PhaseResult>(m, "PhaseResult")
        .def_readonly("records", &PhaseResult::records)
        .def_readonly("summary", &PhaseResult::summary);
    m.def(
        "run_phase",
        [](const std::vector<std::uint32_t>& n_values, int seeds_per_n, const std::string& solver,
           std::uint64_t master_seed, int parallelism, const std::string& out_csv,
           const std::vector<double>& A_grid, const std::vector<int>& Delta_grid) {
            ExperimentConfig cfg;
            cfg.n_values = n_values;
            cfg.seeds_per_n = seeds_per_n;
            cfg.solver = solver == "karp" ? Solver::karp : Solver::howard;
            cfg.master_seed = master_seed;
            cfg.parallelism = parallelism;
            cfg.out_csv = out_csv;
            cfg.A_grid = A_grid;
            cfg.Delta_grid = Delta_grid;
            return run_phase(cfg);
        },
        py::arg("n_values"), py::arg("seeds_per_n"), py::arg("solver") = "howard",
        py::arg("master_seed") = 1, py::arg("parallelism") = 2, py::arg("out_csv") = "",
        py::arg("A_grid") = std::vector<double>{}, py::arg("Delta_grid") = std::vector<int>{});
}
