#pragma once

#include <cstdint>
#include <vector>

#include "mmwc/graph.hpp"

namespace mmwc {

/// Result of a minimum mean-weight cycle solve. scaled_mean = n * mu_star
/// is the paper-scale observable (n*W_n); length is L_n.
struct MmwcResult {
    double mu_star = 0.0;
    Cycle cycle;
    double scaled_mean = 0.0;
    int length = 0;
};

enum class Solver { karp, howard };

/// Strongly connected components (iterative Tarjan).
/// Returns component id per vertex; ids are 0..count-1 in reverse
/// topological order.
struct SccResult {
    std::vector<std::uint32_t> comp;
    std::uint32_t count = 0;
};
SccResult strongly_connected_components(const WeightedDigraph& g);

/// Karp's dynamic program, exact. Throws std::runtime_error("no cycle")
/// on acyclic input.
MmwcResult karp_mmc(const WeightedDigraph& g);

/// Howard's policy iteration on out-arc choice; same mu_star as Karp.
/// Iteration limit 10n sweeps guards against numerical cycling.
MmwcResult howard_mmc(const WeightedDigraph& g);

MmwcResult solve_mmc(const WeightedDigraph& g, Solver s);

/// Generate the mean-field instance for (n, seed) and solve it.
MmwcResult solve_mean_field(std::uint32_t n, std::uint64_t seed, Solver s);

} // namespace mmwc
