#pragma once

#include <cstdint>
#include <vector>

#include "mmwc/graph.hpp"

namespace mmwc {

/// Instance descriptor for the mean-field distance model.
/// Same spec -> bit-identical instance.
struct InstanceSpec {
    std::uint32_t n = 2;
    bool directed = true;
    std::uint64_t seed = 0;
};

/// Complete (di)graph with i.i.d. Exp(1) weights from the seeded stream.
/// Undirected mode draws one weight per unordered pair and stores two
/// opposing arcs sharing it.
WeightedDigraph mean_field_instance(const InstanceSpec& spec);

/// i.i.d. Exp(1) draws via inverse CDF from the counter stream.
std::vector<double> exp_stream(std::uint64_t seed, std::size_t count);

} // namespace mmwc
