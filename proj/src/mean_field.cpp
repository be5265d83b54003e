#include "mmwc/mean_field.hpp"

#include <stdexcept>

#include "mmwc/rng.hpp"

namespace mmwc {

WeightedDigraph mean_field_instance(const InstanceSpec& spec) {
    const std::uint64_t n = spec.n;
    if (n < 2) throw std::invalid_argument("mean_field_instance: need n >= 2");

    std::vector<Arc> arcs;
    if (spec.directed) {
        arcs.reserve(n * (n - 1));
        std::uint64_t ctr = 0;
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = 0; j < n; ++j) {
                if (i == j) continue;
                arcs.push_back({i, j, rng::exponential(spec.seed, ctr++)});
            }
    } else {
        arcs.reserve(n * (n - 1));
        std::uint64_t ctr = 0;
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j) {
                double w = rng::exponential(spec.seed, ctr++);
                arcs.push_back({i, j, w});
                arcs.push_back({j, i, w});
            }
    }
    return WeightedDigraph(spec.n, std::move(arcs));
}

std::vector<double> exp_stream(std::uint64_t seed, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = rng::exponential(seed, i);
    return out;
}

} // namespace mmwc
