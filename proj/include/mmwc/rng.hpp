#pragma once

#include <cmath>
#include <cstdint>

namespace mmwc {

// Counter-based pseudo-random streams built on the splitmix64 finalizer.
// A draw is a pure function of (seed, counter), so disjoint counter ranges
// and derived substreams can be consumed concurrently without coordination,
// and every result is bit-reproducible across platforms.
namespace rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Value of stream `seed` at position `counter`.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * kGolden);
}

/// Derive an independent substream seed, e.g. one per worker or per sample.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index ^ 0xd1b54a32d192ed03ULL));
}

/// Uniform on the open interval (0,1); never returns 0 or 1.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
    return (static_cast<double>(at(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

/// Unit-rate exponential via inverse CDF; strictly positive.
inline double exponential(std::uint64_t seed, std::uint64_t counter) {
    return -std::log(uniform01(seed, counter));
}

/// Stateful view over one stream; cheap to copy, never shared.
class Stream {
public:
    explicit Stream(std::uint64_t seed, std::uint64_t start = 0) : seed_(seed), ctr_(start) {}

    std::uint64_t next_u64() { return at(seed_, ctr_++); }
    double next_uniform() { return uniform01(seed_, ctr_++); }
    double next_exponential() { return -std::log(uniform01(seed_, ctr_++)); }
    std::uint64_t position() const { return ctr_; }

private:
    std::uint64_t seed_;
    std::uint64_t ctr_;
};

} // namespace rng
} // namespace mmwc
