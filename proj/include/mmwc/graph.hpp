#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mmwc {

/// One directed arc of an edge list.
struct Arc {
    std::uint32_t tail;
    std::uint32_t head;
    double weight;
};

/// Immutable weighted digraph over dense 0-based vertex ids.
/// Arcs live in a compact adjacency array (CSR), rows sorted by head,
/// which makes arc lookup O(log deg) and traversal cache-friendly.
/// No self-loops, at most one arc per ordered pair, weights finite >= 0.
class WeightedDigraph {
public:
    WeightedDigraph(std::uint32_t n, std::vector<Arc> arcs);

    std::uint32_t vertex_count() const { return n_; }
    std::size_t arc_count() const { return heads_.size(); }

    /// Out-neighbors of v: indices into heads()/weights() are [row_begin(v), row_end(v)).
    std::size_t row_begin(std::uint32_t v) const { return offsets_[v]; }
    std::size_t row_end(std::uint32_t v) const { return offsets_[v + 1]; }
    const std::vector<std::uint32_t>& heads() const { return heads_; }
    const std::vector<double>& weights() const { return weights_; }

    /// Weight of arc (u,v); throws if the arc is absent.
    double arc_weight(std::uint32_t u, std::uint32_t v) const;
    bool has_arc(std::uint32_t u, std::uint32_t v) const;

    std::vector<Arc> arcs() const;

private:
    std::uint32_t n_;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> heads_;
    std::vector<double> weights_;
};

/// Directed cycle with cached length, total weight, and cbar = n*weight/length.
/// Canonical form: rotated so the minimal vertex id comes first.
struct Cycle {
    std::vector<std::uint32_t> vertices;
    int length = 0;
    double total_weight = 0.0;
    double cbar = 0.0;

    /// Arc weights in traversal order (v0->v1, ..., v_{k-1}->v0).
    std::vector<double> arc_weights(const WeightedDigraph& g) const;
};

/// Build a Cycle from a vertex sequence; validates distinctness, k >= 2 and
/// that every closing arc exists. Total weight uses compensated summation.
Cycle cycle_from_vertices(const WeightedDigraph& g, const std::vector<std::uint32_t>& vs);

/// Every directed simple cycle, each exactly once in canonical rotation.
/// Refuses graphs with more than max_n vertices (brute-force oracle only).
std::vector<Cycle> enumerate_simple_cycles(const WeightedDigraph& g, std::uint32_t max_n = 9);

/// Edge-list text I/O. Header "n m directed|undirected", then m lines
/// "tail head weight". Undirected input expands each edge into two opposing
/// arcs of equal weight.
WeightedDigraph load_edge_list(const std::string& path);
void write_edge_list(const WeightedDigraph& g, const std::string& path);

/// Neumaier compensated sum.
double compensated_sum(const double* x, std::size_t n);
inline double compensated_sum(const std::vector<double>& x) {
    return compensated_sum(x.data(), x.size());
}

} // namespace mmwc
