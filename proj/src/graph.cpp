#include "mmwc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mmwc {

double compensated_sum(const double* x, std::size_t n) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = sum + x[i];
        if (std::fabs(sum) >= std::fabs(x[i]))
            comp += (sum - t) + x[i];
        else
            comp += (x[i] - t) + sum;
        sum = t;
    }
    return sum + comp;
}

WeightedDigraph::WeightedDigraph(std::uint32_t n, std::vector<Arc> arcs) : n_(n) {
    for (const Arc& a : arcs) {
        if (a.tail >= n || a.head >= n)
            throw std::invalid_argument("WeightedDigraph: vertex id out of range");
        if (a.tail == a.head)
            throw std::invalid_argument("WeightedDigraph: self-loop");
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
            throw std::invalid_argument("WeightedDigraph: weight must be finite and >= 0");
    }
    offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const Arc& a : arcs) ++offsets_[a.tail + 1];
    for (std::uint32_t v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];

    heads_.resize(arcs.size());
    weights_.resize(arcs.size());
    std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const Arc& a : arcs) {
        std::uint64_t pos = cursor[a.tail]++;
        heads_[pos] = a.head;
        weights_[pos] = a.weight;
    }
    // rows sorted by head; duplicates become adjacent
    std::vector<std::pair<std::uint32_t, double>> tmp;
    for (std::uint32_t v = 0; v < n; ++v) {
        std::size_t b = offsets_[v], e = offsets_[v + 1];
        if (!std::is_sorted(heads_.begin() + b, heads_.begin() + e)) {
            tmp.resize(e - b);
            for (std::size_t i = b; i < e; ++i) tmp[i - b] = {heads_[i], weights_[i]};
            std::sort(tmp.begin(), tmp.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            for (std::size_t i = b; i < e; ++i) {
                heads_[i] = tmp[i - b].first;
                weights_[i] = tmp[i - b].second;
            }
        }
        for (std::size_t i = b + 1; i < e; ++i)
            if (heads_[i] == heads_[i - 1])
                throw std::invalid_argument("WeightedDigraph: duplicate arc (" +
                                            std::to_string(v) + "," + std::to_string(heads_[i]) + ")");
    }
}

bool WeightedDigraph::has_arc(std::uint32_t u, std::uint32_t v) const {
    auto b = heads_.begin() + row_begin(u), e = heads_.begin() + row_end(u);
    auto it = std::lower_bound(b, e, v);
    return it != e && *it == v;
}

double WeightedDigraph::arc_weight(std::uint32_t u, std::uint32_t v) const {
    auto b = heads_.begin() + row_begin(u), e = heads_.begin() + row_end(u);
    auto it = std::lower_bound(b, e, v);
    if (it == e || *it != v)
        throw std::invalid_argument("arc_weight: missing arc (" + std::to_string(u) + "," +
                                    std::to_string(v) + ")");
    return weights_[static_cast<std::size_t>(it - heads_.begin())];
}

std::vector<Arc> WeightedDigraph::arcs() const {
    std::vector<Arc> out;
    out.reserve(arc_count());
    for (std::uint32_t v = 0; v < n_; ++v)
        for (std::size_t i = row_begin(v); i < row_end(v); ++i)
            out.push_back({v, heads_[i], weights_[i]});
    return out;
}

std::vector<double> Cycle::arc_weights(const WeightedDigraph& g) const {
    std::vector<double> w(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i)
        w[i] = g.arc_weight(vertices[i], vertices[(i + 1) % vertices.size()]);
    return w;
}

namespace {

std::vector<std::uint32_t> canonical_rotation(const std::vector<std::uint32_t>& vs) {
    auto it = std::min_element(vs.begin(), vs.end());
    std::vector<std::uint32_t> out;
    out.reserve(vs.size());
    out.insert(out.end(), it, vs.end());
    out.insert(out.end(), vs.begin(), it);
    return out;
}

} // namespace

Cycle cycle_from_vertices(const WeightedDigraph& g, const std::vector<std::uint32_t>& vs) {
    if (vs.size() < 2) throw std::invalid_argument("cycle_from_vertices: need k >= 2");
    std::vector<std::uint32_t> sorted(vs);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("cycle_from_vertices: repeated vertex");

    Cycle c;
    c.vertices = canonical_rotation(vs);
    c.length = static_cast<int>(vs.size());
    std::vector<double> w = c.arc_weights(g); // throws on missing arc
    c.total_weight = compensated_sum(w);
    c.cbar = static_cast<double>(g.vertex_count()) * c.total_weight / c.length;
    return c;
}

namespace {

// DFS over vertices > start so that `start` is the minimal vertex of every
// cycle reported from it; reports each simple cycle exactly once.
void cycles_from(const WeightedDigraph& g, std::uint32_t start, std::vector<std::uint32_t>& path,
                 std::vector<char>& on_path, std::vector<Cycle>& out) {
    std::uint32_t v = path.back();
    for (std::size_t i = g.row_begin(v); i < g.row_end(v); ++i) {
        std::uint32_t u = g.heads()[i];
        if (u == start) {
            if (path.size() >= 2) out.push_back(cycle_from_vertices(g, path));
            continue;
        }
        if (u < start || on_path[u]) continue;
        on_path[u] = 1;
        path.push_back(u);
        cycles_from(g, start, path, on_path, out);
        path.pop_back();
        on_path[u] = 0;
    }
}

} // namespace

std::vector<Cycle> enumerate_simple_cycles(const WeightedDigraph& g, std::uint32_t max_n) {
    if (g.vertex_count() > max_n)
        throw std::invalid_argument("enumerate_simple_cycles: n exceeds guard (" +
                                    std::to_string(max_n) + ")");
    std::vector<Cycle> out;
    std::vector<char> on_path(g.vertex_count(), 0);
    for (std::uint32_t s = 0; s < g.vertex_count(); ++s) {
        std::vector<std::uint32_t> path{s};
        on_path[s] = 1;
        cycles_from(g, s, path, on_path, out);
        on_path[s] = 0;
    }
    return out;
}

WeightedDigraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_edge_list: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;

    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("load_edge_list: " + path + ":" + std::to_string(lineno) + ": " + msg);
    };

    std::uint64_t n = 0, m = 0;
    std::string mode;
    {
        if (!std::getline(in, line)) fail("missing header");
        ++lineno;
        std::istringstream hs(line);
        if (!(hs >> n >> m >> mode)) fail("bad header, expected \"n m directed|undirected\"");
        if (mode != "directed" && mode != "undirected") fail("mode must be directed|undirected");
        if (n == 0 || n > 0xffffffffULL) fail("bad vertex count");
    }
    bool undirected = (mode == "undirected");

    std::vector<Arc> arcs;
    arcs.reserve(undirected ? 2 * m : m);
    for (std::uint64_t i = 0; i < m; ++i) {
        if (!std::getline(in, line)) {
            ++lineno;
            fail("unexpected end of file");
        }
        ++lineno;
        std::istringstream ls(line);
        std::uint64_t a, b;
        double w;
        if (!(ls >> a >> b >> w)) fail("expected \"tail head weight\"");
        if (a >= n || b >= n) fail("vertex id out of range");
        if (a == b) fail("self-loop");
        if (!(w >= 0.0) || !std::isfinite(w)) fail("negative or non-finite weight");
        arcs.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), w});
        if (undirected)
            arcs.push_back({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(a), w});
    }
    try {
        return WeightedDigraph(static_cast<std::uint32_t>(n), std::move(arcs));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("load_edge_list: " + path + ": " + e.what());
    }
}

void write_edge_list(const WeightedDigraph& g, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_edge_list: cannot open " + path);
    std::fprintf(f, "%u %zu directed\n", g.vertex_count(), g.arc_count());
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
        for (std::size_t i = g.row_begin(v); i < g.row_end(v); ++i)
            std::fprintf(f, "%u %u %.17g\n", v, g.heads()[i], g.weights()[i]);
    std::fclose(f);
}

} // namespace mmwc
