#include "mmwc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mmwc/mean_field.hpp"

namespace mmwc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-12;
} // namespace

SccResult strongly_connected_components(const WeightedDigraph& g) {
    const std::uint32_t n = g.vertex_count();
    SccResult res;
    res.comp.assign(n, 0xffffffffu);

    std::vector<std::uint32_t> index(n, 0xffffffffu), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    std::uint32_t next_index = 0;

    // explicit DFS frames: (vertex, next out-arc position)
    std::vector<std::pair<std::uint32_t, std::size_t>> frames;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != 0xffffffffu) continue;
        frames.emplace_back(root, g.row_begin(root));
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos < g.row_end(v)) {
                std::uint32_t u = g.heads()[pos++];
                if (index[u] == 0xffffffffu) {
                    index[u] = low[u] = next_index++;
                    stack.push_back(u);
                    on_stack[u] = 1;
                    frames.emplace_back(u, g.row_begin(u));
                } else if (on_stack[u]) {
                    low[v] = std::min(low[v], index[u]);
                }
            } else {
                if (low[v] == index[v]) {
                    std::uint32_t w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        res.comp[w] = res.count;
                    } while (w != v);
                    ++res.count;
                }
                std::uint32_t done = v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            }
        }
    }
    return res;
}

namespace {

struct LocalArc {
    std::uint32_t tail;
    std::uint32_t head;
    double weight;
};

// Induced subgraph on one SCC with local 0-based ids, vertices ascending.
struct SubGraph {
    std::vector<std::uint32_t> verts; // local -> original
    std::vector<LocalArc> arcs;       // sorted by (tail, head)
    std::vector<std::size_t> row;     // CSR offsets into arcs
};

std::vector<SubGraph> split_components(const WeightedDigraph& g, const SccResult& scc) {
    std::vector<SubGraph> subs(scc.count);
    const std::uint32_t n = g.vertex_count();
    std::vector<std::uint32_t> local(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        std::uint32_t c = scc.comp[v];
        local[v] = static_cast<std::uint32_t>(subs[c].verts.size());
        subs[c].verts.push_back(v); // ascending since v ascends
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        std::uint32_t c = scc.comp[v];
        for (std::size_t i = g.row_begin(v); i < g.row_end(v); ++i) {
            std::uint32_t u = g.heads()[i];
            if (scc.comp[u] == c)
                subs[c].arcs.push_back({local[v], u, g.weights()[i]}); // head fixed below
        }
    }
    for (auto& s : subs)
        for (auto& a : s.arcs) a.head = local[a.head];
    for (auto& s : subs) {
        s.row.assign(s.verts.size() + 1, 0);
        for (const auto& a : s.arcs) ++s.row[a.tail + 1];
        for (std::size_t v = 0; v + 1 < s.row.size(); ++v) s.row[v + 1] += s.row[v];
    }
    return subs;
}

struct ComponentBest {
    double mu = kInf;
    std::vector<std::uint32_t> cycle_local;
};

// ----- Karp -----

ComponentBest karp_component(const SubGraph& s) {
    const std::uint32_t ns = static_cast<std::uint32_t>(s.verts.size());
    const std::size_t stride = ns;
    std::vector<double> D((static_cast<std::size_t>(ns) + 1) * stride, kInf);
    std::vector<std::uint32_t> pred((static_cast<std::size_t>(ns) + 1) * stride, 0xffffffffu);
    D[0] = 0.0; // local source = 0

    for (std::uint32_t k = 1; k <= ns; ++k) {
        const double* prev = &D[(k - 1) * stride];
        double* cur = &D[k * stride];
        std::uint32_t* pcur = &pred[k * stride];
        for (const auto& a : s.arcs) {
            if (prev[a.tail] == kInf) continue;
            double cand = prev[a.tail] + a.weight;
            if (cand < cur[a.head]) {
                cur[a.head] = cand;
                pcur[a.head] = a.tail;
            }
        }
    }

    double best_mu = kInf;
    std::uint32_t best_v = 0xffffffffu;
    const double* top = &D[static_cast<std::size_t>(ns) * stride];
    for (std::uint32_t v = 0; v < ns; ++v) {
        if (top[v] == kInf) continue;
        double worst = -kInf;
        for (std::uint32_t k = 0; k < ns; ++k) {
            double dk = D[static_cast<std::size_t>(k) * stride + v];
            if (dk == kInf) continue;
            double val = (top[v] - dk) / static_cast<double>(ns - k);
            if (val > worst) worst = val;
        }
        if (worst > -kInf && worst < best_mu - kTieTol) {
            best_mu = worst;
            best_v = v;
        }
    }
    ComponentBest out;
    if (best_v == 0xffffffffu) return out; // no cycle through source: impossible in an SCC of size >= 2

    // walk predecessors from (best_v, ns); every cycle on this walk attains mu*.
    std::vector<std::uint32_t> walk(ns + 1);
    walk[ns] = best_v;
    for (std::uint32_t k = ns; k > 0; --k) walk[k - 1] = pred[static_cast<std::size_t>(k) * stride + walk[k]];

    std::vector<std::int64_t> seen(ns, -1);
    for (std::int64_t j = ns; j >= 0; --j) {
        std::uint32_t v = walk[static_cast<std::size_t>(j)];
        if (seen[v] >= 0) {
            out.cycle_local.assign(walk.begin() + j, walk.begin() + seen[v]);
            break;
        }
        seen[v] = j;
    }
    out.mu = best_mu;
    return out;
}

// ----- Howard -----

ComponentBest howard_component(const SubGraph& s) {
    const std::uint32_t ns = static_cast<std::uint32_t>(s.verts.size());
    constexpr double tol = 1e-12;

    std::vector<std::uint32_t> policy(ns);
    for (std::uint32_t v = 0; v < ns; ++v) {
        std::size_t best = s.row[v];
        for (std::size_t i = s.row[v]; i < s.row[v + 1]; ++i)
            if (s.arcs[i].weight < s.arcs[best].weight) best = i;
        policy[v] = static_cast<std::uint32_t>(best);
    }

    std::vector<double> d(ns, 0.0), mu(ns, 0.0);
    std::vector<std::uint32_t> color(ns), order;
    std::vector<std::uint32_t> cycle_handle; // handle vertex of each policy cycle found
    std::vector<double> cycle_mu;

    auto evaluate = [&]() {
        std::fill(color.begin(), color.end(), 0u); // 0 white, 1 gray, 2 black
        cycle_handle.clear();
        cycle_mu.clear();
        order.clear();
        for (std::uint32_t start = 0; start < ns; ++start) {
            if (color[start]) continue;
            order.clear();
            std::uint32_t v = start;
            while (color[v] == 0) {
                color[v] = 1;
                order.push_back(v);
                v = s.arcs[policy[v]].head;
            }
            std::size_t tail_end = order.size();
            if (color[v] == 1) {
                // new cycle: suffix of `order` from v
                std::size_t pos = order.size();
                while (pos > 0 && order[pos - 1] != v) --pos;
                --pos; // order[pos] == v
                double wsum = 0.0, comp = 0.0;
                for (std::size_t i = pos; i < order.size(); ++i) {
                    double w = s.arcs[policy[order[i]]].weight;
                    double t = wsum + w;
                    comp += (std::fabs(wsum) >= std::fabs(w)) ? (wsum - t) + w : (w - t) + wsum;
                    wsum = t;
                }
                wsum += comp;
                double m = wsum / static_cast<double>(order.size() - pos);
                // values around the cycle, fixed at the handle
                d[v] = 0.0;
                mu[v] = m;
                for (std::size_t i = order.size(); i > pos + 1; --i) {
                    std::uint32_t u = order[i - 1];
                    std::uint32_t nxt = s.arcs[policy[u]].head;
                    d[u] = s.arcs[policy[u]].weight - m + d[nxt];
                    mu[u] = m;
                    color[u] = 2;
                }
                color[v] = 2;
                cycle_handle.push_back(v);
                cycle_mu.push_back(m);
                tail_end = pos;
            }
            // tail vertices lead into an evaluated region
            for (std::size_t i = tail_end; i > 0; --i) {
                std::uint32_t u = order[i - 1];
                std::uint32_t nxt = s.arcs[policy[u]].head;
                d[u] = s.arcs[policy[u]].weight - mu[nxt] + d[nxt];
                mu[u] = mu[nxt];
                color[u] = 2;
            }
        }
    };

    const std::uint64_t max_sweeps = 10ull * std::max<std::uint32_t>(ns, 1);
    bool converged = false;
    for (std::uint64_t sweep = 0; sweep < max_sweeps; ++sweep) {
        evaluate();
        // phase 1: gain improvement
        bool improved = false;
        for (std::uint32_t v = 0; v < ns; ++v) {
            std::size_t best = policy[v];
            double best_mu = mu[s.arcs[best].head];
            for (std::size_t i = s.row[v]; i < s.row[v + 1]; ++i) {
                double m = mu[s.arcs[i].head];
                if (m < best_mu - tol) {
                    best_mu = m;
                    best = i;
                }
            }
            if (best != policy[v]) {
                policy[v] = static_cast<std::uint32_t>(best);
                improved = true;
            }
        }
        if (!improved) {
            // phase 2: bias improvement at equal gain
            for (std::uint32_t v = 0; v < ns; ++v) {
                std::size_t cur = policy[v];
                double cur_val = s.arcs[cur].weight - mu[v] + d[s.arcs[cur].head];
                std::size_t best = cur;
                double best_val = cur_val;
                for (std::size_t i = s.row[v]; i < s.row[v + 1]; ++i) {
                    if (mu[s.arcs[i].head] > mu[v] + tol) continue;
                    double val = s.arcs[i].weight - mu[v] + d[s.arcs[i].head];
                    if (val < best_val - tol) {
                        best_val = val;
                        best = i;
                    }
                }
                if (best != cur) {
                    policy[v] = static_cast<std::uint32_t>(best);
                    improved = true;
                }
            }
        }
        if (!improved) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("howard_mmc: iteration limit exceeded (numerical cycling)");

    evaluate();
    ComponentBest out;
    std::size_t best_i = cycle_mu.size();
    for (std::size_t i = 0; i < cycle_mu.size(); ++i)
        if (best_i == cycle_mu.size() || cycle_mu[i] < cycle_mu[best_i] - kTieTol) best_i = i;
    if (best_i == cycle_mu.size()) return out;
    out.mu = cycle_mu[best_i];
    std::uint32_t v = cycle_handle[best_i];
    std::uint32_t u = v;
    do {
        out.cycle_local.push_back(u);
        u = s.arcs[policy[u]].head;
    } while (u != v);
    return out;
}

MmwcResult finish(const WeightedDigraph& g, double mu, const SubGraph& sub,
                  const std::vector<std::uint32_t>& cyc_local) {
    std::vector<std::uint32_t> verts(cyc_local.size());
    for (std::size_t i = 0; i < cyc_local.size(); ++i) verts[i] = sub.verts[cyc_local[i]];
    MmwcResult r;
    r.cycle = cycle_from_vertices(g, verts);
    r.mu_star = mu;
    r.length = r.cycle.length;
    r.scaled_mean = static_cast<double>(g.vertex_count()) * mu;
    return r;
}

MmwcResult solve_by(const WeightedDigraph& g, ComponentBest (*solve)(const SubGraph&)) {
    SccResult scc = strongly_connected_components(g);
    std::vector<SubGraph> subs = split_components(g, scc);

    double best_mu = kInf;
    const SubGraph* best_sub = nullptr;
    ComponentBest best;
    for (const auto& sub : subs) {
        if (sub.verts.size() < 2) continue; // no self-loops, so no cycle here
        ComponentBest cb = solve(sub);
        if (!cb.cycle_local.empty() && cb.mu < best_mu - kTieTol) {
            best_mu = cb.mu;
            best = std::move(cb);
            best_sub = &sub;
        }
    }
    if (!best_sub) throw std::runtime_error("no cycle");
    return finish(g, best_mu, *best_sub, best.cycle_local);
}

} // namespace

MmwcResult karp_mmc(const WeightedDigraph& g) { return solve_by(g, &karp_component); }

MmwcResult howard_mmc(const WeightedDigraph& g) { return solve_by(g, &howard_component); }

MmwcResult solve_mmc(const WeightedDigraph& g, Solver s) {
    return s == Solver::karp ? karp_mmc(g) : howard_mmc(g);
}

MmwcResult solve_mean_field(std::uint32_t n, std::uint64_t seed, Solver s) {
    if (n < 2) throw std::invalid_argument("solve_mean_field: need n >= 2");
    WeightedDigraph g = mean_field_instance({n, true, seed});
    return solve_mmc(g, s);
}

} // namespace mmwc
