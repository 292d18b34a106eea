#ifndef DMT_GRAPH_HPP
#define DMT_GRAPH_HPP

#include <algorithm>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

namespace dmt {

using Adjacency = std::vector<std::vector<int>>;

inline Adjacency make_adjacency(int n, const std::vector<std::pair<int, int>>& arcs) {
    Adjacency adj(n);
    for (auto [u, v] : arcs) adj[u].push_back(v);
    return adj;
}

// Kahn's algorithm, smallest ready node first so the order is canonical.
inline std::optional<std::vector<int>> topological_order(const Adjacency& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> indeg(n, 0);
    for (const auto& out : adj)
        for (int v : out) ++indeg[v];
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push(v);
    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        int u = ready.top();
        ready.pop();
        order.push_back(u);
        for (int v : adj[u])
            if (--indeg[v] == 0) ready.push(v);
    }
    if (static_cast<int>(order.size()) != n) return std::nullopt;
    return order;
}

// Node sequence of some directed cycle (first node not repeated), or empty.
inline std::vector<int> find_cycle(const Adjacency& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<char> color(n, 0);
    std::vector<int> parent(n, -1);
    std::vector<std::pair<int, std::size_t>> stack;
    for (int s = 0; s < n; ++s) {
        if (color[s]) continue;
        stack.push_back({s, 0});
        color[s] = 1;
        while (!stack.empty()) {
            auto& [u, i] = stack.back();
            if (i < adj[u].size()) {
                int v = adj[u][i++];
                if (color[v] == 0) {
                    color[v] = 1;
                    parent[v] = u;
                    stack.push_back({v, 0});
                } else if (color[v] == 1) {
                    std::vector<int> cyc{v};
                    for (int w = u; w != v; w = parent[w]) cyc.push_back(w);
                    std::reverse(cyc.begin() + 1, cyc.end());
                    return cyc;
                }
            } else {
                color[u] = 2;
                stack.pop_back();
            }
        }
    }
    return {};
}

inline bool is_acyclic(const Adjacency& adj) { return find_cycle(adj).empty(); }

// Whether target is reachable from source; mark is scratch space sized n, all zero on entry and exit.
inline bool reaches(const Adjacency& adj, int source, int target, std::vector<char>& mark) {
    if (source == target) return true;
    std::vector<int> stack{source};
    std::vector<int> touched{source};
    mark[source] = 1;
    bool found = false;
    while (!stack.empty() && !found) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (v == target) {
                found = true;
                break;
            }
            if (!mark[v]) {
                mark[v] = 1;
                touched.push_back(v);
                stack.push_back(v);
            }
        }
    }
    for (int v : touched) mark[v] = 0;
    return found;
}

}  // namespace dmt

#endif
