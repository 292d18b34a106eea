#ifndef DMT_TEST_ORACLES_HPP
#define DMT_TEST_ORACLES_HPP

// Independent brute-force references. These deliberately avoid the library's
// algorithms (no gadget, no cut solver, no Morse boundary DP).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "dmt/complex.hpp"

namespace oracle {

// Cells of K as vertex sets, faces found by subset test.
struct PlainHasse {
    int n = 0;
    std::vector<std::vector<int>> verts;
    std::vector<std::pair<int, int>> edges;  // (face, coface)
};

inline PlainHasse plain_hasse(const dmt::SimplicialComplex& k) {
    PlainHasse h;
    h.n = k.size();
    for (int i = 0; i < k.size(); ++i) h.verts.push_back(k.vertices(i));
    for (int a = 0; a < h.n; ++a)
        for (int b = 0; b < h.n; ++b)
            if (h.verts[b].size() == h.verts[a].size() + 1 &&
                std::includes(h.verts[b].begin(), h.verts[b].end(), h.verts[a].begin(), h.verts[a].end()))
                h.edges.push_back({a, b});
    return h;
}

// Matched edges point face->coface, all others coface->face.
inline bool matching_acyclic(const PlainHasse& h, const std::vector<char>& matched) {
    std::vector<std::vector<int>> adj(h.n);
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        auto [a, b] = h.edges[e];
        if (matched[e])
            adj[a].push_back(b);
        else
            adj[b].push_back(a);
    }
    std::vector<int> state(h.n, 0);
    std::function<bool(int)> dfs = [&](int u) {
        state[u] = 1;
        for (int v : adj[u]) {
            if (state[v] == 1) return false;
            if (state[v] == 0 && !dfs(v)) return false;
        }
        state[u] = 2;
        return true;
    };
    for (int v = 0; v < h.n; ++v)
        if (state[v] == 0 && !dfs(v)) return false;
    return true;
}

// Calls fn(matched flags) for every acyclic matching of the Hasse graph.
inline void for_each_acyclic_matching(const PlainHasse& h, const std::function<void(const std::vector<char>&)>& fn) {
    std::vector<char> matched(h.edges.size(), 0), used(h.n, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == h.edges.size()) {
            if (matching_acyclic(h, matched)) fn(matched);
            return;
        }
        rec(i + 1);
        auto [a, b] = h.edges[i];
        if (!used[a] && !used[b]) {
            used[a] = used[b] = 1;
            matched[i] = 1;
            rec(i + 1);
            matched[i] = 0;
            used[a] = used[b] = 0;
        }
    };
    rec(0);
}

// Minimum number of critical cells over all acyclic matchings.
inline int brute_force_mmup(const dmt::SimplicialComplex& k) {
    auto h = plain_hasse(k);
    int best = std::numeric_limits<int>::max();
    for_each_acyclic_matching(h, [&](const std::vector<char>& m) {
        int c = h.n - 2 * static_cast<int>(std::count(m.begin(), m.end(), 1));
        best = std::min(best, c);
    });
    return best;
}

// Lexicographically smallest optimal A-indicator by plain enumeration.
struct BitmaskCut {
    bool feasible = false;
    double cost = 0;
    std::vector<std::uint8_t> inA;
};

template <class Inst>
BitmaskCut bitmask_dbcre(const Inst& inst) {
    BitmaskCut best;
    const int n = inst.n;
    const int lo = Inst::min_side_for(n, inst.c);
    best.cost = std::numeric_limits<double>::infinity();
    // x_0 is the most significant position of the lexicographic order
    for (std::uint64_t code = 0; code < (std::uint64_t(1) << n); ++code) {
        std::vector<std::uint8_t> x(n);
        int ones = 0;
        for (int i = 0; i < n; ++i) {
            x[i] = (code >> (n - 1 - i)) & 1;
            ones += x[i];
        }
        if (ones < lo || n - ones < lo) continue;
        bool bad = false;
        for (auto [u, v] : inst.forbidden)
            if (x[u] && !x[v]) bad = true;
        if (bad) continue;
        double c = 0;
        for (const auto& a : inst.arcs)
            if (x[a.u] && !x[a.v]) c += a.w;
        if (c < best.cost - 1e-12) {
            best.cost = c;
            best.inA = x;
            best.feasible = true;
        }
    }
    return best;
}

}  // namespace oracle

#endif
