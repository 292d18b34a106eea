#ifndef DMT_EXACT_CUT_HPP
#define DMT_EXACT_CUT_HPP

#include <limits>
#include <optional>
#include <vector>

#include "cut.hpp"

namespace dmt {

struct ExactCutOptions {
    // Search-node budget. Instances up to ~22 nodes always finish; larger ones
    // finish when forbidden arcs propagate well, otherwise SolverError.
    long long node_budget = 50'000'000;
};

// Depth-first branch and bound over nodes in index order, trying "not in A"
// first. Only strictly cheaper cuts replace the incumbent, so the result is the
// lexicographically smallest A-indicator among the optimal cuts.
// Returns nullopt when no balanced cut avoids every forbidden arc.
inline std::optional<DirectedCut> exact_dbcre(const CutInstance& inst, const ExactCutOptions& opt = {}) {
    const int n = inst.n;
    const int lo = inst.min_side();
    if (n == 0 || 2 * lo > n || lo < 0) return std::nullopt;
    const int hi = n - lo;

    std::vector<std::vector<int>> force1(n), force0(n);
    for (auto [y, x] : inst.forbidden) {
        force1[y].push_back(x);  // y in A forces x in A
        force0[x].push_back(y);  // x outside A forces y outside A
    }
    std::vector<std::vector<std::pair<int, double>>> out(n), in(n);
    for (const auto& a : inst.arcs) {
        if (a.u == a.v) continue;
        out[a.u].push_back({a.v, a.w});
        in[a.v].push_back({a.u, a.w});
    }

    std::vector<signed char> val(n, -1);
    std::vector<int> trail;
    int cnt[2] = {0, 0};
    double cost = 0.0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint8_t> best_x;
    long long visited = 0;

    auto set = [&](int i, int b) {
        val[i] = static_cast<signed char>(b);
        trail.push_back(i);
        ++cnt[b];
        if (b == 1) {
            for (auto [v, w] : out[i])
                if (val[v] == 0) cost += w;
        } else {
            for (auto [u, w] : in[i])
                if (val[u] == 1) cost += w;
        }
    };
    auto undo_to = [&](std::size_t mark) {
        while (trail.size() > mark) {
            int i = trail.back();
            trail.pop_back();
            int b = val[i];
            if (b == 1) {
                for (auto [v, w] : out[i])
                    if (val[v] == 0) cost -= w;
            } else {
                for (auto [u, w] : in[i])
                    if (val[u] == 1) cost -= w;
            }
            --cnt[b];
            val[i] = -1;
        }
    };
    std::vector<std::pair<int, int>> queue;
    auto assign = [&](int i, int b) -> bool {
        queue.clear();
        queue.push_back({i, b});
        for (std::size_t q = 0; q < queue.size(); ++q) {
            auto [j, bj] = queue[q];
            if (val[j] == bj) continue;
            if (val[j] != -1) return false;
            set(j, bj);
            for (int k : (bj == 1 ? force1[j] : force0[j])) {
                if (val[k] == 1 - bj) return false;
                if (val[k] == -1) queue.push_back({k, bj});
            }
        }
        return true;
    };

    auto dfs = [&](auto&& self, int next) -> void {
        if (++visited > opt.node_budget) throw SolverError("exact_dbcre: search budget exhausted");
        if (cost >= best - 1e-12) return;
        if (cnt[1] > hi || cnt[0] > hi) return;
        while (next < n && val[next] != -1) ++next;
        if (next == n) {
            if (cnt[1] >= lo && cnt[0] >= lo) {
                best = cost;
                best_x.assign(n, 0);
                for (int v = 0; v < n; ++v) best_x[v] = static_cast<std::uint8_t>(val[v]);
            }
            return;
        }
        for (int b = 0; b <= 1; ++b) {
            std::size_t mark = trail.size();
            if (assign(next, b)) self(self, next + 1);
            undo_to(mark);
        }
    };
    dfs(dfs, 0);
    if (best_x.empty()) return std::nullopt;
    return make_cut(inst, best_x);
}

}  // namespace dmt

#endif
