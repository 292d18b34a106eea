#ifndef DMT_POP_SOLVER_HPP
#define DMT_POP_SOLVER_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cut.hpp"
#include "exact_cut.hpp"
#include "gadget.hpp"
#include "graph.hpp"

namespace dmt {

struct PopConfig {
    double balance_c = 1.0 / 3.0;
    std::uint64_t seed = 1;
    int max_exact_size = 14;  // subproblems this small are ordered exactly
    bool reinsert = true;     // greedy pass restoring rejected up edges
};

struct RecursionNode {
    int depth = 0;
    int size = 0;
    int size_a = 0;  // 0 for leaves
    int size_b = 0;
    double cost = 0.0;  // cut cost, or the leaf's internal cost
    double balance = 0.0;
    bool leaf = false;
    std::string solver;
};

struct RecursionTrace {
    std::vector<RecursionNode> nodes;  // preorder

    double total_cut_cost() const {
        double s = 0;
        for (const auto& n : nodes)
            if (!n.leaf) s += n.cost;
        return s;
    }
    double total_leaf_cost() const {
        double s = 0;
        for (const auto& n : nodes)
            if (n.leaf) s += n.cost;
        return s;
    }
    int depth() const {
        int d = 0;
        for (const auto& n : nodes) d = std::max(d, n.depth);
        return d;
    }
    // Summed cost of the cuts made at each recursion depth.
    std::vector<double> level_costs() const {
        std::vector<double> c(depth() + 1, 0.0);
        for (const auto& n : nodes) c[n.depth] += n.cost;
        return c;
    }
};

struct PopResult {
    PopSolution solution;
    RecursionTrace trace;
    std::vector<int> order;  // assembled linear order of gadget nodes
    int rejected = 0;        // free up edges rejected (after reinsertion)
    int reinserted = 0;      // rejected edges restored by the greedy pass
};

namespace detail {

// Gadget arcs that constrain a linear order: rigid arcs must point forward, and
// each free pair pays 1 when its top precedes its bottom.
struct OrderGraph {
    int n = 0;
    std::vector<std::vector<int>> rigid_out, rigid_in;
    std::vector<std::pair<int, int>> cost_arcs;  // (top, bottom) of free pairs
    std::vector<std::pair<int, int>> forbidden;  // reversed rigid arcs

    explicit OrderGraph(const PopInstance& inst) : n(inst.node_count), rigid_out(n), rigid_in(n) {
        for (const auto& e : inst.edges) {
            if (e.kind == EdgeKind::Rigid) {
                rigid_out[e.src].push_back(e.dst);
                rigid_in[e.dst].push_back(e.src);
                forbidden.push_back({e.dst, e.src});
            }
        }
        for (int e = 0; e < inst.hasse_edge_count; ++e)
            if (inst.prescribed[e] == 0) cost_arcs.push_back({top_node(e), bottom_node(e)});
    }
};

// Exact optimal linear order of a small node set by dynamic programming over subsets.
inline std::vector<int> exact_order(const OrderGraph& g, const std::vector<int>& nodes,
                                    const std::vector<int>& local, double& cost_out) {
    const int m = static_cast<int>(nodes.size());
    std::vector<std::uint32_t> pred(m, 0), costin(m, 0);
    for (int i = 0; i < m; ++i)
        for (int u : g.rigid_in[nodes[i]])
            if (local[u] >= 0) pred[i] |= 1u << local[u];
    for (auto [t, b] : g.cost_arcs)
        if (local[t] >= 0 && local[b] >= 0) costin[local[b]] |= 1u << local[t];
    const std::uint32_t full = (m == 32) ? 0xffffffffu : ((1u << m) - 1);
    constexpr int inf = std::numeric_limits<int>::max();
    std::vector<int> dp(std::size_t(1) << m, inf);
    std::vector<signed char> last(std::size_t(1) << m, -1);
    dp[0] = 0;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
        if (dp[mask] == inf) continue;
        for (int v = 0; v < m; ++v) {
            if (mask & (1u << v)) continue;
            if ((pred[v] & mask) != pred[v]) continue;
            int c = dp[mask] + std::popcount(costin[v] & mask);
            std::uint32_t nm = mask | (1u << v);
            if (c < dp[nm]) {
                dp[nm] = c;
                last[nm] = static_cast<signed char>(v);
            }
        }
    }
    if (dp[full] == inf) throw InfeasibleError("rigid arcs form a cycle inside a subproblem");
    std::vector<int> order(m);
    std::uint32_t mask = full;
    for (int k = m - 1; k >= 0; --k) {
        int v = last[mask];
        order[k] = nodes[v];
        mask &= ~(1u << v);
    }
    cost_out = dp[full];
    return order;
}

inline CutInstance sub_cut_instance(const OrderGraph& g, const std::vector<int>& nodes,
                                    const std::vector<int>& local, double c) {
    CutInstance ci;
    ci.n = static_cast<int>(nodes.size());
    ci.c = c;
    for (auto [t, b] : g.cost_arcs)
        if (local[t] >= 0 && local[b] >= 0) ci.arcs.push_back({local[t], local[b], 1.0});
    for (auto [y, x] : g.forbidden)
        if (local[y] >= 0 && local[x] >= 0) ci.forbidden.push_back({local[y], local[x]});
    return ci;
}

}  // namespace detail

class ExactDbcreSolver : public DbcreSolver {
public:
    explicit ExactDbcreSolver(ExactCutOptions opt = {}) : opt_(opt) {}
    std::string name() const override { return "exact"; }
    std::optional<DirectedCut> solve(const CutInstance& inst, Rng&) const override { return exact_dbcre(inst, opt_); }

private:
    ExactCutOptions opt_;
};

inline PopSolution solution_from_order(const PopInstance& inst, const std::vector<int>& order) {
    std::vector<int> pos(inst.node_count, -1);
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    std::vector<std::uint8_t> up(inst.hasse_edge_count, 0);
    for (int e = 0; e < inst.hasse_edge_count; ++e) up[e] = pos[bottom_node(e)] < pos[top_node(e)];
    return PopSolution::from_orientation(inst, std::move(up));
}

// Walks the rejected free pairs in index order and turns each back up when its
// top cannot reach its bottom. Bottoms have no outgoing arcs apart from their
// own up arc, so down arcs never lie on a path and can be left out.
inline int reinsert_up_edges(const PopInstance& inst, PopSolution& sol) {
    Adjacency adj(inst.node_count);
    for (const auto& e : inst.edges)
        if (e.kind == EdgeKind::Rigid) adj[e.src].push_back(e.dst);
    for (int e = 0; e < inst.hasse_edge_count; ++e)
        if (inst.prescribed[e] == 0 && sol.up[e]) adj[bottom_node(e)].push_back(top_node(e));
    std::vector<char> mark(inst.node_count, 0);
    int added = 0;
    for (int e = 0; e < inst.hasse_edge_count; ++e) {
        if (inst.prescribed[e] != 0 || sol.up[e]) continue;
        if (reaches(adj, top_node(e), bottom_node(e), mark)) continue;
        adj[bottom_node(e)].push_back(top_node(e));
        sol.up[e] = 1;
        ++added;
    }
    if (added) sol = PopSolution::from_orientation(inst, sol.up);
    return added;
}

// Recursive balanced-cut driver. The source side of every cut precedes its sink
// side; subproblems of at most max_exact_size nodes are ordered exactly.
inline PopResult solve_min_pop(const PopInstance& inst, const DbcreSolver& solver, const PopConfig& cfg = {}) {
    if (!(cfg.balance_c > 0.0 && cfg.balance_c <= 0.5)) throw std::invalid_argument("balance_c must lie in (0, 1/2]");
    if (cfg.max_exact_size < 1 || cfg.max_exact_size > 20) throw std::invalid_argument("max_exact_size must lie in [1, 20]");
    detail::OrderGraph g(inst);
    Rng rng(cfg.seed);
    PopResult res;
    std::vector<int> local(inst.node_count, -1);

    auto rec = [&](auto&& self, const std::vector<int>& nodes, int depth) -> std::vector<int> {
        for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<int>(i);
        RecursionNode rn;
        rn.depth = depth;
        rn.size = static_cast<int>(nodes.size());
        if (rn.size <= cfg.max_exact_size) {
            double c = 0;
            auto order = detail::exact_order(g, nodes, local, c);
            for (int v : nodes) local[v] = -1;
            rn.leaf = true;
            rn.cost = c;
            rn.solver = "exact-order";
            res.trace.nodes.push_back(rn);
            return order;
        }
        CutInstance ci = detail::sub_cut_instance(g, nodes, local, cfg.balance_c);
        for (int v : nodes) local[v] = -1;
        auto cut = solver.solve(ci, rng);
        if (!cut) throw SolverError("solver '" + solver.name() + "' found no balanced cut at depth " + std::to_string(depth));
        auto x = cut->indicator(ci.n);
        if (forbidden_cut_count(ci, x) > 0)
            throw SolverError("solver '" + solver.name() + "' cut a forbidden arc at depth " + std::to_string(depth));
        const int need = static_cast<int>(std::floor(cfg.balance_c / 2.0 * ci.n));
        const int small = static_cast<int>(std::min(cut->side_A.size(), cut->side_B.size()));
        if (small < std::max(1, need))
            throw SolverError("solver '" + solver.name() + "' returned an unbalanced cut at depth " + std::to_string(depth));
        rn.size_a = static_cast<int>(cut->side_A.size());
        rn.size_b = static_cast<int>(cut->side_B.size());
        rn.cost = cut_cost(ci, x);
        rn.balance = static_cast<double>(small) / ci.n;
        rn.solver = solver.name();
        res.trace.nodes.push_back(rn);
        std::vector<int> a, b;
        for (int v : cut->side_A) a.push_back(nodes[v]);
        for (int v : cut->side_B) b.push_back(nodes[v]);
        auto oa = self(self, a, depth + 1);
        auto ob = self(self, b, depth + 1);
        oa.insert(oa.end(), ob.begin(), ob.end());
        return oa;
    };

    std::vector<int> all(inst.node_count);
    for (int v = 0; v < inst.node_count; ++v) all[v] = v;
    res.order = rec(rec, all, 0);
    res.solution = solution_from_order(inst, res.order);
    if (cfg.reinsert) res.reinserted = reinsert_up_edges(inst, res.solution);
    res.rejected = static_cast<int>(res.solution.removed.size());
    return res;
}

struct VerifyReport {
    std::vector<std::string> violations;
    std::vector<int> cycle;
    int objective = 0;  // critical cells of the induced matching (meaningful when feasible)
    bool ok() const { return violations.empty(); }
};

inline VerifyReport verify_solution(const PopInstance& inst, const PopSolution& sol) {
    VerifyReport r;
    auto chk = check_pop_solution(inst, sol);
    r.violations = chk.violations;
    r.cycle = chk.cycle;
    if (static_cast<int>(sol.up.size()) == inst.hasse_edge_count) r.objective = mmup_objective(inst, sol);
    return r;
}

// Exhaustive min-POP: branch and bound over the free pairs, keeping an up edge
// only while the top cannot already reach the bottom.
inline PopSolution exact_min_pop(const PopInstance& inst, long long node_budget = 200'000'000) {
    Adjacency adj(inst.node_count);
    for (const auto& e : inst.edges)
        if (e.kind == EdgeKind::Rigid) adj[e.src].push_back(e.dst);
    std::vector<int> freep = inst.free_pairs();
    std::vector<int> matched(inst.cell_count, 0);
    for (int e = 0; e < inst.hasse_edge_count; ++e)
        if (inst.prescribed[e] == 1) {
            ++matched[inst.hasse_edges[e].first];
            ++matched[inst.hasse_edges[e].second];
        }
    int free_cells = 0;
    for (int v = 0; v < inst.cell_count; ++v) free_cells += matched[v] == 0;
    std::vector<std::uint8_t> cur(inst.hasse_edge_count, 0), best;
    for (int e = 0; e < inst.hasse_edge_count; ++e) cur[e] = inst.prescribed[e] == 1;
    int best_kept = -1;
    std::vector<char> mark(inst.node_count, 0);
    long long visited = 0;
    const int m = static_cast<int>(freep.size());

    auto dfs = [&](auto&& self, int i, int kept) -> void {
        if (++visited > node_budget) throw SolverError("exact_min_pop: search budget exhausted");
        int possible = 0;
        for (int j = i; j < m; ++j) {
            auto [a, b] = inst.hasse_edges[freep[j]];
            possible += (matched[a] == 0 && matched[b] == 0);
        }
        possible = std::min(possible, free_cells / 2);
        if (kept + possible <= best_kept) return;
        if (i == m) {
            best_kept = kept;
            best = cur;
            return;
        }
        int e = freep[i];
        auto [a, b] = inst.hasse_edges[e];
        if (!reaches(adj, top_node(e), bottom_node(e), mark)) {
            adj[bottom_node(e)].push_back(top_node(e));
            cur[e] = 1;
            ++matched[a];
            ++matched[b];
            free_cells -= (matched[a] == 1) + (matched[b] == 1);
            self(self, i + 1, kept + 1);
            free_cells += (matched[a] == 1) + (matched[b] == 1);
            --matched[a];
            --matched[b];
            cur[e] = 0;
            adj[bottom_node(e)].pop_back();
        }
        self(self, i + 1, kept);
    };
    dfs(dfs, 0, 0);
    return PopSolution::from_orientation(inst, best);
}

}  // namespace dmt

#endif
