#ifndef DMT_GADGET_HPP
#define DMT_GADGET_HPP

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "complex.hpp"
#include "graph.hpp"

namespace dmt {

// An instance that cannot have any feasible solution (e.g. a rigid cycle).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EdgeKind { UpNormal, DownNormal, Rigid, Forbidden };
enum class GadgetMode { MatchingGadget, PseudoFft };
enum class NodeRole { Bottom, Top, From, To };

inline const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::UpNormal: return "UP_NORMAL";
        case EdgeKind::DownNormal: return "DOWN_NORMAL";
        case EdgeKind::Rigid: return "RIGID";
        case EdgeKind::Forbidden: return "FORBIDDEN";
    }
    return "?";
}

struct GadgetEdge {
    int src = -1;
    int dst = -1;
    EdgeKind kind = EdgeKind::Rigid;
    int origin = -1;  // Hasse edge id for normal pairs and prescriptions
};

// Node numbering shared by every stage: Hasse edge e owns the isolated pair
// bottom(e) = 2e (clone of its face) and top(e) = 2e + 1 (clone of its coface).
inline int bottom_node(int e) { return 2 * e; }
inline int top_node(int e) { return 2 * e + 1; }

struct DirectedMultigraph {
    int node_count = 0;
    std::vector<std::pair<int, int>> arcs;
};

// Arc 2e is face -> coface, arc 2e+1 is coface -> face.
inline DirectedMultigraph duplicate_edges(const HasseGraph& h) {
    DirectedMultigraph g;
    g.node_count = h.node_count();
    for (auto [a, b] : h.edges) {
        g.arcs.emplace_back(a, b);
        g.arcs.emplace_back(b, a);
    }
    return g;
}

struct IsolatedPairs {
    int node_count = 0;
    std::vector<int> clone_of;      // gadget node -> Hasse node it copies
    std::vector<GadgetEdge> edges;  // per Hasse edge: up (bottom->top), down (top->bottom)
};

inline IsolatedPairs isolate_edge_pairs(const DirectedMultigraph& h1) {
    IsolatedPairs p;
    const int m = static_cast<int>(h1.arcs.size()) / 2;
    p.node_count = 2 * m;
    p.clone_of.resize(p.node_count);
    for (int e = 0; e < m; ++e) {
        auto [face, coface] = h1.arcs[2 * e];
        p.clone_of[bottom_node(e)] = face;
        p.clone_of[top_node(e)] = coface;
        p.edges.push_back({bottom_node(e), top_node(e), EdgeKind::UpNormal, e});
        p.edges.push_back({top_node(e), bottom_node(e), EdgeKind::DownNormal, e});
    }
    return p;
}

// CR-edges: top(e) -> bottom(e') whenever e = (a,b), e' = (a',b'), a' a face of
// b, a' != a and b' != b. These mimic one hop of a V-path.
inline std::vector<GadgetEdge> add_cycle_gadget(const IsolatedPairs&, const HasseGraph& h) {
    std::vector<GadgetEdge> out;
    for (int e = 0; e < h.edge_count(); ++e) {
        auto [a, b] = h.edges[e];
        for (int f : h.incident[b]) {
            int a2 = h.edges[f].first;
            if (h.edges[f].second != b || a2 == a) continue;
            for (int e2 : h.incident[a2]) {
                if (h.edges[e2].first != a2 || h.edges[e2].second == b) continue;
                out.push_back({top_node(e), bottom_node(e2), EdgeKind::Rigid, -1});
            }
        }
    }
    return out;
}

// MR-edges: every ordered pair of distinct Hasse edges sharing a node.
inline std::vector<GadgetEdge> add_matching_gadget(const IsolatedPairs&, const HasseGraph& h) {
    std::vector<GadgetEdge> out;
    for (int v = 0; v < h.node_count(); ++v) {
        const auto& inc = h.incident[v];
        for (int i : inc)
            for (int j : inc)
                if (i != j) out.push_back({top_node(i), bottom_node(j), EdgeKind::Rigid, -1});
    }
    return out;
}

struct FftGadget {
    int new_nodes = 0;  // ids first_id .. first_id + new_nodes - 1
    std::vector<GadgetEdge> edges;
    std::vector<int> level_sizes;
    std::vector<std::vector<int>> from_ids, to_ids;  // [level][index]
    // Leaf indices carried by each from/to node (label merging and inheritance).
    std::vector<std::vector<std::vector<int>>> from_labels, to_labels;

    int from_node_count() const {
        int s = 0;
        for (int x : level_sizes) s += x;
        return s;
    }
};

// Pseudo-FFT sub-gadget on N isolated pairs: level-1 from-nodes are the tops,
// level-1 to-nodes the bottoms. Consecutive nodes are paired left to right; an
// odd last node is passed up unchanged. Levels shrink until one of size 2.
inline FftGadget build_pseudo_fft(const std::vector<int>& tops, const std::vector<int>& bottoms, int first_id) {
    FftGadget g;
    const int n = static_cast<int>(tops.size());
    if (n != static_cast<int>(bottoms.size())) throw std::invalid_argument("build_pseudo_fft: size mismatch");
    if (n < 2) return g;
    int next = first_id;
    g.from_ids.push_back(tops);
    g.to_ids.push_back(bottoms);
    g.level_sizes.push_back(n);
    std::vector<std::vector<int>> leaf(n);
    for (int i = 0; i < n; ++i) leaf[i] = {i};
    g.from_labels.push_back(leaf);
    g.to_labels.push_back(leaf);
    while (g.level_sizes.back() > 2) {
        int m = (g.level_sizes.back() + 1) / 2;
        std::vector<int> f(m), t(m);
        for (int i = 0; i < m; ++i) f[i] = next++;
        for (int i = 0; i < m; ++i) t[i] = next++;
        g.from_ids.push_back(f);
        g.to_ids.push_back(t);
        g.level_sizes.push_back(m);
    }
    g.new_nodes = next - first_id;
    auto rigid = [&](int u, int v) { g.edges.push_back({u, v, EdgeKind::Rigid, -1}); };
    const int levels = static_cast<int>(g.level_sizes.size());
    for (int l = 0; l + 1 < levels; ++l) {
        const auto& fl = g.from_ids[l];
        const auto& tl = g.to_ids[l];
        const auto& fu = g.from_ids[l + 1];
        const auto& tu = g.to_ids[l + 1];
        const int m = g.level_sizes[l];
        std::vector<std::vector<int>> fl_up, tl_up;
        for (int i = 0, j = 0; i < m; ++j) {
            if (i + 1 < m) {
                rigid(fl[i], fu[j]);
                rigid(fl[i + 1], fu[j]);
                rigid(fl[i], tl[i + 1]);
                rigid(fl[i + 1], tl[i]);
                rigid(tu[j], tl[i]);
                rigid(tu[j], tl[i + 1]);
                auto merged = g.from_labels[l][i];
                merged.insert(merged.end(), g.from_labels[l][i + 1].begin(), g.from_labels[l][i + 1].end());
                fl_up.push_back(merged);
                auto tmerged = g.to_labels[l][i];
                tmerged.insert(tmerged.end(), g.to_labels[l][i + 1].begin(), g.to_labels[l][i + 1].end());
                tl_up.push_back(tmerged);
                i += 2;
            } else {
                rigid(fl[i], fu[j]);
                rigid(tu[j], tl[i]);
                fl_up.push_back(g.from_labels[l][i]);
                tl_up.push_back(g.to_labels[l][i]);
                i += 1;
            }
        }
        g.from_labels.push_back(fl_up);
        g.to_labels.push_back(tl_up);
    }
    const auto& ff = g.from_ids.back();
    const auto& tt = g.to_ids.back();
    rigid(ff[0], tt[1]);
    rigid(ff[1], tt[0]);
    return g;
}

// MMFEP prescriptions on Hasse edges: forced pairs must be matched, prohibited
// ones must not.
struct Prescriptions {
    std::vector<int> forced;
    std::vector<int> prohibited;
};

struct PopInstance {
    GadgetMode mode = GadgetMode::PseudoFft;
    int node_count = 0;
    std::vector<NodeRole> role;
    std::vector<int> clone_of;  // Hasse node for pair nodes, -1 for tree nodes
    std::vector<GadgetEdge> edges;
    int hasse_edge_count = 0;
    int cell_count = 0;
    std::vector<std::pair<int, int>> hasse_edges;  // (face, coface)
    std::vector<int> degree_terms;                 // d(v) per Hasse node
    std::vector<int> up_edge, down_edge;           // per Hasse edge: index into edges
    std::vector<std::int8_t> prescribed;           // per Hasse edge: 0 free, +1 forced, -1 prohibited

    int count(EdgeKind k) const {
        int c = 0;
        for (const auto& e : edges) c += e.kind == k;
        return c;
    }
    int rigid_count() const { return count(EdgeKind::Rigid); }
    std::vector<int> free_pairs() const {
        std::vector<int> out;
        for (int e = 0; e < hasse_edge_count; ++e)
            if (prescribed[e] == 0) out.push_back(e);
        return out;
    }
    Adjacency rigid_adjacency() const {
        Adjacency adj(node_count);
        for (const auto& e : edges)
            if (e.kind == EdgeKind::Rigid) adj[e.src].push_back(e.dst);
        return adj;
    }
};

// tree_threshold 0 picks, per star, whichever of trees or plain arcs adds fewer
// nodes plus rigid arcs. A positive value builds trees for every star with at least that
// many pairs.
struct GadgetOptions {
    int tree_threshold = 0;
};

inline PopInstance reduce_mmup_to_pop(const HasseGraph& h, GadgetMode mode, const Prescriptions* extra = nullptr,
                                      const GadgetOptions& gopt = {}) {
    PopInstance inst;
    inst.mode = mode;
    inst.hasse_edge_count = h.edge_count();
    inst.cell_count = h.node_count();
    inst.hasse_edges = h.edges;
    inst.degree_terms.resize(h.node_count());
    for (int v = 0; v < h.node_count(); ++v) inst.degree_terms[v] = h.degree(v);
    inst.prescribed.assign(h.edge_count(), 0);
    if (extra) {
        for (int e : extra->forced) {
            if (e < 0 || e >= h.edge_count()) throw InputError("prescription references unknown Hasse edge");
            inst.prescribed[e] = 1;
        }
        for (int e : extra->prohibited) {
            if (e < 0 || e >= h.edge_count()) throw InputError("prescription references unknown Hasse edge");
            if (inst.prescribed[e] == 1) throw InfeasibleError("Hasse edge both forced and prohibited");
            inst.prescribed[e] = -1;
        }
    }

    auto h1 = duplicate_edges(h);
    auto h2 = isolate_edge_pairs(h1);
    inst.node_count = h2.node_count;
    inst.clone_of = h2.clone_of;
    inst.role.resize(h2.node_count);
    for (int e = 0; e < h.edge_count(); ++e) {
        inst.role[bottom_node(e)] = NodeRole::Bottom;
        inst.role[top_node(e)] = NodeRole::Top;
    }
    inst.up_edge.resize(h.edge_count());
    inst.down_edge.resize(h.edge_count());
    for (int e = 0; e < h.edge_count(); ++e) {
        GadgetEdge up = h2.edges[2 * e];
        GadgetEdge down = h2.edges[2 * e + 1];
        if (inst.prescribed[e] == 1) {
            up.kind = EdgeKind::Rigid;
            down.kind = EdgeKind::Forbidden;
        } else if (inst.prescribed[e] == -1) {
            up.kind = EdgeKind::Forbidden;
            down.kind = EdgeKind::Rigid;
        }
        inst.up_edge[e] = static_cast<int>(inst.edges.size());
        inst.edges.push_back(up);
        inst.down_edge[e] = static_cast<int>(inst.edges.size());
        inst.edges.push_back(down);
    }

    std::vector<GadgetEdge> rigid;
    auto adopt_tree = [&](const FftGadget& fft) {
        for (std::size_t l = 1; l < fft.from_ids.size(); ++l) {
            for (std::size_t i = 0; i < fft.from_ids[l].size(); ++i) {
                inst.role.push_back(NodeRole::From);
                inst.clone_of.push_back(-1);
            }
            for (std::size_t i = 0; i < fft.to_ids[l].size(); ++i) {
                inst.role.push_back(NodeRole::To);
                inst.clone_of.push_back(-1);
            }
        }
        inst.node_count += fft.new_nodes;
        rigid.insert(rigid.end(), fft.edges.begin(), fft.edges.end());
    };
    if (mode == GadgetMode::MatchingGadget) {
        rigid = add_cycle_gadget(h2, h);
        auto mr = add_matching_gadget(h2, h);
        rigid.insert(rigid.end(), mr.begin(), mr.end());
    } else {
        for (int v = 0; v < h.node_count(); ++v) {
            const auto& inc = h.incident[v];
            if (inc.size() < 2) continue;
            std::vector<int> tops, bottoms;
            for (int e : inc) {
                tops.push_back(top_node(e));
                bottoms.push_back(bottom_node(e));
            }
            // small stars are cheaper as plain MR arcs with the same reachability
            auto fft = build_pseudo_fft(tops, bottoms, inst.node_count);
            const std::size_t n = inc.size();
            bool use_tree = gopt.tree_threshold > 0 ? static_cast<int>(n) >= gopt.tree_threshold
                                                    : fft.edges.size() + fft.new_nodes < n * (n - 1);
            if (use_tree) {
                adopt_tree(fft);
            } else {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        if (i != j) rigid.push_back({tops[i], bottoms[j], EdgeKind::Rigid, -1});
            }
        }
        // CR reachability per face a': sources of slot i are the tops of (a,b_i),
        // a != a', and they must reach bottom(a',b_j) for every j != i. When the
        // direct arcs cost more, route them through a relay node per slot and a
        // pseudo-FFT tree over the slots, which gives the same top->bottom
        // reachability.
        for (int a2 = 0; a2 < h.node_count(); ++a2) {
            std::vector<int> ups;
            for (int e2 : h.incident[a2])
                if (h.edges[e2].first == a2) ups.push_back(e2);
            const int k = static_cast<int>(ups.size());
            if (k < 2) continue;
            std::vector<std::vector<int>> src(k);
            long long direct = 0, feed = 0;
            for (int i = 0; i < k; ++i) {
                int b = h.edges[ups[i]].second;
                for (int e : h.incident[b])
                    if (h.edges[e].second == b && h.edges[e].first != a2) src[i].push_back(top_node(e));
                direct += static_cast<long long>(src[i].size()) * (k - 1);
                feed += static_cast<long long>(src[i].size());
            }
            // a slot with a single source uses that top directly as its leaf
            std::vector<int> leaves(k), bottoms(k);
            int relays = 0;
            for (int i = 0; i < k; ++i) {
                bottoms[i] = bottom_node(ups[i]);
                if (src[i].size() == 1) {
                    leaves[i] = src[i][0];
                    --feed;
                } else {
                    leaves[i] = inst.node_count + relays++;
                }
            }
            auto fft = build_pseudo_fft(leaves, bottoms, inst.node_count + relays);
            bool use_tree = gopt.tree_threshold > 0 ? k >= gopt.tree_threshold
                                                    : feed + relays + static_cast<long long>(fft.edges.size() + fft.new_nodes) < direct;
            if (use_tree) {
                for (int i = 0; i < k; ++i) {
                    if (src[i].size() == 1) continue;
                    inst.role.push_back(NodeRole::From);
                    inst.clone_of.push_back(-1);
                    for (int t : src[i]) rigid.push_back({t, leaves[i], EdgeKind::Rigid, -1});
                }
                inst.node_count += relays;
                adopt_tree(fft);
            } else {
                for (int i = 0; i < k; ++i)
                    for (int t : src[i])
                        for (int j = 0; j < k; ++j)
                            if (j != i) rigid.push_back({t, bottoms[j], EdgeKind::Rigid, -1});
            }
        }
    }
    // the reverse of a rigid arc is implicitly forbidden; it is not stored
    for (const auto& r : rigid) inst.edges.push_back(r);

    auto cyc = find_cycle(inst.rigid_adjacency());
    if (!cyc.empty()) throw InfeasibleError("prescriptions create a rigid cycle (infeasible MMFEP instance)");
    return inst;
}

inline PopInstance reduce_mmup_to_pop(const SimplicialComplex& k, GadgetMode mode,
                                      const Prescriptions* extra = nullptr, const GadgetOptions& gopt = {}) {
    return reduce_mmup_to_pop(build_hasse(k), mode, extra, gopt);
}

// One line per edge: kind src dst [origin].
inline std::string dump_gadget(const PopInstance& inst) {
    std::ostringstream os;
    for (const auto& e : inst.edges) {
        os << to_string(e.kind) << ' ' << e.src << ' ' << e.dst;
        if (e.origin >= 0) os << ' ' << e.origin;
        os << '\n';
    }
    return os.str();
}

struct PopSolution {
    std::vector<std::uint8_t> up;  // per Hasse edge: 1 when the up orientation is kept
    std::vector<int> removed;      // free Hasse edges whose up edge was rejected

    static PopSolution from_orientation(const PopInstance& inst, std::vector<std::uint8_t> up) {
        PopSolution s;
        s.up = std::move(up);
        for (int e = 0; e < inst.hasse_edge_count; ++e)
            if (inst.prescribed[e] == 0 && !s.up[e]) s.removed.push_back(e);
        return s;
    }
};

// Rigid edges plus the chosen orientation of every pair.
inline Adjacency solution_graph(const PopInstance& inst, const PopSolution& sol) {
    Adjacency adj(inst.node_count);
    for (const auto& e : inst.edges)
        if (e.kind == EdgeKind::Rigid && !(e.origin >= 0 && inst.prescribed[e.origin] != 0)) adj[e.src].push_back(e.dst);
    for (int e = 0; e < inst.hasse_edge_count; ++e) {
        if (sol.up[e])
            adj[bottom_node(e)].push_back(top_node(e));
        else
            adj[top_node(e)].push_back(bottom_node(e));
    }
    return adj;
}

struct PopCheck {
    std::vector<std::string> violations;
    std::vector<int> cycle;  // gadget nodes of a directed cycle, if any
    bool ok() const { return violations.empty(); }
};

inline PopCheck check_pop_solution(const PopInstance& inst, const PopSolution& sol) {
    PopCheck r;
    if (static_cast<int>(sol.up.size()) != inst.hasse_edge_count) {
        r.violations.push_back("orientation vector has wrong length");
        return r;
    }
    for (int e = 0; e < inst.hasse_edge_count; ++e) {
        if (inst.prescribed[e] == 1 && !sol.up[e])
            r.violations.push_back("rigid edge " + std::to_string(bottom_node(e)) + "->" +
                                   std::to_string(top_node(e)) + " missing");
        if (inst.prescribed[e] == -1 && sol.up[e])
            r.violations.push_back("forbidden edge " + std::to_string(bottom_node(e)) + "->" +
                                   std::to_string(top_node(e)) + " included");
    }
    r.cycle = find_cycle(solution_graph(inst, sol));
    if (!r.cycle.empty()) r.violations.push_back("orientation has a directed cycle");
    return r;
}

// Upsilon(v) = #incident down edges - (d(v) - 1); sums to the number of unmatched cells.
inline int mmup_objective(const PopInstance& inst, const PopSolution& sol) {
    std::vector<int> down(inst.cell_count, 0);
    for (int e = 0; e < inst.hasse_edge_count; ++e)
        if (!sol.up[e]) {
            ++down[inst.hasse_edges[e].first];
            ++down[inst.hasse_edges[e].second];
        }
    int total = 0;
    for (int v = 0; v < inst.cell_count; ++v) total += down[v] - (inst.degree_terms[v] - 1);
    return total;
}

struct RecoveredMatching {
    std::vector<std::pair<int, int>> pairs;  // (face, coface)
    std::vector<int> hasse_edges;
    int critical_count = 0;
};

inline RecoveredMatching recover_matching(const PopInstance& inst, const PopSolution& sol) {
    auto chk = check_pop_solution(inst, sol);
    if (!chk.ok()) throw InfeasibleError("recover_matching: infeasible solution: " + chk.violations.front());
    RecoveredMatching m;
    for (int e = 0; e < inst.hasse_edge_count; ++e)
        if (sol.up[e]) {
            m.pairs.push_back(inst.hasse_edges[e]);
            m.hasse_edges.push_back(e);
        }
    m.critical_count = mmup_objective(inst, sol);
    return m;
}

}  // namespace dmt

#endif
