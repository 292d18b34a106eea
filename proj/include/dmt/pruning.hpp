#ifndef DMT_PRUNING_HPP
#define DMT_PRUNING_HPP

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "complex.hpp"
#include "gadget.hpp"
#include "mmup.hpp"
#include "morse.hpp"

namespace dmt {

namespace detail {

inline int alive_cofaces(const SimplicialComplex& k, const std::vector<char>& alive, int c, int* last = nullptr) {
    int n = 0;
    for (int z : k.cofaces(c))
        if (alive[z]) {
            ++n;
            if (last) *last = z;
        }
    return n;
}

inline std::vector<int> boundary_cells(const SimplicialComplex& k, const std::vector<char>& alive, int d) {
    std::vector<int> out;
    for (int c = k.first(d); c < k.first(d) + k.count(d); ++c) {
        if (!alive[c]) continue;
        for (int f : k.faces(c)) {
            int last = -1;
            if (alive[f] && alive_cofaces(k, alive, f, &last) == 1 && last == c) {
                out.push_back(c);
                break;
            }
        }
    }
    return out;
}

}  // namespace detail

// d-simplices with at least one face whose only coface is that simplex.
inline std::vector<int> find_boundary(const SimplicialComplex& k, int d) {
    return detail::boundary_cells(k, std::vector<char>(k.size(), 1), d);
}

struct PrunePair {
    int dim;  // dimension of eta
    int rho;  // free face
    int eta;  // its unique coface
};

struct PruneResult {
    SimplicialComplex core;
    std::vector<int> core_cells;  // ids in the input complex
    std::vector<PrunePair> trace;
    std::vector<int> per_dim;     // pairs removed by dimension of eta
    Dgvf seed;

    Prescriptions forced(const SimplicialComplex& k) const {
        auto h = build_hasse(k);
        std::map<std::pair<int, int>, int> id;
        for (int e = 0; e < h.edge_count(); ++e) id[h.edges[e]] = e;
        Prescriptions p;
        for (const auto& t : trace) p.forced.push_back(id.at({t.rho, t.eta}));
        return p;
    }
};

// From the top dimension down: a FIFO queue of d-simplices with a free face;
// the dequeued simplex is removed together with its first free face, and the
// d-simplices sharing its remaining faces are queued again.
inline PruneResult prune_boundary(const SimplicialComplex& k) {
    PruneResult r;
    std::vector<char> alive(k.size(), 1);
    const int D = k.dimension();
    r.per_dim.assign(std::max(1, D + 1), 0);
    for (int d = D; d >= 1; --d) {
        auto b = detail::boundary_cells(k, alive, d);
        std::deque<int> q(b.begin(), b.end());
        while (!q.empty()) {
            const int w = q.front();
            q.pop_front();
            if (!alive[w] || detail::alive_cofaces(k, alive, w) != 0) continue;
            int rho = -1;
            for (int f : k.faces(w)) {
                int last = -1;
                if (alive[f] && detail::alive_cofaces(k, alive, f, &last) == 1 && last == w) {
                    rho = f;
                    break;
                }
            }
            if (rho < 0) continue;
            alive[rho] = alive[w] = 0;
            r.trace.push_back({d, rho, w});
            ++r.per_dim[d];
            for (int f : k.faces(w)) {
                if (!alive[f]) continue;
                for (int z : k.cofaces(f))
                    if (alive[z]) q.push_back(z);
            }
        }
    }
    std::vector<std::pair<int, int>> pairs;
    for (const auto& t : r.trace) pairs.emplace_back(t.rho, t.eta);
    r.seed = extract_dgvf(k, pairs);
    for (int c = 0; c < k.size(); ++c)
        if (alive[c]) r.core_cells.push_back(c);
    // alive cells form a subcomplex, so the closure adds nothing
    std::vector<std::vector<int>> s;
    for (int c : r.core_cells) s.push_back(k.vertices(c));
    r.core = SimplicialComplex::from_simplices(s, std::max(0, D));
    return r;
}

inline std::string format_trace(const std::vector<PrunePair>& trace) {
    std::ostringstream os;
    for (const auto& t : trace) os << t.dim << ' ' << t.rho << ' ' << t.eta << '\n';
    return os.str();
}

struct CoreReport {
    std::vector<std::pair<int, int>> dominated;  // (dominator v1, dominated v2) as vertex labels
    bool ok() const { return dominated.empty(); }
};

// v1 dominates v2 when every maximal simplex containing v2 also contains v1.
inline CoreReport check_core(const SimplicialComplex& k) {
    CoreReport r;
    std::vector<int> verts;
    for (int c = 0; c < k.count(0); ++c) verts.push_back(k.vertices(c)[0]);
    std::map<int, std::vector<int>> star;  // vertex -> maximal simplices containing it
    for (int m : k.maximal())
        for (int v : k.vertices(m)) star[v].push_back(m);
    for (int v2 : verts)
        for (int v1 : verts) {
            if (v1 == v2) continue;
            bool dom = true;
            for (int m : star[v2]) {
                const auto& vs = k.vertices(m);
                if (!std::binary_search(vs.begin(), vs.end(), v1)) {
                    dom = false;
                    break;
                }
            }
            if (dom) r.dominated.emplace_back(v1, v2);
        }
    return r;
}

// MMUP on the whole complex with the collapse pairs forced.
inline MmupResult solve_mmup_pruned(const SimplicialComplex& k, const PruneResult& pr, const MmupConfig& cfg = {}) {
    auto p = pr.forced(k);
    return solve_mmup(k, cfg, &p);
}

}  // namespace dmt

#endif
