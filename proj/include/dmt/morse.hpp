#ifndef DMT_MORSE_HPP
#define DMT_MORSE_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "graph.hpp"

namespace dmt {

// The matching closes a V-path: cycle holds the cells of the closed path.
class GradientCycleError : public std::runtime_error {
public:
    GradientCycleError(const std::string& msg, std::vector<int> cycle) : std::runtime_error(msg), cycle(std::move(cycle)) {}
    std::vector<int> cycle;
};

// A cancellation precondition failed; the message names the clause.
class CancellationRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Discrete gradient vector field. up[c] is the coface c is paired with, down[c]
// the face; both -1 for a critical cell.
struct Dgvf {
    std::vector<int> up, down;
    std::vector<std::pair<int, int>> pairs;  // (face, coface), sorted
    std::vector<std::vector<int>> critical;  // per dimension, ascending ids

    int cell_count() const { return static_cast<int>(up.size()); }
    bool is_critical(int c) const { return up[c] < 0 && down[c] < 0; }
    int critical_count() const {
        int n = 0;
        for (const auto& c : critical) n += static_cast<int>(c.size());
        return n;
    }
    std::vector<int> morse_numbers() const {
        std::vector<int> m;
        for (const auto& c : critical) m.push_back(static_cast<int>(c.size()));
        return m;
    }
};

// Matched edges face->coface, all other Hasse edges coface->face.
inline Adjacency gradient_digraph(const SimplicialComplex& k, const Dgvf& v) {
    Adjacency adj(k.size());
    for (int s = 0; s < k.size(); ++s)
        for (int f : k.faces(s)) {
            if (v.up[f] == s)
                adj[f].push_back(s);
            else
                adj[s].push_back(f);
        }
    return adj;
}

namespace detail {

inline Dgvf assemble_dgvf(const SimplicialComplex& k, std::vector<std::pair<int, int>> pairs) {
    Dgvf v;
    v.up.assign(k.size(), -1);
    v.down.assign(k.size(), -1);
    for (auto [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= k.size() || b >= k.size()) throw InputError("gradient pair references unknown cell");
        if (!k.is_facet(a, b))
            throw InputError("gradient pair " + std::to_string(a) + " " + std::to_string(b) + " is not a face incidence");
        if (v.up[a] >= 0 || v.down[a] >= 0 || v.up[b] >= 0 || v.down[b] >= 0)
            throw InputError("cell occurs in more than one gradient pair (" + std::to_string(a) + " " +
                             std::to_string(b) + ")");
        v.up[a] = b;
        v.down[b] = a;
    }
    std::sort(pairs.begin(), pairs.end());
    v.pairs = std::move(pairs);
    v.critical.assign(std::max(0, k.dimension() + 1), {});
    for (int c = 0; c < k.size(); ++c)
        if (v.is_critical(c)) v.critical[k.dim(c)].push_back(c);
    return v;
}

}  // namespace detail

// Pairs are (face, coface) cell ids. Rejects non-incidences, doubly used cells
// and matchings that close a V-path.
inline Dgvf extract_dgvf(const SimplicialComplex& k, const std::vector<std::pair<int, int>>& pairs) {
    Dgvf v = detail::assemble_dgvf(k, pairs);
    auto cyc = find_cycle(gradient_digraph(k, v));
    if (!cyc.empty()) {
        std::string msg = "matching closes a V-path through cells";
        for (int c : cyc) msg += " " + std::to_string(c);
        throw GradientCycleError(msg, cyc);
    }
    return v;
}

inline Dgvf empty_dgvf(const SimplicialComplex& k) { return detail::assemble_dgvf(k, {}); }

// Cells sorted by an implicit discrete Morse function: F(cell) = its index.
// Faces precede cofaces except inside a gradient pair, where the face follows.
inline std::vector<int> topo_sort_dmf(const SimplicialComplex& k, const Dgvf& v) {
    auto order = topological_order(gradient_digraph(k, v));
    if (!order) throw GradientCycleError("gradient field is not acyclic", find_cycle(gradient_digraph(k, v)));
    std::reverse(order->begin(), order->end());
    return *order;
}

inline std::vector<int> dmf_values(const std::vector<int>& order) {
    std::vector<int> f(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) f[order[i]] = static_cast<int>(i);
    return f;
}

struct DmfCheck {
    int max_n1 = 0;  // cofaces with F <= F(cell)
    int max_n2 = 0;  // faces with F >= F(cell)
    bool ok() const { return max_n1 <= 1 && max_n2 <= 1; }
};

inline DmfCheck check_dmf(const SimplicialComplex& k, const std::vector<int>& f) {
    DmfCheck r;
    for (int s = 0; s < k.size(); ++s) {
        int n1 = 0, n2 = 0;
        for (int c : k.cofaces(s)) n1 += f[c] <= f[s];
        for (int c : k.faces(s)) n2 += f[c] >= f[s];
        r.max_n1 = std::max(r.max_n1, n1);
        r.max_n2 = std::max(r.max_n2, n2);
    }
    return r;
}

// Formal integer sum of cells, sorted by id, no zero entries.
using Chain = std::vector<std::pair<int, long long>>;

inline void add_scaled(Chain& acc, const Chain& x, long long k) {
    if (k == 0 || x.empty()) return;
    Chain out;
    out.reserve(acc.size() + x.size());
    std::size_t i = 0, j = 0;
    while (i < acc.size() || j < x.size()) {
        if (j == x.size() || (i < acc.size() && acc[i].first < x[j].first)) {
            out.push_back(acc[i++]);
        } else if (i == acc.size() || x[j].first < acc[i].first) {
            out.emplace_back(x[j].first, k * x[j].second);
            ++j;
        } else {
            long long s = acc[i].second + k * x[j].second;
            if (s != 0) out.emplace_back(acc[i].first, s);
            ++i;
            ++j;
        }
    }
    acc = std::move(out);
}

inline long long coefficient(const Chain& c, int cell) {
    auto it = std::lower_bound(c.begin(), c.end(), std::make_pair(cell, std::numeric_limits<long long>::min()));
    return (it != c.end() && it->first == cell) ? it->second : 0;
}

struct MorseBoundary {
    std::vector<std::vector<int>> critical;  // per dimension
    std::vector<int> index;                  // position of a critical cell within its dimension, else -1
    // gamma[x]: signed count of V-paths from the cell x to critical cells of its
    // own dimension. delta[x]: the same counted from the faces of x (for a
    // critical x this is its Morse boundary, the P_{alpha x} column).
    std::vector<Chain> gamma, delta;
    std::vector<SparseMatrix> matrices;  // matrices[q]: rows critical (q-1)-cells, cols critical q-cells; [0] unused

    const SparseMatrix& matrix(int q) const { return matrices.at(q); }
    long long multiplicity(int alpha, int beta) const { return coefficient(delta[beta], alpha); }
};

// Dynamic program over the ascending order. A critical cell flows to itself;
// the face of a gradient pair <x, b> flows to -<db,x> times what b's other
// faces flow to; the coface of a pair flows nowhere.
inline MorseBoundary compute_morse_boundary(const SimplicialComplex& k, const Dgvf& v, const std::vector<int>& order) {
    if (static_cast<int>(order.size()) != k.size()) throw std::invalid_argument("compute_morse_boundary: order has wrong length");
    MorseBoundary mb;
    mb.critical = v.critical;
    mb.index.assign(k.size(), -1);
    for (const auto& cs : mb.critical)
        for (std::size_t i = 0; i < cs.size(); ++i) mb.index[cs[i]] = static_cast<int>(i);
    mb.gamma.assign(k.size(), {});
    mb.delta.assign(k.size(), {});
    std::vector<char> done(k.size(), 0);
    for (int x : order) {
        const auto& f = k.faces(x);
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f[i] == v.down[x]) continue;
            if (!done[f[i]]) throw std::invalid_argument("compute_morse_boundary: order is not compatible with the field");
            add_scaled(mb.delta[x], mb.gamma[f[i]], (i % 2 == 0) ? 1 : -1);
        }
        if (v.is_critical(x)) {
            mb.gamma[x] = {{x, 1}};
        } else if (v.up[x] >= 0) {
            const int b = v.up[x];
            if (!done[b]) throw std::invalid_argument("compute_morse_boundary: order is not compatible with the field");
            add_scaled(mb.gamma[x], mb.delta[b], -k.incidence(x, b));
        }
        done[x] = 1;
    }
    const int D = k.dimension();
    mb.matrices.assign(std::max(1, D + 1), {});
    for (int q = 1; q <= D; ++q) {
        SparseMatrix& m = mb.matrices[q];
        m.rows = static_cast<int>(mb.critical[q - 1].size());
        m.cols = static_cast<int>(mb.critical[q].size());
        m.col.resize(m.cols);
        for (int c = 0; c < m.cols; ++c) {
            for (auto [cell, val] : mb.delta[mb.critical[q][c]]) m.col[c].emplace_back(mb.index[cell], val);
            std::sort(m.col[c].begin(), m.col[c].end());
        }
    }
    return mb;
}

inline MorseBoundary compute_morse_boundary(const SimplicialComplex& k, const Dgvf& v) {
    return compute_morse_boundary(k, v, topo_sort_dmf(k, v));
}

// d_q o d_{q+1} == 0 for every q.
inline bool boundary_squares_to_zero(const MorseBoundary& mb) {
    for (int q = 1; q + 1 < static_cast<int>(mb.matrices.size()); ++q) {
        const auto& a = mb.matrices[q];
        const auto& b = mb.matrices[q + 1];
        for (int c = 0; c < b.cols; ++c) {
            std::map<int, long long> acc;
            for (auto [mid, w] : b.col[c])
                for (auto [r, u] : a.col[mid]) acc[r] += w * u;
            for (auto [r, s] : acc)
                if (s != 0) return false;
        }
    }
    return true;
}

namespace detail {

// Number of V-paths (capped at cap) from the cell x, of the target's dimension,
// to target.
struct PathCounter {
    const SimplicialComplex& k;
    const Dgvf& v;
    int target;
    int cap;
    std::map<int, int> memo;

    int count(int x) {
        if (x == target) return 1;
        if (v.up[x] < 0) return 0;
        if (auto it = memo.find(x); it != memo.end()) return it->second;
        int n = 0;
        const int b = v.up[x];
        for (int y : k.faces(b)) {
            if (y == x) continue;
            n = std::min(cap, n + count(y));
        }
        memo[x] = n;
        return n;
    }
};

// Unique V-path from the faces of src to target, as alternating cells
// x0, b0, x1, b1, ..., target. Assumes the count is exactly 1.
inline std::vector<int> unique_path(const SimplicialComplex& k, const Dgvf& v, int src, int target) {
    PathCounter pc{k, v, target, 2, {}};
    std::vector<int> path;
    int x = -1;
    for (int f : k.faces(src))
        if (f != v.down[src] && pc.count(f) > 0) x = f;
    while (x != target) {
        path.push_back(x);
        const int b = v.up[x];
        path.push_back(b);
        int nx = -1;
        for (int y : k.faces(b))
            if (y != x && pc.count(y) > 0) nx = y;
        x = nx;
    }
    path.push_back(target);
    return path;
}

inline int paths_from_boundary(const SimplicialComplex& k, const Dgvf& v, int src, int target, int cap = 2) {
    PathCounter pc{k, v, target, cap, {}};
    int n = 0;
    for (int f : k.faces(src))
        if (f != v.down[src]) n = std::min(cap, n + pc.count(f));
    return n;
}

// Reverses the path from the faces of src to target: src and target leave the
// critical set, the pairs along the path shift by one.
inline std::vector<std::pair<int, int>> reversed_pairs(const Dgvf& v, const std::vector<int>& path, int src) {
    std::vector<std::pair<int, int>> pairs;
    std::map<std::pair<int, int>, char> gone;
    for (std::size_t i = 0; i + 1 < path.size(); i += 2) gone[{path[i], path[i + 1]}] = 1;
    for (auto p : v.pairs)
        if (!gone.count(p)) pairs.push_back(p);
    pairs.emplace_back(path[0], src);
    for (std::size_t i = 1; i + 1 < path.size(); i += 2) pairs.emplace_back(path[i + 1], path[i]);
    return pairs;
}

}  // namespace detail

// Distinct V-paths from the faces of sigma to tau, capped at cap.
inline int count_gradient_paths(const SimplicialComplex& k, const Dgvf& v, int sigma, int tau, int cap = 2) {
    return detail::paths_from_boundary(k, v, sigma, tau, cap);
}

// Smooth cancellation of critical tau^p and sigma^{p+1} joined by exactly one
// V-path; two paths of opposite sign also refuse.
inline Dgvf cancel_pair(const SimplicialComplex& k, const Dgvf& v, int tau, int sigma) {
    if (tau < 0 || sigma < 0 || tau >= k.size() || sigma >= k.size()) throw std::out_of_range("cancel_pair: unknown cell");
    if (!v.is_critical(tau) || !v.is_critical(sigma)) throw CancellationRefused("cancel_pair: both cells must be critical");
    if (k.dim(sigma) != k.dim(tau) + 1) throw CancellationRefused("cancel_pair: dimensions must differ by one");
    const int n = detail::paths_from_boundary(k, v, sigma, tau);
    if (n == 0) throw CancellationRefused("cancel_pair: no gradient path from the boundary of sigma to tau");
    if (n > 1) throw CancellationRefused("cancel_pair: more than one gradient path from the boundary of sigma to tau");
    auto path = detail::unique_path(k, v, sigma, tau);
    return extract_dgvf(k, detail::reversed_pairs(v, path, sigma));
}

// sigma^{p+1} is ridge critical with its ridge at tau^p, where <gamma, tau> is
// a gradient pair. Requires (a) no V-path from the boundary of sigma to tau and
// (b) exactly one V-path from the boundary of the critical alpha^p to gamma.
// Deletes <gamma, tau>, adds <tau, sigma>, reverses that path.
inline Dgvf cancel_nonsmooth(const SimplicialComplex& k, const Dgvf& v, int sigma, int tau, int gamma, int alpha) {
    for (int c : {sigma, tau, gamma, alpha})
        if (c < 0 || c >= k.size()) throw std::out_of_range("cancel_nonsmooth: unknown cell");
    if (!v.is_critical(sigma)) throw CancellationRefused("cancel_nonsmooth: sigma is not critical");
    if (!k.is_facet(tau, sigma)) throw CancellationRefused("cancel_nonsmooth: tau is not a face of sigma");
    if (v.down[tau] != gamma) throw CancellationRefused("cancel_nonsmooth: <gamma, tau> is not a gradient pair (no ridge at tau)");
    if (!v.is_critical(alpha) || k.dim(alpha) != k.dim(tau))
        throw CancellationRefused("cancel_nonsmooth: alpha must be a critical cell of tau's dimension");
    // tau itself is a face of sigma; only paths from the other faces count
    detail::PathCounter pc{k, v, tau, 1, {}};
    bool reach = false;
    for (int f : k.faces(sigma))
        if (f != tau && pc.count(f) > 0) reach = true;
    if (reach)
        throw CancellationRefused("cancel_nonsmooth: condition (a) fails, a gradient path from the boundary of sigma reaches tau");
    if (detail::paths_from_boundary(k, v, alpha, gamma) != 1)
        throw CancellationRefused("cancel_nonsmooth: condition (b) fails, no unique gradient path from the boundary of alpha to gamma");
    auto path = detail::unique_path(k, v, alpha, gamma);
    Dgvf mid;
    {
        std::vector<std::pair<int, int>> pairs;
        for (auto p : v.pairs)
            if (p != std::make_pair(gamma, tau)) pairs.push_back(p);
        pairs.emplace_back(tau, sigma);
        mid = detail::assemble_dgvf(k, pairs);
    }
    return extract_dgvf(k, detail::reversed_pairs(mid, path, alpha));
}

// Ridge candidates of a critical sigma: faces tau that are the coface of a pair.
inline std::vector<int> ridges(const SimplicialComplex& k, const Dgvf& v, int sigma) {
    std::vector<int> out;
    for (int t : k.faces(sigma))
        if (v.down[t] >= 0) out.push_back(t);
    return out;
}

struct MorseSummary {
    std::vector<int> c;       // Morse numbers per dimension
    std::vector<long long> b; // Betti numbers used for the check
    long long chi = 0;
    long long total_critical = 0;
    long long total_betti = 0;
    double wmoc_ratio = 0.0;  // total critical / total Betti
};

// Throws std::logic_error when the weak Morse inequalities or the Euler
// identity fail.
inline MorseSummary morse_summary(const SimplicialComplex& k, const Dgvf& v, const std::vector<long long>& betti) {
    MorseSummary s;
    s.c = v.morse_numbers();
    s.b = betti;
    s.chi = euler_characteristic(k);
    long long alt = 0;
    for (std::size_t m = 0; m < s.c.size(); ++m) {
        alt += (m % 2 == 0 ? 1 : -1) * static_cast<long long>(s.c[m]);
        s.total_critical += s.c[m];
        long long bm = m < betti.size() ? betti[m] : 0;
        if (s.c[m] < bm)
            throw std::logic_error("Morse inequality fails in dimension " + std::to_string(m) + ": c=" +
                                   std::to_string(s.c[m]) + " < b=" + std::to_string(bm));
    }
    for (long long x : betti) s.total_betti += x;
    if (alt != s.chi) throw std::logic_error("alternating Morse number sum " + std::to_string(alt) + " != chi " + std::to_string(s.chi));
    s.wmoc_ratio = s.total_betti > 0 ? static_cast<double>(s.total_critical) / s.total_betti : 0.0;
    return s;
}

inline std::string format_summary(const MorseSummary& s) {
    std::ostringstream os;
    os << "critical:";
    for (int x : s.c) os << ' ' << x;
    os << "\nbetti:";
    for (long long x : s.b) os << ' ' << x;
    os << "\nchi: " << s.chi << "\ntotal_critical: " << s.total_critical << "\ntotal_betti: " << s.total_betti
       << "\nwmoc_ratio: " << s.wmoc_ratio << '\n';
    return os.str();
}

// One pair per line: face id, coface id.
inline std::string write_dgvf(const Dgvf& v) {
    std::ostringstream os;
    for (auto [a, b] : v.pairs) os << a << ' ' << b << '\n';
    return os.str();
}

inline Dgvf read_dgvf(const SimplicialComplex& k, std::string_view text) {
    std::vector<std::pair<int, int>> pairs;
    detail::for_each_line(text, [&](int lineno, std::string_view line) {
        auto tok = detail::split_ws(line);
        int a, b;
        if (tok.size() != 2 || !detail::parse_int(tok[0], a) || !detail::parse_int(tok[1], b))
            throw InputError("expected 'alpha_id beta_id'", lineno);
        pairs.emplace_back(a, b);
    });
    return extract_dgvf(k, pairs);
}

}  // namespace dmt

#endif
