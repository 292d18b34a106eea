#ifndef DMT_SDP_HPP
#define DMT_SDP_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "cut.hpp"

namespace dmt {

// Vector relaxation of a CutInstance. Index 0 of every Gram matrix is the
// reference vector v0, node i sits at index i + 1. A node near v0 belongs to
// the source side A.
struct SdpInstance {
    int n = 0;
    std::vector<CutArc> arcs;
    std::vector<std::pair<int, int>> forbidden;
    double c = 1.0 / 3.0;

    int dim() const { return n + 1; }
    double spread_bound() const { return 4.0 * c * (1.0 - c) * n * n; }
};

inline SdpInstance build_sdp(const CutInstance& inst) {
    SdpInstance s;
    s.n = inst.n;
    s.arcs = inst.arcs;
    s.forbidden = inst.forbidden;
    s.c = inst.c;
    return s;
}

namespace sdp {

inline double dist2(const Eigen::MatrixXd& X, int a, int b) { return X(a, a) + X(b, b) - 2.0 * X(a, b); }

// Directed semimetric between nodes u and v (node indices, not matrix indices).
inline double semimetric(const Eigen::MatrixXd& X, int u, int v) {
    const int a = u + 1, b = v + 1;
    return dist2(X, 0, b) - dist2(X, 0, a) + dist2(X, a, b);
}

inline double objective(const SdpInstance& s, const Eigen::MatrixXd& X) {
    double f = 0.0;
    for (const auto& a : s.arcs) f += a.w * semimetric(X, a.u, a.v);
    return f / 8.0;
}

inline double forbidden_sum(const SdpInstance& s, const Eigen::MatrixXd& X) {
    double f = 0.0;
    for (auto [y, x] : s.forbidden) f += semimetric(X, y, x);
    return f;
}

inline double spreading(const SdpInstance& s, const Eigen::MatrixXd& X) {
    double t = 0.0;
    for (int i = 1; i <= s.n; ++i)
        for (int j = i + 1; j <= s.n; ++j) t += dist2(X, i, j);
    return t;
}

// Gram matrix of the +-v0 assignment of a cut: A nodes at v0, the rest at -v0.
inline Eigen::MatrixXd boolean_gram(int n, const std::vector<std::uint8_t>& inA) {
    Eigen::VectorXd s(n + 1);
    s(0) = 1.0;
    for (int i = 0; i < n; ++i) s(i + 1) = inA[i] ? 1.0 : -1.0;
    return s * s.transpose();
}

}  // namespace sdp

struct Embedding {
    Eigen::MatrixXd vectors;  // row i is the vector of matrix index i (row 0 is v0)

    int points() const { return static_cast<int>(vectors.rows()); }
    Eigen::MatrixXd gram() const { return vectors * vectors.transpose(); }
    double dist2(int a, int b) const { return (vectors.row(a) - vectors.row(b)).squaredNorm(); }
    // Directed semimetric on node indices.
    double D(int u, int v) const { return dist2(0, v + 1) - dist2(0, u + 1) + dist2(u + 1, v + 1); }

    static Embedding from_gram(const Eigen::MatrixXd& X) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        Embedding e;
        e.vectors = es.eigenvectors() * ev.asDiagonal();
        return e;
    }
    static Embedding from_cut(int n, const std::vector<std::uint8_t>& inA) {
        Embedding e;
        e.vectors = Eigen::MatrixXd::Zero(n + 1, 1);
        e.vectors(0, 0) = 1.0;
        for (int i = 0; i < n; ++i) e.vectors(i + 1, 0) = inA[i] ? 1.0 : -1.0;
        return e;
    }
};

struct EmbeddingCheck {
    double unit = 0.0;       // max | |v_i|^2 - 1 |
    double triangle = 0.0;   // max violation of the squared-distance triangle inequality
    double spreading = 0.0;  // deficit below 4c(1-c)n^2 (0 when satisfied)
    double forbidden = 0.0;  // sum of D over forbidden arcs
    double objective = 0.0;

    bool feasible(double tol) const {
        return unit <= tol && triangle <= tol && spreading <= tol && std::abs(forbidden) <= tol;
    }
};

inline EmbeddingCheck check_embedding(const SdpInstance& s, const Eigen::MatrixXd& X) {
    EmbeddingCheck r;
    const int N = static_cast<int>(X.rows());
    for (int i = 0; i < N; ++i) r.unit = std::max(r.unit, std::abs(X(i, i) - 1.0));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            const double dij = sdp::dist2(X, i, j);
            for (int k = 0; k < N; ++k) {
                if (k == i || k == j) continue;
                // d(i,k) <= d(i,j) + d(j,k)
                r.triangle = std::max(r.triangle, sdp::dist2(X, i, k) - dij - sdp::dist2(X, j, k));
            }
        }
    r.spreading = std::max(0.0, s.spread_bound() - sdp::spreading(s, X));
    r.forbidden = sdp::forbidden_sum(s, X);
    r.objective = sdp::objective(s, X);
    return r;
}

inline EmbeddingCheck check_embedding(const SdpInstance& s, const Embedding& e) { return check_embedding(s, e.gram()); }

// Best balanced prefix cut over an order in which every node enters A only
// after all nodes it forces (forbidden arcs y->x: y in A forces x in A).
// Higher score enters earlier; strongly connected groups enter together.
inline std::optional<DirectedCut> closed_sweep(const CutInstance& inst, const std::vector<double>& score, int lo) {
    const int n = inst.n;
    if (n == 0) return std::nullopt;
    // forces[y] = nodes that must already be in A before y
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (auto [y, x] : inst.forbidden) {
        fwd[y].push_back(x);
        rev[x].push_back(y);
    }
    // strongly connected groups (Kosaraju, iterative)
    std::vector<int> order, comp(n, -1);
    std::vector<char> seen(n, 0);
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::vector<std::pair<int, std::size_t>> st{{s, 0}};
        seen[s] = 1;
        while (!st.empty()) {
            auto& [u, k] = st.back();
            if (k < fwd[u].size()) {
                int v = fwd[u][k++];
                if (!seen[v]) {
                    seen[v] = 1;
                    st.push_back({v, 0});
                }
            } else {
                order.push_back(u);
                st.pop_back();
            }
        }
    }
    int nc = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[*it] >= 0) continue;
        std::vector<int> st{*it};
        comp[*it] = nc;
        while (!st.empty()) {
            int u = st.back();
            st.pop_back();
            for (int v : rev[u])
                if (comp[v] < 0) {
                    comp[v] = nc;
                    st.push_back(v);
                }
        }
        ++nc;
    }
    std::vector<std::vector<int>> members(nc);
    for (int v = 0; v < n; ++v) members[comp[v]].push_back(v);
    std::vector<double> cscore(nc, 0.0);
    for (int k = 0; k < nc; ++k) {
        for (int v : members[k]) cscore[k] += score[v];
        cscore[k] /= static_cast<double>(members[k].size());
    }
    // a group is ready once every group it forces is in A
    std::vector<int> pending(nc, 0);
    std::vector<std::vector<int>> waiting(nc);
    for (int y = 0; y < n; ++y)
        for (int x : fwd[y])
            if (comp[x] != comp[y]) {
                ++pending[comp[y]];
                waiting[comp[x]].push_back(comp[y]);
            }
    using Item = std::pair<double, int>;
    auto cmp = [](const Item& a, const Item& b) { return a.first < b.first || (a.first == b.first && a.second > b.second); };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    for (int k = 0; k < nc; ++k)
        if (pending[k] == 0) pq.push({cscore[k], k});
    std::vector<std::uint8_t> inA(n, 0);
    std::vector<std::vector<std::pair<int, double>>> out(n), in(n);
    for (const auto& a : inst.arcs) {
        out[a.u].push_back({a.v, a.w});
        in[a.v].push_back({a.u, a.w});
    }
    double cost = 0.0, best = std::numeric_limits<double>::infinity();
    int size = 0, best_size = -1;
    std::vector<int> seq;
    while (!pq.empty()) {
        int k = pq.top().second;
        pq.pop();
        for (int v : members[k]) {
            inA[v] = 1;
            for (auto [x, w] : out[v])
                if (!inA[x]) cost += w;
            for (auto [u, w] : in[v])
                if (inA[u] && u != v) cost -= w;
            seq.push_back(v);
        }
        size += static_cast<int>(members[k].size());
        if (size >= lo && n - size >= lo && cost < best - 1e-12) {
            best = cost;
            best_size = size;
        }
        for (int j : waiting[k])
            if (--pending[j] == 0) pq.push({cscore[j], j});
    }
    if (best_size < 0) return std::nullopt;
    std::vector<std::uint8_t> x(n, 0);
    for (int i = 0; i < best_size; ++i) x[seq[i]] = 1;
    return make_cut(inst, x);
}

struct EmbeddingConfig {
    int iterations = 2000;    // ADMM iterations
    int inner_sweeps = 20;    // cap on Hildreth passes per constraint projection
    double rho = 1.0;         // ADMM penalty
    double tol = 1e-6;        // feasibility tolerance of the returned embedding
    double stop = 1e-7;       // primal/dual residual stopping threshold
    int sweep_every = 10;     // full triangle scan period
    int max_active = 0;       // triangles kept active (0: 30 * dim)
};

struct EmbeddingReport {
    int iterations = 0;
    double relaxed_objective = 0.0;  // objective of the constraint-side iterate before repair
    double objective = 0.0;
    double residual = 0.0;           // final |X - Z|_F of the splitting
    double mix = 0.0;                // weight given to the boolean anchor during repair
    EmbeddingCheck before, after;
    DirectedCut anchor;              // boolean cut used for the repair
};

struct EmbeddingResult {
    Eigen::MatrixXd gram;
    Embedding embedding;
    EmbeddingReport report;
};

namespace detail {

// Linear constraint <A, X> (>= or ==) b over a few symmetric entries.
struct SparseCon {
    std::vector<std::tuple<int, int, double>> terms;  // (i, j, a) with i <= j; off-diagonal a counts twice
    double b = 0.0;
    bool equality = false;
    double norm2 = 0.0;

    void finish() {
        norm2 = 0.0;
        for (auto [i, j, a] : terms) norm2 += (i == j ? 1.0 : 2.0) * a * a;
    }
    double eval(const Eigen::MatrixXd& X) const {
        double v = 0.0;
        for (auto [i, j, a] : terms) v += (i == j ? 1.0 : 2.0) * a * X(i, j);
        return v;
    }
    void add(Eigen::MatrixXd& X, double d) const {
        for (auto [i, j, a] : terms) {
            X(i, j) += d * a;
            if (i != j) X(j, i) += d * a;
        }
    }
};

// Constraints below assume the unit diagonal and only touch off-diagonal
// entries, so they decouple from the diagonal projection.
inline SparseCon triangle_con(int i, int j, int k) {
    // d(i,j) + d(j,k) - d(i,k) = 2 - 2X_ij - 2X_jk + 2X_ik >= 0
    SparseCon c;
    auto e = [](int a, int b) { return std::pair{std::min(a, b), std::max(a, b)}; };
    auto [a1, b1] = e(i, j);
    auto [a2, b2] = e(j, k);
    auto [a3, b3] = e(i, k);
    c.terms = {{a1, b1, -1.0}, {a2, b2, -1.0}, {a3, b3, 1.0}};
    c.b = -2.0;
    c.finish();
    return c;
}

inline SparseCon semimetric_con(int u, int v) {
    // D(u,v) = 2 - 2X_0v + 2X_0u - 2X_uv
    const int a = u + 1, b = v + 1;
    SparseCon c;
    c.terms = {{0, b, -1.0}, {0, a, 1.0}, {std::min(a, b), std::max(a, b), -1.0}};
    c.b = -2.0;
    c.equality = true;
    c.finish();
    return c;
}

struct TriKey {
    int i, j, k;
    bool operator<(const TriKey& o) const { return std::tie(i, j, k) < std::tie(o.i, o.j, o.k); }
    bool operator==(const TriKey& o) const { return i == o.i && j == o.j && k == o.k; }
};

inline std::vector<TriKey> violated_triangles(const Eigen::MatrixXd& X, double tol, std::size_t cap) {
    const int N = static_cast<int>(X.rows());
    std::vector<std::pair<double, TriKey>> found;
    for (int i = 0; i < N; ++i)
        for (int k = i + 1; k < N; ++k) {
            const double dik = sdp::dist2(X, i, k);
            for (int j = 0; j < N; ++j) {
                if (j == i || j == k) continue;
                double s = sdp::dist2(X, i, j) + sdp::dist2(X, j, k) - dik;
                if (s < -tol) found.push_back({s, {i, j, k}});
            }
        }
    if (found.size() > cap) {
        std::nth_element(found.begin(), found.begin() + cap, found.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        found.resize(cap);
    }
    std::vector<TriKey> out;
    for (auto& f : found) out.push_back(f.second);
    return out;
}

inline Eigen::MatrixXd project_psd(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd X = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (X + X.transpose());
}

}  // namespace detail

// ADMM on the Gram matrix: X is kept PSD by eigenvalue clipping, Z is kept on
// the linear constraints (unit diagonal, forbidden D = 0, spreading, active
// triangle inequalities) by Hildreth row projections. The final iterate is
// blended with a feasible boolean embedding just enough to meet every
// constraint within tol; the feasible set is convex so the blend stays PSD.
// Throws SolverError if no balanced cut respects the forbidden arcs.
inline EmbeddingResult solve_embedding(const SdpInstance& s, const EmbeddingConfig& cfg = {}) {
    const int n = s.n;
    const int N = s.dim();
    CutInstance ci{n, s.arcs, s.forbidden, s.c};
    const int lo = ci.min_side();
    std::vector<double> zero(n, 0.0);
    auto topo = closed_sweep(ci, zero, lo);
    if (!topo) throw SolverError("solve_embedding: no balanced cut respects the forbidden arcs");

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N, N);
    for (const auto& a : s.arcs) {
        auto con = detail::semimetric_con(a.u, a.v);
        for (auto [i, j, v] : con.terms) {
            C(i, j) += v * a.w / 8.0;
            if (i != j) C(j, i) += v * a.w / 8.0;
        }
    }
    // fixed constraints: diagonal, forbidden, spreading
    std::vector<detail::SparseCon> fixed;
    for (auto [y, x] : s.forbidden) fixed.push_back(detail::semimetric_con(y, x));
    const double bound = s.spread_bound();
    // spreading with unit diagonal = n(n-1) - sum_{i != j} X_ij over the node block
    auto spread_eval = [&](const Eigen::MatrixXd& X) {
        return static_cast<double>(n) * (n - 1) - (X.block(1, 1, n, n).sum() - X.block(1, 1, n, n).trace());
    };
    const double spread_norm2 = static_cast<double>(n) * (n - 1);
    auto spread_add = [&](Eigen::MatrixXd& X, double d) {
        Eigen::MatrixXd blk = Eigen::MatrixXd::Constant(n, n, -d);
        blk.diagonal().setZero();
        X.block(1, 1, n, n) += blk;
    };

    std::vector<detail::TriKey> active_keys;
    std::vector<detail::SparseCon> active;
    std::vector<double> ya, yf(fixed.size(), 0.0);
    double ys = 0.0;
    const std::size_t cap = cfg.max_active > 0 ? static_cast<std::size_t>(cfg.max_active) : static_cast<std::size_t>(30 * N);

    Eigen::MatrixXd Z = 0.5 * Eigen::MatrixXd::Identity(N, N) + 0.5 * sdp::boolean_gram(n, topo->indicator(n));
    Eigen::MatrixXd X = Z;
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(N, N);
    const double rho = cfg.rho;
    EmbeddingResult res;
    int it = 0;
    for (; it < cfg.iterations; ++it) {
        if (cfg.sweep_every > 0 && it % cfg.sweep_every == 0) {
            auto fresh = detail::violated_triangles(X, cfg.tol * 0.1, cap);
            std::vector<std::pair<detail::TriKey, double>> keyed;
            for (std::size_t q = 0; q < active_keys.size(); ++q) keyed.push_back({active_keys[q], ya[q]});
            for (const auto& t : fresh) keyed.push_back({t, 0.0});
            std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
                return a.first < b.first || (a.first == b.first && a.second > b.second);
            });
            active_keys.clear();
            ya.clear();
            const bool crowded = keyed.size() > 4 * cap;
            for (const auto& [k, y] : keyed) {
                if (!active_keys.empty() && active_keys.back() == k) continue;
                if (crowded && y == 0.0 && detail::triangle_con(k.i, k.j, k.k).eval(X) > -2.0) continue;
                active_keys.push_back(k);
                ya.push_back(y);
            }
            active.clear();
            for (const auto& t : active_keys) active.push_back(detail::triangle_con(t.i, t.j, t.k));
        }
        X = detail::project_psd(Z - U - C / rho);
        Eigen::MatrixXd Zold = Z;
        // Hildreth projection onto the polyhedron, warm-started from the
        // previous duals; the diagonal is set directly
        Z = X + U;
        for (std::size_t q = 0; q < active.size(); ++q)
            if (ya[q] != 0.0) active[q].add(Z, ya[q]);
        if (ys != 0.0) spread_add(Z, ys);
        for (std::size_t q = 0; q < fixed.size(); ++q)
            if (yf[q] != 0.0) fixed[q].add(Z, yf[q]);
        Z.diagonal().setOnes();
        for (int sw = 0; sw < cfg.inner_sweeps; ++sw) {
            double moved = 0.0;
            for (std::size_t q = 0; q < active.size(); ++q) {
                const auto& con = active[q];
                double th = (con.b - con.eval(Z)) / con.norm2;
                double d = std::max(th, -ya[q]);
                if (d != 0.0) {
                    con.add(Z, d);
                    ya[q] += d;
                    moved = std::max(moved, std::abs(d));
                }
            }
            {
                double th = (bound - spread_eval(Z)) / spread_norm2;
                double d = std::max(th, -ys);
                if (d != 0.0) {
                    spread_add(Z, d);
                    ys += d;
                    moved = std::max(moved, std::abs(d));
                }
            }
            for (std::size_t q = 0; q < fixed.size(); ++q) {
                const auto& con = fixed[q];
                double d = (con.b - con.eval(Z)) / con.norm2;
                if (d != 0.0) {
                    con.add(Z, d);
                    yf[q] += d;
                    moved = std::max(moved, std::abs(d));
                }
            }
            if (moved < cfg.stop * 1e-3) break;
        }
        U += X - Z;
        const double r = (X - Z).norm();
        const double sres = rho * (Z - Zold).norm();
        res.report.residual = r;

        if (r < cfg.stop && sres < cfg.stop && it > cfg.sweep_every) {
            auto fresh = detail::violated_triangles(X, cfg.tol * 0.1, 1);
            if (fresh.empty()) {
                ++it;
                break;
            }
        }
    }
    // The PSD side is the one we keep; put it on the unit sphere.
    {
        Eigen::VectorXd d = X.diagonal().cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
        X = d.asDiagonal() * X * d.asDiagonal();
        X.diagonal().setOnes();
    }
    res.report.iterations = it;
    res.report.relaxed_objective = sdp::objective(s, Z);
    res.report.before = check_embedding(s, X);

    std::vector<double> score(n);
    for (int i = 0; i < n; ++i) score[i] = X(0, i + 1);
    auto anchor = closed_sweep(ci, score, lo);
    if (!anchor || anchor->cost > topo->cost) anchor = topo;
    res.report.anchor = *anchor;
    Eigen::MatrixXd B = sdp::boolean_gram(n, anchor->indicator(n));

    // smallest blend weight meeting every linear constraint within tol
    const double tol = cfg.tol * 0.5;
    double lam = 0.0;
    auto need = [&](double gx, double gb) {
        if (gx >= -tol) return;
        lam = std::max(lam, (-tol - gx) / (gb - gx));
    };
    for (int i = 0; i < N; ++i)
        for (int k = i + 1; k < N; ++k) {
            const double xik = sdp::dist2(X, i, k), bik = sdp::dist2(B, i, k);
            for (int j = 0; j < N; ++j) {
                if (j == i || j == k) continue;
                need(sdp::dist2(X, i, j) + sdp::dist2(X, j, k) - xik, sdp::dist2(B, i, j) + sdp::dist2(B, j, k) - bik);
            }
        }
    need(sdp::spreading(s, X) - bound, sdp::spreading(s, B) - bound);
    const double f = sdp::forbidden_sum(s, X);
    if (std::abs(f) > tol) lam = std::max(lam, 1.0 - tol / std::abs(f));
    lam = std::min(1.0, lam > 0 ? lam * (1.0 + 1e-9) + 1e-12 : 0.0);
    X = (1.0 - lam) * X + lam * B;
    X.diagonal().setOnes();
    res.report.mix = lam;
    res.report.objective = sdp::objective(s, X);
    res.report.after = check_embedding(s, X);
    res.gram = X;
    res.embedding = Embedding::from_gram(X);
    return res;
}

}  // namespace dmt

#endif
