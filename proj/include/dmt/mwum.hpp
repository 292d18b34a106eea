#ifndef DMT_MWUM_HPP
#define DMT_MWUM_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arv.hpp"
#include "cut.hpp"
#include "maxflow.hpp"
#include "sdp.hpp"

namespace dmt {

// Matrix weights iterate. X is PSD with trace equal to its dimension (one unit
// per vector, v0 included).
struct MwumState {
    Eigen::MatrixXd X;
    Eigen::MatrixXd loss;  // running sum of losses (negated feedback)
    std::vector<double> y; // dual weight per feedback kind: unit, objective, spreading, triangle, forbidden
    double alpha = 0.0;
    double rho = 1.0;  // width bound (feedback is scaled to spectral norm <= 1)
    double delta = 0.1;
    double eps = 0.05;
};

struct MwumConfig {
    double delta = 0.1;
    double eps = 0.5;          // matrix weights step
    int max_iters = 2000;      // cap on the iteration budget
    int min_iters = 100;       // floor: unit and spreading feedback need rounds even when alpha is large
    double sigma = 0.0;        // forbidden threshold; 0 means 1 / (4 log n)
    double flow_mult = 1.0;    // accept the min cut when flow <= flow_mult * alpha * log n
    double tol = 0.05;         // unit / spreading tolerance inside the oracle
    int projections = 4;       // random projections tried by the flow step
    int roundings = 16;        // hyperplane roundings of each final iterate
};

enum class FeedbackKind { Unit, Objective, Spreading, Triangle, Forbidden };

inline const char* to_string(FeedbackKind k) {
    switch (k) {
        case FeedbackKind::Unit: return "unit";
        case FeedbackKind::Objective: return "objective";
        case FeedbackKind::Spreading: return "spreading";
        case FeedbackKind::Triangle: return "triangle";
        case FeedbackKind::Forbidden: return "forbidden";
    }
    return "?";
}

struct OracleResult {
    enum class Kind { Feedback, Fail, Cut } kind = Kind::Fail;
    FeedbackKind feedback_kind = FeedbackKind::Unit;
    Eigen::MatrixXd M;  // M . X < 0 for the current X, M . X* >= 0 for feasible X*
    double value = 0.0; // M . X before scaling
    double flow = 0.0;
    std::optional<DirectedCut> cut;
};

struct MwumIterate {
    int iteration = 0;
    double objective = 0.0;
    double max_residual = 0.0;
    double feedback_norm = 0.0;
    double trace = 0.0;
    double min_eigenvalue = 0.0;
    std::string feedback;
};

struct MwumResult {
    enum class Outcome { Primal, Dual, Cut } outcome = Outcome::Dual;
    Eigen::MatrixXd X;
    std::optional<DirectedCut> cut;
    std::vector<MwumIterate> log;
    double alpha = 0.0;
    int iterations = 0;
    int budget = 0;
};

inline const char* to_string(MwumResult::Outcome o) {
    switch (o) {
        case MwumResult::Outcome::Primal: return "primal";
        case MwumResult::Outcome::Dual: return "dual";
        case MwumResult::Outcome::Cut: return "cut";
    }
    return "?";
}

// One record per line.
inline std::string mwum_log_lines(const MwumResult& r) {
    std::ostringstream os;
    for (const auto& it : r.log)
        os << "{\"iteration\":" << it.iteration << ",\"objective\":" << it.objective
           << ",\"max_residual\":" << it.max_residual << ",\"feedback_norm\":" << it.feedback_norm
           << ",\"trace\":" << it.trace << ",\"min_eigenvalue\":" << it.min_eigenvalue << ",\"feedback\":\""
           << it.feedback << "\"}\n";
    return os.str();
}

namespace mwum {

// Matrix of the homogeneous linear form X -> D(u,v) (diagonal terms kept).
inline void add_semimetric(Eigen::MatrixXd& A, int u, int v, double w) {
    const int a = u + 1, b = v + 1;
    // D(u,v) = 2X_bb - 2X_0b + 2X_0a - 2X_ab
    A(b, b) += w * 2.0;
    A(0, b) -= w;
    A(b, 0) -= w;
    A(0, a) += w;
    A(a, 0) += w;
    A(a, b) -= w;
    A(b, a) -= w;
}

inline void add_pair_laplacian(Eigen::MatrixXd& A, int a, int b, double w) {
    A(a, a) += w;
    A(b, b) += w;
    A(a, b) -= w;
    A(b, a) -= w;
}

inline double spectral_norm(const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(es.eigenvalues().size() - 1)));
}

inline double inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) { return (A.array() * B.array()).sum(); }

// Paths carrying flow from s to t, as node sequences with their amounts.
inline std::vector<std::pair<std::vector<int>, double>> flow_paths(MaxFlow& mf, int s, int t) {
    auto g = mf.graph();
    std::vector<std::pair<std::vector<int>, double>> paths;
    const int n = static_cast<int>(g.size());
    for (int guard = 0; guard < 100000; ++guard) {
        std::vector<int> prev(n, -1), prev_arc(n, -1);
        std::vector<int> st{s};
        prev[s] = s;
        while (!st.empty() && prev[t] < 0) {
            int u = st.back();
            st.pop_back();
            for (int k = 0; k < static_cast<int>(g[u].size()); ++k) {
                const auto& a = g[u][k];
                if (a.flow > 1e-12 && prev[a.to] < 0) {
                    prev[a.to] = u;
                    prev_arc[a.to] = k;
                    st.push_back(a.to);
                }
            }
        }
        if (prev[t] < 0) break;
        double f = std::numeric_limits<double>::infinity();
        std::vector<int> path{t};
        for (int v = t; v != s; v = prev[v]) {
            f = std::min(f, g[prev[v]][prev_arc[v]].flow);
            path.push_back(prev[v]);
        }
        for (int v = t; v != s; v = prev[v]) g[prev[v]][prev_arc[v]].flow -= f;
        std::reverse(path.begin(), path.end());
        paths.push_back({path, f});
    }
    return paths;
}

// Closes A under forbidden arcs and pushes it to c-balance along the v0 score.
inline std::optional<DirectedCut> balance_cut(const CutInstance& inst, std::vector<std::uint8_t> inA,
                                              const std::vector<double>& score, int lo) {
    const int n = inst.n;
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (auto [y, x] : inst.forbidden) {
        fwd[y].push_back(x);
        rev[x].push_back(y);
    }
    int moved = 0;
    detail::close_forward(fwd, inA, moved);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });
    auto count = [&] { return static_cast<int>(std::count(inA.begin(), inA.end(), 1)); };
    for (int idx = 0; count() < lo && idx < n; ++idx) {
        int v = order[idx];
        if (inA[v]) continue;
        auto trial = inA;
        trial[v] = 1;
        int mv = 0;
        detail::close_forward(fwd, trial, mv);
        if (n - static_cast<int>(std::count(trial.begin(), trial.end(), 1)) >= lo) inA = trial;
    }
    for (int idx = n - 1; n - count() < lo && idx >= 0; --idx) {
        int v = order[idx];
        if (!inA[v]) continue;
        auto trial = inA;
        detail::drop_with_forcers(rev, trial, v);
        if (static_cast<int>(std::count(trial.begin(), trial.end(), 1)) >= lo) inA = trial;
    }
    const int k = count();
    if (k < lo || n - k < lo || forbidden_cut_count(inst, inA) != 0) return std::nullopt;
    return make_cut(inst, inA);
}

// Single-node moves that keep A closed under forbidden arcs and both sides >= lo.
inline DirectedCut improve_cut(const CutInstance& inst, DirectedCut cut, int lo) {
    const int n = inst.n;
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (auto [y, x] : inst.forbidden) {
        fwd[y].push_back(x);
        rev[x].push_back(y);
    }
    auto x = cut.indicator(n);
    double cost = cut_cost(inst, x);
    int size = static_cast<int>(cut.side_A.size());
    for (bool better = true; better;) {
        better = false;
        for (int v = 0; v < n; ++v) {
            if (x[v]) {
                if (size - 1 < lo) continue;
                bool ok = true;
                for (int y : rev[v]) ok = ok && !x[y];
                if (!ok) continue;
            } else {
                if (n - size - 1 < lo) continue;
                bool ok = true;
                for (int y : fwd[v]) ok = ok && x[y];
                if (!ok) continue;
            }
            x[v] ^= 1;
            double c = cut_cost(inst, x);
            if (c < cost - 1e-12) {
                cost = c;
                size += x[v] ? 1 : -1;
                better = true;
            } else {
                x[v] ^= 1;
            }
        }
    }
    return make_cut(inst, x);
}

}  // namespace mwum

// Checks the current iterate. Order: unit diagonal, objective <= alpha,
// spreading, then the flow test between the two far ends of a random
// projection (a large flow exposes short paths between far points, i.e. a
// violated path inequality), then the forbidden arcs. If nothing is violated
// the oracle fails and X is a primal candidate; a small flow instead yields the
// min cut as a candidate cut.
inline OracleResult violation_oracle(const Eigen::MatrixXd& X, const SdpInstance& s, double alpha, double sigma, Rng& rng,
                                     const MwumConfig& cfg = {}) {
    const int n = s.n;
    const int N = s.dim();
    OracleResult out;
    const double logn = std::log(std::max(3, n));
    auto finish = [&](Eigen::MatrixXd M, FeedbackKind kind) {
        out.kind = OracleResult::Kind::Feedback;
        out.feedback_kind = kind;
        out.value = mwum::inner(M, X);
        double nrm = mwum::spectral_norm(M);
        out.M = nrm > 0 ? Eigen::MatrixXd(M / nrm) : M;
        return out;
    };
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
    // 1. unit vectors: the violation-weighted sum of X_ii <= 1 / X_ii >= 1
    // rows, each written as +-(E_ii - I/N), collapses to diag(1 - X_ii) since
    // the trace is N.
    {
        Eigen::VectorXd r = Eigen::VectorXd::Ones(N) - X.diagonal();
        if (r.cwiseAbs().maxCoeff() > cfg.tol) {
            out.kind = OracleResult::Kind::Feedback;
            out.feedback_kind = FeedbackKind::Unit;
            out.M = r.asDiagonal();
            out.value = -r.squaredNorm();
            return out;
        }
    }
    // 2. objective <= alpha
    Eigen::MatrixXd Cm = Eigen::MatrixXd::Zero(N, N);
    for (const auto& a : s.arcs) mwum::add_semimetric(Cm, a.u, a.v, a.w / 8.0);
    if (mwum::inner(Cm, X) > alpha * (1.0 + cfg.tol)) return finish(-Cm + (alpha / N) * I, FeedbackKind::Objective);
    // 3. spreading
    {
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j) mwum::add_pair_laplacian(S, i, j, 1.0);
        const double bound = s.spread_bound();
        if (mwum::inner(S, X) < bound * (1.0 - cfg.tol)) return finish(S - (bound / N) * I, FeedbackKind::Spreading);
    }
    // 4. flow between the far ends of random projections
    Embedding emb = Embedding::from_gram(X);
    const int dim = static_cast<int>(emb.vectors.cols());
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double band = 1.0 / logn;
    const double d = 4.0 * std::max(alpha, 1e-9) * logn / std::max(1, n);
    const double accept = cfg.flow_mult * alpha * logn;
    std::optional<DirectedCut> best_cut;
    CutInstance ci{n, s.arcs, s.forbidden, s.c};
    const int lo = ci.min_side();
    std::vector<double> score(n);
    for (int i = 0; i < n; ++i) score[i] = X(0, i + 1);
    for (int p = 0; p < cfg.projections; ++p) {
        Eigen::VectorXd g(dim);
        for (int k = 0; k < dim; ++k) g(k) = gauss(rng);
        // measure along v0's side of the projection: L near v0, R far from it
        double ref = emb.vectors.row(0).dot(g);
        if (ref < 0) g = -g;
        std::vector<int> L, R;
        for (int i = 0; i < n; ++i) {
            double q = emb.vectors.row(i + 1).dot(g) / std::sqrt(std::max(1.0, static_cast<double>(dim)));
            if (q >= band) L.push_back(i);
            else if (q <= -band) R.push_back(i);
        }
        if (L.empty() || R.empty()) continue;
        MaxFlow mf(n + 2);
        const int src = n, snk = n + 1;
        for (const auto& a : s.arcs)
            if (a.u != a.v) mf.add_arc(a.u, a.v, a.w);
        for (int v : L) mf.add_arc(src, v, d);
        for (int v : R) mf.add_arc(v, snk, d);
        auto fr = mf.run(src, snk);
        out.flow = std::max(out.flow, fr.value);
        if (fr.value > accept) {
            // path inequalities along the flow: sum of hops >= direct distance
            Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
            for (auto& [path, f] : mwum::flow_paths(mf, src, snk)) {
                // path = src, x, ..., y, snk
                if (path.size() < 4) continue;
                for (std::size_t k = 1; k + 2 < path.size(); ++k) mwum::add_pair_laplacian(M, path[k] + 1, path[k + 1] + 1, f);
                mwum::add_pair_laplacian(M, path[1] + 1, path[path.size() - 2] + 1, -f);
            }
            if (mwum::inner(M, X) < -1e-9) return finish(M, FeedbackKind::Triangle);
            continue;
        }
        // min cut: A = source side
        std::vector<std::uint8_t> inA(n, 0);
        for (int v = 0; v < n; ++v) inA[v] = fr.source_side[v];
        auto cut = mwum::balance_cut(ci, inA, score, lo);
        if (cut && (!best_cut || cut->cost < best_cut->cost)) best_cut = cut;
    }
    // 5. forbidden arcs
    {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
        bool any = false;
        for (auto [y, x] : s.forbidden) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
            mwum::add_semimetric(A, y, x, 1.0);
            if (mwum::inner(A, X) > sigma) {
                M += -A + (sigma / N) * I;
                any = true;
            }
        }
        if (any) return finish(M, FeedbackKind::Forbidden);
    }
    if (best_cut) {
        out.kind = OracleResult::Kind::Cut;
        out.cut = best_cut;
        return out;
    }
    out.kind = OracleResult::Kind::Fail;
    return out;
}

// Primal-dual matrix multiplicative weights for the feasibility question "is
// there an embedding of value <= alpha". X starts at the identity; each
// feedback M is added to the gain and X = N exp(eps * gain) / trace.
inline MwumResult mwum_solve(const SdpInstance& s, double alpha, double delta, Rng& rng, const MwumConfig& cfg = {}) {
    if (!(alpha > 0)) throw std::invalid_argument("mwum_solve: alpha must be positive");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("mwum_solve: delta must lie in (0,1)");
    const int n = s.n;
    const int N = s.dim();
    MwumState st;
    st.alpha = alpha;
    st.delta = delta;
    st.eps = cfg.eps > 0 ? cfg.eps : 5.0 * delta;
    st.X = Eigen::MatrixXd::Identity(N, N);
    st.loss = Eigen::MatrixXd::Zero(N, N);
    st.y.assign(5, 0.0);
    const double sigma = cfg.sigma > 0 ? cfg.sigma : 1.0 / (4.0 * std::log(std::max(3, n)));
    // iteration count of the analysis, capped
    const double theory = 8.0 * st.rho * st.rho * N * N * std::log(std::max(2, N)) / (delta * delta * alpha * alpha);
    MwumResult res;
    res.alpha = alpha;
    res.budget = static_cast<int>(std::min<double>(cfg.max_iters, std::max<double>(cfg.min_iters, std::ceil(theory))));
    Eigen::MatrixXd Cm = Eigen::MatrixXd::Zero(N, N);
    for (const auto& a : s.arcs) mwum::add_semimetric(Cm, a.u, a.v, a.w / 8.0);
    for (int t = 1; t <= res.budget; ++t) {
        auto orc = violation_oracle(st.X, s, alpha, sigma, rng, cfg);
        MwumIterate rec;
        rec.iteration = t;
        rec.objective = mwum::inner(Cm, st.X);
        rec.trace = st.X.trace();
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.X, Eigen::EigenvaluesOnly);
            rec.min_eigenvalue = es.eigenvalues()(0);
        }
        double mr = 0.0;
        for (int i = 0; i < N; ++i) mr = std::max(mr, std::abs(st.X(i, i) - 1.0));
        rec.max_residual = mr;
        res.iterations = t;
        if (orc.kind != OracleResult::Kind::Feedback) {
            rec.feedback = orc.kind == OracleResult::Kind::Fail ? "none" : "cut";
            res.log.push_back(rec);
            res.X = st.X;
            if (orc.kind == OracleResult::Kind::Fail) {
                res.outcome = MwumResult::Outcome::Primal;
            } else {
                res.outcome = MwumResult::Outcome::Cut;
                res.cut = orc.cut;
            }
            return res;
        }
        rec.feedback = to_string(orc.feedback_kind);
        rec.feedback_norm = -orc.value;
        res.log.push_back(rec);
        st.y[static_cast<int>(orc.feedback_kind)] += 1.0;
        st.loss -= orc.M;
        // X = N exp(-eps * loss) / tr
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.loss);
        Eigen::VectorXd lam = -st.eps * es.eigenvalues();
        lam.array() -= lam.maxCoeff();
        Eigen::VectorXd w = lam.array().exp();
        Eigen::MatrixXd W = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
        W = 0.5 * (W + W.transpose());
        st.X = W * (N / W.trace());
    }
    res.outcome = MwumResult::Outcome::Dual;
    res.X = st.X;
    return res;
}

struct MwumSearch {
    std::optional<DirectedCut> cut;  // best c-balanced cut seen
    double alpha = 0.0;              // smallest alpha with a primal or cut answer
    std::vector<std::pair<double, MwumResult::Outcome>> probes;
    std::vector<MwumResult> runs;
};

// Binary search for alpha on the grid (1+delta)^k inside [1, total arc weight].
// Every primal candidate is rounded (sweep and hyperplane) and every cut
// returned by the oracle is kept; the best c-balanced cut is returned after a
// single-node improvement pass.
inline MwumSearch mwum_binary_search(const CutInstance& inst, Rng& rng, const MwumConfig& cfg = {}) {
    MwumSearch out;
    const int lo = inst.min_side();
    auto sdp = build_sdp(inst);
    double total = 0.0;
    for (const auto& a : inst.arcs) total += a.w;
    total = std::max(total, 1.0);
    const double f = 1.0 + cfg.delta;
    int kmax = static_cast<int>(std::ceil(std::log(total) / std::log(f)));
    auto consider = [&](const std::optional<DirectedCut>& c) {
        if (!c) return;
        if (static_cast<int>(std::min(c->side_A.size(), c->side_B.size())) < lo) return;
        if (forbidden_cut_count(inst, c->indicator(inst.n)) != 0) return;
        auto better = mwum::improve_cut(inst, *c, lo);
        if (!out.cut || better.cost < out.cut->cost - 1e-12) out.cut = better;
    };
    std::vector<double> zero(inst.n, 0.0);
    consider(closed_sweep(inst, zero, lo));
    int lo_k = 0, hi_k = kmax;
    out.alpha = std::pow(f, kmax);
    while (lo_k <= hi_k) {
        int mid = (lo_k + hi_k) / 2;
        double alpha = std::pow(f, mid);
        auto r = mwum_solve(sdp, alpha, cfg.delta, rng, cfg);
        out.probes.push_back({alpha, r.outcome});
        if (r.outcome == MwumResult::Outcome::Dual) {
            lo_k = mid + 1;
        } else {
            out.alpha = std::min(out.alpha, alpha);
            hi_k = mid - 1;
            if (r.cut) consider(r.cut);
        }
        // every final iterate is rounded, dual ones included
        Eigen::MatrixXd X = r.X;
        Eigen::VectorXd dg = X.diagonal().cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
        X = dg.asDiagonal() * X * dg.asDiagonal();
        std::vector<double> score(inst.n);
        for (int i = 0; i < inst.n; ++i) score[i] = X(0, i + 1);
        consider(closed_sweep(inst, score, lo));
        auto emb = Embedding::from_gram(X);
        for (int k = 0; k < cfg.roundings; ++k) {
            auto c = round_arv(emb, inst, rng);
            if (c) consider(mwum::balance_cut(inst, c->indicator(inst.n), score, lo));
        }
        out.runs.push_back(std::move(r));
    }
    return out;
}

class MwumSolver : public DbcreSolver {
public:
    explicit MwumSolver(MwumConfig cfg = {}) : cfg_(cfg) {}
    std::string name() const override { return "mwum"; }
    std::optional<DirectedCut> solve(const CutInstance& inst, Rng& rng) const override {
        return mwum_binary_search(inst, rng, cfg_).cut;
    }

private:
    MwumConfig cfg_;
};

}  // namespace dmt

#endif
