#ifndef DMT_ARV_HPP
#define DMT_ARV_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cut.hpp"
#include "exact_cut.hpp"
#include "sdp.hpp"

namespace dmt {

struct ArvConfig {
    double delta = 0.0;  // separation scale; 0 means 1/(20 sqrt(log n))
    int max_retries = 50;
};

struct RoundingInfo {
    double sigma = 0.0;  // band parameter drawn for this rounding
    double delta = 0.0;
    double phi2 = 0.0;  // squared ball radius around v0
    int retries = 0;
    int band_added = 0;  // points the fat band moved into A
    int repaired = 0;    // points moved by the forbidden/balance repair
};

namespace detail {

// Pulls every node forced by A into A (forbidden y->x: y in A forces x).
inline void close_forward(const std::vector<std::vector<int>>& fwd, std::vector<std::uint8_t>& inA, int& moved) {
    std::vector<int> st;
    for (int v = 0; v < static_cast<int>(inA.size()); ++v)
        if (inA[v]) st.push_back(v);
    while (!st.empty()) {
        int y = st.back();
        st.pop_back();
        for (int x : fwd[y])
            if (!inA[x]) {
                inA[x] = 1;
                ++moved;
                st.push_back(x);
            }
    }
}

// Removes v from A together with every node of A that forces it.
inline int drop_with_forcers(const std::vector<std::vector<int>>& rev, std::vector<std::uint8_t>& inA, int v) {
    int moved = 0;
    std::vector<int> st{v};
    if (!inA[v]) return 0;
    inA[v] = 0;
    ++moved;
    while (!st.empty()) {
        int x = st.back();
        st.pop_back();
        for (int y : rev[x])
            if (inA[y]) {
                inA[y] = 0;
                ++moved;
                st.push_back(y);
            }
    }
    return moved;
}

}  // namespace detail

// Hyperplane rounding with a v0-ball split and a fat band that only admits
// points no rigid arc from outside A points to. A final repair closes A under
// forbidden arcs and restores c/2 balance. nullopt after max_retries failures.
inline std::optional<DirectedCut> round_arv(const Embedding& emb, const CutInstance& inst, Rng& rng,
                                            const ArvConfig& cfg = {}, RoundingInfo* info = nullptr) {
    const int n = inst.n;
    if (n < 2) return std::nullopt;
    const int need = std::max(1, static_cast<int>(std::floor(inst.c / 2.0 * n)));
    const double delta = cfg.delta > 0 ? cfg.delta : 1.0 / (20.0 * std::sqrt(std::log(std::max(3, n))));
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (auto [y, x] : inst.forbidden) {
        fwd[y].push_back(x);
        rev[x].push_back(y);
    }
    // rigid arcs k -> i are the reversed forbidden arcs i -> k
    const int dim = static_cast<int>(emb.vectors.cols());
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> d0(n);
    for (int i = 0; i < n; ++i) d0[i] = emb.dist2(0, i + 1);

    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        RoundingInfo ri;
        ri.retries = attempt;
        ri.delta = delta;
        ri.sigma = delta * (1.0 - unif(rng));  // (0, delta]
        const double width = std::sqrt(ri.sigma);
        Eigen::VectorXd r(dim);
        for (int k = 0; k < dim; ++k) r(k) = gauss(rng);
        std::vector<int> U, V;
        for (int i = 0; i < n; ++i) {
            double p = emb.vectors.row(i + 1).dot(r);
            if (p >= width) U.push_back(i);
            else if (p <= -width) V.push_back(i);
        }
        // drop close cross pairs
        std::vector<char> gone(n, 0);
        for (int a : U) {
            if (gone[a]) continue;
            for (int b : V) {
                if (gone[b]) continue;
                if (emb.dist2(a + 1, b + 1) <= delta) {
                    gone[a] = gone[b] = 1;
                    break;
                }
            }
        }
        std::erase_if(U, [&](int v) { return gone[v]; });
        std::erase_if(V, [&](int v) { return gone[v]; });
        if (U.empty() || V.empty()) continue;
        // median distance to v0 over U
        std::vector<double> du;
        for (int i : U) du.push_back(d0[i]);
        std::nth_element(du.begin(), du.begin() + du.size() / 2, du.end());
        ri.phi2 = du[du.size() / 2];
        std::vector<int> Up, Um, Vp, Vm;
        for (int i : U) (d0[i] <= ri.phi2 ? Up : Um).push_back(i);
        for (int i : V) (d0[i] <= ri.phi2 ? Vp : Vm).push_back(i);
        const std::vector<int>& Aset = (Vp.size() >= Vm.size()) ? Vp : Up;
        if (Aset.empty()) continue;
        std::vector<std::uint8_t> inA(n, 0);
        for (int i : Aset) inA[i] = 1;
        // fat band around A
        const std::vector<int> seeds = Aset;
        for (int i = 0; i < n; ++i) {
            if (inA[i]) continue;
            bool close = false;
            for (int a : seeds)
                if (emb.dist2(i + 1, a + 1) <= ri.sigma) {
                    close = true;
                    break;
                }
            if (!close) continue;
            bool blocked = false;
            for (int k : fwd[i])
                if (!inA[k]) blocked = true;
            if (!blocked) {
                inA[i] = 1;
                ++ri.band_added;
            }
        }
        // repair: forbidden closure, then balance along the v0 distance
        detail::close_forward(fwd, inA, ri.repaired);
        int sizeA = static_cast<int>(std::count(inA.begin(), inA.end(), 1));
        std::vector<int> byd(n);
        std::iota(byd.begin(), byd.end(), 0);
        std::stable_sort(byd.begin(), byd.end(), [&](int a, int b) { return d0[a] < d0[b]; });
        for (int idx = 0; sizeA < need && idx < n; ++idx) {
            int v = byd[idx];
            if (inA[v]) continue;
            std::vector<std::uint8_t> trial = inA;
            trial[v] = 1;
            int mv = 0;
            detail::close_forward(fwd, trial, mv);
            int ns = static_cast<int>(std::count(trial.begin(), trial.end(), 1));
            if (n - ns < need) continue;
            inA = trial;
            ri.repaired += mv + 1;
            sizeA = ns;
        }
        for (int idx = n - 1; n - sizeA < need && idx >= 0; --idx) {
            int v = byd[idx];
            if (!inA[v]) continue;
            std::vector<std::uint8_t> trial = inA;
            int mv = detail::drop_with_forcers(rev, trial, v);
            int ns = static_cast<int>(std::count(trial.begin(), trial.end(), 1));
            if (ns < need) continue;
            inA = trial;
            ri.repaired += mv;
            sizeA = ns;
        }
        if (sizeA < need || n - sizeA < need) continue;
        if (forbidden_cut_count(inst, inA) != 0) continue;
        if (info) *info = ri;
        return make_cut(inst, inA);
    }
    return std::nullopt;
}

struct ArvSolverConfig {
    EmbeddingConfig embedding;
    ArvConfig rounding;
    int trials = 20;            // roundings per embedding, best kept
    int max_sdp_nodes = 120;    // larger subproblems use the closed sweep only
    int large_iterations = 400; // ADMM iteration cap once n > 60
    int exact_below = 0;        // use exact_dbcre for n <= this (0 disables)
};

// SDP embedding + hyperplane rounding. The best of the rounded cuts and the
// embedding's sweep anchor is returned.
class ArvSolver : public DbcreSolver {
public:
    explicit ArvSolver(ArvSolverConfig cfg = {}) : cfg_(cfg) {}
    std::string name() const override { return "arv"; }

    std::optional<DirectedCut> solve(const CutInstance& inst, Rng& rng) const override {
        if (inst.n <= cfg_.exact_below) return exact_dbcre(inst);
        const int lo = std::max(inst.min_side(), std::max(1, static_cast<int>(std::floor(inst.c / 2.0 * inst.n))));
        if (inst.n > cfg_.max_sdp_nodes) {
            std::vector<double> zero(inst.n, 0.0);
            return closed_sweep(inst, zero, lo);
        }
        EmbeddingResult er;
        try {
            EmbeddingConfig ec = cfg_.embedding;
            if (inst.n > 60) ec.iterations = std::min(ec.iterations, cfg_.large_iterations);
            er = solve_embedding(build_sdp(inst), ec);
        } catch (const SolverError&) {
            return std::nullopt;
        }
        std::optional<DirectedCut> best = er.report.anchor;
        for (int t = 0; t < cfg_.trials; ++t) {
            auto cut = round_arv(er.embedding, inst, rng, cfg_.rounding);
            if (cut && (!best || cut->cost < best->cost - 1e-12)) best = cut;
        }
        return best;
    }

private:
    ArvSolverConfig cfg_;
};

}  // namespace dmt

#endif
