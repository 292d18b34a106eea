#ifndef DMT_CUT_HPP
#define DMT_CUT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dmt {

// A solver gave up (budget, numerical trouble, repeated rounding failure).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CutArc {
    int u = 0;
    int v = 0;
    double w = 1.0;
};

// Minimum directed c-balanced cut: choose a side A; the cut pays every arc
// u->v with u in A and v outside A, and must not pay any forbidden arc.
struct CutInstance {
    int n = 0;
    std::vector<CutArc> arcs;
    std::vector<std::pair<int, int>> forbidden;
    double c = 1.0 / 3.0;

    int min_side() const { return min_side_for(n, c); }
    static int min_side_for(int n, double c) { return static_cast<int>(std::ceil(c * n - 1e-9)); }
};

struct DirectedCut {
    std::vector<int> side_A;
    std::vector<int> side_B;
    double cost = 0.0;
    double balance = 0.0;  // min(|A|,|B|) / n

    std::vector<std::uint8_t> indicator(int n) const {
        std::vector<std::uint8_t> x(n, 0);
        for (int v : side_A) x[v] = 1;
        return x;
    }
};

inline double cut_cost(const CutInstance& inst, const std::vector<std::uint8_t>& inA) {
    double c = 0.0;
    for (const auto& a : inst.arcs)
        if (inA[a.u] && !inA[a.v]) c += a.w;
    return c;
}

inline int forbidden_cut_count(const CutInstance& inst, const std::vector<std::uint8_t>& inA) {
    int k = 0;
    for (auto [u, v] : inst.forbidden)
        if (inA[u] && !inA[v]) ++k;
    return k;
}

inline DirectedCut make_cut(const CutInstance& inst, const std::vector<std::uint8_t>& inA) {
    DirectedCut cut;
    for (int v = 0; v < inst.n; ++v) (inA[v] ? cut.side_A : cut.side_B).push_back(v);
    cut.cost = cut_cost(inst, inA);
    cut.balance = inst.n ? static_cast<double>(std::min(cut.side_A.size(), cut.side_B.size())) / inst.n : 0.0;
    return cut;
}

using Rng = std::mt19937_64;

// Interchangeable min-DBCRE subroutine used by the recursive min-POP driver.
class DbcreSolver {
public:
    virtual ~DbcreSolver() = default;
    virtual std::string name() const = 0;
    // nullopt means the instance has no feasible balanced cut.
    virtual std::optional<DirectedCut> solve(const CutInstance& inst, Rng& rng) const = 0;
};

}  // namespace dmt

#endif
