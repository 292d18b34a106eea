#ifndef DMT_MMUP_HPP
#define DMT_MMUP_HPP

#include <memory>
#include <string>

#include "arv.hpp"
#include "gadget.hpp"
#include "morse.hpp"
#include "mwum.hpp"
#include "pop_solver.hpp"

namespace dmt {

enum class SolverKind { Auto, Exact, Arv, Mwum };

inline const char* to_string(SolverKind s) {
    switch (s) {
        case SolverKind::Auto: return "auto";
        case SolverKind::Exact: return "exact";
        case SolverKind::Arv: return "arv";
        case SolverKind::Mwum: return "mwum";
    }
    return "?";
}

struct MmupConfig {
    SolverKind solver = SolverKind::Auto;
    GadgetMode gadget = GadgetMode::PseudoFft;
    GadgetOptions gadget_options;
    double balance_c = 1.0 / 3.0;
    std::uint64_t seed = 1;
    int max_exact_size = 14;
    long long auto_exact_budget = 2'000'000;  // exact_dbcre nodes before auto falls back to arv
};

// Exact search under a budget, then the SDP solver.
class AutoSolver : public DbcreSolver {
public:
    explicit AutoSolver(long long budget) : exact_(ExactCutOptions{budget}) {}
    std::string name() const override { return "auto"; }
    std::optional<DirectedCut> solve(const CutInstance& inst, Rng& rng) const override {
        try {
            return exact_.solve(inst, rng);
        } catch (const SolverError&) {
            return arv_.solve(inst, rng);
        }
    }

private:
    ExactDbcreSolver exact_;
    ArvSolver arv_;
};

inline std::unique_ptr<DbcreSolver> make_solver(const MmupConfig& cfg) {
    switch (cfg.solver) {
        case SolverKind::Exact: return std::make_unique<ExactDbcreSolver>();
        case SolverKind::Arv: return std::make_unique<ArvSolver>();
        case SolverKind::Mwum: return std::make_unique<MwumSolver>();
        case SolverKind::Auto: break;
    }
    return std::make_unique<AutoSolver>(cfg.auto_exact_budget);
}

struct MmupResult {
    Dgvf field;
    PopResult pop;
    int gadget_nodes = 0;
    int rigid_edges = 0;
};

// Hasse graph -> gadget -> min-POP by recursive balanced cuts -> gradient field.
inline MmupResult solve_mmup(const SimplicialComplex& k, const MmupConfig& cfg = {}, const Prescriptions* extra = nullptr) {
    auto h = build_hasse(k);
    auto inst = reduce_mmup_to_pop(h, cfg.gadget, extra, cfg.gadget_options);
    auto solver = make_solver(cfg);
    PopConfig pc;
    pc.balance_c = cfg.balance_c;
    pc.seed = cfg.seed;
    pc.max_exact_size = cfg.max_exact_size;
    MmupResult r;
    r.gadget_nodes = inst.node_count;
    r.rigid_edges = inst.rigid_count();
    r.pop = solve_min_pop(inst, *solver, pc);
    auto m = recover_matching(inst, r.pop.solution);
    r.field = extract_dgvf(k, m.pairs);
    return r;
}

}  // namespace dmt

#endif
