// dmt: discrete Morse toolkit command line.
//
// Exit codes: 0 ok, 2 input error, 3 oracle mismatch (--oracle strict),
// 4 solver failure.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dmt/homology.hpp"
#include "dmt/mmup.hpp"
#include "dmt/morse.hpp"
#include "dmt/persistence.hpp"
#include "dmt/pruning.hpp"
#include "dmt/scalar_field.hpp"

namespace {

using namespace dmt;

enum class OracleMode { Off, Report, Strict };

struct Options {
    std::string solver = "auto";
    std::string gadget = "fft";
    std::string oracle = "off";
    std::string coeff = "Z";
    std::string ties = "reject";
    std::uint64_t seed = 1;
    double balance_c = 1.0 / 3.0;
    bool timings = false;
    std::string dgvf_out, svg_out, trace_out;
    int svg_width = 480, svg_height = 480;
    int step_d = 16;
    bool no_cancel = false;
};

struct OracleMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

OracleMode oracle_mode(const Options& o) {
    if (o.oracle == "report") return OracleMode::Report;
    if (o.oracle == "strict") return OracleMode::Strict;
    return OracleMode::Off;
}

MmupConfig mmup_config(const Options& o) {
    MmupConfig c;
    if (o.solver == "exact") c.solver = SolverKind::Exact;
    else if (o.solver == "arv") c.solver = SolverKind::Arv;
    else if (o.solver == "mwum") c.solver = SolverKind::Mwum;
    else c.solver = SolverKind::Auto;
    c.gadget = o.gadget == "mr" ? GadgetMode::MatchingGadget : GadgetMode::PseudoFft;
    c.seed = o.seed;
    c.balance_c = o.balance_c;
    return c;
}

void print_config(const std::string& cmd, const Options& o) {
    std::cout << "command: " << cmd << "\nconfig: solver=" << o.solver << " gadget=" << o.gadget
              << " balance_c=" << o.balance_c << " seed=" << o.seed << " oracle=" << o.oracle << '\n';
}

class Stopwatch {
public:
    explicit Stopwatch(bool on) : on_(on), t_(std::chrono::steady_clock::now()) {}
    void lap(const char* stage) {
        auto now = std::chrono::steady_clock::now();
        if (on_) std::cout << "time." << stage << "_ms: " << std::chrono::duration<double, std::milli>(now - t_).count() << '\n';
        t_ = now;
    }

private:
    bool on_;
    std::chrono::steady_clock::time_point t_;
};

// Prints the oracle verdict; strict mode turns a mismatch into exit code 3.
void oracle_verdict(const Options& o, bool ok, const std::string& what) {
    if (oracle_mode(o) == OracleMode::Off) return;
    std::cout << "oracle: " << (ok ? "match" : "MISMATCH") << " (" << what << ")\n";
    if (!ok && oracle_mode(o) == OracleMode::Strict) throw OracleMismatch(what);
}

std::vector<long long> betti_of(const SimplicialComplex& k) { return simplicial_homology(k, {2}).betti; }

void print_trace(const PopResult& pop) {
    const auto& t = pop.trace;
    int leaves = 0;
    for (const auto& n : t.nodes) leaves += n.leaf;
    std::cout << "solver_trace: depth=" << t.depth() << " splits=" << t.nodes.size() - leaves << " leaves=" << leaves
              << " cut_cost=" << t.total_cut_cost() << " rejected=" << pop.rejected << " reinserted=" << pop.reinserted
              << '\n';
}

int cmd_morse(const std::string& file, const Options& o) {
    Stopwatch sw(o.timings);
    auto k = parse_complex(read_file(file));
    print_config("morse", o);
    sw.lap("parse");
    auto r = solve_mmup(k, mmup_config(o));
    sw.lap("mmup");
    auto b = betti_of(k);
    auto s = morse_summary(k, r.field, b);
    std::cout << "cells: " << k.size() << "\ngadget_nodes: " << r.gadget_nodes << "\nrigid_edges: " << r.rigid_edges
              << '\n'
              << format_summary(s);
    for (std::size_t m = 0; m < s.c.size(); ++m) std::cout << "c" << m << "=" << s.c[m] << (m + 1 < s.c.size() ? " " : "\n");
    std::cout << "euler_check: " << (s.chi == euler_characteristic(k) ? "ok" : "fail") << '\n';
    print_trace(r.pop);
    if (!o.dgvf_out.empty()) write_file(o.dgvf_out, write_dgvf(r.field));
    if (oracle_mode(o) != OracleMode::Off) {
        auto mb = compute_morse_boundary(k, r.field);
        oracle_verdict(o, boundary_squares_to_zero(mb), "morse boundary squares to zero");
        if (k.size() <= 20) {
            auto inst = reduce_mmup_to_pop(k, GadgetMode::PseudoFft);
            const int opt = mmup_objective(inst, exact_min_pop(inst));
            oracle_verdict(o, opt == r.field.critical_count(),
                           "exact optimum " + std::to_string(opt) + ", pipeline " + std::to_string(r.field.critical_count()));
        }
    }
    sw.lap("report");
    return 0;
}

int cmd_homology(const std::string& file, const Options& o) {
    Stopwatch sw(o.timings);
    auto k = parse_complex(read_file(file));
    auto coeff = parse_coeff(o.coeff);
    print_config("homology", o);
    std::cout << "coeff: " << coeff.name() << '\n';
    sw.lap("parse");
    auto r = homology_via_mmup(k, mmup_config(o), coeff, !o.no_cancel);
    sw.lap("pipeline");
    std::cout << "mmup_critical: " << r.mmup_critical << "\ncancelled: " << r.cancelled
              << "\nmorse_complex_cells: " << r.field.critical_count() << '\n'
              << format_homology(r.groups);
    if (oracle_mode(o) != OracleMode::Off) {
        auto ref = simplicial_homology(k, coeff);
        oracle_verdict(o, ref == r.groups, "simplicial Smith normal form");
    }
    sw.lap("report");
    return 0;
}

int cmd_persist(const std::string& file, const Options& o) {
    Stopwatch sw(o.timings);
    auto f = parse_filtration(read_file(file));
    print_config("persist", o);
    sw.lap("parse");
    IncrementalStats st;
    auto pairs = persist_incremental(f, {o.step_d}, &st);
    sw.lap("incremental");
    int finite = 0;
    for (const auto& p : pairs) finite += p.finite();
    std::cout << "simplices: " << f.size() << "\npairs: " << pairs.size() << " (finite " << finite << ", essential "
              << pairs.size() - finite << ")\nevents: positive=" << st.positive << " geometric=" << st.geometric
              << " algebraic=" << st.algebraic << " rollbacks=" << st.rollbacks << " step_d=" << st.step_d_runs
              << "\ndiagram:\n"
              << diagram_text(pairs);
    if (!o.svg_out.empty()) {
        SvgStyle style;
        style.width = o.svg_width;
        style.height = o.svg_height;
        write_file(o.svg_out, diagram_svg(pairs, style));
    }
    if (oracle_mode(o) != OracleMode::Off) {
        auto ref = persist_naive(f);
        sw.lap("naive");
        oracle_verdict(o, ref == pairs && diagram_text(ref) == diagram_text(pairs), "standard column reduction");
    }
    return 0;
}

int cmd_scalar(const std::string& cfile, const std::string& ffile, const Options& o) {
    Stopwatch sw(o.timings);
    auto k = parse_complex(read_file(cfile));
    auto f = parse_scalar_field(read_file(ffile));
    const TiePolicy ties = o.ties == "perturb" ? TiePolicy::PerturbByIndex : TiePolicy::Reject;
    print_config("scalar", o);
    sw.lap("parse");
    auto r = solve_compatible(k, f, mmup_config(o), ties);
    sw.lap("mmup");
    std::cout << format_constraints(k, r.constraints);
    std::cout << "critical:";
    for (int x : r.mmup.field.morse_numbers()) std::cout << ' ' << x;
    std::cout << "\ntotal_critical: " << r.mmup.field.critical_count() << "\npairs: " << r.report.pairs
              << "\nviolations: " << r.report.violations.size() << '\n';
    for (auto [a, b] : r.report.violations) std::cout << "violation: " << a << ' ' << b << '\n';
    if (!o.dgvf_out.empty()) write_file(o.dgvf_out, write_dgvf(r.mmup.field));
    if (oracle_mode(o) != OracleMode::Off) {
        oracle_verdict(o, r.report.ok(), "pairwise compatibility");
        morse_summary(k, r.mmup.field, betti_of(k));
        oracle_verdict(o, true, "Morse inequalities");
    }
    return 0;
}

int cmd_prune(const std::string& file, const Options& o) {
    Stopwatch sw(o.timings);
    auto k = parse_complex(read_file(file));
    print_config("prune", o);
    sw.lap("parse");
    auto r = prune_boundary(k);
    sw.lap("prune");
    std::cout << "cells: " << k.size() << "\ncore_cells: " << r.core.size() << "\ncore_counts:";
    for (int x : r.core.counts()) std::cout << ' ' << x;
    std::cout << "\npairs_by_dim:";
    for (int x : r.per_dim) std::cout << ' ' << x;
    std::cout << "\ntrace:\n" << format_trace(r.trace);
    if (!o.trace_out.empty()) write_file(o.trace_out, format_trace(r.trace));
    if (oracle_mode(o) != OracleMode::Off) {
        oracle_verdict(o, simplicial_homology(k) == simplicial_homology(r.core), "homology preserved");
        auto cr = check_core(r.core);
        oracle_verdict(o, cr.ok(), std::to_string(cr.dominated.size()) + " dominated vertex pairs");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Morse matchings, homology, persistence, scalar fields and pruning"};
    app.require_subcommand(1);
    Options o;
    std::string file, field;

    auto common = [&](CLI::App* sc, bool solver) {
        sc->add_option("--oracle", o.oracle, "compare against the reference computation")
            ->check(CLI::IsMember({"off", "report", "strict"}));
        sc->add_flag("--timings", o.timings, "print per-stage wall times");
        if (!solver) return;
        sc->add_option("--solver", o.solver, "balanced-cut solver")->check(CLI::IsMember({"auto", "exact", "arv", "mwum"}));
        sc->add_option("--gadget", o.gadget, "reduction gadget")->check(CLI::IsMember({"mr", "fft"}));
        sc->add_option("--seed", o.seed, "random seed");
        sc->add_option("--balance-c", o.balance_c, "cut balance c")->check(CLI::Range(0.01, 0.5));
    };

    auto* morse = app.add_subcommand("morse", "near-optimal gradient vector field");
    morse->add_option("complex", file, "complex file")->required();
    morse->add_option("--dgvf", o.dgvf_out, "write the pairs to this file");
    common(morse, true);

    auto* hom = app.add_subcommand("homology", "homology through the Morse complex");
    hom->add_option("complex", file, "complex file")->required();
    hom->add_option("--coeff", o.coeff, "Z, Z2, Z3, Z5, ...");
    hom->add_flag("--no-cancel", o.no_cancel, "skip the greedy cancellation pass");
    common(hom, true);

    auto* per = app.add_subcommand("persist", "persistence pairs of a filtration");
    per->add_option("filtration", file, "filtration file")->required();
    per->add_option("--svg", o.svg_out, "write the diagram as SVG");
    per->add_option("--svg-width", o.svg_width)->check(CLI::Range(64, 8192));
    per->add_option("--svg-height", o.svg_height)->check(CLI::Range(64, 8192));
    per->add_option("--step-d", o.step_d, "re-optimization period in negative events (0 off)")->check(CLI::NonNegativeNumber);
    common(per, false);

    auto* sca = app.add_subcommand("scalar", "gradient field compatible with a vertex scalar field");
    sca->add_option("complex", file, "complex file")->required();
    sca->add_option("field", field, "scalar field file")->required();
    sca->add_option("--ties", o.ties, "non-injective fields")->check(CLI::IsMember({"reject", "perturb"}));
    sca->add_option("--dgvf", o.dgvf_out, "write the pairs to this file");
    common(sca, true);

    auto* pru = app.add_subcommand("prune", "boundary pruning to the core");
    pru->add_option("complex", file, "complex file")->required();
    pru->add_option("--trace", o.trace_out, "write the trace to this file");
    common(pru, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (morse->parsed()) return cmd_morse(file, o);
        if (hom->parsed()) return cmd_homology(file, o);
        if (per->parsed()) return cmd_persist(file, o);
        if (sca->parsed()) return cmd_scalar(file, field, o);
        if (pru->parsed()) return cmd_prune(file, o);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const OracleMismatch& e) {
        std::cerr << "oracle mismatch: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
