// Morse engine, homology, persistence, scalar-field compatibility, pruning.

#include <catch_amalgamated.hpp>

#include <map>
#include <set>

#include "dmt/homology.hpp"
#include "dmt/mmup.hpp"
#include "dmt/morse.hpp"
#include "dmt/persistence.hpp"
#include "dmt/pruning.hpp"
#include "dmt/scalar_field.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace dmt;

namespace {

int cell(const SimplicialComplex& k, std::vector<int> verts) { return k.find(std::move(verts)).value(); }

MmupConfig exact_cfg() {
    MmupConfig c;
    c.solver = SolverKind::Exact;
    return c;
}

// Greedy random acyclic matching: shuffled Hasse edges, kept while the field
// stays a matching and acyclic.
Dgvf random_field(const SimplicialComplex& k, std::mt19937_64& rng, double keep = 1.0) {
    auto h = build_hasse(k);
    std::vector<int> ids(h.edge_count());
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::uniform_real_distribution<> u(0, 1);
    std::vector<std::pair<int, int>> pairs;
    std::vector<char> used(k.size(), 0);
    for (int e : ids) {
        auto [a, b] = h.edges[e];
        if (used[a] || used[b] || u(rng) > keep) continue;
        pairs.push_back({a, b});
        try {
            extract_dgvf(k, pairs);
            used[a] = used[b] = 1;
        } catch (const GradientCycleError&) {
            pairs.pop_back();
        }
    }
    return extract_dgvf(k, pairs);
}

std::vector<long long> betti_of(const SimplicialComplex& k, Coeff c = {}) { return simplicial_homology(k, c).betti; }

std::vector<std::vector<BigInt>> big(const std::vector<std::vector<long long>>& a) {
    std::vector<std::vector<BigInt>> b;
    for (const auto& r : a) b.emplace_back(r.begin(), r.end());
    return b;
}

// Clique complex (up to triangles) of a random graph.
SimplicialComplex random_flag_complex(std::mt19937_64& rng, int nv, double p) {
    std::uniform_real_distribution<> u(0, 1);
    std::vector<std::vector<char>> adj(nv, std::vector<char>(nv, 0));
    std::vector<std::vector<int>> s;
    for (int i = 0; i < nv; ++i) s.push_back({i});
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j)
            if (u(rng) < p) {
                adj[i][j] = adj[j][i] = 1;
                s.push_back({i, j});
            }
    for (int i = 0; i < nv; ++i)
        for (int j = i + 1; j < nv; ++j)
            for (int l = j + 1; l < nv; ++l)
                if (adj[i][j] && adj[j][l] && adj[i][l]) s.push_back({i, j, l});
    return SimplicialComplex::from_simplices(s);
}

// Fewest critical cells over matchings whose pairs share the inherited vertex.
int brute_compatible(const SimplicialComplex& k, const ScalarField& f) {
    auto cc = build_constraints(k, f, TiePolicy::PerturbByIndex);
    auto ph = oracle::plain_hasse(k);
    std::map<std::vector<int>, int> id;
    for (int c = 0; c < k.size(); ++c) id[k.vertices(c)] = c;
    int best = k.size();
    oracle::for_each_acyclic_matching(ph, [&](const std::vector<char>& m) {
        int n = 0;
        for (std::size_t e = 0; e < m.size(); ++e) {
            if (!m[e]) continue;
            auto [a, b] = ph.edges[e];
            if (cc.inherited[id[ph.verts[a]]] != cc.inherited[id[ph.verts[b]]]) return;
            ++n;
        }
        best = std::min(best, k.size() - 2 * n);
    });
    return best;
}

ScalarField field_of(const std::vector<double>& vals) {
    ScalarField f;
    for (std::size_t i = 0; i < vals.size(); ++i) f.values[static_cast<int>(i)] = vals[i];
    return f;
}

}  // namespace

// ---------------------------------------------------------------- morse

TEST_CASE("extracting gradient fields") {
    auto k = corpus::load("solid_tri.cplx");
    auto e = extract_dgvf(k, {});
    CHECK(e.critical_count() == 7);
    auto opt = solve_mmup(k, exact_cfg()).field;
    CHECK(opt.critical_count() == 1);
    CHECK(opt.morse_numbers() == std::vector<int>{1, 0, 0});
    // a closed V-path around the triangle boundary
    auto t = corpus::load("tri_boundary.cplx");
    std::vector<std::pair<int, int>> cyc = {{cell(t, {0}), cell(t, {0, 1})}, {cell(t, {1}), cell(t, {1, 2})},
                                            {cell(t, {2}), cell(t, {0, 2})}};
    CHECK_THROWS_AS(extract_dgvf(t, cyc), GradientCycleError);
    try {
        extract_dgvf(t, cyc);
    } catch (const GradientCycleError& err) {
        CHECK(err.cycle.size() == 6);
    }
    // a cell in two pairs, and a pair that is not a Hasse edge
    CHECK_THROWS(extract_dgvf(t, {{cell(t, {0}), cell(t, {0, 1})}, {cell(t, {0}), cell(t, {0, 2})}}));
    CHECK_THROWS(extract_dgvf(k, {{cell(k, {0}), cell(k, {0, 1, 2})}}));
}

TEST_CASE("gradient fields round-trip through text") {
    std::mt19937_64 rng(2);
    for (const auto& name : corpus::small_names()) {
        auto k = corpus::load(name);
        auto v = random_field(k, rng);
        auto w = read_dgvf(k, write_dgvf(v));
        CHECK(w.pairs == v.pairs);
        CHECK(w.critical == v.critical);
    }
    CHECK_THROWS_AS(read_dgvf(corpus::load("solid_tri.cplx"), "0 x\n"), InputError);
}

TEST_CASE("implicit Morse function satisfies the axioms") {
    auto v1 = parse_complex("0\n");
    CHECK(topo_sort_dmf(v1, empty_dgvf(v1)) == std::vector<int>{0});
    auto e = parse_complex("0 1\n");
    auto ve = extract_dgvf(e, {{0, 2}});
    auto order = topo_sort_dmf(e, ve);
    auto f = dmf_values(order);
    CHECK(std::abs(f[0] - f[2]) == 1);  // the pair is adjacent in the order
    CHECK(check_dmf(e, f).ok());
    CHECK(f[0] > f[2]);  // a gradient pair reverses the face order
    auto t = corpus::load("tri_boundary.cplx");
    CHECK(check_dmf(t, dmf_values(topo_sort_dmf(t, solve_mmup(t, exact_cfg()).field))).ok());
    std::mt19937_64 rng(4);
    for (int i = 0; i < 60; ++i) {
        auto k = corpus::random_complex(rng, 7, 6, 3);
        auto v = random_field(k, rng);
        auto g = dmf_values(topo_sort_dmf(k, v));
        auto chk = check_dmf(k, g);
        REQUIRE(chk.ok());
        // the equalities are exactly the gradient pairs
        for (int c = 0; c < k.size(); ++c)
            for (int co : k.cofaces(c)) CHECK((g[co] <= g[c]) == (v.up[c] == co));
    }
}

TEST_CASE("Morse boundary examples") {
    for (const auto& name : corpus::small_names()) {
        auto k = corpus::load(name);
        auto mb = compute_morse_boundary(k, empty_dgvf(k));
        for (int q = 1; q <= k.dimension(); ++q) CHECK(mb.matrix(q).dense() == boundary_matrix(k, q).dense());
    }
    auto s = corpus::load("solid_tri.cplx");
    auto ms = compute_morse_boundary(s, solve_mmup(s, exact_cfg()).field);
    CHECK(ms.critical[0].size() == 1);
    for (int q = 1; q < static_cast<int>(ms.matrices.size()); ++q) CHECK(ms.matrices[q].cols * ms.matrices[q].rows == 0);
    auto t = corpus::load("tri_boundary.cplx");
    auto mt = compute_morse_boundary(t, solve_mmup(t, exact_cfg()).field);
    CHECK(mt.matrix(1).dense() == std::vector<std::vector<long long>>{{0}});
}

TEST_CASE("Morse boundary equals explicit path enumeration") {
    std::mt19937_64 rng(8);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        auto k = corpus::random_small_complex(rng, 20);
        auto v = random_field(k, rng, 0.7);
        auto mb = compute_morse_boundary(k, v);
        REQUIRE(boundary_squares_to_zero(mb));
        for (int q = 1; q < static_cast<int>(mb.critical.size()); ++q)
            for (int beta : mb.critical[q])
                for (int alpha : mb.critical[q - 1]) {
                    CHECK(mb.multiplicity(alpha, beta) == corpus::brute_multiplicity(k, v, alpha, beta));
                    ++checked;
                }
    }
    for (const auto& name : corpus::all_names()) {
        auto k = corpus::load(name);
        for (int r = 0; r < 5; ++r) CHECK(boundary_squares_to_zero(compute_morse_boundary(k, random_field(k, rng))));
    }
    CHECK(checked > 100);
}

TEST_CASE("smooth cancellation") {
    auto e = parse_complex("0 1\n");
    auto v = cancel_pair(e, empty_dgvf(e), cell(e, {0}), cell(e, {0, 1}));
    CHECK(v.critical_count() == 1);
    // two paths of opposite sign between the critical edge and vertex
    auto t = corpus::load("tri_boundary.cplx");
    auto vt = extract_dgvf(t, {{cell(t, {1}), cell(t, {1, 2})}, {cell(t, {2}), cell(t, {0, 2})}});
    REQUIRE(vt.critical_count() == 2);
    CHECK(compute_morse_boundary(t, vt).multiplicity(cell(t, {0}), cell(t, {0, 1})) == 0);
    CHECK(count_gradient_paths(t, vt, cell(t, {0, 1}), cell(t, {0})) == 2);
    CHECK_THROWS_AS(cancel_pair(t, vt, cell(t, {0}), cell(t, {0, 1})), CancellationRefused);
    CHECK_THROWS_AS(cancel_pair(t, vt, cell(t, {1}), cell(t, {0, 1})), CancellationRefused);  // not critical
    // path of three edges with two extra critical cells
    auto p = corpus::load("path4.cplx");
    auto vp = extract_dgvf(p, {{cell(p, {1}), cell(p, {0, 1})}, {cell(p, {2}), cell(p, {1, 2})}});
    REQUIRE(vp.critical_count() == 3);
    auto after = cancel_pair(p, vp, cell(p, {3}), cell(p, {2, 3}));
    CHECK(after.critical_count() == oracle::brute_force_mmup(p));
}

TEST_CASE("ridge critical cells") {
    auto k = corpus::load("solid_tri.cplx");
    const int sigma = cell(k, {0, 1, 2}), tau = cell(k, {0, 1}), gamma = cell(k, {0});
    auto v = extract_dgvf(k, {{gamma, tau}});
    CHECK(ridges(k, v, sigma) == std::vector<int>{tau});
    CHECK(ridges(k, empty_dgvf(k), sigma).empty());
    // the edge 0 2 leaves sigma and runs through vertex 0 into tau: (a) fails
    auto v2 = extract_dgvf(k, {{gamma, tau}, {cell(k, {2}), cell(k, {0, 2})}});
    CHECK_THROWS_AS(cancel_nonsmooth(k, v2, sigma, tau, gamma, cell(k, {1})), CancellationRefused);
    CHECK_THROWS_AS(cancel_nonsmooth(k, v, sigma, cell(k, {0, 2}), gamma, cell(k, {1})), CancellationRefused);
}

TEST_CASE("non-smooth cancellation removes two critical cells and keeps homology") {
    std::mt19937_64 rng(10);
    int done = 0, refused = 0;
    for (int i = 0; i < 300 && done < 25; ++i) {
        auto k = corpus::random_complex(rng, 6, 5, 2);
        if (k.dimension() < 2) continue;
        auto v = random_field(k, rng, 0.6);
        const auto before = morse_homology(k, v);
        for (int q = 2; q <= k.dimension(); ++q)
            for (int sigma : v.critical[q])
                for (int tau : ridges(k, v, sigma))
                    for (int alpha : v.critical[q - 1]) {
                        try {
                            auto w = cancel_nonsmooth(k, v, sigma, tau, v.down[tau], alpha);
                            ++done;
                            CHECK(w.critical_count() == v.critical_count() - 2);
                            CHECK(w.is_critical(v.down[tau]) == false);
                            CHECK(w.up[tau] == sigma);
                            CHECK(morse_homology(k, w) == before);
                            CHECK(before == simplicial_homology(k));
                        } catch (const CancellationRefused&) {
                            ++refused;
                        }
                    }
    }
    CHECK(done >= 5);
    CHECK(refused > 0);
}

TEST_CASE("greedy cancellation keeps homology") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 40; ++i) {
        auto k = corpus::random_complex(rng, 7, 6, 3);
        auto v = random_field(k, rng, 0.5);
        const int c0 = v.critical_count();
        const int n = cancel_greedily(k, v);
        CHECK(v.critical_count() == c0 - 2 * n);
        for (int p : {0, 2, 3}) CHECK(morse_homology(k, v, {p}) == simplicial_homology(k, {p}));
    }
}

TEST_CASE("Morse numbers and inequalities") {
    auto s = morse_summary(corpus::load("solid_tri.cplx"), solve_mmup(corpus::load("solid_tri.cplx"), exact_cfg()).field, {1});
    CHECK(s.c == std::vector<int>{1, 0, 0});
    CHECK(s.chi == 1);
    auto t = corpus::load("tri_boundary.cplx");
    auto st = morse_summary(t, solve_mmup(t, exact_cfg()).field, betti_of(t));
    CHECK(st.c == std::vector<int>{1, 1});
    CHECK(st.chi == 0);
    auto d = corpus::load("tetra_boundary.cplx");
    auto fd = solve_mmup(d, exact_cfg()).field;
    CHECK(fd.critical_count() == oracle::brute_force_mmup(d));
    auto sd = morse_summary(d, fd, betti_of(d));
    CHECK(sd.c == std::vector<int>{1, 0, 1});
    CHECK(sd.wmoc_ratio == 1.0);
    // Betti numbers that the field cannot support
    CHECK_THROWS_AS(morse_summary(t, solve_mmup(t, exact_cfg()).field, {2, 1}), std::logic_error);
    CHECK(format_summary(st).find("critical: 1 1\n") != std::string::npos);
}

TEST_CASE("weak Morse inequalities on random fields") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 50; ++i) {
        auto k = corpus::random_complex(rng, 7, 6, 3);
        auto v = random_field(k, rng, 0.8);
        CHECK_NOTHROW(morse_summary(k, v, betti_of(k)));
        CHECK_NOTHROW(morse_summary(k, v, betti_of(k, {2})));
    }
}

// ---------------------------------------------------------------- homology

TEST_CASE("Smith normal form examples") {
    auto id = smith_normal_form(big({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    CHECK(id.diagonal == std::vector<BigInt>{1, 1, 1});
    CHECK(smith_normal_form(big({{2, 0}, {0, 4}})).diagonal == std::vector<BigInt>{2, 4});
    CHECK(smith_normal_form(big({{2, 0}, {0, 3}})).diagonal == std::vector<BigInt>{1, 6});
    CHECK(smith_normal_form(big({{0, 0}, {0, 0}})).rank == 0);
    auto x = smith_normal_form(to_big(boundary_matrix(corpus::load("fig_x.cplx"), 1)));
    CHECK(x.rank == 3);
    CHECK(x.diagonal == std::vector<BigInt>{1, 1, 1});
}

TEST_CASE("Smith normal form is invariant under permutations") {
    std::mt19937_64 rng(16);
    std::uniform_int_distribution<int> val(-4, 4), dim(1, 6);
    for (int t = 0; t < 60; ++t) {
        const int r = dim(rng), c = dim(rng);
        std::vector<std::vector<long long>> a(r, std::vector<long long>(c));
        for (auto& row : a)
            for (auto& x : row) x = val(rng) * (val(rng) > 0);
        auto ref = smith_normal_form(big(a));
        for (std::size_t i = 1; i < ref.diagonal.size(); ++i) CHECK(ref.diagonal[i] % ref.diagonal[i - 1] == 0);
        std::vector<int> pr(r), pc(c);
        std::iota(pr.begin(), pr.end(), 0);
        std::iota(pc.begin(), pc.end(), 0);
        std::shuffle(pr.begin(), pr.end(), rng);
        std::shuffle(pc.begin(), pc.end(), rng);
        std::vector<std::vector<long long>> b(r, std::vector<long long>(c));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) b[i][j] = a[pr[i]][pc[j]];
        auto got = smith_normal_form(big(b));
        CHECK(got.diagonal == ref.diagonal);
        // the rank over Q agrees with the rank mod a large prime
        SparseMatrix m;
        m.rows = r;
        m.cols = c;
        m.col.resize(c);
        for (int j = 0; j < c; ++j)
            for (int i = 0; i < r; ++i)
                if (a[i][j]) m.col[j].push_back({i, a[i][j]});
        CHECK(rank_mod_p(m, 1000003) == ref.rank);
    }
}

TEST_CASE("homology of small complexes") {
    auto x = simplicial_homology(corpus::load("fig_x.cplx"));
    CHECK(x.betti == std::vector<long long>{1, 1, 0});
    auto d = simplicial_homology(corpus::load("tetra_boundary.cplx"));
    CHECK(d.betti == std::vector<long long>{1, 0, 1});
    auto rp = corpus::load("rp2.cplx");
    auto hz = simplicial_homology(rp);
    CHECK(hz.betti == std::vector<long long>{1, 0, 0});
    CHECK(hz.torsion[1] == std::vector<BigInt>{2});
    CHECK(format_homology(hz) == "H_0 = Z\nH_1 = Z/2\nH_2 = 0\n");
    CHECK(simplicial_homology(rp, {2}).betti == std::vector<long long>{1, 1, 1});
    CHECK(simplicial_homology(rp, {3}).betti == std::vector<long long>{1, 0, 0});
    CHECK_THROWS_AS(parse_coeff("Z4"), InputError);
    CHECK_THROWS_AS(parse_coeff("Q"), InputError);
    CHECK(parse_coeff("Z5").p == 5);
}

TEST_CASE("chain complex validation") {
    SparseMatrix bad;
    bad.rows = 2;
    bad.cols = 1;
    bad.col = {{{0, 1}}};
    CHECK_THROWS_AS(homology_from_chain({SparseMatrix{}, bad}, {3, 1}), std::invalid_argument);
    // d1 d2 != 0
    SparseMatrix d1, d2;
    d1.rows = 2, d1.cols = 1, d1.col = {{{0, -1}, {1, 1}}};
    d2.rows = 1, d2.cols = 1, d2.col = {{{0, 1}}};
    CHECK_THROWS_AS(homology_from_chain({SparseMatrix{}, d1, d2}, {2, 1, 1}), std::invalid_argument);
}

TEST_CASE("homology through the Morse pipeline") {
    auto s = homology_via_mmup(corpus::load("solid_tri.cplx"));
    CHECK(s.groups.betti == std::vector<long long>{1, 0, 0});
    auto t = homology_via_mmup(corpus::load("tri_boundary.cplx"));
    CHECK(t.groups.betti == std::vector<long long>{1, 1});
    std::mt19937_64 rng(18);
    for (int i = 0; i < 5; ++i) {
        SimplicialComplex k;
        do k = random_flag_complex(rng, 9, 0.45);
        while (k.size() < 26 || k.size() > 34);
        auto r = homology_via_mmup(k);
        CHECK(r.groups == simplicial_homology(k));
        CHECK(r.groups.euler() == euler_characteristic(k));
    }
}

TEST_CASE("Morse homology equals simplicial homology on the corpus") {
    for (const auto& name : corpus::all_names()) {
        auto k = corpus::load(name);
        auto run = homology_via_mmup(k);
        INFO(name);
        CHECK(run.groups == simplicial_homology(k));
        CHECK(run.field.critical_count() <= run.mmup_critical);
        for (int p : {2, 3, 5}) CHECK(morse_homology(k, run.field, {p}) == simplicial_homology(k, {p}));
        CHECK(simplicial_homology(k).euler() == euler_characteristic(k));
    }
}

// ---------------------------------------------------------------- persistence

TEST_CASE("parsing filtrations") {
    auto f = parse_filtration("0 0\n0 1\n1 0 1\n");
    CHECK(f.size() == 3);
    CHECK(f.dim_at(2) == 1);
    CHECK_THROWS_AS(parse_filtration("0 0 1\n1 0\n1 1\n"), InputError);  // edge before its vertices
    CHECK_THROWS_AS(parse_filtration("0 0\n1 0 1\n"), InputError);        // missing vertex
    CHECK_THROWS_AS(parse_filtration("0 0\n0 0\n"), InputError);
    CHECK_THROWS_AS(parse_filtration("x 0\n"), InputError);
    auto g = parse_filtration(serialize_filtration(f));
    CHECK(serialize_filtration(g) == serialize_filtration(f));
}

TEST_CASE("Rips filtration of three points") {
    auto deg = [](double a) { return std::vector<double>{std::cos(a * M_PI / 180), std::sin(a * M_PI / 180)}; };
    auto r = rips_filtration({deg(60), deg(180), deg(330)}, 2);
    auto file = parse_filtration(corpus::read("rips3.filt"));
    REQUIRE(r.size() == 7);
    REQUIRE(file.size() == 7);
    for (int i = 0; i < 7; ++i) {
        CHECK(r.complex.vertices(r.order[i]) == file.complex.vertices(file.order[i]));
        CHECK(std::abs(r.value[i] - file.value[i]) < 1e-6);
    }
    // an edge enters at half its length: chord of 120 degrees on the unit circle
    CHECK(std::abs(r.value[r.index[cell(r.complex, {0, 1})]] - std::sqrt(3.0) / 2) < 1e-12);
    CHECK(rips_filtration({deg(60), deg(180), deg(330)}, 2, 0.8).size() == 4);
}

TEST_CASE("persistence by column reduction") {
    auto one = persist_naive(parse_filtration("0 0\n"));
    REQUIRE(one.size() == 1);
    CHECK(one[0].dim == 0);
    CHECK_FALSE(one[0].finite());
    auto tri = persist_naive(parse_filtration(corpus::read("tri_fill.filt")));
    int fin1 = 0, inf0 = 0;
    for (const auto& p : tri) {
        if (p.dim == 1) {
            CHECK(p.finite());
            CHECK(p.death_value == 2.0);
            ++fin1;
        }
        if (p.dim == 0 && !p.finite()) ++inf0;
    }
    CHECK(fin1 == 1);
    CHECK(inf0 == 1);
    auto merge = persist_naive(parse_filtration("0 0\n0 1\n3 0 1\n"));
    REQUIRE(merge.size() == 2);
    int finite = 0;
    for (const auto& p : merge)
        if (p.finite()) {
            ++finite;
            CHECK(p.death_value == 3.0);
        }
    CHECK(finite == 1);
}

TEST_CASE("incremental persistence on fixed examples") {
    auto tri = parse_filtration(corpus::read("tri_fill.filt"));
    CHECK(persist_incremental(tri) == persist_naive(tri));
    auto cone = lower_star_filtration(corpus::load("cone4.cplx"), {3, 1, 4, 2, 0});
    auto pc = persist_incremental(cone);
    CHECK(pc == persist_naive(cone));
    int inf = 0;
    for (const auto& p : pc)
        if (!p.finite()) {
            ++inf;
            CHECK(p.dim == 0);
        }
    CHECK(inf == 1);
    auto r3 = parse_filtration(corpus::read("rips3.filt"));
    CHECK(diagram_text(persist_incremental(r3)) == diagram_text(persist_naive(r3)));
}

TEST_CASE("incremental persistence equals the reduction oracle") {
    Rng rng(20);
    int steps50 = 0;
    for (int i = 0; i < 60; ++i) {
        auto k = i % 3 ? random_2_complex(8, 9, 4, rng) : random_2_complex(12, 14, 6, rng);
        std::uniform_real_distribution<> u(0, 1);
        std::vector<double> val;
        for (int c = 0; c < k.count(0); ++c) val.push_back(u(rng));
        auto f = i % 2 ? lower_star_filtration(k, val) : random_filtration(k, rng);
        steps50 += f.size() >= 50;
        IncrementalStats st;
        auto a = persist_incremental(f, {}, &st);
        auto b = persist_naive(f);
        REQUIRE(a == b);
        CHECK(diagram_text(a) == diagram_text(b));
        CHECK(st.positive + st.geometric + st.algebraic == f.size());
        for (const auto& p : a) {
            if (!p.finite()) continue;
            CHECK(f.dim_at(p.death) == p.dim + 1);
            CHECK(p.death_value >= p.birth_value);
        }
    }
    CHECK(steps50 > 0);
    // the projective plane drives algebraic pairs; step D off and on agree
    auto rp = corpus::load("rp2.cplx");
    for (int i = 0; i < 20; ++i) {
        auto f = random_filtration(rp, rng);
        CHECK(persist_incremental(f, {0}) == persist_naive(f));
        CHECK(persist_incremental(f, {1}) == persist_naive(f));
    }
}

TEST_CASE("unpaired births count the Betti numbers of every prefix") {
    Rng rng(22);
    for (int i = 0; i < 15; ++i) {
        auto k = random_2_complex(7, 6, 3, rng);
        auto f = random_filtration(k, rng);
        auto pairs = persist_incremental(f);
        for (int s = 0; s < f.size(); ++s) {
            std::vector<int> ids(f.order.begin(), f.order.begin() + s + 1);
            auto h = simplicial_homology(k.subcomplex(ids), {2});
            auto pb = prefix_betti(pairs, s, 2);
            for (int q = 0; q <= 2; ++q) CHECK(pb[q] == (q < static_cast<int>(h.betti.size()) ? h.betti[q] : 0));
        }
    }
}

TEST_CASE("diagram output") {
    CHECK(diagram_text({}).empty());
    CHECK(diagram_svg({}).find("<circle") == std::string::npos);
    PersistencePair p;
    p.dim = 1;
    p.birth = 0;
    p.death = 1;
    p.birth_value = 1;
    p.death_value = 3;
    CHECK(diagram_text({p}) == "1 1 3\n");
    auto svg = diagram_svg({p});
    auto at = svg.find("<circle");
    REQUIRE(at != std::string::npos);
    CHECK(svg.find("<circle", at + 1) == std::string::npos);
    auto num = [&](const std::string& key) { return std::stod(svg.substr(svg.find(key, at) + key.size())); };
    const double cx = num("cx=\""), cy = num("cy=\"");
    // the diagonal runs from bottom left to top right; a point above it has a smaller y than the diagonal at cx
    SvgStyle st;
    const double diag_y = st.height - (cx - st.margin) * (st.height - 2.0 * st.margin) / (st.width - 2.0 * st.margin) - st.margin;
    CHECK(cy < diag_y);
}

// ---------------------------------------------------------------- scalar fields

TEST_CASE("compatibility constraints of the tetrahedron field") {
    auto k = corpus::load("fig_x2.cplx");
    auto f = parse_scalar_field(corpus::read("fig_x2.field"));
    auto cc = build_constraints(k, f);
    auto val = [&](std::vector<int> s) { return cc.value[cell(k, s)]; };
    CHECK(val({0, 1}) == 8);
    CHECK(val({1, 2}) == 12);
    CHECK(val({0, 1, 2}) == 12);
    CHECK(cc.inherited[cell(k, {0, 3})] == 0);
    CHECK(cc.exceptional[cell(k, {0, 3})] == cell(k, {3}));
    CHECK(cc.exceptional[cell(k, {1, 2, 3})] == cell(k, {1, 3}));
    auto h = build_hasse(k);
    std::set<std::pair<int, int>> prohibited;
    for (int e : cc.prohibited) prohibited.insert(h.edges[e]);
    CHECK(prohibited.count({cell(k, {3}), cell(k, {0, 3})}));
    CHECK(prohibited.count({cell(k, {1, 3}), cell(k, {1, 2, 3})}));
    CHECK(cc.prohibited.size() == static_cast<std::size_t>(k.size() - k.count(0)));
    auto text = format_constraints(k, cc);
    CHECK(text.find("v0v1 : f = 8 +- eps^1") != std::string::npos);
    CHECK(text.find("v1v2 : f = 12 +- eps^1") != std::string::npos);
    CHECK(text.find("v0v1v2 : f = 12 +- eps^2") != std::string::npos);
}

TEST_CASE("scalar field parsing and ties") {
    CHECK_THROWS_AS(parse_scalar_field("0 1\n0 2\n"), InputError);
    CHECK_THROWS_AS(parse_scalar_field("0\n"), InputError);
    auto k = corpus::load("path4.cplx");
    auto tie = field_of({1, 1, 2, 3});
    CHECK_THROWS_AS(build_constraints(k, tie, TiePolicy::Reject), InputError);
    auto cc = build_constraints(k, tie, TiePolicy::PerturbByIndex);
    CHECK(cc.inherited[cell(k, {0, 1})] == 1);  // larger label wins the tie
    CHECK_THROWS_AS(build_constraints(k, field_of({1, 2, 3})), InputError);  // vertex 3 missing
}

TEST_CASE("compatible fields on paths") {
    auto p5 = parse_complex("0 1\n1 2\n2 3\n3 4\n");
    auto mono = field_of({0, 1, 2, 3, 4});
    auto r = solve_compatible(p5, mono, exact_cfg());
    CHECK(r.mmup.field.critical_count() == 1);
    CHECK(r.mmup.field.critical[0] == std::vector<int>{cell(p5, {0})});
    CHECK(brute_compatible(p5, mono) == 1);
    auto two = field_of({0, 4, 1, 2, 3});
    auto r2 = solve_compatible(p5, two, exact_cfg());
    CHECK(r2.mmup.field.morse_numbers()[0] >= 2);
    CHECK(r2.mmup.field.critical_count() == brute_compatible(p5, two));
    CHECK(r2.report.ok());
}

TEST_CASE("compatible optimum on the tetrahedron") {
    auto k = corpus::load("fig_x2.cplx");
    auto f = parse_scalar_field(corpus::read("fig_x2.field"));
    auto r = solve_compatible(k, f, exact_cfg());
    CHECK(r.report.ok());
    CHECK(r.report.pairs == static_cast<int>(r.mmup.field.pairs.size()));
    CHECK(r.mmup.field.critical_count() == brute_compatible(k, f));
}

TEST_CASE("compatibility violations") {
    auto k = corpus::load("fig_x2.cplx");
    auto f = parse_scalar_field(corpus::read("fig_x2.field"));
    auto cc = build_constraints(k, f);
    const int c = cell(k, {1, 2, 3});
    auto v = extract_dgvf(k, {{cc.exceptional[c], c}});
    auto rep = validate_compatibility(k, f, v);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0] == std::make_pair(cc.exceptional[c], c));
    // unconstrained optima usually ignore the field; constrained ones never beat them
    std::mt19937_64 rng(24);
    int bitten = 0;
    for (const auto& name : corpus::small_names()) {
        auto kk = corpus::load(name);
        std::vector<double> vals;
        for (int i = 0; i < kk.count(0); ++i) vals.push_back(i);
        std::shuffle(vals.begin(), vals.end(), rng);
        ScalarField ff;
        for (int i = 0; i < kk.count(0); ++i) ff.values[kk.vertices(i)[0]] = vals[i];
        auto free = solve_mmup(kk, exact_cfg()).field;
        auto comp = solve_compatible(kk, ff, exact_cfg());
        CHECK(comp.report.ok());
        CHECK(comp.mmup.field.critical_count() >= free.critical_count());
        bitten += !validate_compatibility(kk, ff, free).ok();
    }
    CHECK(bitten > 0);
}

TEST_CASE("gradient paths descend the inherited value") {
    std::mt19937_64 rng(26);
    for (int i = 0; i < 20; ++i) {
        auto k = corpus::random_complex(rng, 6, 5, 3);
        std::vector<double> vals(6);
        std::iota(vals.begin(), vals.end(), 0.0);
        std::shuffle(vals.begin(), vals.end(), rng);
        ScalarField f;
        for (int c = 0; c < k.count(0); ++c) f.values[k.vertices(c)[0]] = vals[k.vertices(c)[0]];
        auto r = solve_compatible(k, f);
        REQUIRE(r.report.ok());
        const auto& v = r.mmup.field;
        const auto& cc = r.constraints;
        for (int x = 0; x < k.size(); ++x) {
            if (v.up[x] < 0) continue;
            for (int y : k.faces(v.up[x]))
                if (y != x) CHECK(cc.value[y] <= cc.value[x]);
        }
    }
}

// ---------------------------------------------------------------- pruning

TEST_CASE("boundary cells") {
    auto s = corpus::load("solid_tri.cplx");
    CHECK(find_boundary(s, 2) == std::vector<int>{cell(s, {0, 1, 2})});
    CHECK(find_boundary(corpus::load("tri_boundary.cplx"), 1).empty());
    auto st = corpus::load("strip.cplx");
    CHECK(find_boundary(st, 2) == std::vector<int>{cell(st, {0, 1, 2}), cell(st, {1, 2, 3})});
}

TEST_CASE("pruning examples") {
    auto s = corpus::load("solid_tri.cplx");
    auto ps = prune_boundary(s);
    CHECK(ps.trace.size() == 3);
    CHECK(ps.core.size() == 1);
    CHECK(format_trace(ps.trace) == "2 5 6\n1 1 3\n1 2 4\n");
    auto t = corpus::load("tri_boundary.cplx");
    auto pt = prune_boundary(t);
    CHECK(pt.trace.empty());
    CHECK(pt.core.size() == 6);
    CHECK(prune_boundary(corpus::load("cone4.cplx")).core.size() == 1);
    CHECK(prune_boundary(corpus::load("tetra_boundary.cplx")).core.size() == 14);
}

TEST_CASE("dominated vertices") {
    auto e = check_core(parse_complex("0 1\n"));
    CHECK(e.dominated.size() == 2);
    CHECK_FALSE(e.ok());
    CHECK(check_core(corpus::load("tri_boundary.cplx")).ok());
    for (const auto& name : corpus::all_names()) {
        INFO(name);
        CHECK(check_core(prune_boundary(corpus::load(name)).core).ok());
    }
}

TEST_CASE("pruning replays as elementary collapses") {
    std::mt19937_64 rng(28);
    std::vector<SimplicialComplex> ks;
    for (const auto& name : corpus::all_names()) ks.push_back(corpus::load(name));
    for (int i = 0; i < 40; ++i) ks.push_back(corpus::random_complex(rng, 8, 7, 3));
    for (const auto& k : ks) {
        auto pr = prune_boundary(k);
        std::vector<char> alive(k.size(), 1);
        int last_dim = k.dimension();
        for (const auto& p : pr.trace) {
            CHECK(p.dim <= last_dim);
            last_dim = p.dim;
            REQUIRE(alive[p.rho]);
            REQUIRE(alive[p.eta]);
            int cof = 0;
            for (int c : k.cofaces(p.rho)) cof += alive[c];
            CHECK(cof == 1);
            CHECK(k.is_facet(p.rho, p.eta));
            alive[p.rho] = alive[p.eta] = 0;
        }
        CHECK(static_cast<int>(pr.core_cells.size()) == static_cast<int>(std::count(alive.begin(), alive.end(), 1)));
        CHECK(pr.core.size() == static_cast<int>(pr.core_cells.size()));
        CHECK(simplicial_homology(pr.core) == simplicial_homology(k));
        CHECK(check_core(pr.core).ok());
        CHECK(pr.seed.pairs.size() == pr.trace.size());
    }
}

TEST_CASE("pruned MMUP reaches the brute-force optimum") {
    for (const auto& name : corpus::small_names()) {
        auto k = corpus::load(name);
        if (k.size() > 20) continue;
        INFO(name);
        const int best = oracle::brute_force_mmup(k);
        auto pr = prune_boundary(k);
        auto r = solve_mmup_pruned(k, pr, exact_cfg());
        CHECK(r.field.critical_count() == best);
        CHECK(solve_mmup(k, exact_cfg()).field.critical_count() == best);
        for (auto [a, b] : pr.seed.pairs) CHECK(r.field.up[a] == b);
    }
}
