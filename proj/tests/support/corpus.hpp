#ifndef DMT_TEST_CORPUS_HPP
#define DMT_TEST_CORPUS_HPP

#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dmt/complex.hpp"
#include "dmt/morse.hpp"

#ifndef DMT_DATA_DIR
#define DMT_DATA_DIR "data"
#endif

namespace corpus {

inline std::string read(const std::string& name) {
    std::ifstream in(std::string(DMT_DATA_DIR) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("missing corpus file " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline dmt::SimplicialComplex load(const std::string& name) { return dmt::parse_complex(read(name)); }

// The bundled complexes with at most 20 cells.
inline std::vector<std::string> small_names() {
    return {"solid_tri.cplx", "tri_boundary.cplx", "path4.cplx", "paths2.cplx", "strip.cplx",
            "tetra_boundary.cplx", "fig_x.cplx", "fig_x2.cplx", "cone4.cplx"};
}

inline std::vector<std::string> all_names() {
    auto v = small_names();
    v.push_back("rp2.cplx");
    return v;
}

// Random complex: a few random simplices of dimension <= max_dim on nv vertices.
inline dmt::SimplicialComplex random_complex(std::mt19937_64& rng, int nv, int simplices, int max_dim) {
    std::uniform_int_distribution<int> pick(0, nv - 1), dimd(0, max_dim);
    std::vector<std::vector<int>> s;
    for (int i = 0; i < simplices; ++i) {
        const int d = dimd(rng);
        std::vector<int> q;
        while (static_cast<int>(q.size()) < d + 1) {
            int v = pick(rng);
            if (std::find(q.begin(), q.end(), v) == q.end()) q.push_back(v);
        }
        s.push_back(q);
    }
    return dmt::SimplicialComplex::from_simplices(s);
}

// Random complex capped at max_cells (regenerates until it fits).
inline dmt::SimplicialComplex random_small_complex(std::mt19937_64& rng, int max_cells) {
    for (;;) {
        std::uniform_int_distribution<int> nv(3, 6), ns(1, 5);
        auto k = random_complex(rng, nv(rng), ns(rng), 2);
        if (k.size() <= max_cells) return k;
    }
}

// Signed V-path sum from the faces of beta to alpha by explicit enumeration of
// every path beta > tau0 < xi0 > tau1 < ... ; sign of one path is
// <d beta, tau0> * prod over hops of -<d xi, tau_i><d xi, tau_{i+1}>.
inline long long brute_multiplicity(const dmt::SimplicialComplex& k, const dmt::Dgvf& v, int alpha, int beta) {
    long long total = 0;
    std::function<void(int, long long)> walk = [&](int tau, long long sign) {
        if (tau == alpha) {
            total += sign;
            return;
        }
        const int xi = v.up[tau];
        if (xi < 0) return;
        const int a = k.incidence(tau, xi);
        for (int t2 : k.faces(xi)) {
            if (t2 == tau) continue;
            walk(t2, sign * (-a * k.incidence(t2, xi)));
        }
    };
    for (int t0 : k.faces(beta)) {
        if (t0 == v.down[beta]) continue;
        walk(t0, k.incidence(t0, beta));
    }
    return total;
}

}  // namespace corpus

#endif
