#ifndef DMT_HOMOLOGY_HPP
#define DMT_HOMOLOGY_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "complex.hpp"
#include "mmup.hpp"
#include "morse.hpp"

namespace dmt {

using BigInt = boost::multiprecision::cpp_int;

// Coefficient ring: p == 0 is the integers, otherwise Z/p for a prime p.
struct Coeff {
    int p = 0;
    bool integral() const { return p == 0; }
    std::string name() const { return p == 0 ? "Z" : "Z" + std::to_string(p); }
};

inline Coeff parse_coeff(std::string_view s) {
    if (s == "Z") return {0};
    if (s.size() > 1 && s[0] == 'Z') {
        int p = 0;
        if (detail::parse_int(s.substr(1), p) && p >= 2) {
            for (int d = 2; d * d <= p; ++d)
                if (p % d == 0) throw InputError("coefficient modulus must be prime: " + std::string(s));
            return {p};
        }
    }
    throw InputError("unknown coefficient ring '" + std::string(s) + "' (expected Z, Z2, Z3, Z5, ...)");
}

struct SnfResult {
    std::vector<BigInt> diagonal;  // nonzero invariant factors, each dividing the next
    int rank = 0;
};

// Smallest-magnitude pivot with full row and column clearing.
inline SnfResult smith_normal_form(std::vector<std::vector<BigInt>> a) {
    SnfResult r;
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    for (int t = 0; t < std::min(rows, cols); ++t) {
        for (;;) {
            int pi = -1, pj = -1;
            BigInt best = 0;
            for (int i = t; i < rows; ++i)
                for (int j = t; j < cols; ++j)
                    if (a[i][j] != 0) {
                        BigInt m = abs(a[i][j]);
                        if (pi < 0 || m < best) {
                            best = m;
                            pi = i;
                            pj = j;
                        }
                    }
            if (pi < 0) goto done;
            std::swap(a[t], a[pi]);
            if (pj != t)
                for (int i = 0; i < rows; ++i) std::swap(a[i][t], a[i][pj]);
            bool clean = true;
            for (int i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0) continue;
                BigInt q = a[i][t] / a[t][t];
                for (int j = t; j < cols; ++j) a[i][j] -= q * a[t][j];
                if (a[i][t] != 0) clean = false;
            }
            for (int j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0) continue;
                BigInt q = a[t][j] / a[t][t];
                for (int i = t; i < rows; ++i) a[i][j] -= q * a[i][t];
                if (a[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            // divisibility: fold a row holding a non-multiple into row t
            int bad = -1;
            for (int i = t + 1; i < rows && bad < 0; ++i)
                for (int j = t + 1; j < cols; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            for (int j = t; j < cols; ++j) a[t][j] += a[bad][j];
        }
        r.diagonal.push_back(abs(a[t][t]));
        ++r.rank;
    }
done:
    return r;
}

inline std::vector<std::vector<BigInt>> to_big(const SparseMatrix& m) {
    std::vector<std::vector<BigInt>> a(m.rows, std::vector<BigInt>(m.cols, 0));
    for (int c = 0; c < m.cols; ++c)
        for (auto [r, v] : m.col[c]) a[r][c] = v;
    return a;
}

// Rank over Z/p by elimination.
inline int rank_mod_p(const SparseMatrix& m, int p) {
    std::vector<std::vector<long long>> a(m.rows, std::vector<long long>(m.cols, 0));
    for (int c = 0; c < m.cols; ++c)
        for (auto [r, v] : m.col[c]) a[r][c] = ((v % p) + p) % p;
    auto inv = [p](long long x) {
        long long r = 1, e = p - 2;
        x %= p;
        while (e > 0) {
            if (e & 1) r = r * x % p;
            x = x * x % p;
            e >>= 1;
        }
        return r;
    };
    int rank = 0;
    for (int c = 0; c < m.cols && rank < m.rows; ++c) {
        int piv = -1;
        for (int r = rank; r < m.rows; ++r)
            if (a[r][c] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(a[rank], a[piv]);
        long long iv = inv(a[rank][c]);
        for (int j = c; j < m.cols; ++j) a[rank][j] = a[rank][j] * iv % p;
        for (int r = 0; r < m.rows; ++r) {
            if (r == rank || a[r][c] == 0) continue;
            long long f = a[r][c];
            for (int j = c; j < m.cols; ++j) a[r][j] = ((a[r][j] - f * a[rank][j]) % p + p) % p;
        }
        ++rank;
    }
    return rank;
}

struct HomologyGroups {
    Coeff coeff;
    std::vector<long long> betti;
    std::vector<std::vector<BigInt>> torsion;  // per dimension, integral case only

    long long euler() const {
        long long s = 0;
        for (std::size_t q = 0; q < betti.size(); ++q) s += (q % 2 == 0 ? 1 : -1) * betti[q];
        return s;
    }
    // Trailing zero groups are ignored, so complexes of different dimension compare.
    bool operator==(const HomologyGroups& o) const {
        if (coeff.p != o.coeff.p) return false;
        const std::size_t n = std::max(betti.size(), o.betti.size());
        for (std::size_t q = 0; q < n; ++q) {
            if ((q < betti.size() ? betti[q] : 0) != (q < o.betti.size() ? o.betti[q] : 0)) return false;
            static const std::vector<BigInt> none;
            if ((q < torsion.size() ? torsion[q] : none) != (q < o.torsion.size() ? o.torsion[q] : none)) return false;
        }
        return true;
    }
};

// H_q = Z^b ⊕ Z/d1 ⊕ ...
inline std::string format_homology(const HomologyGroups& h) {
    std::ostringstream os;
    for (std::size_t q = 0; q < h.betti.size(); ++q) {
        os << "H_" << q << " = ";
        std::vector<std::string> parts;
        if (h.betti[q] > 0) parts.push_back(h.coeff.name() + (h.betti[q] > 1 ? "^" + std::to_string(h.betti[q]) : ""));
        for (const auto& d : h.torsion[q]) parts.push_back("Z/" + d.str());
        if (parts.empty()) parts.push_back("0");
        for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? " ⊕ " : "") << parts[i];
        os << '\n';
    }
    return os.str();
}

// boundaries[q] is d_q : C_q -> C_{q-1} for q >= 1 (boundaries[0] is ignored);
// cells[q] the rank of C_q.
inline HomologyGroups homology_from_chain(const std::vector<SparseMatrix>& boundaries, const std::vector<int>& cells,
                                          Coeff coeff = {}) {
    const int D = static_cast<int>(cells.size()) - 1;
    for (int q = 1; q <= D; ++q) {
        if (q >= static_cast<int>(boundaries.size())) throw std::invalid_argument("homology_from_chain: missing boundary map");
        const auto& m = boundaries[q];
        if (m.cols != cells[q] || m.rows != cells[q - 1])
            throw std::invalid_argument("homology_from_chain: boundary " + std::to_string(q) + " has the wrong shape");
    }
    for (int q = 1; q < D; ++q) {
        const auto& a = boundaries[q];
        const auto& b = boundaries[q + 1];
        for (int c = 0; c < b.cols; ++c) {
            std::vector<long long> acc(a.rows, 0);
            for (auto [mid, w] : b.col[c])
                for (auto [r, u] : a.col[mid]) acc[r] += w * u;
            for (long long x : acc)
                if (x != 0) throw std::invalid_argument("homology_from_chain: d_" + std::to_string(q) + " o d_" + std::to_string(q + 1) + " != 0");
        }
    }
    HomologyGroups h;
    h.coeff = coeff;
    std::vector<int> rank(D + 2, 0);
    std::vector<std::vector<BigInt>> factors(D + 2);
    for (int q = 1; q <= D; ++q) {
        if (coeff.integral()) {
            auto snf = smith_normal_form(to_big(boundaries[q]));
            rank[q] = snf.rank;
            factors[q] = snf.diagonal;
        } else {
            rank[q] = rank_mod_p(boundaries[q], coeff.p);
        }
    }
    h.betti.assign(D + 1, 0);
    h.torsion.assign(D + 1, {});
    for (int q = 0; q <= D; ++q) {
        h.betti[q] = cells[q] - rank[q] - rank[q + 1];
        for (const auto& d : factors[q + 1])
            if (d > 1) h.torsion[q].push_back(d);
    }
    return h;
}

inline HomologyGroups simplicial_homology(const SimplicialComplex& k, Coeff coeff = {}) {
    std::vector<SparseMatrix> bd(std::max(1, k.dimension() + 1));
    for (int q = 1; q <= k.dimension(); ++q) bd[q] = boundary_matrix(k, q);
    return homology_from_chain(bd, k.counts(), coeff);
}

inline HomologyGroups morse_homology(const SimplicialComplex& k, const Dgvf& v, Coeff coeff = {}) {
    auto mb = compute_morse_boundary(k, v);
    std::vector<int> cells;
    for (const auto& c : mb.critical) cells.push_back(static_cast<int>(c.size()));
    return homology_from_chain(mb.matrices, cells, coeff);
}

// Repeated smooth cancellations of pairs joined by a single V-path, lowest
// dimension and smallest ids first. Returns the number cancelled.
inline int cancel_greedily(const SimplicialComplex& k, Dgvf& v, int max_cancellations = 1 << 20) {
    int done = 0;
    for (bool progress = true; progress && done < max_cancellations;) {
        progress = false;
        auto mb = compute_morse_boundary(k, v);
        for (int q = 1; q < static_cast<int>(mb.critical.size()) && !progress; ++q)
            for (int sigma : mb.critical[q]) {
                for (auto [tau, coef] : mb.delta[sigma]) {
                    if (coef != 1 && coef != -1) continue;
                    if (count_gradient_paths(k, v, sigma, tau) != 1) continue;
                    v = cancel_pair(k, v, tau, sigma);
                    ++done;
                    progress = true;
                    break;
                }
                if (progress) break;
            }
    }
    return done;
}

struct MorseHomologyRun {
    HomologyGroups groups;
    Dgvf field;           // after cancellations
    int mmup_critical = 0;  // critical cells of the MMUP field
    int cancelled = 0;
};

// Hasse graph, MMUP field, topological order, Morse boundary, cancellation,
// Smith normal form.
inline MorseHomologyRun homology_via_mmup(const SimplicialComplex& k, const MmupConfig& cfg = {}, Coeff coeff = {},
                                          bool cancel = true) {
    MorseHomologyRun r;
    r.field = k.size() > 0 ? solve_mmup(k, cfg).field : empty_dgvf(k);
    r.mmup_critical = r.field.critical_count();
    if (cancel) r.cancelled = cancel_greedily(k, r.field);
    r.groups = morse_homology(k, r.field, coeff);
    return r;
}

}  // namespace dmt

#endif
