#ifndef DMT_PERSISTENCE_HPP
#define DMT_PERSISTENCE_HPP

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "complex.hpp"
#include "cut.hpp"
#include "morse.hpp"

namespace dmt {

// Simplices of a complex in arrival order. order[i] is the cell arriving at
// step i, index[cell] its step.
struct Filtration {
    SimplicialComplex complex;
    std::vector<int> order;
    std::vector<int> index;
    std::vector<double> value;  // by step

    int size() const { return static_cast<int>(order.size()); }
    int dim_at(int i) const { return complex.dim(order[i]); }
};

// Sorts by (value, dimension, vertices) and checks that every face is listed
// and arrives no later than its cofaces.
inline Filtration make_filtration(std::vector<std::pair<std::vector<int>, double>> entries) {
    std::map<std::vector<int>, double> val;
    for (auto& [s, v] : entries) {
        std::sort(s.begin(), s.end());
        if (s.empty()) throw InputError("empty simplex");
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InputError("repeated vertex in simplex");
        if (!std::isfinite(v)) throw InputError("non-finite filtration value");
        if (!val.emplace(s, v).second) throw InputError("duplicate simplex in filtration");
    }
    std::vector<std::vector<int>> simplices;
    for (const auto& [s, v] : val) simplices.push_back(s);
    Filtration f;
    f.complex = SimplicialComplex::from_simplices(simplices);
    const auto& k = f.complex;
    if (k.size() != static_cast<int>(val.size())) {
        for (int c = 0; c < k.size(); ++c)
            if (!val.count(k.vertices(c))) {
                std::string s;
                for (int x : k.vertices(c)) s += (s.empty() ? "" : " ") + std::to_string(x);
                throw InputError("face [" + s + "] of a listed simplex is missing from the filtration");
            }
    }
    std::vector<double> cv(k.size());
    for (int c = 0; c < k.size(); ++c) cv[c] = val.at(k.vertices(c));
    for (int c = 0; c < k.size(); ++c)
        for (int fc : k.faces(c))
            if (cv[fc] > cv[c]) {
                auto name = [&](int x) {
                    std::string s;
                    for (int v : k.vertices(x)) s += (s.empty() ? "" : " ") + std::to_string(v);
                    return "[" + s + "]";
                };
                throw InputError("non-monotone filtration: face " + name(fc) + " at " + std::to_string(cv[fc]) +
                                 " enters after its coface " + name(c) + " at " + std::to_string(cv[c]));
            }
    f.order.resize(k.size());
    for (int c = 0; c < k.size(); ++c) f.order[c] = c;
    // cell ids are already sorted by dimension then vertices
    std::stable_sort(f.order.begin(), f.order.end(), [&](int a, int b) {
        if (cv[a] != cv[b]) return cv[a] < cv[b];
        return a < b;
    });
    f.index.assign(k.size(), -1);
    f.value.resize(k.size());
    for (int i = 0; i < k.size(); ++i) {
        f.index[f.order[i]] = i;
        f.value[i] = cv[f.order[i]];
    }
    return f;
}

// Lines "value v0 v1 ...".
inline Filtration parse_filtration(std::string_view text) {
    std::vector<std::pair<std::vector<int>, double>> entries;
    std::map<std::vector<int>, int> seen;
    detail::for_each_line(text, [&](int lineno, std::string_view line) {
        auto toks = detail::split_ws(line);
        double v = 0;
        if (!detail::parse_double(toks[0], v)) throw InputError("bad filtration value '" + std::string(toks[0]) + "'", lineno);
        if (toks.size() < 2) throw InputError("filtration line has no vertices", lineno);
        std::vector<int> s;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            int x;
            if (!detail::parse_int(toks[i], x)) throw InputError("non-integer vertex '" + std::string(toks[i]) + "'", lineno);
            s.push_back(x);
        }
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw InputError("repeated vertex", lineno);
        if (auto [it, fresh] = seen.emplace(s, lineno); !fresh)
            throw InputError("duplicate simplex (first listed on line " + std::to_string(it->second) + ")", lineno);
        entries.emplace_back(std::move(s), v);
    });
    return make_filtration(std::move(entries));
}

inline std::string serialize_filtration(const Filtration& f) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (int i = 0; i < f.size(); ++i) {
        os << f.value[i];
        for (int v : f.complex.vertices(f.order[i])) os << ' ' << v;
        os << '\n';
    }
    return os.str();
}

// Steps index the filtration; death == -1 is an essential class.
struct PersistencePair {
    int dim = 0;
    int birth = 0;
    int death = -1;
    double birth_value = 0;
    double death_value = std::numeric_limits<double>::infinity();

    bool finite() const { return death >= 0; }
    auto key() const { return std::tuple(dim, birth, death); }
    bool operator==(const PersistencePair& o) const { return key() == o.key(); }
    bool operator<(const PersistencePair& o) const { return key() < o.key(); }
};

namespace detail {

// Mod-2 column as ascending step indices; low is the back.
using Col = std::vector<int>;

inline void add_col(Col& a, const Col& b) {
    Col out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    a = std::move(out);
}

inline std::vector<PersistencePair> finish_pairs(const Filtration& f, const std::vector<int>& death_of,
                                                 const std::vector<char>& positive) {
    std::vector<PersistencePair> out;
    for (int i = 0; i < f.size(); ++i) {
        if (!positive[i]) continue;
        PersistencePair p;
        p.dim = f.dim_at(i);
        p.birth = i;
        p.birth_value = f.value[i];
        p.death = death_of[i];
        if (p.death >= 0) p.death_value = f.value[p.death];
        out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Standard column reduction over Z2.
inline std::vector<PersistencePair> persist_naive(const Filtration& f) {
    const int n = f.size();
    const auto& k = f.complex;
    std::vector<detail::Col> r(n);
    std::vector<int> owner(n, -1);  // low -> column
    std::vector<int> death_of(n, -1);
    std::vector<char> positive(n, 0);
    for (int j = 0; j < n; ++j) {
        auto& c = r[j];
        for (int face : k.faces(f.order[j])) c.push_back(f.index[face]);
        std::sort(c.begin(), c.end());
        while (!c.empty() && owner[c.back()] >= 0) detail::add_col(c, r[owner[c.back()]]);
        if (c.empty()) {
            positive[j] = 1;
        } else {
            owner[c.back()] = j;
            death_of[c.back()] = j;
        }
    }
    return detail::finish_pairs(f, death_of, positive);
}

struct IncrementalConfig {
    int step_d_period = 16;  // retry cancellations every this many negative events, 0 disables
};

struct IncrementalStats {
    int positive = 0;
    int geometric = 0;   // pairs closed by reversing a gradient path
    int algebraic = 0;   // pairs closed by column operations
    int rollbacks = 0;   // cancellations undone because the stored pairing moved
    int step_d_runs = 0;
    int step_d_cancelled = 0;
    int critical = 0;    // critical cells of the final field
};

// Morse-based incremental persistence. A growing gradient field V lives on the
// arrived cells; the boundary of a new cell is taken in the Morse complex of V.
class IncrementalPersistence {
public:
    IncrementalPersistence(const Filtration& f, IncrementalConfig cfg = {})
        : f_(f), k_(f.complex), cfg_(cfg) {
        const int n = k_.size();
        v_ = empty_dgvf(k_);
        gamma_.assign(n, {});
        gamma_ok_.assign(n, 0);
        death_of_.assign(n, -1);
        birth_of_.assign(n, -1);
        positive_.assign(n, 0);
        algebraic_.assign(n, 0);
        col_.assign(n, {});
        owner_.assign(n, -1);
    }

    std::vector<PersistencePair> run() {
        for (int i = 0; i < f_.size(); ++i) step(i);
        stats_.critical = 0;
        for (int i = 0; i < f_.size(); ++i) stats_.critical += v_.is_critical(f_.order[i]);
        return detail::finish_pairs(f_, death_of_, positive_);
    }

    const IncrementalStats& stats() const { return stats_; }
    const Dgvf& field() const { return v_; }

private:
    const Chain& gamma(int x) {
        if (gamma_ok_[x]) return gamma_[x];
        Chain g;
        if (v_.is_critical(x)) {
            g = {{x, 1}};
        } else if (v_.up[x] >= 0) {
            const int b = v_.up[x];
            const auto& fs = k_.faces(b);
            for (std::size_t i = 0; i < fs.size(); ++i) {
                if (fs[i] == x) continue;
                add_scaled(g, gamma(fs[i]), -k_.incidence(x, b) * ((i % 2 == 0) ? 1 : -1));
            }
        }
        gamma_[x] = std::move(g);
        gamma_ok_[x] = 1;
        return gamma_[x];
    }

    Chain morse_boundary(int sigma) {
        Chain d;
        const auto& fs = k_.faces(sigma);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (fs[i] == v_.down[sigma]) continue;
            Chain g = gamma(fs[i]);
            add_scaled(d, g, (i % 2 == 0) ? 1 : -1);
        }
        return d;
    }

    detail::Col mod2(const Chain& c) const {
        detail::Col out;
        for (auto [cell, coef] : c)
            if (coef % 2 != 0) out.push_back(f_.index[cell]);
        std::sort(out.begin(), out.end());
        return out;
    }

    // Reduces against the stored algebraic columns; returns additions made.
    int reduce(detail::Col& c) const {
        int adds = 0;
        while (!c.empty() && owner_[c.back()] >= 0) {
            detail::add_col(c, col_[owner_[c.back()]]);
            ++adds;
        }
        return adds;
    }

    // Rebuilds the stored columns from the current field and checks that every
    // recorded pairing among the arrived cells is reproduced.
    bool rebuild(int upto) {
        std::fill(owner_.begin(), owner_.end(), -1);
        for (int j = 0; j <= upto; ++j) {
            const int cell = f_.order[j];
            if (!v_.is_critical(cell)) continue;
            if (!algebraic_[j] && !positive_[j]) return false;  // a death still critical but unrecorded
            detail::Col c = mod2(morse_boundary(cell));
            reduce(c);
            if (positive_[j]) {
                if (!c.empty()) return false;
                continue;
            }
            if (c.empty() || c.back() != birth_of_[j]) return false;
            col_[j] = std::move(c);
            owner_[birth_of_[j]] = j;
        }
        return true;
    }

    // Reverses the unique path from the boundary of sigma to tau, keeping the
    // change only if the pairing survives.
    bool try_cancel(int tau_i, int sigma_i, int upto) {
        const int tau = f_.order[tau_i], sigma = f_.order[sigma_i];
        if (detail::paths_from_boundary(k_, v_, sigma, tau) != 1) return false;
        Dgvf saved = v_;
        auto path = detail::unique_path(k_, v_, sigma, tau);
        try {
            v_ = extract_dgvf(k_, detail::reversed_pairs(v_, path, sigma));
        } catch (const GradientCycleError&) {
            v_ = std::move(saved);
            return false;
        }
        std::fill(gamma_ok_.begin(), gamma_ok_.end(), 0);
        const bool was_alg = algebraic_[sigma_i];
        algebraic_[sigma_i] = 0;
        if (rebuild(upto)) return true;
        ++stats_.rollbacks;
        v_ = std::move(saved);
        algebraic_[sigma_i] = was_alg;
        std::fill(gamma_ok_.begin(), gamma_ok_.end(), 0);
        if (!rebuild(upto)) throw std::logic_error("incremental persistence: rollback failed to restore the pairing");
        return false;
    }

    void step(int i) {
        const int sigma = f_.order[i];
        Chain d = morse_boundary(sigma);
        detail::Col c = mod2(d);
        const int adds = reduce(c);
        if (c.empty()) {
            positive_[i] = 1;
            ++stats_.positive;
            return;
        }
        const int tau_i = c.back();
        if (!positive_[tau_i] || death_of_[tau_i] >= 0)
            throw std::logic_error("incremental persistence: low entry is not an open birth");
        death_of_[tau_i] = i;
        birth_of_[i] = tau_i;
        const long long coef = coefficient(d, f_.order[tau_i]);
        bool cancelled = false;
        if (adds == 0 && (coef == 1 || coef == -1)) cancelled = try_cancel(tau_i, i, i - 1);
        if (cancelled) {
            ++stats_.geometric;
        } else {
            algebraic_[i] = 1;
            col_[i] = std::move(c);
            owner_[tau_i] = i;
            ++stats_.algebraic;
        }
        if (cfg_.step_d_period > 0 && (++negatives_ % cfg_.step_d_period) == 0) step_d(i);
    }

    // Re-optimization pass: pairs closed algebraically get another chance at a
    // path reversal now that the field has changed.
    void step_d(int upto) {
        ++stats_.step_d_runs;
        for (int j = 0; j <= upto; ++j) {
            if (!algebraic_[j]) continue;
            if (try_cancel(birth_of_[j], j, upto)) {
                ++stats_.step_d_cancelled;
                --stats_.algebraic;
                ++stats_.geometric;
            }
        }
    }

    const Filtration& f_;
    const SimplicialComplex& k_;
    IncrementalConfig cfg_;
    Dgvf v_;
    std::vector<Chain> gamma_;
    std::vector<char> gamma_ok_;
    std::vector<int> death_of_, birth_of_;
    std::vector<char> positive_, algebraic_;
    std::vector<detail::Col> col_;
    std::vector<int> owner_;
    int negatives_ = 0;
    IncrementalStats stats_;
};

inline std::vector<PersistencePair> persist_incremental(const Filtration& f, const IncrementalConfig& cfg = {},
                                                        IncrementalStats* stats = nullptr) {
    IncrementalPersistence ip(f, cfg);
    auto pairs = ip.run();
    if (stats) *stats = ip.stats();
    return pairs;
}

// Unpaired births per dimension after step i.
inline std::vector<int> prefix_betti(const std::vector<PersistencePair>& pairs, int i, int max_dim) {
    std::vector<int> b(max_dim + 1, 0);
    for (const auto& p : pairs)
        if (p.birth <= i && (p.death < 0 || p.death > i) && p.dim <= max_dim) ++b[p.dim];
    return b;
}

// "dim birth death" per pair, death "inf" for essential classes.
inline std::string diagram_text(const std::vector<PersistencePair>& pairs) {
    std::ostringstream os;
    os << std::setprecision(10);
    for (const auto& p : pairs) {
        os << p.dim << ' ' << p.birth_value << ' ';
        if (p.finite()) os << p.death_value;
        else os << "inf";
        os << '\n';
    }
    return os.str();
}

struct SvgStyle {
    int width = 480;
    int height = 480;
    int margin = 48;
    double point_radius = 4.0;
};

inline std::string diagram_svg(const std::vector<PersistencePair>& pairs, const SvgStyle& st = {}) {
    double lo = 0, hi = 1;
    bool any = false;
    for (const auto& p : pairs) {
        for (double x : {p.birth_value, p.finite() ? p.death_value : p.birth_value}) {
            if (!any) lo = hi = x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            any = true;
        }
    }
    if (hi - lo < 1e-12) hi = lo + 1;
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double inf_y = st.margin * 0.5;
    const double w = st.width - 2.0 * st.margin, h = st.height - 2.0 * st.margin;
    auto X = [&](double t) { return st.margin + (t - lo) / (hi - lo) * w; };
    auto Y = [&](double t) { return st.height - st.margin - (t - lo) / (hi - lo) * h; };
    static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << st.width << "\" height=\"" << st.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << X(lo) << "\" y1=\"" << Y(lo) << "\" x2=\"" << X(hi) << "\" y2=\"" << Y(hi)
       << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    os << "<line x1=\"" << X(lo) << "\" y1=\"" << inf_y << "\" x2=\"" << X(hi) << "\" y2=\"" << inf_y
       << "\" stroke=\"#ccc\"/>\n";
    os << "<text x=\"4\" y=\"" << inf_y + 4 << "\" font-size=\"11\">inf</text>\n";
    os << "<text x=\"" << st.width / 2 << "\" y=\"" << st.height - 12 << "\" font-size=\"12\" text-anchor=\"middle\">birth</text>\n";
    os << "<text x=\"14\" y=\"" << st.height / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << st.height / 2
       << ")\" text-anchor=\"middle\">death</text>\n";
    for (const auto& p : pairs) {
        const double cy = p.finite() ? Y(p.death_value) : inf_y;
        os << "<circle cx=\"" << X(p.birth_value) << "\" cy=\"" << cy << "\" r=\"" << st.point_radius << "\" fill=\""
           << colors[std::min(p.dim, 4)] << "\"><title>H" << p.dim << "</title></circle>\n";
    }
    os << "</svg>\n";
    return os.str();
}

// Simplices up to max_dim on the points; a simplex enters at half its
// largest pairwise distance.
inline Filtration rips_filtration(const std::vector<std::vector<double>>& pts, int max_dim = 2,
                                  double max_value = std::numeric_limits<double>::infinity()) {
    const int n = static_cast<int>(pts.size());
    auto half = [&](int a, int b) {
        double s = 0;
        for (std::size_t t = 0; t < pts[a].size(); ++t) s += (pts[a][t] - pts[b][t]) * (pts[a][t] - pts[b][t]);
        return std::sqrt(s) / 2.0;
    };
    std::vector<std::pair<std::vector<int>, double>> entries;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int next, double val) -> void {
        if (!cur.empty()) entries.emplace_back(cur, val);
        if (static_cast<int>(cur.size()) > max_dim) return;
        for (int v = next; v < n; ++v) {
            double nv = val;
            for (int u : cur) nv = std::max(nv, half(u, v));
            if (nv > max_value) continue;
            cur.push_back(v);
            self(self, v + 1, nv);
            cur.pop_back();
        }
    };
    rec(rec, 0, 0.0);
    return make_filtration(std::move(entries));
}

// Lower-star filtration of a complex from random distinct vertex values.
inline Filtration lower_star_filtration(const SimplicialComplex& k, const std::vector<double>& vertex_value) {
    std::vector<std::pair<std::vector<int>, double>> entries;
    for (int c = 0; c < k.size(); ++c) {
        double m = -std::numeric_limits<double>::infinity();
        for (int v : k.vertices(c)) m = std::max(m, vertex_value.at(v));
        entries.emplace_back(k.vertices(c), m);
    }
    return make_filtration(std::move(entries));
}

// Random 2-complex on nv vertices with roughly nt triangles, plus loose edges.
inline SimplicialComplex random_2_complex(int nv, int nt, int extra_edges, Rng& rng) {
    std::uniform_int_distribution<int> pick(0, nv - 1);
    std::vector<std::vector<int>> s;
    for (int v = 0; v < nv; ++v) s.push_back({v});
    for (int t = 0; t < nt; ++t) {
        int a = pick(rng), b = pick(rng), c = pick(rng);
        if (a == b || b == c || a == c) continue;
        s.push_back({a, b, c});
    }
    for (int e = 0; e < extra_edges; ++e) {
        int a = pick(rng), b = pick(rng);
        if (a != b) s.push_back({a, b});
    }
    return SimplicialComplex::from_simplices(s);
}

// Generic filtration of a complex: every cell gets its faces' maximum plus a
// random increment, so arrival orders are not tied to vertices.
inline Filtration random_filtration(const SimplicialComplex& k, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> val(k.size(), 0.0);
    std::vector<std::pair<std::vector<int>, double>> entries;
    for (int c = 0; c < k.size(); ++c) {
        double m = 0;
        for (int fc : k.faces(c)) m = std::max(m, val[fc]);
        val[c] = m + std::floor(u(rng) * 4.0);  // integer steps leave ties for the tie-break rule
        entries.emplace_back(k.vertices(c), val[c]);
    }
    return make_filtration(std::move(entries));
}

}  // namespace dmt

#endif
