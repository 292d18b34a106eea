#ifndef DMT_SCALAR_FIELD_HPP
#define DMT_SCALAR_FIELD_HPP

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "complex.hpp"
#include "gadget.hpp"
#include "mmup.hpp"
#include "morse.hpp"

namespace dmt {

struct ScalarField {
    std::map<int, double> values;  // vertex label -> value
};

// Lines "vertex value".
inline ScalarField parse_scalar_field(std::string_view text) {
    ScalarField f;
    detail::for_each_line(text, [&](int lineno, std::string_view line) {
        auto toks = detail::split_ws(line);
        int v;
        double x;
        if (toks.size() != 2) throw InputError("expected 'vertex value'", lineno);
        if (!detail::parse_int(toks[0], v)) throw InputError("non-integer vertex '" + std::string(toks[0]) + "'", lineno);
        if (!detail::parse_double(toks[1], x)) throw InputError("bad value '" + std::string(toks[1]) + "'", lineno);
        if (!f.values.emplace(v, x).second) throw InputError("vertex " + std::to_string(v) + " listed twice", lineno);
    });
    return f;
}

enum class TiePolicy { Reject, PerturbByIndex };

struct CompatibilityConstraints {
    std::vector<int> inherited;    // per cell: vertex label carrying the max
    std::vector<double> value;     // F at the inherited vertex
    std::vector<int> exceptional;  // per cell of dim >= 1: the face omitting the inherited vertex, else -1
    std::vector<int> prohibited;   // Hasse edge ids (exceptional face, cell)
};

// The inherited vertex is the argmax of F; with PerturbByIndex, equal values
// are ordered by vertex label (larger label wins).
inline CompatibilityConstraints build_constraints(const SimplicialComplex& k, const ScalarField& f,
                                                  TiePolicy ties = TiePolicy::Reject) {
    for (int c = 0; c < k.count(0); ++c) {
        const int v = k.vertices(c)[0];
        if (!f.values.count(v)) throw InputError("scalar field has no value for vertex " + std::to_string(v));
    }
    if (ties == TiePolicy::Reject) {
        std::map<double, int> seen;
        for (int c = 0; c < k.count(0); ++c) {
            const int v = k.vertices(c)[0];
            auto [it, fresh] = seen.emplace(f.values.at(v), v);
            if (!fresh)
                throw InputError("scalar field is not injective: vertices " + std::to_string(it->second) + " and " +
                                 std::to_string(v) + " share a value");
        }
    }
    CompatibilityConstraints cc;
    cc.inherited.resize(k.size());
    cc.value.resize(k.size());
    cc.exceptional.assign(k.size(), -1);
    const auto h = build_hasse(k);
    std::map<std::pair<int, int>, int> edge_id;
    for (int e = 0; e < h.edge_count(); ++e) edge_id[h.edges[e]] = e;
    for (int c = 0; c < k.size(); ++c) {
        const auto& vs = k.vertices(c);
        std::size_t best = 0;
        for (std::size_t i = 1; i < vs.size(); ++i) {
            const double a = f.values.at(vs[i]), b = f.values.at(vs[best]);
            if (a > b || (a == b && vs[i] > vs[best])) best = i;
        }
        cc.inherited[c] = vs[best];
        cc.value[c] = f.values.at(vs[best]);
        if (k.dim(c) >= 1) {
            cc.exceptional[c] = k.faces(c)[best];  // faces(c)[i] omits the i-th vertex
            cc.prohibited.push_back(edge_id.at({cc.exceptional[c], c}));
        }
    }
    return cc;
}

struct CompatibilityReport {
    int pairs = 0;
    std::vector<std::pair<int, int>> violations;  // (face, coface)
    bool ok() const { return violations.empty(); }
};

// A pair <face, coface> is compatible when both inherit the same vertex.
inline CompatibilityReport validate_compatibility(const SimplicialComplex& k, const ScalarField& f, const Dgvf& v,
                                                  TiePolicy ties = TiePolicy::PerturbByIndex) {
    auto cc = build_constraints(k, f, ties);
    CompatibilityReport r;
    for (auto [a, b] : v.pairs) {
        ++r.pairs;
        if (cc.inherited[a] != cc.inherited[b]) r.violations.emplace_back(a, b);
    }
    return r;
}

struct CompatibleResult {
    CompatibilityConstraints constraints;
    MmupResult mmup;
    CompatibilityReport report;
};

// MMUP with the exceptional-face edges prohibited.
inline CompatibleResult solve_compatible(const SimplicialComplex& k, const ScalarField& f, const MmupConfig& cfg = {},
                                         TiePolicy ties = TiePolicy::Reject) {
    CompatibleResult r;
    r.constraints = build_constraints(k, f, ties);
    Prescriptions p;
    p.prohibited = r.constraints.prohibited;
    r.mmup = solve_mmup(k, cfg, &p);
    r.report = validate_compatibility(k, f, r.mmup.field, ties);
    return r;
}

inline std::string format_constraints(const SimplicialComplex& k, const CompatibilityConstraints& cc) {
    std::ostringstream os;
    auto name = [&](int c) {
        std::string s;
        for (int v : k.vertices(c)) s += "v" + std::to_string(v);
        return s;
    };
    for (int c = 0; c < k.size(); ++c) {
        os << name(c) << " : f = " << cc.value[c];
        if (k.dim(c) > 0) os << " +- eps^" << k.dim(c) << " (from v" << cc.inherited[c] << ", exceptional face " << name(cc.exceptional[c]) << ")";
        os << '\n';
    }
    return os.str();
}

}  // namespace dmt

#endif
