#ifndef DMT_COMPLEX_HPP
#define DMT_COMPLEX_HPP

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dmt {

// Malformed user input. line() is 1-based, 0 when not tied to a line.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct Simplex {
    int id = -1;
    int dim = -1;
    std::vector<int> vertices;  // strictly increasing
};

class SimplicialComplex {
public:
    static constexpr int default_max_dim = 8;

    SimplicialComplex() = default;

    // Face closure of the given simplices. Vertex lists may be unsorted but
    // must not repeat a vertex.
    static SimplicialComplex from_simplices(const std::vector<std::vector<int>>& simplices,
                                            int max_dim = default_max_dim) {
        std::set<std::vector<int>> all;
        for (auto s : simplices) {
            if (s.empty()) throw InputError("empty simplex");
            std::sort(s.begin(), s.end());
            if (std::adjacent_find(s.begin(), s.end()) != s.end())
                throw InputError("repeated vertex in simplex");
            if (static_cast<int>(s.size()) - 1 > max_dim)
                throw InputError("simplex dimension exceeds maximum " + std::to_string(max_dim));
            add_closure(s, all);
        }
        std::vector<std::vector<int>> cells(all.begin(), all.end());
        std::stable_sort(cells.begin(), cells.end(),
                         [](const auto& a, const auto& b) { return a.size() < b.size(); });
        SimplicialComplex k;
        k.build(cells);
        return k;
    }

    int size() const { return static_cast<int>(cells_.size()); }
    // -1 for the empty complex
    int dimension() const { return static_cast<int>(offset_.size()) - 2; }
    int count(int d) const {
        if (d < 0 || d > dimension()) return 0;
        return offset_[d + 1] - offset_[d];
    }
    // Cells of dimension d occupy ids [first(d), first(d) + count(d)).
    int first(int d) const {
        if (d < 0) return 0;
        if (d > dimension()) return size();
        return offset_[d];
    }
    const Simplex& cell(int id) const { return cells_.at(id); }
    int dim(int id) const { return cells_[id].dim; }
    const std::vector<int>& vertices(int id) const { return cells_[id].vertices; }

    // faces(id)[i] is the face omitting the i-th vertex; its incidence sign is (-1)^i.
    const std::vector<int>& faces(int id) const { return faces_[id]; }
    const std::vector<int>& cofaces(int id) const { return cofaces_[id]; }

    // Coefficient of tau in the boundary of sigma: +-1, or 0 when tau is not a facet.
    int incidence(int tau, int sigma) const {
        const auto& f = faces_[sigma];
        for (std::size_t i = 0; i < f.size(); ++i)
            if (f[i] == tau) return (i % 2 == 0) ? 1 : -1;
        return 0;
    }
    bool is_facet(int tau, int sigma) const { return incidence(tau, sigma) != 0; }

    std::optional<int> find(std::vector<int> verts) const {
        std::sort(verts.begin(), verts.end());
        auto it = index_.find(verts);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::vector<int> maximal() const {
        std::vector<int> out;
        for (int i = 0; i < size(); ++i)
            if (cofaces_[i].empty()) out.push_back(i);
        return out;
    }

    std::vector<int> counts() const {
        std::vector<int> c;
        for (int d = 0; d <= dimension(); ++d) c.push_back(count(d));
        return c;
    }

    // Subcomplex spanned by the given cells (closure taken).
    SimplicialComplex subcomplex(const std::vector<int>& ids) const {
        std::vector<std::vector<int>> s;
        for (int id : ids) s.push_back(cells_[id].vertices);
        return from_simplices(s, std::max(0, dimension()));
    }

private:
    static void add_closure(const std::vector<int>& s, std::set<std::vector<int>>& out) {
        const int n = static_cast<int>(s.size());
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::vector<int> f;
            for (int i = 0; i < n; ++i)
                if (mask & (1u << i)) f.push_back(s[i]);
            out.insert(std::move(f));
        }
    }

    void build(const std::vector<std::vector<int>>& cells) {
        cells_.clear();
        offset_.clear();
        index_.clear();
        int cur = -1;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            int d = static_cast<int>(cells[i].size()) - 1;
            while (cur < d) {
                offset_.push_back(static_cast<int>(i));
                ++cur;
            }
            cells_.push_back({static_cast<int>(i), d, cells[i]});
            index_.emplace(cells[i], static_cast<int>(i));
        }
        if (!cells.empty()) offset_.push_back(static_cast<int>(cells.size()));
        faces_.assign(cells_.size(), {});
        cofaces_.assign(cells_.size(), {});
        for (const auto& c : cells_) {
            if (c.dim == 0) continue;
            for (int i = 0; i <= c.dim; ++i) {
                std::vector<int> f = c.vertices;
                f.erase(f.begin() + i);
                int fid = index_.at(f);
                faces_[c.id].push_back(fid);
                cofaces_[fid].push_back(c.id);
            }
        }
    }

    std::vector<Simplex> cells_;
    std::vector<int> offset_;
    std::map<std::vector<int>, int> index_;
    std::vector<std::vector<int>> faces_, cofaces_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class Int>
bool parse_int(std::string_view tok, Int& out) {
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

inline bool parse_double(std::string_view tok, double& out) {
    // from_chars for double is available in libstdc++ 11
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

// Calls fn(line_number, content) for every non-blank line with comments stripped.
template <class Fn>
void for_each_line(std::string_view text, Fn fn) {
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        ++lineno;
        std::string_view line = text.substr(pos, nl - pos);
        if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = trim(line);
        if (!line.empty()) fn(lineno, line);
        pos = nl + 1;
    }
}

}  // namespace detail

// One simplex per line as whitespace-separated integer vertex labels.
// '#' starts a comment. An optional "dim counts: c0 c1 ..." line is checked
// against the closed complex.
inline SimplicialComplex parse_complex(std::string_view text,
                                       int max_dim = SimplicialComplex::default_max_dim) {
    std::vector<std::vector<int>> simplices;
    std::map<std::vector<int>, int> seen;
    std::optional<std::vector<int>> header;
    int header_line = 0;
    detail::for_each_line(text, [&](int lineno, std::string_view line) {
        constexpr std::string_view tag = "dim counts:";
        if (line.substr(0, tag.size()) == tag) {
            std::vector<int> c;
            for (auto tok : detail::split_ws(line.substr(tag.size()))) {
                int v;
                if (!detail::parse_int(tok, v) || v < 0)
                    throw InputError("bad count '" + std::string(tok) + "'", lineno);
                c.push_back(v);
            }
            header = c;
            header_line = lineno;
            return;
        }
        std::vector<int> s;
        for (auto tok : detail::split_ws(line)) {
            int v;
            if (!detail::parse_int(tok, v))
                throw InputError("non-integer vertex '" + std::string(tok) + "'", lineno);
            s.push_back(v);
        }
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw InputError("repeated vertex", lineno);
        if (static_cast<int>(s.size()) - 1 > max_dim)
            throw InputError("simplex dimension exceeds maximum " + std::to_string(max_dim), lineno);
        auto [it, fresh] = seen.emplace(s, lineno);
        if (!fresh)
            throw InputError("duplicate simplex (first listed on line " + std::to_string(it->second) + ")",
                             lineno);
        simplices.push_back(std::move(s));
    });
    auto k = SimplicialComplex::from_simplices(simplices, max_dim);
    if (header && *header != k.counts())
        throw InputError("dim counts header does not match the closed complex", header_line);
    return k;
}

// Header line followed by the maximal simplices in id order.
inline std::string serialize_complex(const SimplicialComplex& k) {
    std::ostringstream os;
    os << "dim counts:";
    for (int c : k.counts()) os << ' ' << c;
    os << '\n';
    for (int id : k.maximal()) {
        const auto& v = k.vertices(id);
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
        os << '\n';
    }
    return os.str();
}

struct HasseGraph {
    std::vector<int> level;                 // dimension per node (node id = cell id)
    std::vector<std::pair<int, int>> edges;  // (face, coface)
    std::vector<std::vector<int>> incident;  // edge ids touching each node

    int node_count() const { return static_cast<int>(level.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int degree(int v) const { return static_cast<int>(incident[v].size()); }
    int other(int e, int v) const { return edges[e].first == v ? edges[e].second : edges[e].first; }
};

// Edges are numbered by coface id, then by the position of the face in faces(coface).
inline HasseGraph build_hasse(const SimplicialComplex& k) {
    HasseGraph h;
    h.level.resize(k.size());
    h.incident.resize(k.size());
    for (int s = 0; s < k.size(); ++s) {
        h.level[s] = k.dim(s);
        for (int f : k.faces(s)) {
            int e = static_cast<int>(h.edges.size());
            h.edges.emplace_back(f, s);
            h.incident[f].push_back(e);
            h.incident[s].push_back(e);
        }
    }
    for (auto& inc : h.incident) std::sort(inc.begin(), inc.end());
    return h;
}

struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<std::pair<int, long long>>> col;  // (row, value), rows ascending

    std::vector<std::vector<long long>> dense() const {
        std::vector<std::vector<long long>> m(rows, std::vector<long long>(cols, 0));
        for (int c = 0; c < cols; ++c)
            for (auto [r, v] : col[c]) m[r][c] = v;
        return m;
    }
};

// Rows: (q-1)-cells, columns: q-cells, both in id order.
inline SparseMatrix boundary_matrix(const SimplicialComplex& k, int q) {
    if (q < 1 || q > k.dimension()) throw std::out_of_range("boundary_matrix: q out of range");
    SparseMatrix m;
    m.rows = k.count(q - 1);
    m.cols = k.count(q);
    m.col.resize(m.cols);
    const int r0 = k.first(q - 1);
    for (int c = 0; c < m.cols; ++c) {
        const auto& f = k.faces(k.first(q) + c);
        for (std::size_t i = 0; i < f.size(); ++i)
            m.col[c].emplace_back(f[i] - r0, (i % 2 == 0) ? 1 : -1);
        std::sort(m.col[c].begin(), m.col[c].end());
    }
    return m;
}

inline long long euler_characteristic(const SimplicialComplex& k) {
    long long chi = 0;
    for (int d = 0; d <= k.dimension(); ++d) chi += (d % 2 == 0 ? 1 : -1) * static_cast<long long>(k.count(d));
    return chi;
}

}  // namespace dmt

#endif
