#ifndef DMT_MAXFLOW_HPP
#define DMT_MAXFLOW_HPP

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace dmt {

struct FlowArc {
    int to = 0;
    int rev = 0;  // index of the paired residual arc in graph[to]
    double cap = 0.0;
    double flow = 0.0;
};

struct MaxFlowResult {
    double value = 0.0;
    std::vector<char> source_side;  // min cut: nodes reachable from the source in the residual graph
};

// Dinic blocking flow. Capacities are doubles; residuals below eps count as zero.
class MaxFlow {
public:
    explicit MaxFlow(int n, double eps = 1e-12) : g_(n), eps_(eps) {}

    int size() const { return static_cast<int>(g_.size()); }

    // Returns an id usable with flow_on().
    int add_arc(int u, int v, double cap) {
        if (cap < 0) throw std::invalid_argument("max_flow: negative capacity");
        if (u < 0 || v < 0 || u >= size() || v >= size()) throw std::out_of_range("max_flow: node out of range");
        const int k = static_cast<int>(g_[u].size());
        g_[u].push_back({v, static_cast<int>(g_[v].size()) + (u == v ? 1 : 0), cap, 0.0});
        g_[v].push_back({u, k, 0.0, 0.0});
        ids_.push_back({u, k});
        return static_cast<int>(ids_.size()) - 1;
    }

    double flow_on(int id) const {
        auto [u, k] = ids_[id];
        return g_[u][k].flow;
    }

    const std::vector<std::vector<FlowArc>>& graph() const { return g_; }

    MaxFlowResult run(int s, int t) {
        MaxFlowResult r;
        if (s == t) throw std::invalid_argument("max_flow: source equals sink");
        level_.assign(size(), -1);
        it_.assign(size(), 0);
        while (bfs(s, t)) {
            std::fill(it_.begin(), it_.end(), 0);
            while (true) {
                double f = dfs(s, t, std::numeric_limits<double>::infinity());
                if (f <= eps_) break;
                r.value += f;
            }
        }
        r.source_side.assign(size(), 0);
        for (int v = 0; v < size(); ++v) r.source_side[v] = level_[v] >= 0;
        return r;
    }

private:
    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (const auto& a : g_[u])
                if (a.cap - a.flow > eps_ && level_[a.to] < 0) {
                    level_[a.to] = level_[u] + 1;
                    q.push(a.to);
                }
        }
        return level_[t] >= 0;
    }

    double dfs(int u, int t, double pushed) {
        if (u == t) return pushed;
        for (int& i = it_[u]; i < static_cast<int>(g_[u].size()); ++i) {
            FlowArc& a = g_[u][i];
            if (a.cap - a.flow <= eps_ || level_[a.to] != level_[u] + 1) continue;
            double f = dfs(a.to, t, std::min(pushed, a.cap - a.flow));
            if (f > eps_) {
                a.flow += f;
                g_[a.to][a.rev].flow -= f;
                return f;
            }
        }
        return 0.0;
    }

    std::vector<std::vector<FlowArc>> g_;
    std::vector<std::pair<int, int>> ids_;
    std::vector<int> level_, it_;
    double eps_;
};

// One-shot helper: arcs as (u, v, capacity).
struct CapArc {
    int u, v;
    double cap;
};

inline MaxFlowResult max_flow(int n, const std::vector<CapArc>& arcs, int s, int t) {
    MaxFlow mf(n);
    for (const auto& a : arcs) mf.add_arc(a.u, a.v, a.cap);
    return mf.run(s, t);
}

}  // namespace dmt

#endif
