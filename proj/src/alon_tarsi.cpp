#include "twc/alon_tarsi.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace twc {

namespace {

struct EulerianWalk {
    const Graph& g;
    std::vector<std::pair<int, int>> arcs; // (tail idx, head idx), walk order
    int required_pos = -1;                 // position that must be included
    std::vector<int> balance;              // out - in among chosen arcs
    std::vector<int> remaining;            // undecided arcs per vertex
    long long even = 0, odd = 0;

    explicit EulerianWalk(const Graph& graph) : g(graph) {}

    bool feasible(int v) const
    {
        return std::abs(balance[static_cast<size_t>(v)]) <= remaining[static_cast<size_t>(v)];
    }

    void walk(size_t pos, int chosen)
    {
        if (pos == arcs.size()) {
            if (chosen % 2 == 0)
                ++even;
            else
                ++odd;
            return;
        }
        auto [t, h] = arcs[pos];
        --remaining[static_cast<size_t>(t)];
        --remaining[static_cast<size_t>(h)];

        if (static_cast<int>(pos) != required_pos) {
            if (feasible(t) && feasible(h))
                walk(pos + 1, chosen);
        }

        ++balance[static_cast<size_t>(t)];
        --balance[static_cast<size_t>(h)];
        if (feasible(t) && feasible(h))
            walk(pos + 1, chosen + 1);
        --balance[static_cast<size_t>(t)];
        ++balance[static_cast<size_t>(h)];

        ++remaining[static_cast<size_t>(t)];
        ++remaining[static_cast<size_t>(h)];
    }
};

EulerianCount run_walk(const Graph& g, const Orientation& d, int required_edge)
{
    validate_orientation(g, d);
    EulerianWalk w(g);

    // visit edges in a vertex-clustered order so balance checks bind early
    std::vector<int> disc(static_cast<size_t>(g.vertex_count()), -1);
    int next = 0;
    for (int start = 0; start < g.vertex_count(); ++start) {
        if (disc[static_cast<size_t>(start)] >= 0)
            continue;
        std::deque<int> queue{start};
        disc[static_cast<size_t>(start)] = next++;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int u : g.neighbors(v))
                if (disc[static_cast<size_t>(u)] < 0) {
                    disc[static_cast<size_t>(u)] = next++;
                    queue.push_back(u);
                }
        }
    }
    std::vector<int> order(static_cast<size_t>(g.edge_count()));
    for (size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
    auto key = [&](int ei) {
        const Edge& e = g.edge(ei);
        int a = disc[static_cast<size_t>(g.vertex_index(e.u))];
        int b = disc[static_cast<size_t>(g.vertex_index(e.v))];
        return std::pair(std::max(a, b), std::min(a, b));
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return key(x) < key(y); });

    w.arcs.reserve(order.size());
    for (size_t pos = 0; pos < order.size(); ++pos) {
        int ei = order[pos];
        auto [t, h] = d.arcs[static_cast<size_t>(ei)];
        w.arcs.emplace_back(g.vertex_index(t), g.vertex_index(h));
        if (ei == required_edge)
            w.required_pos = static_cast<int>(pos);
    }
    if (required_edge >= 0 && w.required_pos < 0)
        throw InputError("required edge index out of range");

    w.balance.assign(static_cast<size_t>(g.vertex_count()), 0);
    w.remaining.assign(static_cast<size_t>(g.vertex_count()), 0);
    for (auto [t, h] : w.arcs) {
        ++w.remaining[static_cast<size_t>(t)];
        ++w.remaining[static_cast<size_t>(h)];
    }
    w.walk(0, 0);
    return {w.even, w.odd};
}

} // namespace

EulerianCount count_eulerian(const Graph& g, const Orientation& d)
{
    return run_walk(g, d, -1);
}

EulerianCount count_eulerian_containing(const Graph& g, const Orientation& d, int edge_idx)
{
    if (edge_idx < 0 || edge_idx >= g.edge_count())
        throw InputError("edge index out of range");
    return run_walk(g, d, edge_idx);
}

long long alon_tarsi_coefficient(const Graph& g, const Orientation& d)
{
    EulerianCount c = count_eulerian(g, d);
    return c.even_count - c.odd_count;
}

PolynomialOracleResult expand_polynomial_oracle(const Graph& g, const Orientation& d,
                                                bool restrict_edges_to_zero)
{
    if (g.edge_count() > kOracleMaxEdges)
        throw ScaleError("polynomial oracle limited to " + std::to_string(kOracleMaxEdges) +
                         " edges");
    CoefficientMatrix base = build_coefficient_matrix(g, d);
    const int slots = base.slot_count();
    const int m = g.edge_count();

    PolynomialOracleResult result;
    std::map<std::vector<int>, BigInt> poly{{std::vector<int>(static_cast<size_t>(slots), 0),
                                             BigInt(1)}};
    for (int row = 0; row < m; ++row) {
        std::map<std::vector<int>, BigInt> next;
        for (const auto& [mono, coef] : poly) {
            for (int s = 0; s < slots; ++s) {
                if (restrict_edges_to_zero && base.slot_is_edge(s))
                    continue;
                int a = base.matrix()(row, s);
                if (a == 0)
                    continue;
                std::vector<int> mono2 = mono;
                ++mono2[static_cast<size_t>(s)];
                next[mono2] += coef * a;
            }
        }
        for (auto it = next.begin(); it != next.end();)
            it = it->second == 0 ? next.erase(it) : std::next(it);
        poly = std::move(next);
    }
    result.coefficients = std::move(poly);
    return result;
}

} // namespace twc
