#include "twc/matrix.hpp"

#include <algorithm>
#include <numeric>

namespace twc {

Orientation canonical_orientation(const Graph& g)
{
    Orientation d;
    d.arcs.reserve(static_cast<size_t>(g.edge_count()));
    for (const Edge& e : g.edges())
        d.arcs.emplace_back(e.u, e.v);
    return d;
}

Orientation validate_orientation(const Graph& g, const Orientation& d)
{
    if (static_cast<int>(d.arcs.size()) != g.edge_count())
        throw InputError("orientation does not cover every edge");
    for (int i = 0; i < g.edge_count(); ++i) {
        auto [t, h] = d.arcs[static_cast<size_t>(i)];
        if (Edge(t, h) != g.edge(i))
            throw InputError("orientation arc " + std::to_string(t) + "->" +
                             std::to_string(h) + " does not match edge " +
                             std::to_string(i));
    }
    return d;
}

CoefficientMatrix build_coefficient_matrix(const Graph& g, const Orientation& d)
{
    validate_orientation(g, d);
    const int m = g.edge_count();
    const int n = g.vertex_count();
    IntMatrix a = IntMatrix::Zero(m, m + n);

    for (int row = 0; row < m; ++row) {
        auto [tail, head] = d.arcs[static_cast<size_t>(row)];
        a(row, m + g.vertex_index(head)) = 1;
        a(row, m + g.vertex_index(tail)) = -1;
        for (int ei : g.incident(g.vertex_index(head)))
            if (ei != row)
                a(row, ei) = 1;
        for (int ei : g.incident(g.vertex_index(tail)))
            if (ei != row)
                a(row, ei) = -1;
    }
    return CoefficientMatrix(g, d, std::move(a));
}

long long IndexFunction::total() const
{
    long long t = 0;
    for (int x : vertex_eta_)
        t += x;
    for (int x : edge_eta_)
        t += x;
    return t;
}

bool IndexFunction::all_vertices_zero() const
{
    return std::all_of(vertex_eta_.begin(), vertex_eta_.end(), [](int x) { return x == 0; });
}

int IndexFunction::max_edge_multiplicity() const
{
    return edge_eta_.empty() ? 0 : *std::max_element(edge_eta_.begin(), edge_eta_.end());
}

WeightMatrix assemble(const CoefficientMatrix& base, const IndexFunction& eta)
{
    const Graph& g = base.graph();
    if (eta.vertex_slots() != g.vertex_count() || eta.edge_slots() != g.edge_count())
        throw InputError("index function shape does not match the graph");
    if (!eta.is_valid(g))
        throw InputError("index function sums to " + std::to_string(eta.total()) +
                         ", expected |E| = " + std::to_string(g.edge_count()));
    for (int i = 0; i < eta.edge_slots(); ++i)
        if (eta.edge(i) < 0)
            throw InputError("negative edge multiplicity");
    for (int i = 0; i < eta.vertex_slots(); ++i)
        if (eta.vertex(i) < 0)
            throw InputError("negative vertex multiplicity");

    WeightMatrix w;
    w.m.resize(g.edge_count(), g.edge_count());
    int col = 0;
    for (int e = 0; e < g.edge_count(); ++e)
        for (int c = 0; c < eta.edge(e); ++c) {
            w.m.col(col) = base.matrix().col(base.edge_slot(e));
            w.column_slots.push_back(base.edge_slot(e));
            ++col;
        }
    for (int v = 0; v < g.vertex_count(); ++v)
        for (int c = 0; c < eta.vertex(v); ++c) {
            w.m.col(col) = base.matrix().col(base.vertex_slot(v));
            w.column_slots.push_back(base.vertex_slot(v));
            ++col;
        }
    return w;
}

SymbolicColumn unit_column(const CoefficientMatrix& base, int slot, int coefficient)
{
    SymbolicColumn c;
    c.combo = IntVector::Zero(base.slot_count());
    c.combo(slot) = coefficient;
    return c;
}

SymbolicColumn balloon_combination(const Balloon& b, const CoefficientMatrix& base)
{
    if (!b.odd())
        throw InputError("balloon cycle has even length");
    const Graph& g = base.graph();
    validate_balloon(g, b);

    SymbolicColumn c;
    c.combo = IntVector::Zero(base.slot_count());
    const int k = static_cast<int>(b.path_vertices.size());
    for (int i = 0; i + 1 < k; ++i) {
        int ei = g.edge_index(Edge(b.path_vertices[static_cast<size_t>(i)],
                                   b.path_vertices[static_cast<size_t>(i) + 1]));
        c.combo(base.edge_slot(ei)) = (i % 2 == 0) ? 2 : -2;
    }
    const int m = static_cast<int>(b.cycle_vertices.size());
    const int cycle_sign = (k % 2 == 1) ? 1 : -1; // (-1)^{k-1}
    for (int j = 0; j < m; ++j) {
        int ei = g.edge_index(Edge(b.cycle_vertices[static_cast<size_t>(j)],
                                   b.cycle_vertices[static_cast<size_t>((j + 1) % m)]));
        c.combo(base.edge_slot(ei)) = cycle_sign * ((j % 2 == 0) ? 1 : -1);
    }

    IntVector doubled = 2 * base.column(base.vertex_slot(g.vertex_index(b.root())));
    if (c.evaluate(base) != doubled)
        throw InternalError("balloon combination does not telescope to 2*A(root)");
    return c;
}

namespace {

struct Candidate {
    int edge_idx;
    int coefficient;
};

// Shared branch-and-prune skeleton. `nonzero` decides whether a trial matrix
// keeps the running permanent alive (mod p or exactly).
template <typename NonzeroFn>
IndexFunction expand_impl(const CoefficientMatrix& base,
                          const std::vector<SymbolicColumn>& columns, int cap,
                          const NonzeroFn& nonzero, const char* what)
{
    const Graph& g = base.graph();
    const int m = g.edge_count();
    if (static_cast<int>(columns.size()) != m)
        throw InputError("need exactly |E| columns to expand, got " +
                         std::to_string(columns.size()));

    IntMatrix work(m, m);
    for (int i = 0; i < m; ++i) {
        if (columns[static_cast<size_t>(i)].combo.size() != base.slot_count())
            throw InputError("symbolic column has wrong length");
        work.col(i) = columns[static_cast<size_t>(i)].evaluate(base);
    }
    if (!nonzero(work))
        throw InputError(std::string("expansion precondition failed: input matrix is ") +
                         what);

    IndexFunction eta(g);
    for (int i = 0; i < m; ++i) {
        const IntVector& combo = columns[static_cast<size_t>(i)].combo;
        std::vector<Candidate> candidates;
        int vertex_slot = -1;
        for (int s = 0; s < base.slot_count(); ++s) {
            if (combo(s) == 0)
                continue;
            if (base.slot_is_edge(s))
                candidates.push_back({s, combo(s)});
            else
                vertex_slot = s;
        }
        if (vertex_slot >= 0) {
            if (!candidates.empty() || combo(vertex_slot) != 1)
                throw InputError("symbolic column mixes vertex and edge columns");
            eta.vertex(vertex_slot - m) += 1;
            continue; // pure vertex column passes through
        }
        if (candidates.empty())
            throw InputError("symbolic column is identically zero");

        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) {
                             int ma = std::abs(a.coefficient), mb = std::abs(b.coefficient);
                             if (ma != mb)
                                 return ma > mb;
                             return a.edge_idx < b.edge_idx;
                         });

        bool skipped_any = false;
        std::vector<Candidate> allowed;
        for (const Candidate& c : candidates) {
            if (eta.edge(c.edge_idx) >= cap)
                skipped_any = true;
            else
                allowed.push_back(c);
        }

        int chosen = -1;
        for (size_t ci = 0; ci < allowed.size(); ++ci) {
            const Candidate& c = allowed[ci];
            work.col(i) = c.coefficient * base.column(base.edge_slot(c.edge_idx));
            bool last_resort = !skipped_any && ci + 1 == allowed.size();
            if (last_resort || nonzero(work)) {
                chosen = c.edge_idx;
                break;
            }
        }
        if (chosen < 0)
            throw InternalError("column expansion found no viable branch");
        eta.edge(chosen) += 1;
    }

    if (!nonzero(work))
        throw InternalError("expanded matrix lost its nonzero permanent");
    return eta;
}

} // namespace

IndexFunction expand_to_edge_columns(const CoefficientMatrix& base,
                                     const std::vector<SymbolicColumn>& columns, long long p,
                                     int cap)
{
    if (!is_prime(p) || p < 3)
        throw InputError("expansion needs an odd prime modulus");
    if (cap < 0)
        cap = static_cast<int>(p) - 1;
    auto nonzero = [p](const IntMatrix& m) { return permanent_mod(m, p) != 0; };
    IndexFunction eta = expand_impl(base, columns, cap, nonzero, "singular mod p");

    // the pruned multiset must itself be alive mod p
    if (eta.all_vertices_zero()) {
        WeightMatrix w = assemble(base, eta);
        if (permanent_mod(w.m, p) == 0)
            throw InternalError("expanded index function is singular mod p");
    }
    return eta;
}

IndexFunction expand_to_edge_columns_exact(const CoefficientMatrix& base,
                                           const std::vector<SymbolicColumn>& columns, int cap)
{
    if (cap < 1)
        throw InputError("cap must be positive");
    auto nonzero = [](const IntMatrix& m) { return permanent_exact(m) != 0; };
    return expand_impl(base, columns, cap, nonzero, "singular");
}

BigInt coefficient_from_permanent(const CoefficientMatrix& base, const IndexFunction& eta)
{
    WeightMatrix w = assemble(base, eta);
    BigInt per = permanent_exact(w.m);

    BigInt fact = 1;
    auto mult_fact = [&fact](int k) {
        for (int i = 2; i <= k; ++i)
            fact *= i;
    };
    for (int e = 0; e < eta.edge_slots(); ++e)
        mult_fact(eta.edge(e));
    for (int v = 0; v < eta.vertex_slots(); ++v)
        mult_fact(eta.vertex(v));

    BigInt q, r;
    boost::multiprecision::divide_qr(per, fact, q, r);
    if (r != 0)
        throw InternalError("permanent not divisible by the multiplicity factorials");
    return q;
}

} // namespace twc
