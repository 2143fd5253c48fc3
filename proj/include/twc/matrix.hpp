#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "twc/graph.hpp"
#include "twc/permanent.hpp"

namespace twc {

/// Arc per edge, aligned with the graph's canonical edge order.
struct Orientation {
    std::vector<std::pair<int, int>> arcs; // (tail, head)
};

/// Every edge directed from smaller to larger vertex id.
Orientation canonical_orientation(const Graph& g);

Orientation validate_orientation(const Graph& g, const Orientation& d);

/// Column slots: edges first in canonical order, then vertices by id.
/// All index functions, symbolic columns and oracle monomials share this
/// addressing.
class CoefficientMatrix {
public:
    CoefficientMatrix(Graph g, Orientation d, IntMatrix m)
        : graph_(std::move(g)), orientation_(std::move(d)), m_(std::move(m))
    {
    }

    const Graph& graph() const { return graph_; }
    const Orientation& orientation() const { return orientation_; }
    const IntMatrix& matrix() const { return m_; }

    int slot_count() const { return static_cast<int>(m_.cols()); }
    int edge_slot(int edge_idx) const { return edge_idx; }
    int vertex_slot(int vertex_idx) const { return graph_.edge_count() + vertex_idx; }
    bool slot_is_edge(int slot) const { return slot < graph_.edge_count(); }

    IntVector column(int slot) const { return m_.col(slot); }

private:
    Graph graph_;
    Orientation orientation_;
    IntMatrix m_;
};

/// Rows are edges; the row of an arc (u,v) carries +1 on the head vertex and
/// the other edges at the head, -1 on the tail side, 0 elsewhere (including
/// the edge's own column).
CoefficientMatrix build_coefficient_matrix(const Graph& g, const Orientation& d);

/// Non-negative multiplicity per slot; valid when the total equals |E|.
class IndexFunction {
public:
    IndexFunction() = default;
    explicit IndexFunction(const Graph& g)
        : vertex_eta_(static_cast<size_t>(g.vertex_count()), 0),
          edge_eta_(static_cast<size_t>(g.edge_count()), 0)
    {
    }

    int& vertex(int vertex_idx) { return vertex_eta_[static_cast<size_t>(vertex_idx)]; }
    int vertex(int vertex_idx) const { return vertex_eta_[static_cast<size_t>(vertex_idx)]; }
    int& edge(int edge_idx) { return edge_eta_[static_cast<size_t>(edge_idx)]; }
    int edge(int edge_idx) const { return edge_eta_[static_cast<size_t>(edge_idx)]; }

    int vertex_slots() const { return static_cast<int>(vertex_eta_.size()); }
    int edge_slots() const { return static_cast<int>(edge_eta_.size()); }

    long long total() const;
    bool is_valid(const Graph& g) const { return total() == g.edge_count(); }
    bool all_vertices_zero() const;
    int max_edge_multiplicity() const;

private:
    std::vector<int> vertex_eta_;
    std::vector<int> edge_eta_;
};

/// Square column-multiset matrix: column z of the base repeated eta(z) times.
struct WeightMatrix {
    IntMatrix m;
    std::vector<int> column_slots;
};

WeightMatrix assemble(const CoefficientMatrix& base, const IndexFunction& eta);

/// Integral linear combination of base columns.
struct SymbolicColumn {
    IntVector combo; // one coefficient per slot

    IntVector evaluate(const CoefficientMatrix& base) const
    {
        return base.matrix() * combo;
    }
};

/// Pure column with a given coefficient.
SymbolicColumn unit_column(const CoefficientMatrix& base, int slot, int coefficient = 1);

/// Writes twice the root's vertex column over the balloon's edge columns:
/// path edges carry alternating +-2, the odd cycle telescopes with +-1.
SymbolicColumn balloon_combination(const Balloon& b, const CoefficientMatrix& base);

/// Multilinear branch and prune, mod p: each symbolic column is replaced by
/// one pure column of its combination while the permanent stays nonzero
/// mod p; branches that would push an edge multiplicity past `cap` are
/// discarded. Pure vertex columns pass through untouched. Requires the
/// evaluated input matrix to have nonzero permanent mod p.
IndexFunction expand_to_edge_columns(const CoefficientMatrix& base,
                                     const std::vector<SymbolicColumn>& columns, long long p,
                                     int cap = -1);

/// Same branching over the integers: the permanent is kept nonzero exactly.
/// Caller is responsible for cap feasibility (violating branches are skipped,
/// which is only sound when the column structure guarantees a way out).
IndexFunction expand_to_edge_columns_exact(const CoefficientMatrix& base,
                                           const std::vector<SymbolicColumn>& columns, int cap);

/// per(A(eta)) / prod eta(z)!; the division is always exact.
BigInt coefficient_from_permanent(const CoefficientMatrix& base, const IndexFunction& eta);

} // namespace twc
