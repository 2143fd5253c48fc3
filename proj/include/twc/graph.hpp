#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "twc/errors.hpp"

namespace twc {

/// Undirected simple edge, stored with endpoints normalized so u < v.
struct Edge {
    int u = 0;
    int v = 0;

    Edge() = default;
    Edge(int a, int b) : u(a < b ? a : b), v(a < b ? b : a)
    {
        if (a == b)
            throw InputError("loop edge at vertex " + std::to_string(a));
    }

    friend auto operator<=>(const Edge&, const Edge&) = default;

    bool touches(int w) const { return u == w || v == w; }
    int other(int w) const { return w == u ? v : u; }
};

/// Undirected simple graph over arbitrary integer vertex ids.
/// Edges are kept in a canonical sorted order; all derived orderings
/// (orientations, matrix rows) are taken from it.
class Graph {
public:
    Graph() = default;

    static Graph from_edges(const std::vector<std::pair<int, int>>& pairs,
                            const std::vector<int>& extra_vertices = {});

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    const std::vector<int>& vertex_ids() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int idx) const { return edges_[static_cast<size_t>(idx)]; }

    int vertex_id(int idx) const { return vertices_[static_cast<size_t>(idx)]; }
    int vertex_index(int id) const;
    bool has_vertex(int id) const;

    int edge_index(const Edge& e) const;
    std::optional<int> find_edge(int a, int b) const;

    /// Edge indices incident to the vertex at `vertex_idx`.
    const std::vector<int>& incident(int vertex_idx) const
    {
        return incident_[static_cast<size_t>(vertex_idx)];
    }
    int degree(int vertex_idx) const
    {
        return static_cast<int>(incident_[static_cast<size_t>(vertex_idx)].size());
    }
    std::vector<int> neighbors(int vertex_idx) const;

    bool connected() const;

    /// Copy of the graph with one vertex (and its edges) removed.
    Graph without_vertex(int id) const;

private:
    std::vector<int> vertices_;              // sorted unique ids
    std::vector<Edge> edges_;                // sorted canonical
    std::vector<std::vector<int>> incident_; // vertex index -> edge indices
};

/// Builds a graph from an edge list. Duplicate edges collapse; loops are
/// rejected naming the offending pair.
Graph build_graph(const std::vector<std::pair<int, int>>& edge_list);

/// Result of the 2-coloring attempt: either a proper coloring (0/1 per
/// vertex index) or a witness odd cycle as a vertex id sequence.
struct Bipartition {
    std::optional<std::vector<std::int8_t>> coloring;
    std::vector<int> odd_cycle;

    bool is_bipartite() const { return coloring.has_value(); }
};

Bipartition bipartition(const Graph& g);

/// Vertex order in which every vertex sees at most `bound` earlier neighbours.
struct DegeneracyOrdering {
    std::vector<int> order;        // vertex ids
    std::vector<int> back_degrees; // back-degree per position
};

/// Greedy peel; complete for the existence question. If `last` is given the
/// ordering ends with it (its full degree must then fit the bound).
DegeneracyOrdering degeneracy_ordering(const Graph& g, int bound,
                                       std::optional<int> last = std::nullopt);

/// Path attached to a cycle; the path may be a single vertex, in which case
/// the balloon is the cycle itself and the root lies on it.
struct Balloon {
    std::vector<int> path_vertices;  // v_1 .. v_k, root first; v_k on the cycle
    std::vector<int> cycle_vertices; // u_1 .. u_m with u_1 == v_k

    int root() const { return path_vertices.front(); }
    bool odd() const { return cycle_vertices.size() % 2 == 1; }
    std::vector<Edge> all_edges() const;
};

/// Checks structure, membership of every edge in `g`, and avoidance of
/// `forbidden`. Throws InputError on violation.
void validate_balloon(const Graph& g, const Balloon& b,
                      const std::set<Edge>& forbidden = {});

/// Up to `count` pairwise edge-disjoint odd balloons rooted at `root`,
/// avoiding `forbidden`. Greedy BFS search; an empty or short answer is
/// a valid "not found".
std::vector<Balloon> find_odd_balloons(const Graph& g, int root,
                                       const std::set<Edge>& forbidden, int count);

/// Rooted tree with an ordered child list per vertex; the child order is the
/// plane embedding and induces the cyclic leaf order.
class PlaneTree {
public:
    static PlaneTree build(int root, const std::map<int, std::vector<int>>& children);

    int root() const { return root_; }
    const std::vector<int>& children(int id) const;
    std::optional<int> parent(int id) const;
    int depth(int id) const;
    const std::vector<int>& vertex_ids() const { return vertices_; }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    bool is_leaf(int id) const { return children(id).empty(); }
    int tree_degree(int id) const;
    int leaf_count() const;
    const std::map<int, std::vector<int>>& children_map() const { return children_; }

    /// Leaves in depth-first order following the stored child order.
    std::vector<int> leaves_in_cycle_order() const;

    /// Re-roots while preserving the plane embedding, so the cyclic leaf
    /// order is unchanged up to rotation.
    PlaneTree rerooted_at(int new_root) const;

private:
    int root_ = 0;
    std::map<int, std::vector<int>> children_;
    std::map<int, int> parent_;
    std::map<int, int> depth_;
    std::vector<int> vertices_; // sorted
};

enum class HalinKind { strict, generalized };

/// Plane tree plus the cycle through its leaves.
struct HalinGraph {
    PlaneTree tree;
    std::vector<int> cycle; // leaf ids in cyclic order
    Graph graph;
    HalinKind kind = HalinKind::generalized;
};

/// Joins consecutive leaves of the tree into a cycle. Requires at least 3
/// leaves and a root with at least two children; `strict` additionally
/// rejects degree-2 vertices, naming the first one found.
HalinGraph build_halin(const PlaneTree& tree, HalinKind kind);

/// Reproducible random plane tree with exactly `leaf_count` leaves.
/// Degree-2 internal vertices appear only when `allow_degree2` is set.
PlaneTree random_plane_tree(int leaf_count, bool allow_degree2, std::uint64_t seed);

} // namespace twc
