#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twc/alon_tarsi.hpp"
#include "twc/matrix.hpp"

namespace twc {

/// A constructive path hit a structural surprise; the caller should degrade
/// to the exhaustive search rather than report an error.
class FallbackNeeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Validated index function with vertex multiplicities zero, edge
/// multiplicities at most 2, and a nonzero permanent, plus a trail of which
/// construction produced it.
struct Certificate {
    IndexFunction eta;
    BigInt permanent; // per of the assembled matrix, canonical orientation
    std::string provenance;
    nlohmann::json aux = nlohmann::json::object();
};

struct VerifyReport {
    bool ok = false;
    std::string reason; // empty when ok
    BigInt recomputed_permanent;
};

inline constexpr int kSearchMaxEdges = 20;

/// Recomputes everything from the graph and the certificate's index
/// function; never trusts stored values.
VerifyReport verify_certificate(const Graph& g, const Certificate& c);
VerifyReport verify_certificate(const HalinGraph& h, const Certificate& c);

/// Exhaustive enumeration of edge-only valid index functions with
/// multiplicities at most `edge_cap`, in lexicographic order over the
/// canonical edge order. Returns the first one with nonzero permanent.
std::optional<Certificate> search_certificate(const Graph& g, int edge_cap);

/// Certifies any generalized Halin graph. Constructive case analysis with
/// the exhaustive search as fallback (provenance "search").
Certificate certify(const HalinGraph& h);

Certificate certify_nonbipartite(const HalinGraph& h);
Certificate certify_bipartite(const HalinGraph& h);
Certificate certify_wheel(const HalinGraph& h);

enum class NonbipartiteCase { even_leaves, odd_k_even, odd_k_odd };

/// The deepest internal vertex all of whose children are leaves, together
/// with those children in plane order. Empty exactly when the tree is a
/// star (the root is then the only such vertex).
struct LeafBlock {
    int v;
    std::vector<int> sons;
};
std::optional<LeafBlock> deepest_leaf_block(const HalinGraph& h);

/// Tree edges toward the root and the leaf cycle directed along the stored
/// order, with the case-specific flips at the deepest leaf block. Every
/// vertex ends up with out-degree at most 2.
Orientation build_case_orientation(const HalinGraph& h, NonbipartiteCase c);

enum class BipartiteCase { case1_two_sons, case1_three_sons, case2, case3 };

const char* provenance_tag(BipartiteCase c);

struct PartitionPlan {
    BipartiteCase kase;
    PlaneTree tree;      // re-rooted at a degree >= 3 vertex
    std::vector<int> x;  // sorted vertex ids
    std::vector<Edge> ex;  // edges inside X
    std::vector<Edge> exy; // crossing edges
    int v1 = -1, v2 = -1, v3 = -1; // deepest-leaf chain (v3 is the hub in cases 1/2)
    int hub = -1;                  // v3 for cases 1/2, v4 for case 3
    int w = -1;  // case 1: leaf son adjacent to v1; cases 2/3: the internal son
                 // whose child edge receives the hub's spare mapping
};

PartitionPlan choose_bipartite_partition(const HalinGraph& h);

/// Orientation of E[X] u E[X,Y] with the hub as sink vertex and the
/// distance-2 vertices as sources, plus the edge-to-edge mapping onto
/// source/sink edges with preimage count at most 2.
struct EdgeAssignment {
    Graph h; // subgraph induced by E[X] u E[X,Y]
    Orientation orientation;
    std::map<Edge, Edge> phi;
};

EdgeAssignment build_sink_source_assignment(const PartitionPlan& plan,
                                            const HalinGraph& full);

/// Permanent-non-singular matrix data for the subgraph H, with columns drawn
/// from E[X] only.
struct SubgraphMatrix {
    Graph h;
    IndexFunction eta; // over h, supported on E[X]
    BigInt permanent;
};

/// The explicit small matrices for a hub with two or three sons.
SubgraphMatrix build_case1_certificate(const PartitionPlan& plan, const HalinGraph& full);

/// Multiplicities from the preimage counts of the assignment.
SubgraphMatrix matrix_from_assignment(const EdgeAssignment& a, const PartitionPlan& plan);

/// Extends H's matrix over the components of G[Y]: per component, a
/// degeneracy ordering ending at the attachment vertex produces a block
/// whose permanent multiplies in.
Certificate compose_blocks(const HalinGraph& h, const PartitionPlan& plan,
                           const SubgraphMatrix& hm);

} // namespace twc
