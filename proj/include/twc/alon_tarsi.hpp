#pragma once

#include <map>
#include <vector>

#include "twc/matrix.hpp"

namespace twc {

struct EulerianCount {
    long long even_count = 0; // includes the empty sub-digraph
    long long odd_count = 0;
};

/// Counts edge subsets whose induced sub-digraph has in-degree equal to
/// out-degree at every vertex, split by edge parity. Pruned exhaustive walk.
EulerianCount count_eulerian(const Graph& g, const Orientation& d);

/// Same count restricted to subsets containing the given edge.
EulerianCount count_eulerian_containing(const Graph& g, const Orientation& d, int edge_idx);

/// |EE(D)| - |EO(D)|; the sign convention of the matching graph-polynomial
/// coefficient is left to the caller.
long long alon_tarsi_coefficient(const Graph& g, const Orientation& d);

/// Exact multivariate expansion of the product of the row linear forms of
/// the coefficient matrix. Keys are exponent vectors over the shared slot
/// order (edges, then vertices).
struct PolynomialOracleResult {
    std::map<std::vector<int>, BigInt> coefficients;

    BigInt coefficient(const std::vector<int>& monomial) const
    {
        auto it = coefficients.find(monomial);
        return it == coefficients.end() ? BigInt(0) : it->second;
    }
};

inline constexpr int kOracleMaxEdges = 12;

/// Brute-force distribution; guarded to small graphs. With
/// `restrict_edges_to_zero` the edge variables are dropped first, which
/// expands the plain graph polynomial.
PolynomialOracleResult expand_polynomial_oracle(const Graph& g, const Orientation& d,
                                                bool restrict_edges_to_zero);

} // namespace twc
