#include "twc/graph.hpp"

#include <algorithm>
#include <deque>
#include <random>

namespace twc {

Graph Graph::from_edges(const std::vector<std::pair<int, int>>& pairs,
                        const std::vector<int>& extra_vertices)
{
    Graph g;
    std::set<Edge> edge_set;
    std::set<int> vertex_set(extra_vertices.begin(), extra_vertices.end());
    for (const auto& [a, b] : pairs) {
        Edge e(a, b); // rejects loops
        edge_set.insert(e);
        vertex_set.insert(a);
        vertex_set.insert(b);
    }
    g.vertices_.assign(vertex_set.begin(), vertex_set.end());
    g.edges_.assign(edge_set.begin(), edge_set.end());
    g.incident_.resize(g.vertices_.size());
    for (int ei = 0; ei < g.edge_count(); ++ei) {
        g.incident_[static_cast<size_t>(g.vertex_index(g.edges_[static_cast<size_t>(ei)].u))].push_back(ei);
        g.incident_[static_cast<size_t>(g.vertex_index(g.edges_[static_cast<size_t>(ei)].v))].push_back(ei);
    }
    return g;
}

int Graph::vertex_index(int id) const
{
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id);
    if (it == vertices_.end() || *it != id)
        throw InputError("unknown vertex id " + std::to_string(id));
    return static_cast<int>(it - vertices_.begin());
}

bool Graph::has_vertex(int id) const
{
    return std::binary_search(vertices_.begin(), vertices_.end(), id);
}

int Graph::edge_index(const Edge& e) const
{
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e)
        throw InputError("unknown edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
    return static_cast<int>(it - edges_.begin());
}

std::optional<int> Graph::find_edge(int a, int b) const
{
    if (a == b || !has_vertex(a) || !has_vertex(b))
        return std::nullopt;
    Edge e(a, b);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e)
        return std::nullopt;
    return static_cast<int>(it - edges_.begin());
}

std::vector<int> Graph::neighbors(int vertex_idx) const
{
    std::vector<int> out;
    int id = vertex_id(vertex_idx);
    for (int ei : incident(vertex_idx))
        out.push_back(vertex_index(edge(ei).other(id)));
    std::sort(out.begin(), out.end());
    return out;
}

bool Graph::connected() const
{
    if (vertices_.empty())
        return true;
    std::vector<char> seen(vertices_.size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int w : neighbors(v)) {
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                ++reached;
                queue.push_back(w);
            }
        }
    }
    return reached == vertex_count();
}

Graph Graph::without_vertex(int id) const
{
    (void)vertex_index(id); // validates
    std::vector<std::pair<int, int>> pairs;
    for (const Edge& e : edges_)
        if (!e.touches(id))
            pairs.emplace_back(e.u, e.v);
    std::vector<int> rest;
    for (int v : vertices_)
        if (v != id)
            rest.push_back(v);
    return from_edges(pairs, rest);
}

Graph build_graph(const std::vector<std::pair<int, int>>& edge_list)
{
    return Graph::from_edges(edge_list);
}

Bipartition bipartition(const Graph& g)
{
    if (!g.connected())
        throw InputError("bipartition requires a connected graph");

    Bipartition result;
    int n = g.vertex_count();
    std::vector<std::int8_t> color(static_cast<size_t>(n), -1);
    std::vector<int> parent(static_cast<size_t>(n), -1);
    std::vector<int> depth(static_cast<size_t>(n), 0);
    if (n == 0) {
        result.coloring = std::vector<std::int8_t>{};
        return result;
    }

    std::deque<int> queue{0};
    color[0] = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int w : g.neighbors(v)) {
            if (color[static_cast<size_t>(w)] < 0) {
                color[static_cast<size_t>(w)] = static_cast<std::int8_t>(1 - color[static_cast<size_t>(v)]);
                parent[static_cast<size_t>(w)] = v;
                depth[static_cast<size_t>(w)] = depth[static_cast<size_t>(v)] + 1;
                queue.push_back(w);
            } else if (color[static_cast<size_t>(w)] == color[static_cast<size_t>(v)]) {
                // walk both endpoints up to their common ancestor
                std::vector<int> left{v}, right{w};
                int x = v, y = w;
                while (depth[static_cast<size_t>(x)] > depth[static_cast<size_t>(y)]) {
                    x = parent[static_cast<size_t>(x)];
                    left.push_back(x);
                }
                while (depth[static_cast<size_t>(y)] > depth[static_cast<size_t>(x)]) {
                    y = parent[static_cast<size_t>(y)];
                    right.push_back(y);
                }
                while (x != y) {
                    x = parent[static_cast<size_t>(x)];
                    y = parent[static_cast<size_t>(y)];
                    left.push_back(x);
                    right.push_back(y);
                }
                right.pop_back(); // shared ancestor appears once
                for (auto it = right.rbegin(); it != right.rend(); ++it)
                    left.push_back(*it);
                for (int idx : left)
                    result.odd_cycle.push_back(g.vertex_id(idx));
                return result;
            }
        }
    }
    result.coloring = std::move(color);
    return result;
}

DegeneracyOrdering degeneracy_ordering(const Graph& g, int bound, std::optional<int> last)
{
    int n = g.vertex_count();
    std::vector<int> deg(static_cast<size_t>(n));
    std::vector<char> removed(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        deg[static_cast<size_t>(i)] = g.degree(i);

    std::vector<int> removal; // first removed ends up last in the ordering
    auto remove = [&](int idx) {
        removed[static_cast<size_t>(idx)] = 1;
        removal.push_back(idx);
        for (int w : g.neighbors(idx))
            if (!removed[static_cast<size_t>(w)])
                --deg[static_cast<size_t>(w)];
    };

    if (last) {
        int idx = g.vertex_index(*last);
        if (deg[static_cast<size_t>(idx)] > bound)
            throw InputError("vertex " + std::to_string(*last) +
                             " cannot be placed last: degree exceeds bound");
        remove(idx);
    }
    while (static_cast<int>(removal.size()) < n) {
        int pick = -1;
        for (int i = 0; i < n; ++i) {
            if (removed[static_cast<size_t>(i)] || deg[static_cast<size_t>(i)] > bound)
                continue;
            if (pick < 0 || g.vertex_id(i) < g.vertex_id(pick))
                pick = i;
        }
        if (pick < 0)
            throw InputError("graph is not " + std::to_string(bound) + "-degenerate");
        remove(pick);
    }

    DegeneracyOrdering out;
    out.order.reserve(static_cast<size_t>(n));
    for (auto it = removal.rbegin(); it != removal.rend(); ++it)
        out.order.push_back(g.vertex_id(*it));
    std::map<int, int> position;
    for (int i = 0; i < n; ++i)
        position[out.order[static_cast<size_t>(i)]] = i;
    out.back_degrees.assign(static_cast<size_t>(n), 0);
    for (const Edge& e : g.edges()) {
        int pu = position.at(e.u), pv = position.at(e.v);
        ++out.back_degrees[static_cast<size_t>(std::max(pu, pv))];
    }
    for (int d : out.back_degrees)
        if (d > bound)
            throw InternalError("back-degree bound violated after peel");
    return out;
}

std::vector<Edge> Balloon::all_edges() const
{
    std::vector<Edge> out;
    for (size_t i = 0; i + 1 < path_vertices.size(); ++i)
        out.emplace_back(path_vertices[i], path_vertices[i + 1]);
    for (size_t i = 0; i < cycle_vertices.size(); ++i)
        out.emplace_back(cycle_vertices[i], cycle_vertices[(i + 1) % cycle_vertices.size()]);
    return out;
}

void validate_balloon(const Graph& g, const Balloon& b, const std::set<Edge>& forbidden)
{
    if (b.path_vertices.empty())
        throw InputError("balloon has empty path");
    if (b.cycle_vertices.size() < 3)
        throw InputError("balloon cycle shorter than 3");
    if (b.path_vertices.back() != b.cycle_vertices.front())
        throw InputError("balloon path end is not the cycle entry vertex");

    std::set<int> seen;
    for (size_t i = 0; i + 1 < b.path_vertices.size(); ++i)
        if (!seen.insert(b.path_vertices[i]).second)
            throw InputError("balloon path repeats a vertex");
    for (int u : b.cycle_vertices)
        if (!seen.insert(u).second)
            throw InputError("balloon cycle touches the path or repeats a vertex");

    std::set<Edge> edge_set;
    for (const Edge& e : b.all_edges()) {
        if (!g.find_edge(e.u, e.v))
            throw InputError("balloon edge " + std::to_string(e.u) + "-" +
                             std::to_string(e.v) + " not in host graph");
        if (forbidden.count(e))
            throw InputError("balloon uses forbidden edge " + std::to_string(e.u) + "-" +
                             std::to_string(e.v));
        if (!edge_set.insert(e).second)
            throw InternalError("balloon edge listed twice");
    }
}

namespace {

// BFS 2-coloring over allowed edges; returns a simple odd cycle (vertex
// indices) in root's component if one exists.
std::optional<std::vector<int>> find_odd_cycle_from(const Graph& g, int root_idx,
                                                    const std::set<Edge>& blocked)
{
    int n = g.vertex_count();
    std::vector<std::int8_t> color(static_cast<size_t>(n), -1);
    std::vector<int> parent(static_cast<size_t>(n), -1);
    std::vector<int> depth(static_cast<size_t>(n), 0);
    std::deque<int> queue{root_idx};
    color[static_cast<size_t>(root_idx)] = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        int vid = g.vertex_id(v);
        for (int ei : g.incident(v)) {
            const Edge& e = g.edge(ei);
            if (blocked.count(e))
                continue;
            int w = g.vertex_index(e.other(vid));
            if (color[static_cast<size_t>(w)] < 0) {
                color[static_cast<size_t>(w)] = static_cast<std::int8_t>(1 - color[static_cast<size_t>(v)]);
                parent[static_cast<size_t>(w)] = v;
                depth[static_cast<size_t>(w)] = depth[static_cast<size_t>(v)] + 1;
                queue.push_back(w);
            } else if (color[static_cast<size_t>(w)] == color[static_cast<size_t>(v)] && w != v) {
                std::vector<int> left{v}, right{w};
                int x = v, y = w;
                while (depth[static_cast<size_t>(x)] > depth[static_cast<size_t>(y)]) {
                    x = parent[static_cast<size_t>(x)];
                    left.push_back(x);
                }
                while (depth[static_cast<size_t>(y)] > depth[static_cast<size_t>(x)]) {
                    y = parent[static_cast<size_t>(y)];
                    right.push_back(y);
                }
                while (x != y) {
                    x = parent[static_cast<size_t>(x)];
                    y = parent[static_cast<size_t>(y)];
                    left.push_back(x);
                    right.push_back(y);
                }
                right.pop_back();
                for (auto it = right.rbegin(); it != right.rend(); ++it)
                    left.push_back(*it);
                return left;
            }
        }
    }
    return std::nullopt;
}

} // namespace

std::vector<Balloon> find_odd_balloons(const Graph& g, int root, const std::set<Edge>& forbidden,
                                       int count)
{
    int root_idx = g.vertex_index(root);
    std::set<Edge> blocked = forbidden;
    std::vector<Balloon> out;

    while (static_cast<int>(out.size()) < count) {
        auto cycle_idx = find_odd_cycle_from(g, root_idx, blocked);
        if (!cycle_idx)
            break;

        std::set<int> on_cycle(cycle_idx->begin(), cycle_idx->end());
        Balloon b;
        if (on_cycle.count(root_idx)) {
            b.path_vertices = {root};
            // rotate so the cycle starts at the root
            auto it = std::find(cycle_idx->begin(), cycle_idx->end(), root_idx);
            std::rotate(cycle_idx->begin(), it, cycle_idx->end());
        } else {
            // BFS from the root until the cycle is touched
            int n = g.vertex_count();
            std::vector<int> parent(static_cast<size_t>(n), -1);
            std::vector<char> seen(static_cast<size_t>(n), 0);
            std::deque<int> queue{root_idx};
            seen[static_cast<size_t>(root_idx)] = 1;
            int hit = -1;
            while (!queue.empty() && hit < 0) {
                int v = queue.front();
                queue.pop_front();
                int vid = g.vertex_id(v);
                for (int ei : g.incident(v)) {
                    const Edge& e = g.edge(ei);
                    if (blocked.count(e))
                        continue;
                    int w = g.vertex_index(e.other(vid));
                    if (seen[static_cast<size_t>(w)])
                        continue;
                    seen[static_cast<size_t>(w)] = 1;
                    parent[static_cast<size_t>(w)] = v;
                    if (on_cycle.count(w)) {
                        hit = w;
                        break;
                    }
                    queue.push_back(w);
                }
            }
            if (hit < 0)
                break; // cycle exists but is not reachable without blocked edges
            std::vector<int> path;
            for (int x = hit; x >= 0; x = parent[static_cast<size_t>(x)])
                path.push_back(x);
            std::reverse(path.begin(), path.end()); // root .. hit
            for (int x : path)
                b.path_vertices.push_back(g.vertex_id(x));
            auto it = std::find(cycle_idx->begin(), cycle_idx->end(), hit);
            std::rotate(cycle_idx->begin(), it, cycle_idx->end());
        }
        for (int x : *cycle_idx)
            b.cycle_vertices.push_back(g.vertex_id(x));

        validate_balloon(g, b, blocked);
        for (const Edge& e : b.all_edges())
            blocked.insert(e);
        out.push_back(std::move(b));
    }
    return out;
}

PlaneTree PlaneTree::build(int root, const std::map<int, std::vector<int>>& children)
{
    PlaneTree t;
    t.root_ = root;
    t.children_ = children;

    std::set<int> vertex_set{root};
    for (const auto& [p, kids] : children) {
        vertex_set.insert(p);
        for (int c : kids)
            vertex_set.insert(c);
    }
    for (int v : vertex_set)
        t.children_.try_emplace(v); // leaves get empty lists

    // every non-root vertex must be some child exactly once
    std::map<int, int> child_count;
    for (const auto& [p, kids] : t.children_)
        for (int c : kids) {
            ++child_count[c];
            if (c == root)
                throw InputError("root listed as a child");
        }
    for (int v : vertex_set) {
        if (v == root)
            continue;
        auto it = child_count.find(v);
        if (it == child_count.end())
            throw InputError("vertex " + std::to_string(v) + " unreachable from root");
        if (it->second != 1)
            throw InputError("vertex " + std::to_string(v) + " has multiple parents");
    }

    // depth-first walk assigns parent/depth and detects cycles
    std::vector<std::pair<int, int>> stack{{root, 0}};
    std::set<int> visited;
    t.depth_[root] = 0;
    while (!stack.empty()) {
        auto [v, d] = stack.back();
        stack.pop_back();
        if (!visited.insert(v).second)
            throw InputError("cycle in tree near vertex " + std::to_string(v));
        t.depth_[v] = d;
        const auto& kids = t.children_.at(v);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
            t.parent_[*it] = v;
            stack.emplace_back(*it, d + 1);
        }
    }
    if (visited.size() != vertex_set.size())
        throw InputError("tree is not connected");

    t.vertices_.assign(vertex_set.begin(), vertex_set.end());
    return t;
}

const std::vector<int>& PlaneTree::children(int id) const
{
    auto it = children_.find(id);
    if (it == children_.end())
        throw InputError("unknown tree vertex " + std::to_string(id));
    return it->second;
}

std::optional<int> PlaneTree::parent(int id) const
{
    auto it = parent_.find(id);
    if (it == parent_.end())
        return std::nullopt;
    return it->second;
}

int PlaneTree::depth(int id) const
{
    auto it = depth_.find(id);
    if (it == depth_.end())
        throw InputError("unknown tree vertex " + std::to_string(id));
    return it->second;
}

int PlaneTree::tree_degree(int id) const
{
    return static_cast<int>(children(id).size()) + (parent(id) ? 1 : 0);
}

int PlaneTree::leaf_count() const
{
    int n = 0;
    for (int v : vertices_)
        if (is_leaf(v))
            ++n;
    return n;
}

std::vector<int> PlaneTree::leaves_in_cycle_order() const
{
    std::vector<int> leaves;
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        const auto& kids = children_.at(v);
        if (kids.empty() && v != root_) {
            leaves.push_back(v);
            continue;
        }
        for (auto it = kids.rbegin(); it != kids.rend(); ++it)
            stack.push_back(*it);
    }
    return leaves;
}

PlaneTree PlaneTree::rerooted_at(int new_root) const
{
    if (std::find(vertices_.begin(), vertices_.end(), new_root) == vertices_.end())
        throw InputError("unknown tree vertex " + std::to_string(new_root));
    if (new_root == root_)
        return *this;

    // cyclic neighbour order at each vertex: parent first, then children
    std::map<int, std::vector<int>> ring;
    for (int v : vertices_) {
        std::vector<int> r;
        if (auto p = parent(v))
            r.push_back(*p);
        for (int c : children_.at(v))
            r.push_back(c);
        ring[v] = std::move(r);
    }

    std::map<int, std::vector<int>> new_children;
    std::vector<std::pair<int, int>> stack{{new_root, -1}}; // (vertex, parent in new tree)
    while (!stack.empty()) {
        auto [v, p] = stack.back();
        stack.pop_back();
        const auto& r = ring.at(v);
        std::vector<int> kids;
        if (p < 0) {
            kids = r;
        } else {
            auto it = std::find(r.begin(), r.end(), p);
            for (size_t i = 1; i < r.size(); ++i)
                kids.push_back(r[(static_cast<size_t>(it - r.begin()) + i) % r.size()]);
        }
        new_children[v] = kids;
        for (int c : kids)
            stack.emplace_back(c, v);
    }
    return build(new_root, new_children);
}

HalinGraph build_halin(const PlaneTree& tree, HalinKind kind)
{
    if (tree.children(tree.root()).size() < 2)
        throw InputError("tree root must have at least two children");
    std::vector<int> leaves = tree.leaves_in_cycle_order();
    if (leaves.size() < 3)
        throw InputError("tree has fewer than 3 leaves");
    if (kind == HalinKind::strict)
        for (int v : tree.vertex_ids())
            if (tree.tree_degree(v) == 2)
                throw InputError("strict Halin graph forbids degree-2 vertex " +
                                 std::to_string(v));

    std::vector<std::pair<int, int>> pairs;
    for (int v : tree.vertex_ids())
        if (auto p = tree.parent(v))
            pairs.emplace_back(*p, v);
    for (size_t i = 0; i < leaves.size(); ++i)
        pairs.emplace_back(leaves[i], leaves[(i + 1) % leaves.size()]);

    HalinGraph h;
    h.tree = tree;
    h.cycle = leaves;
    h.graph = Graph::from_edges(pairs);
    h.kind = kind;
    if (h.graph.edge_count() != tree.vertex_count() - 1 + static_cast<int>(leaves.size()))
        throw InternalError("tree and cycle edges overlap");
    return h;
}

namespace {

// bounded uniform draw; portable across standard libraries
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n)
{
    std::uint64_t threshold = (~n + 1) % n; // 2^64 mod n
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold)
            return r % n;
    }
}

} // namespace

PlaneTree random_plane_tree(int leaf_count, bool allow_degree2, std::uint64_t seed)
{
    if (leaf_count < 3)
        throw InputError("leaf_count must be at least 3");

    std::mt19937_64 rng(seed);
    int next_id = 0;
    int root = next_id++;
    std::map<int, std::vector<int>> children;
    children[root] = {};

    int min_root_children = allow_degree2 ? 2 : 3;
    int initial = std::min(leaf_count,
                           min_root_children + static_cast<int>(draw(rng, 2)));
    for (int i = 0; i < initial; ++i)
        children[root].push_back(next_id++);

    std::vector<int> internals{root};
    auto leaves_of = [&]() {
        std::vector<int> ls;
        for (const auto& [v, kids] : children)
            if (kids.empty() && v != root)
                ls.push_back(v);
        return ls;
    };

    int chain_budget = allow_degree2 ? leaf_count : 0;
    while (true) {
        std::vector<int> ls = leaves_of();
        int have = static_cast<int>(ls.size());
        if (have == leaf_count)
            break;
        if (have > leaf_count)
            throw InternalError("tree generator overshot leaf target");

        std::uint64_t op = draw(rng, 10);
        if (op < 5 || (op >= 9 && chain_budget == 0)) {
            // grow breadth: new leaf child at a random position of an internal vertex
            int v = internals[static_cast<size_t>(draw(rng, internals.size()))];
            auto& kids = children[v];
            size_t pos = static_cast<size_t>(draw(rng, kids.size() + 1));
            kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(pos), next_id++);
        } else if (op < 9) {
            // grow depth: a leaf becomes internal with two children
            int x = ls[static_cast<size_t>(draw(rng, ls.size()))];
            children[x] = {next_id++, next_id++};
            internals.push_back(x);
        } else {
            // degree-2 chain vertex
            int x = ls[static_cast<size_t>(draw(rng, ls.size()))];
            children[x] = {next_id++};
            internals.push_back(x);
            --chain_budget;
        }
    }
    return PlaneTree::build(root, children);
}

} // namespace twc
