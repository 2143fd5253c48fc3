#include "twc/certify.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace twc {

namespace {

std::string edge_str(const Edge& e)
{
    return std::to_string(e.u) + "-" + std::to_string(e.v);
}

nlohmann::json arcs_json(const Orientation& d)
{
    nlohmann::json out = nlohmann::json::array();
    for (auto [t, h] : d.arcs)
        out.push_back({t, h});
    return out;
}

nlohmann::json balloon_json(const Balloon& b)
{
    return {{"path", b.path_vertices}, {"cycle", b.cycle_vertices}};
}

bool is_star(const PlaneTree& t)
{
    for (int c : t.children(t.root()))
        if (!t.is_leaf(c))
            return false;
    return true;
}

std::set<Edge> cycle_edge_set(const HalinGraph& h)
{
    std::set<Edge> out;
    for (size_t i = 0; i < h.cycle.size(); ++i)
        out.insert(Edge(h.cycle[i], h.cycle[(i + 1) % h.cycle.size()]));
    return out;
}

Certificate finalize_certificate(const Graph& g, const IndexFunction& eta,
                                 std::string provenance, nlohmann::json aux)
{
    if (!eta.all_vertices_zero())
        throw InternalError("certificate index function touches a vertex column");
    if (eta.max_edge_multiplicity() > 2)
        throw InternalError("certificate index function exceeds edge multiplicity 2");
    CoefficientMatrix base = build_coefficient_matrix(g, canonical_orientation(g));
    WeightMatrix w = assemble(base, eta);
    BigInt per = permanent_exact(w.m);
    if (per == 0)
        throw FallbackNeeded("constructed matrix is permanent-singular");
    Certificate c;
    c.eta = eta;
    c.permanent = std::move(per);
    c.provenance = std::move(provenance);
    c.aux = std::move(aux);
    return c;
}

std::vector<int> bfs_path(const Graph& g, int from_id, int to_id)
{
    int n = g.vertex_count();
    std::vector<int> parent(static_cast<size_t>(n), -1);
    std::vector<char> seen(static_cast<size_t>(n), 0);
    int s = g.vertex_index(from_id), t = g.vertex_index(to_id);
    std::deque<int> queue{s};
    seen[static_cast<size_t>(s)] = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        if (v == t)
            break;
        for (int w : g.neighbors(v))
            if (!seen[static_cast<size_t>(w)]) {
                seen[static_cast<size_t>(w)] = 1;
                parent[static_cast<size_t>(w)] = v;
                queue.push_back(w);
            }
    }
    if (!seen[static_cast<size_t>(t)])
        throw InternalError("no path between attachment vertices");
    std::vector<int> path;
    for (int x = t; x != s; x = parent[static_cast<size_t>(x)])
        path.push_back(g.vertex_id(x));
    path.push_back(from_id);
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace

std::optional<LeafBlock> deepest_leaf_block(const HalinGraph& h)
{
    const PlaneTree& t = h.tree;
    std::optional<LeafBlock> best;
    for (int v : t.vertex_ids()) {
        if (v == t.root() || t.is_leaf(v))
            continue;
        bool all_leaves = true;
        for (int c : t.children(v))
            if (!t.is_leaf(c))
                all_leaves = false;
        if (!all_leaves)
            continue;
        if (!best || t.depth(v) > t.depth(best->v) ||
            (t.depth(v) == t.depth(best->v) && v < best->v))
            best = LeafBlock{v, t.children(v)};
    }
    return best;
}

Orientation build_case_orientation(const HalinGraph& h, NonbipartiteCase c)
{
    const Graph& g = h.graph;
    const PlaneTree& t = h.tree;
    int leaves = static_cast<int>(h.cycle.size());
    if (c == NonbipartiteCase::even_leaves) {
        if (leaves % 2 != 0)
            throw InputError("even-leaves orientation on an odd-leaf graph");
    } else if (leaves % 2 == 0) {
        throw InputError("odd-leaf orientation on an even-leaf graph");
    }

    std::map<Edge, std::pair<int, int>> cycle_arc;
    for (size_t i = 0; i < h.cycle.size(); ++i) {
        int a = h.cycle[i], b = h.cycle[(i + 1) % h.cycle.size()];
        cycle_arc[Edge(a, b)] = {a, b};
    }

    Orientation d;
    d.arcs.reserve(static_cast<size_t>(g.edge_count()));
    for (const Edge& e : g.edges()) {
        auto pu = t.parent(e.u), pv = t.parent(e.v);
        if (pu && *pu == e.v)
            d.arcs.emplace_back(e.u, e.v); // toward the root
        else if (pv && *pv == e.u)
            d.arcs.emplace_back(e.v, e.u);
        else
            d.arcs.push_back(cycle_arc.at(e));
    }

    if (c != NonbipartiteCase::even_leaves) {
        auto block = deepest_leaf_block(h);
        if (!block)
            throw InputError("odd-leaf orientation needs a non-wheel graph");
        int k = static_cast<int>(block->sons.size());
        if ((k % 2 == 0) != (c == NonbipartiteCase::odd_k_even))
            throw InputError("orientation case does not match the leaf-son parity");
        int vk = block->sons.front();
        int flip_idx = g.edge_index(Edge(block->v, vk));
        d.arcs[static_cast<size_t>(flip_idx)] = {block->v, vk};
        if (k % 2 == 1) {
            // the cycle edge entering v_k now leaves it
            size_t pos = static_cast<size_t>(
                std::find(h.cycle.begin(), h.cycle.end(), vk) - h.cycle.begin());
            int pred = h.cycle[(pos + h.cycle.size() - 1) % h.cycle.size()];
            int ei = g.edge_index(Edge(pred, vk));
            d.arcs[static_cast<size_t>(ei)] = {vk, pred};
        }
    }

    std::map<int, int> outdeg;
    for (auto [tail, head] : d.arcs) {
        (void)head;
        if (++outdeg[tail] > 2)
            throw InternalError("case orientation exceeded out-degree 2");
    }
    return d;
}

namespace {

const char* nonbip_tag(NonbipartiteCase c)
{
    switch (c) {
    case NonbipartiteCase::even_leaves:
        return "nonbip-even-leaves";
    case NonbipartiteCase::odd_k_even:
        return "nonbip-odd-k-even";
    default:
        return "nonbip-odd-k-odd";
    }
}

} // namespace

Certificate certify_nonbipartite(const HalinGraph& h)
{
    const Graph& g = h.graph;
    if (bipartition(g).is_bipartite())
        throw InputError("graph is bipartite");

    int leaves = static_cast<int>(h.cycle.size());
    if (is_star(h.tree) && leaves % 2 == 1)
        return certify_wheel(h);

    NonbipartiteCase kase;
    if (leaves % 2 == 0) {
        kase = NonbipartiteCase::even_leaves;
    } else {
        auto block = deepest_leaf_block(h);
        if (!block)
            throw InternalError("odd-leaf non-wheel graph without a leaf block");
        kase = block->sons.size() % 2 == 0 ? NonbipartiteCase::odd_k_even
                                           : NonbipartiteCase::odd_k_odd;
    }
    Orientation d = build_case_orientation(h, kase);

    IndexFunction etav(g);
    for (auto [tail, head] : d.arcs) {
        (void)head;
        etav.vertex(g.vertex_index(tail)) += 1;
    }

    CoefficientMatrix base = build_coefficient_matrix(g, canonical_orientation(g));
    long long gate = permanent_mod(assemble(base, etav).m, 3);
    if (g.edge_count() <= 18) {
        long long diff = alon_tarsi_coefficient(g, d);
        if ((((diff % 3) + 3) % 3 != 0) != (gate != 0))
            throw InternalError("Eulerian difference disagrees with the mod-3 permanent");
    }
    if (gate == 0)
        throw FallbackNeeded("vertex-column matrix is singular mod 3");

    std::vector<SymbolicColumn> columns;
    nlohmann::json balloons = nlohmann::json::object();
    for (int vi = 0; vi < g.vertex_count(); ++vi) {
        if (etav.vertex(vi) == 0)
            continue;
        int id = g.vertex_id(vi);
        auto found = find_odd_balloons(g, id, {}, 1);
        if (found.empty())
            throw FallbackNeeded("no odd balloon rooted at vertex " + std::to_string(id));
        SymbolicColumn combo = balloon_combination(found.front(), base);
        for (int copy = 0; copy < etav.vertex(vi); ++copy)
            columns.push_back(combo);
        balloons[std::to_string(id)] = balloon_json(found.front());
    }

    IndexFunction eta = expand_to_edge_columns(base, columns, 3, 2);
    nlohmann::json aux{{"case", nonbip_tag(kase)},
                       {"orientation", arcs_json(d)},
                       {"balloons", balloons}};
    return finalize_certificate(g, eta, nonbip_tag(kase), std::move(aux));
}

Certificate certify_wheel(const HalinGraph& h)
{
    const Graph& g = h.graph;
    if (!is_star(h.tree))
        throw InputError("tree is not a star");
    int n = static_cast<int>(h.cycle.size());
    if (n % 2 == 0)
        throw InputError("wheel rim is even, not an odd wheel");
    int center = h.tree.root();

    if (n <= 5) {
        auto found = search_certificate(g, 2);
        if (!found)
            throw InternalError("small odd wheel has no certificate");
        found->provenance = "wheel-small";
        found->aux = {{"rim", n}};
        return *found;
    }

    // delete the smallest rim vertex, certify the rest through vertex columns
    std::vector<int> rim = h.cycle;
    size_t cut = static_cast<size_t>(
        std::min_element(rim.begin(), rim.end()) - rim.begin());
    std::vector<int> v(static_cast<size_t>(n) + 1, 0); // 1-based v_1..v_n
    for (int i = 1; i <= n; ++i)
        v[static_cast<size_t>(i)] = rim[(cut + static_cast<size_t>(i)) % static_cast<size_t>(n)];
    int vn = v[static_cast<size_t>(n)];

    Graph gp = g.without_vertex(vn);
    IndexFunction etap(gp);
    etap.vertex(gp.vertex_index(center)) = 1;
    for (int i = 2; i <= n - 1; ++i)
        etap.vertex(gp.vertex_index(v[static_cast<size_t>(i)])) = 2;

    CoefficientMatrix basep = build_coefficient_matrix(gp, canonical_orientation(gp));
    if (permanent_mod(assemble(basep, etap).m, 3) == 0)
        throw FallbackNeeded("rim-deleted vertex matrix singular mod 3");

    std::set<Edge> forbidden;
    for (int ei : gp.incident(gp.vertex_index(v[1])))
        forbidden.insert(gp.edge(ei));
    forbidden.insert(Edge(v[2], center));
    forbidden.insert(Edge(v[static_cast<size_t>(n) - 1], center));

    std::vector<SymbolicColumn> columns;
    nlohmann::json balloons = nlohmann::json::object();
    for (int vi = 0; vi < gp.vertex_count(); ++vi) {
        if (etap.vertex(vi) == 0)
            continue;
        int id = gp.vertex_id(vi);
        auto found = find_odd_balloons(gp, id, forbidden, 1);
        if (found.empty())
            throw FallbackNeeded("no constrained odd balloon at vertex " + std::to_string(id));
        SymbolicColumn combo = balloon_combination(found.front(), basep);
        for (int copy = 0; copy < etap.vertex(vi); ++copy)
            columns.push_back(combo);
        balloons[std::to_string(id)] = balloon_json(found.front());
    }
    IndexFunction eta_rest = expand_to_edge_columns(basep, columns, 3, 2);
    for (const Edge& e : forbidden)
        if (auto ei = gp.find_edge(e.u, e.v); ei && eta_rest.edge(*ei) != 0)
            throw InternalError("expansion touched a reserved edge");

    // reattach v_n through two edge-disjoint odd balloons, used 2 + 1 times
    Balloon b1{{vn}, {vn, center, v[static_cast<size_t>(n) - 1]}};
    Balloon b2{{vn, v[1]}, {v[1], v[2], center}};
    CoefficientMatrix base = build_coefficient_matrix(g, canonical_orientation(g));

    std::vector<SymbolicColumn> full;
    for (int e = 0; e < gp.edge_count(); ++e) {
        const Edge& ed = gp.edge(e);
        for (int copy = 0; copy < eta_rest.edge(e); ++copy)
            full.push_back(unit_column(base, base.edge_slot(g.edge_index(ed))));
    }
    SymbolicColumn c1 = balloon_combination(b1, base);
    SymbolicColumn c2 = balloon_combination(b2, base);
    full.push_back(c1);
    full.push_back(c2);
    full.push_back(c1);

    IndexFunction eta = expand_to_edge_columns_exact(base, full, 2);
    nlohmann::json aux{{"case", "wheel-large"},
                       {"deleted_rim_vertex", vn},
                       {"balloons", balloons},
                       {"b1", balloon_json(b1)},
                       {"b2", balloon_json(b2)}};
    return finalize_certificate(g, eta, "wheel-large", std::move(aux));
}

const char* provenance_tag(BipartiteCase c)
{
    switch (c) {
    case BipartiteCase::case1_two_sons:
        return "bip-case1-two-sons";
    case BipartiteCase::case1_three_sons:
        return "bip-case1-three-sons";
    case BipartiteCase::case2:
        return "bip-case2";
    default:
        return "bip-case3";
    }
}

namespace {

std::vector<int> descendants_of(const PlaneTree& t, int v)
{
    std::vector<int> out{v};
    std::vector<int> stack{v};
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int c : t.children(x)) {
            out.push_back(c);
            stack.push_back(c);
        }
    }
    return out;
}

void fill_partition_edges(PartitionPlan& plan, const Graph& g)
{
    std::sort(plan.x.begin(), plan.x.end());
    std::set<int> xs(plan.x.begin(), plan.x.end());
    plan.ex.clear();
    plan.exy.clear();
    for (const Edge& e : g.edges()) {
        bool iu = xs.count(e.u) > 0, iv = xs.count(e.v) > 0;
        if (iu && iv)
            plan.ex.push_back(e);
        else if (iu || iv)
            plan.exy.push_back(e);
    }
}

} // namespace

PartitionPlan choose_bipartite_partition(const HalinGraph& h)
{
    const PlaneTree& t0 = h.tree;

    int root = -1;
    for (int v : t0.vertex_ids())
        if (t0.tree_degree(v) >= 3 && (root < 0 || v < root))
            root = v;
    if (root < 0)
        throw FallbackNeeded("tree has no degree-3 vertex");

    PartitionPlan plan;
    plan.tree = t0.rerooted_at(root);
    const PlaneTree& t = plan.tree;

    // the re-rooted tree must induce the same leaf cycle
    {
        std::vector<int> leaves = t.leaves_in_cycle_order();
        std::set<Edge> want = cycle_edge_set(h), got;
        for (size_t i = 0; i < leaves.size(); ++i)
            got.insert(Edge(leaves[i], leaves[(i + 1) % leaves.size()]));
        if (want != got)
            throw FallbackNeeded("re-rooting changed the leaf cycle");
    }

    int v1 = -1;
    for (int v : t.vertex_ids())
        if (t.is_leaf(v) && (v1 < 0 || t.depth(v) > t.depth(v1) ||
                             (t.depth(v) == t.depth(v1) && v < v1)))
            v1 = v;
    auto p1 = t.parent(v1);
    if (!p1)
        throw FallbackNeeded("deepest leaf is the root");
    int v2 = *p1;
    if (t.children(v2).size() != 1)
        throw FallbackNeeded("father of the deepest leaf has several sons");
    auto p2 = t.parent(v2);
    if (!p2)
        throw FallbackNeeded("deepest leaf chain is too short");
    int v3 = *p2;

    if (t.children(v3).size() == 1) {
        auto p3 = t.parent(v3);
        if (!p3)
            throw FallbackNeeded("single-son hub is the root");
        int v4 = *p3;

        int wstar = -1;
        for (int s : t.children(v4))
            if (t.children(s).size() >= 2 && (wstar < 0 || s < wstar))
                wstar = s;
        if (wstar >= 0) {
            // a branching sibling at the same depth takes over the hub role
            v3 = wstar;
            int u = -1;
            for (int s : t.children(v3))
                if (!t.is_leaf(s) && (u < 0 || s < u))
                    u = s;
            if (u < 0 || t.children(u).size() != 1)
                throw FallbackNeeded("branching sibling has no single-son child");
            v2 = u;
            v1 = t.children(u).front();
            if (!t.is_leaf(v1))
                throw FallbackNeeded("grandchild of the substitute hub is internal");
        } else {
            plan.kase = BipartiteCase::case3;
            plan.v1 = v1;
            plan.v2 = v2;
            plan.v3 = v3;
            plan.hub = v4;
            plan.w = v3;
            plan.x = {v4};
            for (int s : t.children(v4)) {
                plan.x.push_back(s);
                if (t.children(s).size() > 1)
                    throw FallbackNeeded("son of the case-3 hub has several sons");
                for (int gk : t.children(s))
                    plan.x.push_back(gk);
            }
            fill_partition_edges(plan, h.graph);
            return plan;
        }
    }

    int m3 = static_cast<int>(t.children(v3).size());
    plan.v1 = v1;
    plan.v2 = v2;
    plan.v3 = v3;
    plan.hub = v3;
    if (m3 >= 4) {
        plan.kase = BipartiteCase::case2;
        int w = -1;
        for (int s : t.children(v3))
            if (s != v2 && !t.is_leaf(s) && (w < 0 || s < w))
                w = s;
        if (w < 0)
            throw FallbackNeeded("case-2 hub has no second internal son");
        plan.w = w;
        plan.x = descendants_of(t, v3);
    } else if (m3 == 2 || m3 == 3) {
        plan.kase = m3 == 2 ? BipartiteCase::case1_two_sons : BipartiteCase::case1_three_sons;
        size_t pos = static_cast<size_t>(
            std::find(h.cycle.begin(), h.cycle.end(), v1) - h.cycle.begin());
        int before = h.cycle[(pos + h.cycle.size() - 1) % h.cycle.size()];
        int after = h.cycle[(pos + 1) % h.cycle.size()];
        int w = -1;
        for (int s : t.children(v3))
            if (t.is_leaf(s) && (s == before || s == after) && (w < 0 || s < w))
                w = s;
        if (w < 0)
            throw FallbackNeeded("no leaf son of the hub touches the deepest leaf");
        plan.w = w;
        plan.x = {v3, v2, v1, w};
    } else {
        throw FallbackNeeded("hub son count out of range");
    }
    fill_partition_edges(plan, h.graph);
    return plan;
}

namespace {

enum class XRole { hub, son, grandkid };

struct SinkSourceContext {
    std::set<int> xs;
    std::map<int, XRole> role;
    std::map<int, Edge> up_edge; // X cycle leaf -> its tree edge
};

bool edge_is_source_or_sink(const Graph& h, const Orientation& d, int edge_idx)
{
    const Edge& f = h.edge(edge_idx);
    bool sink = true, source = true;
    for (int endpoint : {f.u, f.v}) {
        for (int ei : h.incident(h.vertex_index(endpoint))) {
            if (ei == edge_idx)
                continue;
            auto [tail, head] = d.arcs[static_cast<size_t>(ei)];
            if (head == endpoint)
                source = false; // oriented toward the shared vertex
            else
                sink = false;
            (void)tail;
        }
    }
    return sink || source;
}

} // namespace

EdgeAssignment build_sink_source_assignment(const PartitionPlan& plan, const HalinGraph& full)
{
    if (plan.kase != BipartiteCase::case2 && plan.kase != BipartiteCase::case3)
        throw InputError("sink/source assignment applies to cases 2 and 3 only");

    const PlaneTree& t = plan.tree;
    const int hub = plan.hub;

    EdgeAssignment out;
    std::vector<std::pair<int, int>> pairs;
    for (const Edge& e : plan.ex)
        pairs.emplace_back(e.u, e.v);
    for (const Edge& e : plan.exy)
        pairs.emplace_back(e.u, e.v);
    out.h = Graph::from_edges(pairs);
    const Graph& hg = out.h;

    SinkSourceContext ctx;
    ctx.xs.insert(plan.x.begin(), plan.x.end());
    ctx.role[hub] = XRole::hub;
    for (int s : t.children(hub)) {
        ctx.role[s] = XRole::son;
        for (int gk : t.children(s))
            if (ctx.xs.count(gk))
                ctx.role[gk] = XRole::grandkid;
    }
    for (int v : plan.x) {
        if (!ctx.role.count(v))
            throw FallbackNeeded("X vertex outside the hub's two-level neighbourhood");
        if (!t.is_leaf(v))
            continue;
        ctx.up_edge[v] = ctx.role[v] == XRole::son ? Edge(hub, v) : Edge(*t.parent(v), v);
    }

    std::set<Edge> cyc = cycle_edge_set(full);

    // orientation: hub is a sink vertex, grandchildren are source vertices
    out.orientation.arcs.reserve(static_cast<size_t>(hg.edge_count()));
    for (const Edge& e : hg.edges()) {
        if (!cyc.count(e)) {
            auto pu = t.parent(e.u), pv = t.parent(e.v);
            int child, par;
            if (pu && *pu == e.v) {
                child = e.u;
                par = e.v;
            } else if (pv && *pv == e.u) {
                child = e.v;
                par = e.u;
            } else {
                throw FallbackNeeded("non-tree non-cycle edge in H");
            }
            if (par == hub)
                out.orientation.arcs.emplace_back(child, hub);
            else if (child == hub)
                out.orientation.arcs.emplace_back(par, hub); // the hub's father edge
            else if (ctx.role.count(par) && ctx.role[par] == XRole::son)
                out.orientation.arcs.emplace_back(*t.children(par).begin() == child ? child : child, par);
            else if (ctx.role.count(par) && ctx.role[par] == XRole::grandkid)
                out.orientation.arcs.emplace_back(par, child); // away from the source vertex
            else
                throw FallbackNeeded("tree edge in H outside the hub neighbourhood");
        } else {
            bool iu = ctx.xs.count(e.u) > 0, iv = ctx.xs.count(e.v) > 0;
            if (iu && iv) {
                XRole ru = ctx.role.at(e.u), rv = ctx.role.at(e.v);
                if (ru == XRole::grandkid && rv == XRole::son)
                    out.orientation.arcs.emplace_back(e.u, e.v);
                else if (rv == XRole::grandkid && ru == XRole::son)
                    out.orientation.arcs.emplace_back(e.v, e.u);
                else
                    throw FallbackNeeded("cycle edge joins two same-depth X leaves");
            } else {
                int inside = iu ? e.u : e.v, outside = iu ? e.v : e.u;
                if (ctx.role.at(inside) == XRole::son)
                    out.orientation.arcs.emplace_back(outside, inside);
                else
                    out.orientation.arcs.emplace_back(inside, outside);
            }
        }
    }

    // the mapping: cyclic successor among hub edges, the hub's spare edge is
    // relieved through the designated internal son's child edge
    std::set<Edge> ex_set(plan.ex.begin(), plan.ex.end());
    Edge e4(hub, plan.w);
    int wchild = -1;
    if (t.children(plan.w).size() == 1)
        wchild = t.children(plan.w).front();
    if (wchild < 0)
        throw FallbackNeeded("designated internal son has no single child");
    Edge e5(plan.w, wchild);

    std::vector<Edge> chain;
    for (int s : t.children(hub)) {
        Edge e(hub, s);
        if (e != e4)
            chain.push_back(e);
    }
    for (size_t i = 0; i < chain.size(); ++i)
        out.phi[chain[i]] = chain[(i + 1) % chain.size()];
    out.phi[e4] = e5;
    if (auto hp = t.parent(hub))
        out.phi[Edge(*hp, hub)] = e4;

    for (int s : t.children(hub)) {
        if (t.is_leaf(s))
            continue;
        for (int c : t.children(s))
            out.phi[Edge(s, c)] = Edge(hub, s);
    }
    if (plan.kase == BipartiteCase::case3) {
        // internal grandchildren hang their crossing edge on their own tree edge
        for (int s : t.children(hub))
            for (int gk : t.children(s))
                for (int c : t.children(gk))
                    out.phi[Edge(gk, c)] = Edge(s, gk);
    }

    // cycle edges map toward a pivot leaf whose tree edge absorbs both sides
    int pivot = -1;
    if (plan.kase == BipartiteCase::case2) {
        pivot = plan.v1;
    } else {
        for (const auto& [v, role] : ctx.role)
            if (role == XRole::grandkid && t.is_leaf(v) && (pivot < 0 || v < pivot))
                pivot = v;
    }
    const std::vector<int>& order = full.cycle;
    auto pos_of = [&](int id) {
        return static_cast<long long>(std::find(order.begin(), order.end(), id) -
                                      order.begin());
    };
    long long csize = static_cast<long long>(order.size());
    long long ppos = pivot >= 0 ? pos_of(pivot) : -1;
    for (const Edge& e : hg.edges()) {
        if (!cyc.count(e))
            continue;
        if (pivot < 0)
            throw FallbackNeeded("cycle edge in H but no pivot leaf");
        int target;
        bool iu = ctx.xs.count(e.u) > 0, iv = ctx.xs.count(e.v) > 0;
        if (e.touches(pivot)) {
            target = pivot;
        } else if (!iu) {
            target = e.v;
        } else if (!iv) {
            target = e.u;
        } else {
            auto dist = [&](int id) {
                long long d = (pos_of(id) - ppos + csize) % csize;
                return std::min(d, csize - d);
            };
            long long du = dist(e.u), dv = dist(e.v);
            target = du < dv ? e.u : dv < du ? e.v : std::min(e.u, e.v);
        }
        auto it = ctx.up_edge.find(target);
        if (it == ctx.up_edge.end())
            throw FallbackNeeded("cycle edge maps to a vertex without a tree edge in X");
        out.phi[e] = it->second;
    }

    // full validation of the assignment contract
    std::map<Edge, int> preimages;
    for (const Edge& e : hg.edges()) {
        auto it = out.phi.find(e);
        if (it == out.phi.end())
            throw FallbackNeeded("edge " + edge_str(e) + " has no mapping");
        const Edge& f = it->second;
        if (f == e)
            throw FallbackNeeded("edge maps to itself");
        if (!ex_set.count(f))
            throw FallbackNeeded("mapping leaves E[X]");
        if (f.u != e.u && f.u != e.v && f.v != e.u && f.v != e.v)
            throw FallbackNeeded("mapped edge is not incident");
        if (!edge_is_source_or_sink(hg, out.orientation, hg.edge_index(f)))
            throw FallbackNeeded("target " + edge_str(f) + " is neither source nor sink");
        if (++preimages[f] > 2)
            throw FallbackNeeded("target " + edge_str(f) + " has more than two preimages");
    }
    return out;
}

SubgraphMatrix matrix_from_assignment(const EdgeAssignment& a, const PartitionPlan& plan)
{
    SubgraphMatrix out;
    out.h = a.h;
    out.eta = IndexFunction(out.h);
    for (const auto& [e, f] : a.phi)
        out.eta.edge(out.h.edge_index(f)) += 1;

    std::set<Edge> ex_set(plan.ex.begin(), plan.ex.end());
    for (int e = 0; e < out.h.edge_count(); ++e)
        if (out.eta.edge(e) != 0 && !ex_set.count(out.h.edge(e)))
            throw InternalError("assignment matrix uses a crossing column");

    CoefficientMatrix base = build_coefficient_matrix(out.h, canonical_orientation(out.h));
    out.permanent = permanent_exact(assemble(base, out.eta).m);
    if (out.permanent == 0)
        throw FallbackNeeded("assignment matrix is permanent-singular");
    return out;
}

SubgraphMatrix build_case1_certificate(const PartitionPlan& plan, const HalinGraph& full)
{
    if (plan.kase != BipartiteCase::case1_two_sons &&
        plan.kase != BipartiteCase::case1_three_sons)
        throw InputError("explicit matrix applies to case 1 only");
    (void)full;

    SubgraphMatrix out;
    std::vector<std::pair<int, int>> pairs;
    for (const Edge& e : plan.ex)
        pairs.emplace_back(e.u, e.v);
    for (const Edge& e : plan.exy)
        pairs.emplace_back(e.u, e.v);
    out.h = Graph::from_edges(pairs);

    out.eta = IndexFunction(out.h);
    auto put = [&](int a, int b, int mult) {
        auto ei = out.h.find_edge(a, b);
        if (!ei)
            throw FallbackNeeded("expected edge " + std::to_string(a) + "-" +
                                 std::to_string(b) + " missing from H");
        out.eta.edge(*ei) = mult;
    };
    put(plan.v1, plan.v2, 2);
    put(plan.v2, plan.v3, 2);
    put(plan.v3, plan.w, 2);
    put(plan.v1, plan.w, plan.kase == BipartiteCase::case1_two_sons ? 1 : 2);
    if (!out.eta.is_valid(out.h))
        throw FallbackNeeded("case-1 H has unexpected extra edges");

    CoefficientMatrix base = build_coefficient_matrix(out.h, canonical_orientation(out.h));
    out.permanent = permanent_exact(assemble(base, out.eta).m);
    if (out.permanent == 0)
        throw FallbackNeeded("case-1 matrix is permanent-singular");
    return out;
}

Certificate compose_blocks(const HalinGraph& h, const PartitionPlan& plan,
                           const SubgraphMatrix& hm)
{
    const Graph& g = h.graph;
    IndexFunction eta(g);
    for (int e = 0; e < hm.h.edge_count(); ++e)
        if (hm.eta.edge(e) != 0)
            eta.edge(g.edge_index(hm.h.edge(e))) += hm.eta.edge(e);

    std::set<int> xs(plan.x.begin(), plan.x.end());
    std::vector<int> yvertices;
    for (int id : g.vertex_ids())
        if (!xs.count(id))
            yvertices.push_back(id);

    // connected components of G[Y]
    std::set<int> unseen(yvertices.begin(), yvertices.end());
    nlohmann::json connectors = nlohmann::json::array();
    while (!unseen.empty()) {
        int start = *unseen.begin();
        std::set<int> comp;
        std::deque<int> queue{start};
        unseen.erase(start);
        comp.insert(start);
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int wi : g.neighbors(g.vertex_index(v))) {
                int wid = g.vertex_id(wi);
                if (unseen.count(wid)) {
                    unseen.erase(wid);
                    comp.insert(wid);
                    queue.push_back(wid);
                }
            }
        }

        std::optional<Edge> attach;
        for (const Edge& e : g.edges()) {
            bool cu = comp.count(e.u) > 0, cv = comp.count(e.v) > 0;
            if (cu == cv)
                continue;
            int other = cu ? e.v : e.u;
            if (xs.count(other) && (!attach || e < *attach))
                attach = e;
        }
        if (!attach)
            throw InternalError("component of G[Y] has no edge into X");
        int x_i = xs.count(attach->u) ? attach->u : attach->v;

        std::vector<std::pair<int, int>> pairs{{attach->u, attach->v}};
        for (const Edge& e : g.edges())
            if (comp.count(e.u) && comp.count(e.v))
                pairs.emplace_back(e.u, e.v);
        Graph gi = Graph::from_edges(pairs);

        DegeneracyOrdering ord;
        try {
            ord = degeneracy_ordering(gi, 2, x_i);
        } catch (const InputError& err) {
            throw FallbackNeeded(std::string("component not 2-degenerate: ") + err.what());
        }

        CoefficientMatrix basei = build_coefficient_matrix(gi, canonical_orientation(gi));
        std::vector<SymbolicColumn> columns;
        for (size_t j = 0; j < ord.order.size(); ++j) {
            int u = ord.order[j];
            int d = ord.back_degrees[j];
            if (u == x_i) {
                if (j + 1 != ord.order.size() || d != 1)
                    throw FallbackNeeded("attachment vertex is not a pendant tail");
                columns.push_back(unit_column(basei, basei.vertex_slot(gi.vertex_index(u))));
                continue;
            }
            if (d == 0)
                continue;
            // alternating edge columns along a path to the attachment vertex;
            // the leftover vertex column cancels against A(x_i) by parity
            std::vector<int> path = bfs_path(gi, u, x_i);
            SymbolicColumn combo;
            combo.combo = IntVector::Zero(basei.slot_count());
            for (size_t s = 0; s + 1 < path.size(); ++s) {
                int ei = gi.edge_index(Edge(path[s], path[s + 1]));
                combo.combo(basei.edge_slot(ei)) = (s % 2 == 0) ? 1 : -1;
            }
            for (int copy = 0; copy < d; ++copy)
                columns.push_back(combo);
        }

        IndexFunction etai = expand_to_edge_columns(basei, columns, 3, 2);
        for (int vi = 0; vi < gi.vertex_count(); ++vi) {
            int expect = gi.vertex_id(vi) == x_i ? 1 : 0;
            if (etai.vertex(vi) != expect)
                throw InternalError("component expansion misplaced a vertex column");
        }
        for (int e = 0; e < gi.edge_count(); ++e)
            if (etai.edge(e) != 0)
                eta.edge(g.edge_index(gi.edge(e))) += etai.edge(e);
        connectors.push_back(edge_str(*attach));
    }

    if (!eta.is_valid(g))
        throw InternalError("composed index function is not valid");
    nlohmann::json aux{{"case", provenance_tag(plan.kase)},
                       {"X", plan.x},
                       {"connectors", connectors},
                       {"h_permanent", hm.permanent.str()}};
    return finalize_certificate(g, eta, provenance_tag(plan.kase), std::move(aux));
}

Certificate certify_bipartite(const HalinGraph& h)
{
    if (!bipartition(h.graph).is_bipartite())
        throw InputError("graph is not bipartite");
    PartitionPlan plan = choose_bipartite_partition(h);
    SubgraphMatrix hm;
    if (plan.kase == BipartiteCase::case1_two_sons ||
        plan.kase == BipartiteCase::case1_three_sons) {
        hm = build_case1_certificate(plan, h);
    } else {
        EdgeAssignment a = build_sink_source_assignment(plan, h);
        hm = matrix_from_assignment(a, plan);
    }
    return compose_blocks(h, plan, hm);
}

Certificate certify(const HalinGraph& h)
{
    std::string why;
    try {
        if (bipartition(h.graph).is_bipartite())
            return certify_bipartite(h);
        return certify_nonbipartite(h);
    } catch (const FallbackNeeded& e) {
        why = e.what();
    } catch (const InternalError& e) {
        why = e.what();
    }

    auto found = search_certificate(h.graph, 2);
    if (!found)
        throw InternalError("constructive paths failed (" + why +
                            ") and the exhaustive search found nothing");
    found->aux["constructive_failure"] = why;
    return *found;
}

VerifyReport verify_certificate(const Graph& g, const Certificate& c)
{
    VerifyReport r;
    if (c.eta.vertex_slots() != g.vertex_count() || c.eta.edge_slots() != g.edge_count()) {
        r.reason = "index function shape does not match the graph";
        return r;
    }
    for (int v = 0; v < c.eta.vertex_slots(); ++v)
        if (c.eta.vertex(v) != 0) {
            r.reason = "vertex multiplicity: vertex " + std::to_string(g.vertex_id(v)) +
                       " has nonzero index";
            return r;
        }
    for (int e = 0; e < c.eta.edge_slots(); ++e)
        if (c.eta.edge(e) < 0 || c.eta.edge(e) > 2) {
            r.reason = "multiplicity: edge " + edge_str(g.edge(e)) + " outside {0,1,2}";
            return r;
        }
    if (c.eta.total() != g.edge_count()) {
        r.reason = "total " + std::to_string(c.eta.total()) + " differs from |E| = " +
                   std::to_string(g.edge_count());
        return r;
    }
    CoefficientMatrix base = build_coefficient_matrix(g, canonical_orientation(g));
    r.recomputed_permanent = permanent_exact(assemble(base, c.eta).m);
    if (r.recomputed_permanent == 0) {
        r.reason = "singular: recomputed permanent is zero";
        return r;
    }
    if (r.recomputed_permanent != c.permanent) {
        r.reason = "permanent mismatch: certificate says " + c.permanent.str() +
                   ", recomputed " + r.recomputed_permanent.str();
        return r;
    }
    r.ok = true;
    return r;
}

VerifyReport verify_certificate(const HalinGraph& h, const Certificate& c)
{
    return verify_certificate(h.graph, c);
}

std::optional<Certificate> search_certificate(const Graph& g, int edge_cap)
{
    if (g.edge_count() > kSearchMaxEdges)
        throw ScaleError("exhaustive search limited to " + std::to_string(kSearchMaxEdges) +
                         " edges");
    if (edge_cap < 0)
        throw InputError("edge cap must be non-negative");

    const int m = g.edge_count();
    CoefficientMatrix base = build_coefficient_matrix(g, canonical_orientation(g));

    IndexFunction eta(g);
    std::optional<Certificate> found;
    // lexicographic enumeration over the canonical edge order
    std::function<bool(int, int)> walk = [&](int pos, int remaining) {
        if (pos == m) {
            if (remaining != 0)
                return false;
            WeightMatrix w = assemble(base, eta);
            BigInt per = permanent_exact(w.m);
            if (per == 0)
                return false;
            Certificate c;
            c.eta = eta;
            c.permanent = std::move(per);
            c.provenance = "search";
            found = std::move(c);
            return true;
        }
        int slots_left = m - pos - 1;
        for (int take = 0; take <= std::min(edge_cap, remaining); ++take) {
            if (remaining - take > static_cast<long long>(slots_left) * edge_cap)
                continue;
            eta.edge(pos) = take;
            if (walk(pos + 1, remaining - take))
                return true;
        }
        eta.edge(pos) = 0;
        return false;
    };
    walk(0, m);
    return found;
}

} // namespace twc
