"""Exact spanning tree covers for unweighted low-diameter graphs.

Start from a star-forest edge decomposition (degeneracy-based), then
repeatedly expand every forest so that paths one edge longer stay preserved:
a pair's distance is realized through the root of some BFS tree.  The same
machinery converts shortcut partitions into additive covers by running the
exact cover on the cluster graph and replacing each tree with a distance-
weighted star.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graph import GraphError, WeightedGraph
from .lca import RootedTree, tree_from_parent_map
from .partition import GAMMA, Partition, cluster_graph_adjacency


class SizeBudgetExceeded(GraphError):
    pass


@dataclass(frozen=True)
class ExactCover:
    forests: tuple[tuple[RootedTree, ...], ...]
    hop_budget: int

    @property
    def size(self) -> int:
        return len(self.forests)


# ---------------------------------------------------------------------------
# degeneracy-based decompositions on plain adjacency maps


def _degeneracy_order(adj: dict[int, set[int]]) -> list[int]:
    """Build order: every node has few neighbors among its predecessors."""
    deg = {v: len(ns) for v, ns in adj.items()}
    alive = set(adj)
    removal = []
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        removal.append(v)
        alive.remove(v)
        for u in adj[v]:
            if u in alive:
                deg[u] -= 1
    removal.reverse()
    return removal


def _back_edge_forests(adj: dict[int, set[int]]) -> list[list[tuple[int, int]]]:
    """Partition edges into forests: the k-th back-edge of each node in build
    order goes to forest k."""
    order = _degeneracy_order(adj)
    pos = {v: i for i, v in enumerate(order)}
    forests: list[list[tuple[int, int]]] = []
    for v in order:
        back = sorted(u for u in adj[v] if pos[u] < pos[v])
        for k, u in enumerate(back):
            if k == len(forests):
                forests.append([])
            forests[k].append((u, v))
    return forests


def _forest_components(edges: list[tuple[int, int]]) -> list[dict[int, list[int]]]:
    nbrs: dict[int, list[int]] = {}
    for u, v in edges:
        nbrs.setdefault(u, []).append(v)
        nbrs.setdefault(v, []).append(u)
    seen: set[int] = set()
    comps = []
    for start in sorted(nbrs):
        if start in seen:
            continue
        comp: dict[int, list[int]] = {}
        stack = [start]
        seen.add(start)
        while stack:
            x = stack.pop()
            comp[x] = sorted(nbrs[x])
            for y in nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def _split_into_star_forests(
    edges: list[tuple[int, int]]
) -> list[list[tuple[int, tuple[int, ...]]]]:
    """Split a forest into at most two star forests by the parity of the
    parent's depth (each tree rooted at its smallest node)."""
    stars: dict[int, dict[int, list[int]]] = {0: {}, 1: {}}
    for comp in _forest_components(edges):
        root = min(comp)
        depth = {root: 0}
        queue = [root]
        while queue:
            x = queue.pop(0)
            for y in comp[x]:
                if y not in depth:
                    depth[y] = depth[x] + 1
                    stars[depth[x] % 2].setdefault(x, []).append(y)
                    queue.append(y)
    out = []
    for parity in (0, 1):
        if stars[parity]:
            out.append(sorted((c, tuple(sorted(ls))) for c, ls in stars[parity].items()))
    return out


def _greedy_coloring(adj: dict[int, set[int]]) -> dict[int, int]:
    order = _degeneracy_order(adj)
    color: dict[int, int] = {}
    for v in order:
        used = {color[u] for u in adj[v] if u in color}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    return color


# ---------------------------------------------------------------------------
# star forest base and root expansion


def _require_unweighted(g: WeightedGraph) -> None:
    if any(w != 1.0 for _, _, w in g.edges):
        raise GraphError("exact covers require unit edge weights")


def _bfs_tree(g: WeightedGraph, root: int, scope: frozenset[int]) -> RootedTree:
    parent: dict[int, tuple[int, float]] = {}
    seen = {root}
    queue = [root]
    while queue:
        x = queue.pop(0)
        for y, _, _ in g.adj[x]:
            if y in scope and y not in seen:
                seen.add(y)
                parent[y] = (x, 1.0)
                queue.append(y)
    return tree_from_parent_map(root, parent, "spanning")


def star_forest_base(g: WeightedGraph) -> ExactCover:
    """Every edge in some star; the set of star forests preserves all paths
    of length one."""
    _require_unweighted(g)
    adj = {v: set(g.neighbors(v)) for v in range(g.n)}
    forests: list[tuple[RootedTree, ...]] = []
    for edges in _back_edge_forests(adj):
        for star_forest in _split_into_star_forests(edges):
            trees = tuple(
                tree_from_parent_map(c, {v: (c, 1.0) for v in leaves}, "spanning")
                for c, leaves in star_forest
            )
            forests.append(trees)
    return ExactCover(tuple(forests), hop_budget=1)


def is_bfs_tree(g: WeightedGraph, tree: RootedTree) -> bool:
    """Tree distances from the root equal hop distances on the induced subgraph."""
    scope = tree.vertex_set()
    hop = {tree.root: 0}
    queue = [tree.root]
    while queue:
        x = queue.pop(0)
        for y, _, _ in g.adj[x]:
            if y in scope and y not in hop:
                hop[y] = hop[x] + 1
                queue.append(y)
    if set(hop) != set(scope):
        return False
    depth = {tree.root: 0}
    pending = dict(zip(tree.nodes, tree.parent))
    # compute depths by repeated resolution (trees are small here)
    changed = True
    while changed:
        changed = False
        for v, p in pending.items():
            if v in depth or p == -1:
                continue
            if p in depth:
                depth[v] = depth[p] + 1
                changed = True
    return all(depth.get(v) == hop[v] for v in tree.nodes)


def root_expansion(g: WeightedGraph, forest: list[RootedTree]) -> list[list[RootedTree]]:
    """Constant-size set of BFS forests preserving every one-edge extension of
    a path whose prefix is preserved by the input forest."""
    _require_unweighted(g)
    claimed: set[int] = set()
    for t in forest:
        if not is_bfs_tree(g, t):
            raise GraphError("root expansion requires a BFS forest")
        if claimed & t.vertex_set():
            raise GraphError("input forest has overlapping trees")
        claimed |= t.vertex_set()

    tree_of: dict[int, int] = {}
    for i, t in enumerate(forest):
        for v in t.vertex_set():
            tree_of[v] = i
    # cluster graph over tree supernodes plus ordinary vertices
    def group(v: int) -> tuple[int, int]:
        return (0, tree_of[v]) if v in tree_of else (1, v)

    cadj: dict[tuple[int, int], set[tuple[int, int]]] = {}
    for i in range(len(forest)):
        cadj[(0, i)] = set()
    for v in range(g.n):
        if v not in tree_of:
            cadj[(1, v)] = set()
    for u, v, _ in g.edges:
        gu, gv = group(u), group(v)
        if gu != gv:
            cadj[gu].add(gv)
            cadj[gv].add(gu)
    color = _greedy_coloring(cadj)

    out: list[list[RootedTree]] = [list(forest)]
    for c in sorted(set(color[(0, i)] for i in range(len(forest)))):
        trees_c = [i for i in range(len(forest)) if color[(0, i)] == c]
        member = {v: i for i in trees_c for v in forest[i].vertex_set()}
        # contract only the color-c trees; everything else stays ordinary
        def node_c(v: int) -> tuple[int, int]:
            return (0, member[v]) if v in member else (1, v)

        adj_c: dict[tuple[int, int], set[tuple[int, int]]] = {}
        for i in trees_c:
            adj_c[(0, i)] = set()
        for v in range(g.n):
            if v not in member:
                adj_c[(1, v)] = set()
        for u, v, _ in g.edges:
            nu, nv = node_c(u), node_c(v)
            if nu != nv:
                adj_c[nu].add(nv)
                adj_c[nv].add(nu)
        # star-forest decomposition of the contracted graph
        key_of = {node: k for k, node in enumerate(sorted(adj_c))}
        node_of = {k: node for node, k in key_of.items()}
        int_adj = {key_of[a]: {key_of[b] for b in bs} for a, bs in adj_c.items()}
        for edges in _back_edge_forests(int_adj):
            for star_forest in _split_into_star_forests(edges):
                uncompressed: list[RootedTree] = []
                for center_key, leaf_keys in star_forest:
                    members: set[int] = set()
                    for k in (center_key,) + leaf_keys:
                        kind, payload = node_of[k]
                        if kind == 0:
                            members |= forest[payload].vertex_set()
                        else:
                            members.add(payload)
                    ckind, cpayload = node_of[center_key]
                    r = forest[cpayload].root if ckind == 0 else cpayload
                    uncompressed.append(_bfs_tree(g, r, frozenset(members)))
                out.append(uncompressed)
    return out


def _forest_key(forest) -> tuple:
    return tuple(
        sorted(
            (t.root, tuple(sorted((min(a, b), max(a, b)) for a, b, _ in t.edges())))
            for t in forest
        )
    )


def exact_cover(g: WeightedGraph, max_len: int, cap: int = 50000) -> ExactCover:
    """Forests preserving every path of length at most max_len: some forest
    realizes every such pair's distance through a tree root."""
    _require_unweighted(g)
    if max_len < 1:
        raise GraphError("max_len must be at least 1")
    current = [list(f) for f in star_forest_base(g).forests]
    for _ in range(max_len - 1):
        nxt: dict[tuple, list[RootedTree]] = {}
        for forest in current:
            for expanded in root_expansion(g, forest):
                nxt.setdefault(_forest_key(expanded), expanded)
        current = [nxt[k] for k in sorted(nxt)]
        if len(current) > cap:
            raise SizeBudgetExceeded(
                f"exact cover grew to {len(current)} forests (cap {cap})"
            )
    return ExactCover(tuple(tuple(f) for f in current), hop_budget=max_len)


# ---------------------------------------------------------------------------
# partition-to-cover reduction


def star_transform(
    tree: RootedTree, g: WeightedGraph, p: Partition, oracle
) -> RootedTree:
    """Replace a cluster-graph BFS tree by a star from the smallest vertex of
    its root cluster to every member vertex, weighted by true distance."""
    root_cluster = p.clusters[tree.root]
    r = min(root_cluster.vertices)
    parent: dict[int, tuple[int, float]] = {}
    for cid in tree.nodes:
        for v in sorted(p.clusters[cid].vertices):
            if v != r:
                parent[v] = (r, oracle.dist(r, v))
    return tree_from_parent_map(r, parent, "steiner-star")


def required_hop_budget(g: WeightedGraph, p: Partition) -> int:
    """Largest restricted cluster-hop count of any canonical shortest path."""
    from .graph import dijkstra
    from .partition import cost

    cadj = cluster_graph_adjacency(g, p)
    worst = 0
    for u in range(g.n):
        spt = dijkstra(g, u)
        for v in range(u + 1, g.n):
            worst = max(worst, cost(g, p, spt.path_to(v), adj=cadj, check_walk=False))
    return worst


def partition_to_cover(
    g: WeightedGraph,
    p: Partition,
    oracle,
    hop_budget: int | None = None,
    cap: int = 50000,
):
    """Additive cover from a shortcut partition: exact cover of the cluster
    graph, then the star transformation.  Returns a ForestCover whose bound
    is twice the cluster diameter."""
    from .forestcover import ForestCover

    adj = cluster_graph_adjacency(g, p)
    edges = []
    for a in range(len(adj)):
        for b in sorted(adj[a]):
            if a < b:
                edges.append((a, b, 1.0))
    if len(p.clusters) == 1:
        cg = None
        star = star_transform(
            tree_from_parent_map(0, {}, "spanning"), g, p, oracle
        )
        forests: list[tuple[RootedTree, ...]] = [(star,)]
        budget = 0
    else:
        from .graph import build_graph

        cg = build_graph(len(p.clusters), edges)
        budget = required_hop_budget(g, p) if hop_budget is None else hop_budget
        ec = exact_cover(cg, max(1, budget), cap=cap)
        forests = [
            tuple(star_transform(t, g, p, oracle) for t in forest)
            for forest in ec.forests
        ]
    return ForestCover(
        eps=p.eps,
        delta=p.delta,
        additive_bound=2 * GAMMA * p.eps * p.delta,
        forests=tuple(forests),
        keys=tuple((0, 0, j) for j in range(len(forests))),
        slot_count=len(forests),
    )
