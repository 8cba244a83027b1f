"""Shortcut partitions from gridtree hierarchies: greedy spine clustering,
cluster-graph hop costs, and the partition verifier."""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import GraphError, WeightedGraph, dijkstra, multi_source_labels
from .gridtree import CheckReport, GridtreeHierarchy

DEFAULT_T = 0.125  # distortion knob; hierarchies are built with width t*eps*delta
GAMMA = 4  # strong cluster diameter is at most GAMMA * eps * delta


@dataclass(frozen=True)
class Cluster:
    cluster_id: int
    center: int
    node: int  # hierarchy node id
    column: int  # column id within that node's gridtree
    ordinal: int  # 1-based position of the center along the column spine
    vertices: frozenset[int]


@dataclass(frozen=True)
class Partition:
    eps: float
    t: float
    delta: float
    cluster_of: tuple[int, ...]
    clusters: tuple[Cluster, ...]


def cluster_graph_adjacency(g: WeightedGraph, p: Partition) -> list[set[int]]:
    """Unweighted cluster-graph adjacency: one supernode per cluster, an edge
    whenever some graph edge joins the two clusters."""
    adj: list[set[int]] = [set() for _ in p.clusters]
    for u, v, _ in g.edges:
        cu, cv = p.cluster_of[u], p.cluster_of[v]
        if cu != cv:
            adj[cu].add(cv)
            adj[cv].add(cu)
    return adj


def _peel_centers(spine: tuple[int, ...], arc: list[float], spacing: float, tol: float) -> list[int]:
    """Indices of greedily chosen centers: keep taking the first vertex, then
    drop to the longest suffix at least `spacing` shorter."""
    centers = [0]
    cur = 0
    while True:
        nxt = None
        for i in range(cur + 1, len(spine)):
            if arc[i] >= arc[cur] + spacing - tol:
                nxt = i
                break
        if nxt is None:
            return centers
        centers.append(nxt)
        cur = nxt


def cluster_column(
    g: WeightedGraph,
    column_vertices: frozenset[int],
    spine: tuple[int, ...],
    eps: float,
    delta: float,
    tol: float = 0.0,
) -> list[tuple[int, int, frozenset[int]]]:
    """Cluster one column: centers every eps*delta along the spine, spine
    vertices to their nearest center (lowest index on ties), remaining column
    vertices to the cluster of their nearest spine vertex (earliest spine
    position on ties).  Returns (center, ordinal, vertices) triples."""
    spacing = eps * delta
    arc = [0.0]
    for a, b in zip(spine, spine[1:]):
        w = next(w for x, _, w in g.adj[a] if x == b)
        arc.append(arc[-1] + w)
    centers = _peel_centers(spine, arc, spacing, tol)

    _, center_label, _ = multi_source_labels(
        g, [(spine[idx], (rank,)) for rank, idx in enumerate(centers)], scope=column_vertices
    )
    _, spine_label, _ = multi_source_labels(
        g, [(s, (pos,)) for pos, s in enumerate(spine)], scope=column_vertices
    )
    members: list[set[int]] = [set() for _ in centers]
    for v in sorted(column_vertices):
        nearest_spine_vertex = spine[spine_label[v][0]]
        members[center_label[nearest_spine_vertex][0]].add(v)
    return [
        (spine[idx], rank + 1, frozenset(members[rank]))
        for rank, idx in enumerate(centers)
        if members[rank]
    ]


def cluster_hierarchy(
    g: WeightedGraph,
    h: GridtreeHierarchy,
    eps: float,
    t: float = DEFAULT_T,
    tol: float | None = None,
) -> Partition:
    """Union of per-column clusterings over every gridtree in the hierarchy.
    The hierarchy must have been built with width t*eps*delta."""
    if not 0 < t <= 0.125:
        raise GraphError(f"t must lie in (0, 1/8], got {t}")
    if tol is None:
        tol = 1e-9 * h.delta
    if abs(h.width - t * eps * h.delta) > tol + 1e-12 * h.delta:
        raise GraphError(
            f"hierarchy width {h.width} does not match t*eps*delta = {t * eps * h.delta}"
        )
    cluster_of = [-1] * g.n
    clusters: list[Cluster] = []
    for node in h.nodes:
        for col in node.gridtree.columns:
            for center, ordinal, vertices in cluster_column(
                g, col.vertices, col.spine, eps, h.delta, tol
            ):
                cid = len(clusters)
                clusters.append(
                    Cluster(cid, center, node.hid, col.cid, ordinal, vertices)
                )
                for v in vertices:
                    if cluster_of[v] != -1:
                        raise GraphError(f"vertex {v} assigned to two clusters")
                    cluster_of[v] = cid
    if any(c == -1 for c in cluster_of):
        missing = [v for v, c in enumerate(cluster_of) if c == -1]
        raise GraphError(f"vertices {missing[:5]} not covered by any cluster")
    return Partition(eps, t, h.delta, tuple(cluster_of), tuple(clusters))


# ---------------------------------------------------------------------------
# hop costs


def cost(
    g: WeightedGraph,
    p: Partition,
    walk: list[int],
    adj: list[set[int]] | None = None,
    check_walk: bool = True,
) -> int:
    """Minimum hop count in the cluster graph between the endpoint clusters,
    using only supernodes of clusters the walk touches."""
    if not walk:
        raise GraphError("empty walk")
    if check_walk:
        for a, b in zip(walk, walk[1:]):
            if a != b and not g.has_edge(a, b):
                raise GraphError(f"({a},{b}) is not an edge; not a walk in the graph")
    touched = {p.cluster_of[v] for v in walk}
    start, goal = p.cluster_of[walk[0]], p.cluster_of[walk[-1]]
    if adj is None:
        adj = cluster_graph_adjacency(g, p)
    hops = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for c in frontier:
            if c == goal:
                return hops[c]
            for d in sorted(adj[c]):
                if d in touched and d not in hops:
                    hops[d] = hops[c] + 1
                    nxt.append(d)
        frontier = nxt
    if goal in hops:
        return hops[goal]
    raise GraphError("endpoint clusters not connected through touched clusters")


class _ColumnRouting:
    """Per-column routing data: chains from any column vertex to its nearest
    spine vertex, plus spine positions, for building detour walks."""

    def __init__(self, g: WeightedGraph, vertices: frozenset[int], spine: tuple[int, ...]):
        self.spine = spine
        self.pos = {s: i for i, s in enumerate(spine)}
        _, label, pred = multi_source_labels(
            g, [(s, (i,)) for i, s in enumerate(spine)], scope=vertices
        )
        self.label = label
        self.pred = pred

    def to_spine(self, v: int) -> list[int]:
        chain = [v]
        while self.pred[chain[-1]] is not None:
            chain.append(self.pred[chain[-1]])
        return chain  # ends at a spine vertex

    def spine_segment(self, a: int, b: int) -> list[int]:
        i, j = self.pos[a], self.pos[b]
        if i <= j:
            return list(self.spine[i : j + 1])
        return list(reversed(self.spine[j : i + 1]))


def _walk_length(g: WeightedGraph, walk: list[int]) -> float:
    total = 0.0
    for a, b in zip(walk, walk[1:]):
        if a == b:
            continue
        total += next(w for x, _, w in g.adj[a] if x == b)
    return total


def _detour_walk(
    g: WeightedGraph, p: Partition, path: list[int], routing: dict[tuple[int, int], _ColumnRouting]
) -> list[int]:
    """Rewrite a path so that every maximal run inside one column travels via
    that column's spine."""
    runs: list[tuple[tuple[int, int], int, int]] = []
    i = 0
    while i < len(path):
        c = p.clusters[p.cluster_of[path[i]]]
        key = (c.node, c.column)
        j = i
        while j + 1 < len(path):
            c2 = p.clusters[p.cluster_of[path[j + 1]]]
            if (c2.node, c2.column) != key:
                break
            j += 1
        runs.append((key, i, j))
        i = j + 1
    out: list[int] = []
    for key, i, j in runs:
        if j == i or key not in routing:
            out.extend(path[i : j + 1])
            continue
        r = routing[key]
        entry_chain = r.to_spine(path[i])  # starts at path[i], ends on the spine
        exit_chain = r.to_spine(path[j])
        seg = r.spine_segment(entry_chain[-1], exit_chain[-1])
        out.extend(entry_chain)
        out.extend(seg[1:])
        out.extend(reversed(exit_chain[:-1]))
    return out


def cost_with_distortion(
    g: WeightedGraph,
    p: Partition,
    u: int,
    v: int,
    routing: dict[tuple[int, int], _ColumnRouting] | None = None,
    spt=None,
    tol: float = 0.0,
) -> int:
    """Certified upper bound on the (1+8t)-distorted cost between u and v:
    the best cluster-hop count over a candidate set of approximate shortest
    walks (the exact shortest path, plus its spine-detour rewrite when
    routing data is supplied and the rewrite stays within the length budget)."""
    if u == v:
        raise GraphError("cost with distortion needs distinct endpoints")
    if spt is None:
        spt = dijkstra(g, u)
    adj = cluster_graph_adjacency(g, p)
    path = spt.path_to(v)
    d = spt.dist[v]
    best = cost(g, p, path, adj=adj)
    if routing:
        budget = (1 + 8 * p.t) * d + tol
        walk = _detour_walk(g, p, path, routing)
        if walk and walk[0] == u and walk[-1] == v and _walk_length(g, walk) <= budget:
            best = min(best, cost(g, p, walk, adj=adj))
    return best


def build_routing(
    g: WeightedGraph, p: Partition, h: GridtreeHierarchy
) -> dict[tuple[int, int], _ColumnRouting]:
    routing: dict[tuple[int, int], _ColumnRouting] = {}
    for node in h.nodes:
        for col in node.gridtree.columns:
            routing[(node.hid, col.cid)] = _ColumnRouting(g, col.vertices, col.spine)
    return routing


# ---------------------------------------------------------------------------
# verification


def verify_partition(
    g: WeightedGraph,
    p: Partition,
    oracle,
    h: GridtreeHierarchy | None = None,
    max_exact_n: int = 1500,
    sample_pairs: int = 10000,
    seed: int = 0,
    tol: float | None = None,
) -> CheckReport:
    """Connectivity, strong diameter, center spacing, and the certified hop
    bound 85*dist/(t*eps*delta) + 80 over all (or sampled) pairs."""
    import random

    rep = CheckReport()
    if tol is None:
        tol = 1e-9 * p.delta
    bound_diam = GAMMA * p.eps * p.delta

    seen = [0] * g.n
    for c in p.clusters:
        for v in c.vertices:
            seen[v] += 1
            if p.cluster_of[v] != c.cluster_id:
                rep.note(f"vertex {v}: cluster_of disagrees with membership")
    if any(s != 1 for s in seen):
        rep.note("cluster assignment is not a partition")

    for c in p.clusters:
        if c.center not in c.vertices:
            rep.note(f"cluster {c.cluster_id}: center {c.center} not a member")
            continue
        spt = dijkstra(g, c.center, scope=c.vertices)
        if any(not spt.reached(v) for v in c.vertices):
            rep.note(f"cluster {c.cluster_id} is disconnected")
            continue
        worst = 0.0
        for v in sorted(c.vertices):
            ecc = max(dijkstra(g, v, scope=c.vertices).dist[x] for x in c.vertices)
            worst = max(worst, ecc)
        if worst > bound_diam + tol:
            rep.note(
                f"cluster {c.cluster_id} strong diameter {worst} exceeds {bound_diam}"
            )

    if h is not None:
        spacing = p.eps * p.delta
        by_column: dict[tuple[int, int], list[Cluster]] = {}
        for c in p.clusters:
            by_column.setdefault((c.node, c.column), []).append(c)
        for (hid, cid), cs in sorted(by_column.items()):
            sub = h.nodes[hid].gridtree.subgraph_of(cid)
            cs = sorted(cs, key=lambda c: c.ordinal)
            for i, ci in enumerate(cs):
                spt = dijkstra(g, ci.center, scope=sub)
                for cj in cs[i + 1 :]:
                    need = abs(ci.ordinal - cj.ordinal) * spacing
                    if spt.dist[cj.center] < need - tol:
                        rep.note(
                            f"column ({hid},{cid}): centers {ci.ordinal},{cj.ordinal} at "
                            f"{spt.dist[cj.center]} < {need}"
                        )

    pairs: list[tuple[int, int]] = []
    if g.n <= max_exact_n:
        pairs = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
    else:
        rng = random.Random(seed)
        while len(pairs) < sample_pairs:
            u, v = rng.randrange(g.n), rng.randrange(g.n)
            if u != v:
                pairs.append((min(u, v), max(u, v)))
    routing = build_routing(g, p, h) if h is not None else {}
    cadj = cluster_graph_adjacency(g, p)
    hop_scale = p.t * p.eps * p.delta
    spts: dict[int, object] = {}
    for u, v in pairs:
        if u not in spts:
            spts[u] = dijkstra(g, u)
        spt = spts[u]
        d = oracle.dist(u, v)
        allowed = 85.0 * d / hop_scale + 80.0
        path = spt.path_to(v)
        got = cost(g, p, path, adj=cadj, check_walk=False)
        if got > allowed:
            budget = (1 + 8 * p.t) * d + tol
            walk = _detour_walk(g, p, path, routing) if routing else []
            if walk and _walk_length(g, walk) <= budget:
                got = min(got, cost(g, p, walk, adj=cadj))
        if got > allowed:
            rep.note(f"pair ({u},{v}): certified cost {got} exceeds bound {allowed:.2f}")
    return rep


# ---------------------------------------------------------------------------
# serialization


def partition_to_dict(p: Partition) -> dict:
    return {
        "eps": p.eps,
        "t": p.t,
        "delta": p.delta,
        "cluster_of": list(p.cluster_of),
        "clusters": [
            {
                "cluster_id": c.cluster_id,
                "center": c.center,
                "node": c.node,
                "column": c.column,
                "ordinal": c.ordinal,
                "vertices": sorted(c.vertices),
            }
            for c in p.clusters
        ],
    }


def partition_from_dict(d: dict) -> Partition:
    return Partition(
        eps=d["eps"],
        t=d["t"],
        delta=d["delta"],
        cluster_of=tuple(d["cluster_of"]),
        clusters=tuple(
            Cluster(
                cluster_id=c["cluster_id"],
                center=c["center"],
                node=c["node"],
                column=c["column"],
                ordinal=c["ordinal"],
                vertices=frozenset(c["vertices"]),
            )
            for c in d["clusters"]
        ),
    )
