"""Shortcut partitions for graphs with a width-k tree decomposition.

The graph is first rewritten bag by bag: one copy of each vertex per bag,
zero-weight edges between copies in adjacent bags, and each bag turned into a
clique weighted by true distances.  Clustering then runs in k+1 rounds of
ball growing down the decomposition tree; overlaps are resolved by one
multi-source shortest-path pass from the ball centers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import (
    GraphError,
    WeightedGraph,
    build_graph,
    dijkstra,
    exact_oracle,
    multi_source_labels,
)
from .gridtree import CheckReport
from .treedecomp import TreeDecomposition, validate_decomposition


@dataclass(frozen=True)
class PreprocessedInstance:
    graph: WeightedGraph  # the copied graph G'
    copy_of: tuple[int, ...]  # copy vertex -> original vertex
    bag_of: tuple[int, ...]  # copy vertex -> bag id
    copies: tuple[tuple[int, ...], ...]  # original vertex -> its copies
    td: TreeDecomposition

    def any_copy(self, v: int) -> int:
        return self.copies[v][0]


@dataclass(frozen=True)
class TwCluster:
    cluster_id: int
    center: int  # copy vertex
    round_no: int
    root_bag: int
    vertices: frozenset[int]  # copy vertices


@dataclass(frozen=True)
class TwPartition:
    eps: float
    delta: float
    k: int
    cluster_of: tuple[int, ...]  # per copy vertex
    clusters: tuple[TwCluster, ...]
    original_cluster_of: tuple[int, ...]  # per original vertex, after collapsing


def preprocess(g: WeightedGraph, td: TreeDecomposition, oracle=None) -> PreprocessedInstance:
    """Per-bag vertex copies, 0-weight copy edges along the decomposition
    tree, and distance-weighted bag cliques; the metric between copies equals
    the original metric."""
    problems = validate_decomposition(g, td)
    if problems:
        raise GraphError(f"invalid tree decomposition: {problems[0]}")
    if oracle is None:
        oracle = exact_oracle(g)
    copy_id: dict[tuple[int, int], int] = {}
    copy_of: list[int] = []
    bag_of: list[int] = []
    for b, bag in enumerate(td.bags):
        for v in bag:
            copy_id[(b, v)] = len(copy_of)
            copy_of.append(v)
            bag_of.append(b)
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()

    def add(a: int, b: int, w: float) -> None:
        key = (min(a, b), max(a, b))
        if key not in seen:
            seen.add(key)
            edges.append((key[0], key[1], w))

    for b, bag in enumerate(td.bags):
        for i, u in enumerate(bag):
            for v in bag[i + 1 :]:
                add(copy_id[(b, u)], copy_id[(b, v)], oracle.dist(u, v))
    for a, b in td.tree:
        for v in set(td.bags[a]) & set(td.bags[b]):
            add(copy_id[(a, v)], copy_id[(b, v)], 0.0)
    gp = build_graph(len(copy_of), edges)
    copies: list[list[int]] = [[] for _ in range(g.n)]
    for c, v in enumerate(copy_of):
        copies[v].append(c)
    return PreprocessedInstance(
        graph=gp,
        copy_of=tuple(copy_of),
        bag_of=tuple(bag_of),
        copies=tuple(tuple(cs) for cs in copies),
        td=td,
    )


@dataclass
class _ClusterState:
    pre: PreprocessedInstance
    radius: float
    clustered: set[int] = field(default_factory=set)
    balls: list[tuple[int, int, int, frozenset[int]]] = field(default_factory=list)
    # (center copy, round, root bag, members)

    def bag_members(self, b: int) -> list[int]:
        return [c for c, bb in enumerate(self.pre.bag_of) if bb == b]


def _root_toward(td: TreeDecomposition, root: int) -> dict[int, list[int]]:
    """Children lists when the bag tree is rooted at `root`."""
    adj = td.bag_neighbors()
    children: dict[int, list[int]] = {b: [] for b in range(len(td.bags))}
    seen = {root}
    queue = [root]
    while queue:
        x = queue.pop(0)
        for y in sorted(adj[x]):
            if y not in seen:
                seen.add(y)
                children[x].append(y)
                queue.append(y)
    return children


def clustering_round(
    state: _ClusterState,
    bags: frozenset[int],
    root_bag: int,
    children: dict[int, list[int]],
    round_no: int,
) -> None:
    """One recursive call: grow balls from unclustered copies of the root bag
    (membership limited to the subtree's bags), remove every bag the balls
    touch, recurse on the remaining subtrees."""
    pre = state.pre
    gp = pre.graph
    subtree_copies = frozenset(
        c for c in range(gp.n) if pre.bag_of[c] in bags
    )
    root_unclustered = sorted(
        c for c in range(gp.n)
        if pre.bag_of[c] == root_bag and c not in state.clustered
    )
    touched_bags: set[int] = set()
    if root_unclustered:
        for u in root_unclustered:
            if u in state.clustered:
                continue  # an earlier ball of this call may have claimed it
            spt = dijkstra(gp, u)
            ball = frozenset(
                c for c in subtree_copies if spt.dist[c] <= state.radius
            )
            state.balls.append((u, round_no, root_bag, ball))
            state.clustered |= ball
            for c in ball:
                touched_bags.add(pre.bag_of[c])
    else:
        touched_bags = {root_bag}
    remaining = bags - touched_bags
    # recurse per connected subtree of what's left
    for sub_root_parent in sorted(touched_bags):
        for child in children.get(sub_root_parent, []):
            if child in remaining:
                piece = _collect_subtree(child, children, remaining)
                clustering_round(state, piece, child, children, round_no)


def _collect_subtree(root: int, children: dict[int, list[int]], allowed: frozenset[int]) -> frozenset[int]:
    out = {root}
    queue = [root]
    while queue:
        x = queue.pop(0)
        for y in children.get(x, []):
            if y in allowed and y not in out:
                out.add(y)
                queue.append(y)
    return frozenset(out)


def build_tw_partition(
    g: WeightedGraph,
    td: TreeDecomposition,
    eps: float,
    delta: float | None = None,
    oracle=None,
    pre: PreprocessedInstance | None = None,
) -> tuple[TwPartition, PreprocessedInstance]:
    """k+1 rounds of ball clustering over the copied graph, then one
    multi-source pass to make the preliminary balls disjoint."""
    if oracle is None:
        oracle = exact_oracle(g)
    if delta is None:
        delta = oracle.diameter
    if pre is None:
        pre = preprocess(g, td, oracle)
    k = td.width
    root_bag = 0
    children = _root_toward(td, root_bag)
    state = _ClusterState(pre=pre, radius=eps * delta)
    all_bags = frozenset(range(len(td.bags)))
    progress = []
    for round_no in range(k + 1, 0, -1):
        before = len(state.clustered)
        clustering_round(state, all_bags, root_bag, children, round_no)
        progress.append(len(state.clustered) - before)
    gp = pre.graph
    if len(state.clustered) != gp.n:
        missing = sorted(set(range(gp.n)) - state.clustered)
        raise GraphError(f"{len(missing)} copies left unclustered after k+1 rounds")

    partition = finalize_clusters(gp, state.balls, eps, delta, k, pre)
    return partition, pre


def finalize_clusters(
    gp: WeightedGraph,
    balls: list[tuple[int, int, int, frozenset[int]]],
    eps: float,
    delta: float,
    k: int,
    pre: PreprocessedInstance,
) -> TwPartition:
    """Disjoint clusters from possibly-overlapping balls: every copy joins the
    center reaching it first (ties to the smaller center id)."""
    sources = [(center, (center,)) for center, _, _, _ in balls]
    dist, label, _ = multi_source_labels(gp, sources)
    members: dict[int, set[int]] = {center: set() for center, _, _, _ in balls}
    for c in range(gp.n):
        members[label[c][0]].add(c)
    clusters = []
    cluster_of = [-1] * gp.n
    cid = 0
    for center, round_no, root_bag, _ in balls:
        if not members[center]:
            continue
        clusters.append(
            TwCluster(cid, center, round_no, root_bag, frozenset(members[center]))
        )
        for c in members[center]:
            cluster_of[c] = cid
        cid += 1
    original = [-1] * len(pre.copies)
    for v, copies in enumerate(pre.copies):
        best = min(copies, key=lambda c: (dist[c], c))
        original[v] = cluster_of[best]
    return TwPartition(
        eps=eps,
        delta=delta,
        k=k,
        cluster_of=tuple(cluster_of),
        clusters=tuple(clusters),
        original_cluster_of=tuple(original),
    )


def hop_bound(k: int, eps: float) -> float:
    """Explicit cluster-count recurrence: J_1 = k+1 and
    J_i = ((k+1)(1/eps+3)+1) * J_{i-1} + (k+1)(1/eps+3), evaluated at k+1."""
    step = (k + 1) * (1.0 / eps + 3.0)
    j = float(k + 1)
    for _ in range(k):
        j = (step + 1.0) * j + step
    return j


def verify_tw_partition(
    g: WeightedGraph,
    td: TreeDecomposition,
    p: TwPartition,
    pre: PreprocessedInstance,
    oracle=None,
    max_exact_n: int = 1500,
    sample_pairs: int = 10000,
    seed: int = 0,
    tol: float | None = None,
) -> CheckReport:
    """Partition totality, connectivity, strong diameter <= 2*eps*delta, the
    round-center spacing property, and the J-recurrence hop bound along
    canonical shortest paths."""
    import random

    rep = CheckReport()
    gp = pre.graph
    if tol is None:
        tol = 1e-9 * p.delta

    seen = [0] * gp.n
    for c in p.clusters:
        for v in c.vertices:
            seen[v] += 1
            if p.cluster_of[v] != c.cluster_id:
                rep.note(f"copy {v}: cluster_of mismatch")
    if any(s != 1 for s in seen):
        rep.note("copies are not partitioned")

    bound = 2 * p.eps * p.delta
    for c in p.clusters:
        spt = dijkstra(gp, c.center, scope=c.vertices)
        if any(not spt.reached(v) for v in c.vertices):
            rep.note(f"cluster {c.cluster_id} disconnected in the copied graph")
            continue
        if max(spt.dist[v] for v in c.vertices) > p.eps * p.delta + tol:
            rep.note(f"cluster {c.cluster_id} radius exceeds eps*delta")
        worst = 0.0
        for v in sorted(c.vertices):
            ecc = max(dijkstra(gp, v, scope=c.vertices).dist[x] for x in c.vertices)
            worst = max(worst, ecc)
        if worst > bound + tol:
            rep.note(f"cluster {c.cluster_id} strong diameter {worst} > {bound}")

    # round-center spacing for ancestor/descendant root bags of the same round
    parent_bag = _bag_parents(td)
    spts: dict[int, object] = {}
    by_round: dict[int, list] = {}
    for c in p.clusters:
        by_round.setdefault(c.round_no, []).append(c)
    for rnd, cs in sorted(by_round.items()):
        for i, ci in enumerate(cs):
            for cj in cs[i + 1 :]:
                if ci.root_bag == cj.root_bag:
                    continue
                if _is_ancestor(parent_bag, ci.root_bag, cj.root_bag) or _is_ancestor(
                    parent_bag, cj.root_bag, ci.root_bag
                ):
                    if ci.center not in spts:
                        spts[ci.center] = dijkstra(gp, ci.center)
                    d = spts[ci.center].dist[cj.center]
                    if d <= p.eps * p.delta - tol:
                        rep.note(
                            f"round-{rnd} centers {ci.center},{cj.center} in related "
                            f"root bags at distance {d}"
                        )

    # hop bound over canonical shortest paths between original vertices
    if oracle is None:
        oracle = exact_oracle(g)
    allowed = hop_bound(p.k, p.eps)
    n = g.n
    if n <= max_exact_n:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    else:
        rng = random.Random(seed)
        pairs = []
        while len(pairs) < sample_pairs:
            u, v = rng.randrange(n), rng.randrange(n)
            if u != v:
                pairs.append((u, v))
    cadj: list[set[int]] = [set() for _ in p.clusters]
    for a, b, _ in gp.edges:
        ca, cb = p.cluster_of[a], p.cluster_of[b]
        if ca != cb:
            cadj[ca].add(cb)
            cadj[cb].add(ca)
    cspts: dict[int, object] = {}
    for u, v in pairs:
        cu = pre.any_copy(u)
        if cu not in cspts:
            cspts[cu] = dijkstra(gp, cu)
        spt = cspts[cu]
        cv = min(pre.copies[v], key=lambda c: (spt.dist[c], c))
        if abs(spt.dist[cv] - oracle.dist(u, v)) > tol:
            rep.note(
                f"pair ({u},{v}): copied-graph distance {spt.dist[cv]} differs from "
                f"{oracle.dist(u, v)}"
            )
            continue
        path = spt.path_to(cv)
        touched = {p.cluster_of[x] for x in path}
        start, goal = p.cluster_of[path[0]], p.cluster_of[path[-1]]
        hops = {start: 0}
        frontier = [start]
        while frontier and goal not in hops:
            nxt = []
            for c in frontier:
                for d2 in sorted(cadj[c]):
                    if d2 in touched and d2 not in hops:
                        hops[d2] = hops[c] + 1
                        nxt.append(d2)
            frontier = nxt
        got = hops.get(goal)
        if got is None:
            rep.note(f"pair ({u},{v}): touched clusters are disconnected")
        elif got > allowed:
            rep.note(f"pair ({u},{v}): {got} cluster hops exceed J bound {allowed}")
    return rep


def _bag_parents(td: TreeDecomposition) -> dict[int, int | None]:
    children = _root_toward(td, 0)
    parent: dict[int, int | None] = {0: None}
    for b, kids in children.items():
        for c in kids:
            parent[c] = b
    return parent


def _is_ancestor(parent: dict[int, int | None], a: int, b: int) -> bool:
    cur: int | None = b
    while cur is not None:
        if cur == a:
            return True
        cur = parent[cur]
    return False


def tw_partition_to_dict(p: TwPartition) -> dict:
    return {
        "eps": p.eps,
        "delta": p.delta,
        "k": p.k,
        "cluster_of": list(p.cluster_of),
        "original_cluster_of": list(p.original_cluster_of),
        "clusters": [
            {
                "cluster_id": c.cluster_id,
                "center": c.center,
                "round": c.round_no,
                "root_bag": c.root_bag,
                "vertices": sorted(c.vertices),
            }
            for c in p.clusters
        ],
    }
