"""Bounded-diameter spanning forest covers with small additive distortion.

Per column of the hierarchy, each cluster center grows a radius-5*delta
shortest-path tree inside the column's recursion subgraph.  Centers are
spread across forests by (spine ordinal mod M, column level mod K) so that
trees sharing a forest are vertex- and cluster-disjoint; layers of the
hierarchy contribute separate forests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, WeightedGraph, dijkstra
from .gridtree import CheckReport, GridtreeHierarchy
from .lca import LcaIndex, RootedTree, tree_from_parent_map
from .partition import GAMMA, Cluster, Partition

BALL_FACTOR = GAMMA + 1  # tree radius in units of delta


def index_group_count(eps: float) -> int:
    # centers M apart along a spine are >= M*eps*delta apart, which must clear
    # twice the ball radius plus one cluster diameter
    return math.ceil((3 * GAMMA + 2) / eps)


def level_group_count(eps: float, t: float) -> int:
    # levels K apart give distance >= (K-1) * t*eps*delta between a column
    # and the subgraph hanging below the other (column width telescopes)
    separation = (2 * (BALL_FACTOR) + GAMMA * eps)
    return math.ceil(separation / (t * eps)) + 1


@dataclass(frozen=True)
class ForestCover:
    eps: float
    delta: float
    additive_bound: float
    forests: tuple[tuple[RootedTree, ...], ...]
    keys: tuple[tuple[int, int, int], ...]  # (layer, level group, index group)
    slot_count: int  # number of (layer, level, index) slots before dropping empties

    @property
    def size(self) -> int:
        return len(self.forests)


def _center_tree(
    g: WeightedGraph, center: int, scope: frozenset[int], radius: float
) -> RootedTree:
    spt = dijkstra(g, center, scope=scope, radius=radius)
    parent: dict[int, tuple[int, float]] = {}
    for v in range(g.n):
        p = spt.parent[v]
        if spt.reached(v) and p is not None:
            w = next(w for x, _, w in g.adj[v] if x == p)
            parent[v] = (p, w)
    return tree_from_parent_map(center, parent, "spanning")


def cover_gridtree(
    g: WeightedGraph,
    h: GridtreeHierarchy,
    hid: int,
    p: Partition,
    groups: tuple[int, int] | None = None,
) -> dict[tuple[int, int], list[RootedTree]]:
    """Forests for one hierarchy node, keyed (level group, index group)."""
    node = h.nodes[hid]
    M = groups[1] if groups else index_group_count(p.eps)
    K = groups[0] if groups else level_group_count(p.eps, p.t)
    radius = BALL_FACTOR * p.delta
    out: dict[tuple[int, int], list[RootedTree]] = {}
    by_column: dict[int, list[Cluster]] = {}
    for c in p.clusters:
        if c.node == hid:
            by_column.setdefault(c.column, []).append(c)
    for cid in sorted(by_column):
        scope = node.gridtree.subgraph_of(cid)
        level = node.gridtree.columns[cid].level
        for c in sorted(by_column[cid], key=lambda c: c.ordinal):
            tree = _center_tree(g, c.center, scope, radius)
            out.setdefault((level % K, c.ordinal % M), []).append(tree)
    return out


def cover_hierarchy(
    g: WeightedGraph, h: GridtreeHierarchy, p: Partition
) -> ForestCover:
    """Union per-node forests across each layer of the hierarchy; trees within
    one forest must be vertex-disjoint (checked here, not assumed)."""
    M = index_group_count(p.eps)
    K = level_group_count(p.eps, p.t)
    merged: dict[tuple[int, int, int], list[RootedTree]] = {}
    for node in h.nodes:
        per_node = cover_gridtree(g, h, node.hid, p, groups=(K, M))
        for (lg, ig), trees in sorted(per_node.items()):
            merged.setdefault((node.layer, lg, ig), []).extend(trees)
    forests: list[tuple[RootedTree, ...]] = []
    keys: list[tuple[int, int, int]] = []
    for key in sorted(merged):
        trees = merged[key]
        claimed: set[int] = set()
        for t in trees:
            vs = t.vertex_set()
            if claimed & vs:
                raise GraphError(
                    f"forest {key}: trees overlap at vertices {sorted(claimed & vs)[:4]}"
                )
            claimed |= vs
        forests.append(tuple(trees))
        keys.append(key)
    depth = h.depth
    return ForestCover(
        eps=p.eps,
        delta=p.delta,
        additive_bound=2 * GAMMA * p.eps * p.delta,
        forests=tuple(forests),
        keys=tuple(keys),
        slot_count=depth * M * K,
    )


def forests_to_trees(
    fc: ForestCover,
    steiner_base: int,
    span: frozenset[int] | None = None,
) -> list[RootedTree]:
    """One dominating tree per forest: link tree roots (and, when a span set
    is given, any missing span vertices) to a fresh hub with weight-delta
    edges.  Forests holding a single tree that already spans keep no hub."""
    out: list[RootedTree] = []
    hub = steiner_base
    for forest in fc.forests:
        covered = frozenset().union(*(t.vertex_set() for t in forest)) if forest else frozenset()
        missing = sorted(span - covered) if span is not None else []
        if len(forest) == 1 and not missing:
            out.append(forest[0])
            continue
        parent: dict[int, tuple[int, float]] = {}
        for t in forest:
            for v, pa, w in zip(t.nodes, t.parent, t.weight):
                if pa == -1:
                    parent[v] = (hub, fc.delta)
                else:
                    parent[v] = (pa, w)
        for v in missing:
            parent[v] = (hub, fc.delta)
        out.append(tree_from_parent_map(hub, parent, "steiner"))
        hub += 1
    return out


# ---------------------------------------------------------------------------
# verification


@dataclass
class CoverReport(CheckReport):
    worst_slack: float = float("nan")
    argmin_histogram: dict[int, int] = field(default_factory=dict)


def verify_cover(
    g: WeightedGraph,
    fc: ForestCover,
    oracle,
    bound: float | None = None,
    tol: float | None = None,
) -> CoverReport:
    """Distance sandwich for every pair: some forest's within-tree distance
    lies in [dist - tol, dist + bound], realized through that tree's root.
    Also checks spanning-ness, per-tree diameter, domination, and the
    within-forest disjointness."""
    rep = CoverReport()
    if bound is None:
        bound = fc.additive_bound
    if tol is None:
        tol = 1e-9 * fc.delta
    n = g.n
    dmat = oracle.dist_matrix
    best = np.full((n, n), np.inf)
    argmin = np.full((n, n), -1, dtype=np.int64)
    rootsum = np.full((n, n), np.inf)
    edge_w = {}
    for u, v, w in g.edges:
        edge_w[(u, v)] = edge_w[(v, u)] = w
    for fi, forest in enumerate(fc.forests):
        claimed: set[int] = set()
        fmat = np.full((n, n), np.inf)
        froot = np.full((n, n), np.inf)
        for tree in forest:
            vs = tree.vertex_set()
            if claimed & vs:
                rep.note(f"forest {fi}: overlapping trees")
            claimed |= vs
            if tree.kind == "spanning":
                for pa, v, w in tree.edges():
                    if edge_w.get((pa, v)) != w:
                        rep.note(f"forest {fi}: tree edge ({pa},{v}) is not a graph edge")
                        break
            idx = LcaIndex(tree)
            orig = [v for v in tree.nodes if 0 <= v < n]
            if not orig:
                continue
            sub = idx.pairwise(orig)
            rows = np.array(orig)
            if sub.max() > 2 * BALL_FACTOR * fc.delta + tol:
                rep.note(f"forest {fi}: tree diameter {sub.max():.6g} exceeds {2 * BALL_FACTOR * fc.delta:.6g}")
            if (sub - dmat[np.ix_(rows, rows)]).min() < -tol:
                rep.note(f"forest {fi}: tree is not dominating")
            fmat[np.ix_(rows, rows)] = np.minimum(fmat[np.ix_(rows, rows)], sub)
            rd = np.array([idx.root_distance(v) for v in orig])
            froot[np.ix_(rows, rows)] = np.minimum(
                froot[np.ix_(rows, rows)], rd[:, None] + rd[None, :]
            )
        better = fmat < best
        best = np.where(better, fmat, best)
        argmin = np.where(better, fi, argmin)
        rootsum = np.minimum(rootsum, froot)
    off = ~np.eye(n, dtype=bool)
    uncovered = np.argwhere((best == np.inf) & off)
    if len(uncovered):
        rep.note(f"pair {tuple(uncovered[0])} covered by no tree")
        return rep
    lo_bad = np.argwhere((best < dmat - tol) & off)
    if len(lo_bad):
        u, v = map(int, lo_bad[0])
        rep.note(f"pair ({u},{v}): best cover distance {best[u, v]} undercuts {dmat[u, v]}")
    hi_bad = np.argwhere((rootsum > dmat + bound + tol) & off)
    if len(hi_bad):
        u, v = map(int, hi_bad[0])
        rep.note(
            f"pair ({u},{v}): root-path distance {rootsum[u, v]:.6g} exceeds "
            f"{dmat[u, v]:.6g} + {bound:.6g}"
        )
    slack = np.where(off, best - dmat, 0.0)
    rep.worst_slack = float(slack.max())
    counts = {}
    for fi in np.unique(argmin[off]):
        counts[int(fi)] = int((argmin[off] == fi).sum())
    rep.argmin_histogram = counts
    return rep


def verify_tree_cover(
    g: WeightedGraph,
    trees: list[RootedTree],
    oracle,
    additive_bound: float | None = None,
    multiplicative: float | None = None,
    tol: float = 0.0,
) -> CoverReport:
    """Sandwich check for a plain list of dominating trees (hub-joined covers
    and multiplicative covers): min tree distance within the additive or
    multiplicative envelope for every pair."""
    rep = CoverReport()
    n = g.n
    dmat = oracle.dist_matrix
    best = np.full((n, n), np.inf)
    argmin = np.full((n, n), -1, dtype=np.int64)
    for ti, tree in enumerate(trees):
        idx = LcaIndex(tree)
        orig = [v for v in tree.nodes if 0 <= v < n]
        if not orig:
            continue
        rows = np.array(orig)
        sub = idx.pairwise(orig)
        if (sub - dmat[np.ix_(rows, rows)]).min() < -tol:
            rep.note(f"tree {ti} is not dominating")
        view = best[np.ix_(rows, rows)]
        better = sub < view
        best[np.ix_(rows, rows)] = np.where(better, sub, view)
        amv = argmin[np.ix_(rows, rows)]
        argmin[np.ix_(rows, rows)] = np.where(better, ti, amv)
    off = ~np.eye(n, dtype=bool)
    if np.any((best == np.inf) & off):
        u, v = map(int, np.argwhere((best == np.inf) & off)[0])
        rep.note(f"pair ({u},{v}) covered by no tree")
        return rep
    if additive_bound is not None:
        bad = np.argwhere((best > dmat + additive_bound + tol) & off)
        if len(bad):
            u, v = map(int, bad[0])
            rep.note(
                f"pair ({u},{v}): {best[u, v]:.6g} exceeds additive bound "
                f"{dmat[u, v]:.6g} + {additive_bound:.6g}"
            )
    if multiplicative is not None:
        bad = np.argwhere((best > multiplicative * dmat + tol) & off)
        if len(bad):
            u, v = map(int, bad[0])
            rep.note(
                f"pair ({u},{v}): {best[u, v]:.6g} exceeds {multiplicative:.6g} x "
                f"{dmat[u, v]:.6g}"
            )
    slack = np.where(off, best - dmat, 0.0)
    rep.worst_slack = float(slack.max())
    counts = {}
    for ti in np.unique(argmin[off]):
        counts[int(ti)] = int((argmin[off] == ti).sum())
    rep.argmin_histogram = counts
    return rep


# ---------------------------------------------------------------------------
# serialization


def tree_to_dict(t: RootedTree) -> dict:
    return {
        "root": t.root,
        "nodes": list(t.nodes),
        "parent": list(t.parent),
        "weight": list(t.weight),
        "kind": t.kind,
    }


def tree_from_dict(d: dict) -> RootedTree:
    return RootedTree(
        d["root"], tuple(d["nodes"]), tuple(d["parent"]), tuple(d["weight"]), d["kind"]
    )


def cover_to_dict(fc: ForestCover) -> dict:
    return {
        "eps": fc.eps,
        "delta": fc.delta,
        "additive_bound": fc.additive_bound,
        "slot_count": fc.slot_count,
        "keys": [list(k) for k in fc.keys],
        "forests": [[tree_to_dict(t) for t in forest] for forest in fc.forests],
    }


def cover_from_dict(d: dict) -> ForestCover:
    return ForestCover(
        eps=d["eps"],
        delta=d["delta"],
        additive_bound=d["additive_bound"],
        forests=tuple(tuple(tree_from_dict(t) for t in forest) for forest in d["forests"]),
        keys=tuple(tuple(k) for k in d["keys"]),
        slot_count=d["slot_count"],
    )
