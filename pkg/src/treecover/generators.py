"""Seeded instance generators: grids, cylinder grids, random triangulations,
and series-parallel graphs with width-2 tree decompositions."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .graph import (
    GraphError,
    PlanarEmbedding,
    WeightedGraph,
    build_graph,
    dart_from,
    dart_head,
    trace_faces,
)
from .treedecomp import TreeDecomposition


@dataclass(frozen=True)
class Instance:
    graph: WeightedGraph
    embedding: PlanarEmbedding | None
    decomposition: TreeDecomposition | None


def _weights(rng: random.Random, count: int, weight_range: tuple[float, float]) -> list[float]:
    lo, hi = weight_range
    if lo < 0 or hi < lo:
        raise GraphError(f"bad weight range {weight_range}")
    if lo == hi:
        return [lo] * count
    return [rng.uniform(lo, hi) for _ in range(count)]


def gen_grid(
    rows: int, cols: int, seed: int = 0, weight_range: tuple[float, float] = (1.0, 1.0)
) -> Instance:
    """rows x cols grid with the canonical embedding; outer face on the boundary."""
    if rows < 2 or cols < 2:
        raise GraphError("grid needs rows, cols >= 2")
    rng = random.Random(seed)
    vid = lambda r, c: r * cols + c
    edges: list[tuple[int, int, float]] = []
    edge_id: dict[tuple[int, int], int] = {}

    def add(a: int, b: int) -> None:
        edge_id[(a, b)] = edge_id[(b, a)] = len(edges)
        edges.append((a, b, 1.0))

    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                add(vid(r, c), vid(r, c + 1))
            if r + 1 < rows:
                add(vid(r, c), vid(r + 1, c))
    ws = _weights(rng, len(edges), weight_range)
    edges = [(u, v, w) for (u, v, _), w in zip(edges, ws)]
    g = build_graph(rows * cols, edges)

    rotation = []
    for r in range(rows):
        for c in range(cols):
            v = vid(r, c)
            rot = []
            # clockwise: up, right, down, left
            if r > 0:
                rot.append(edge_id[(v, vid(r - 1, c))])
            if c + 1 < cols:
                rot.append(edge_id[(v, vid(r, c + 1))])
            if r + 1 < rows:
                rot.append(edge_id[(v, vid(r + 1, c))])
            if c > 0:
                rot.append(edge_id[(v, vid(r, c - 1))])
            rotation.append(tuple(rot))
    rotation = tuple(rotation)
    outer = _face_containing(g, rotation, dart_from(g, 0, edge_id[(0, 1)]))
    return Instance(g, PlanarEmbedding(rotation, outer), None)


def gen_cylinder_grid(
    circumference: int,
    height: int,
    seed: int = 0,
    weight_range: tuple[float, float] = (1.0, 1.0),
) -> Instance:
    """Stack of `height` rings of length `circumference`; ring 0 is the outer face."""
    if circumference < 3 or height < 2:
        raise GraphError("cylinder grid needs circumference >= 3 and height >= 2")
    rng = random.Random(seed)
    vid = lambda r, a: r * circumference + a
    edges: list[tuple[int, int, float]] = []
    edge_id: dict[tuple[int, int], int] = {}

    def add(a: int, b: int) -> None:
        edge_id[(a, b)] = edge_id[(b, a)] = len(edges)
        edges.append((a, b, 1.0))

    for r in range(height):
        for a in range(circumference):
            add(vid(r, a), vid(r, (a + 1) % circumference))
    for r in range(height - 1):
        for a in range(circumference):
            add(vid(r, a), vid(r + 1, a))
    ws = _weights(rng, len(edges), weight_range)
    edges = [(u, v, w) for (u, v, _), w in zip(edges, ws)]
    g = build_graph(circumference * height, edges)

    rotation = []
    for r in range(height):
        for a in range(circumference):
            v = vid(r, a)
            rot = [edge_id[(v, vid(r, (a + 1) % circumference))]]
            if r + 1 < height:
                rot.append(edge_id[(v, vid(r + 1, a))])
            rot.append(edge_id[(v, vid(r, (a - 1) % circumference))])
            if r > 0:
                rot.append(edge_id[(v, vid(r - 1, a))])
            rotation.append(tuple(rot))
    rotation = tuple(rotation)
    # The outer face is whichever orientation of ring 0 closes as a pure cycle.
    ring0 = frozenset(range(circumference))
    outer = None
    for side in (0, 1):
        face = _face_containing(g, rotation, 2 * edge_id[(0, 1)] + side)
        if len(face) == circumference and {dart_head(g, d) for d in face} == ring0:
            outer = face
            break
    if outer is None:
        raise GraphError("cylinder embedding failed to expose ring 0")
    return Instance(g, PlanarEmbedding(rotation, outer), None)


def _face_containing(g: WeightedGraph, rotation, d0: int) -> tuple[int, ...]:
    from .graph import next_face_dart

    face = [d0]
    d = next_face_dart(g, rotation, d0)
    while d != d0:
        face.append(d)
        d = next_face_dart(g, rotation, d)
    return tuple(face)


def gen_random_triangulation(
    n: int,
    seed: int = 0,
    weight_range: tuple[float, float] = (1.0, 1.0),
    delete_frac: float = 0.0,
) -> Instance:
    """Random planar graph: grow a triangulation by inserting vertices into
    random inner faces, then optionally delete a fraction of non-bridge edges.
    The initial triangle 0-1-2 stays as the outer face."""
    if n < 3:
        raise GraphError("triangulation needs n >= 3")
    if not 0.0 <= delete_frac < 1.0:
        raise GraphError("delete_frac must be in [0, 1)")
    rng = random.Random(seed)

    edges: list[tuple[int, int]] = [(0, 1), (1, 2), (0, 2)]
    alive = [True, True, True]
    rot: list[list[int]] = [[0, 2], [0, 1], [2, 1]]

    def succ_insert(v: int, after_eid: int, new_eid: int) -> None:
        pos = rot[v].index(after_eid)
        rot[v].insert(pos + 1, new_eid)

    def face_cycle(d0: tuple[int, int]) -> list[tuple[int, int]]:
        # darts as (tail, eid); successor at head follows the rotation
        cyc = [d0]
        while True:
            tail, eid = cyc[-1]
            u, v = edges[eid]
            head = v if tail == u else u
            r = rot[head]
            eid2 = r[(r.index(eid) + 1) % len(r)]
            nxt = (head, eid2)
            if nxt == d0:
                return cyc
            cyc.append(nxt)

    def all_faces() -> list[list[tuple[int, int]]]:
        seen: set[tuple[int, int]] = set()
        faces = []
        for eid, (u, v) in enumerate(edges):
            if not alive[eid]:
                continue
            for tail in (u, v):
                d = (tail, eid)
                if d in seen:
                    continue
                cyc = face_cycle(d)
                seen.update(cyc)
                faces.append(cyc)
        return faces

    outer_anchor = (1, 0)  # dart 1 -> 0 on edge (0,1)

    for x in range(3, n):
        faces = [f for f in all_faces() if outer_anchor not in f]
        tri = faces[rng.randrange(len(faces))]
        if len(tri) != 3:
            raise GraphError("triangulation invariant broken: non-triangular inner face")
        # tri darts: (a, e_ab), (b, e_bc), (c, e_ca)
        (a, e_ab), (b, e_bc), (c, e_ca) = tri
        e_ax = len(edges); edges.append((a, x)); alive.append(True)
        e_bx = len(edges); edges.append((b, x)); alive.append(True)
        e_cx = len(edges); edges.append((c, x)); alive.append(True)
        succ_insert(a, e_ca, e_ax)
        succ_insert(b, e_ab, e_bx)
        succ_insert(c, e_bc, e_cx)
        rot.append([e_ax, e_cx, e_bx])

    if delete_frac > 0.0:
        protected = {0, 1, 2}
        candidates = [e for e in range(len(edges)) if e not in protected]
        rng.shuffle(candidates)
        target = int(delete_frac * len(candidates))
        removed = 0
        for eid in candidates:
            if removed >= target:
                break
            if _is_bridge(n, edges, alive, eid):
                continue
            alive[eid] = False
            u, v = edges[eid]
            rot[u].remove(eid)
            rot[v].remove(eid)
            removed += 1

    live_ids = [e for e in range(len(edges)) if alive[e]]
    remap = {old: new for new, old in enumerate(live_ids)}
    ws = _weights(rng, len(live_ids), weight_range)
    final_edges = [(edges[old][0], edges[old][1], w) for old, w in zip(live_ids, ws)]
    g = build_graph(n, final_edges)
    rotation = tuple(tuple(remap[e] for e in rot[v]) for v in range(n))
    outer = _face_containing(g, rotation, dart_from(g, 1, remap[0]))
    if len(outer) != 3:
        raise GraphError("outer triangle was not preserved")
    return Instance(g, PlanarEmbedding(rotation, outer), None)


def _is_bridge(n: int, edges, alive, eid: int) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for e, (u, v) in enumerate(edges):
        if alive[e] and e != eid:
            adj[u].append(v)
            adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) != n


def gen_series_parallel(
    n: int, seed: int = 0, weight_range: tuple[float, float] = (1.0, 1.0)
) -> Instance:
    """Random 2-tree (maximal series-parallel graph) with its width-2
    tree decomposition."""
    if n < 2:
        raise GraphError("series-parallel needs n >= 2")
    rng = random.Random(seed)
    edges: list[tuple[int, int]] = [(0, 1)]
    bags: list[tuple[int, ...]] = [(0, 1)]
    bag_of_edge = {0: 0}
    tree_edges: list[tuple[int, int]] = []
    for x in range(2, n):
        eid = rng.randrange(len(edges))
        u, v = edges[eid]
        bid = len(bags)
        bags.append(tuple(sorted((u, v, x))))
        tree_edges.append((bag_of_edge[eid], bid))
        e1 = len(edges); edges.append((u, x)); bag_of_edge[e1] = bid
        e2 = len(edges); edges.append((v, x)); bag_of_edge[e2] = bid
    ws = _weights(rng, len(edges), weight_range)
    g = build_graph(n, [(u, v, w) for (u, v), w in zip(edges, ws)])
    td = TreeDecomposition(tuple(bags), tuple(tree_edges), n)
    return Instance(g, None, td)


_KINDS = {
    "grid": gen_grid,
    "cylinder-grid": gen_cylinder_grid,
    "random-triangulation": gen_random_triangulation,
    "series-parallel": gen_series_parallel,
}


def generate(kind: str, params: dict, seed: int = 0) -> Instance:
    """Dispatch by kind; params are forwarded as keyword arguments."""
    if kind not in _KINDS:
        raise GraphError(f"unknown instance kind {kind!r}; choose from {sorted(_KINDS)}")
    return _KINDS[kind](seed=seed, **params)
