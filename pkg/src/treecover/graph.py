"""Weighted-graph core: representation, shortest paths, faces, exact oracle."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

INF = math.inf

# Absolute distance comparisons are made at this tolerance times the scale
# (usually the graph diameter).
REL_TOL = 1e-9


class GraphError(ValueError):
    pass


class NotPlanarEmbeddingError(GraphError):
    pass


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph on dense vertex ids 0..n-1.

    Immutable after construction; `adj[v]` lists (neighbor, edge_id, weight)
    sorted by neighbor id.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    adj: tuple[tuple[tuple[int, int, float], ...], ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight(self, eid: int) -> float:
        return self.edges[eid][2]

    def endpoints(self, eid: int) -> tuple[int, int]:
        u, v, _ = self.edges[eid]
        return u, v

    def other_endpoint(self, eid: int, v: int) -> int:
        a, b, _ = self.edges[eid]
        if v == a:
            return b
        if v == b:
            return a
        raise GraphError(f"vertex {v} not an endpoint of edge {eid}")

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _, _ in self.adj[v]]

    def has_edge(self, u: int, v: int) -> bool:
        return any(x == v for x, _, _ in self.adj[u])


def build_graph(n: int, edges: list[tuple[int, int, float]]) -> WeightedGraph:
    """Validate and freeze an edge list. Rejects loops, multi-edges,
    bad weights, and disconnected input."""
    if n <= 0:
        raise GraphError("graph must have at least one vertex")
    seen: set[tuple[int, int]] = set()
    norm: list[tuple[int, int, float]] = []
    for u, v, w in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u},{v}) out of range")
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        w = float(w)
        if not math.isfinite(w) or w < 0:
            raise GraphError(f"edge ({u},{v}) has invalid weight {w}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphError(f"parallel edge ({u},{v})")
        seen.add(key)
        norm.append((u, v, w))
    adj_lists: list[list[tuple[int, int, float]]] = [[] for _ in range(n)]
    for eid, (u, v, w) in enumerate(norm):
        adj_lists[u].append((v, eid, w))
        adj_lists[v].append((u, eid, w))
    adj = tuple(tuple(sorted(lst)) for lst in adj_lists)
    g = WeightedGraph(n, tuple(norm), adj)
    if n > 1:
        reach = _reachable(g, 0, None)
        if len(reach) != n:
            raise GraphError("graph is disconnected")
    return g


def _reachable(g: WeightedGraph, source: int, scope: frozenset[int] | None) -> set[int]:
    seen = {source}
    stack = [source]
    while stack:
        v = stack.pop()
        for u, _, _ in g.adj[v]:
            if u not in seen and (scope is None or u in scope):
                seen.add(u)
                stack.append(u)
    return seen


@dataclass(frozen=True)
class ShortestPathTree:
    source: int
    parent: tuple[int | None, ...]
    dist: tuple[float, ...]
    scope: frozenset[int] | None

    def reached(self, v: int) -> bool:
        return self.dist[v] < INF

    def path_to(self, v: int) -> list[int]:
        if not self.reached(v):
            raise GraphError(f"vertex {v} unreachable from {self.source}")
        path = [v]
        while path[-1] != self.source:
            p = self.parent[path[-1]]
            assert p is not None
            path.append(p)
        path.reverse()
        return path


def dijkstra(
    g: WeightedGraph,
    source: int,
    scope: frozenset[int] | set[int] | None = None,
    radius: float | None = None,
) -> ShortestPathTree:
    """Shortest-path tree from `source` on the subgraph induced by `scope`,
    truncated at `radius`. Ties resolved toward smaller vertex ids."""
    if scope is not None:
        scope = frozenset(scope)
        if source not in scope:
            raise GraphError(f"source {source} outside scope")
    if radius is not None and radius < 0:
        raise GraphError("radius must be nonnegative")
    dist = [INF] * g.n
    parent: list[int | None] = [None] * g.n
    dist[source] = 0.0
    heap: list[tuple[float, int]] = [(0.0, source)]
    done = [False] * g.n
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d > dist[v]:
            continue
        done[v] = True
        for u, _, w in g.adj[v]:
            if scope is not None and u not in scope:
                continue
            alt = d + w
            if radius is not None and alt > radius:
                continue
            if alt < dist[u]:
                dist[u] = alt
                parent[u] = v
                heapq.heappush(heap, (alt, u))
            elif alt == dist[u] and parent[u] is not None and v < parent[u]:
                parent[u] = v
    return ShortestPathTree(source, tuple(parent), tuple(dist), scope)


def multi_source_labels(
    g: WeightedGraph,
    sources: list[tuple[int, tuple]],
    scope: frozenset[int] | set[int] | None = None,
) -> tuple[dict[int, float], dict[int, tuple], dict[int, int | None]]:
    """Multi-source Dijkstra with lexicographic tie-breaking.

    `sources` holds (vertex, rank) pairs; every reached vertex gets the label
    of the source minimizing (distance, rank). Labels propagate along the
    Dijkstra forest, so label cells are connected in the induced subgraph.
    Returns (dist, label, predecessor).
    """
    if scope is not None:
        scope = frozenset(scope)
    dist: dict[int, float] = {}
    label: dict[int, tuple] = {}
    pred: dict[int, int | None] = {}
    heap: list[tuple[float, tuple, int]] = []
    for v, rank in sources:
        if scope is not None and v not in scope:
            raise GraphError(f"source {v} outside scope")
        if v not in dist or (0.0, rank) < (dist[v], label[v]):
            dist[v] = 0.0
            label[v] = rank
            pred[v] = None
            heapq.heappush(heap, (0.0, rank, v))
    while heap:
        d, rank, v = heapq.heappop(heap)
        if d > dist.get(v, INF) or (d == dist[v] and rank > label[v]):
            continue
        for u, _, w in g.adj[v]:
            if scope is not None and u not in scope:
                continue
            alt = d + w
            if alt < dist.get(u, INF) or (alt == dist.get(u, INF) and rank < label[u]):
                dist[u] = alt
                label[u] = rank
                pred[u] = v
                heapq.heappush(heap, (alt, rank, u))
    return dist, label, pred


def diameter(g: WeightedGraph, exact: bool = True) -> float:
    """Graph diameter; approximate mode double-sweeps and returns the largest
    eccentricity seen (within a factor 2 of the truth)."""
    if exact:
        best = 0.0
        for s in range(g.n):
            spt = dijkstra(g, s)
            best = max(best, max(spt.dist))
        return best
    spt0 = dijkstra(g, 0)
    far = min(v for v in range(g.n) if spt0.dist[v] == max(spt0.dist))
    spt1 = dijkstra(g, far)
    return max(max(spt0.dist), max(spt1.dist))


@dataclass(frozen=True)
class ExactOracle:
    dist_matrix: np.ndarray

    def dist(self, u: int, v: int) -> float:
        return float(self.dist_matrix[u, v])

    @property
    def diameter(self) -> float:
        return float(self.dist_matrix.max())


def exact_oracle(g: WeightedGraph, cap: int = 5000, threads: int = 1) -> ExactOracle:
    """All-pairs distances via one Dijkstra per vertex."""
    if g.n > cap:
        raise GraphError(f"graph too large for exact oracle ({g.n} > {cap})")
    mat = np.empty((g.n, g.n), dtype=np.float64)

    def row(s: int) -> np.ndarray:
        return np.array(dijkstra(g, s).dist, dtype=np.float64)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for s, r in enumerate(pool.map(row, range(g.n))):
                mat[s] = r
    else:
        for s in range(g.n):
            mat[s] = row(s)
    # summation order can differ per direction; symmetrize exactly
    np.minimum(mat, mat.T, out=mat)
    return ExactOracle(mat)


# ---------------------------------------------------------------------------
# Rotation systems and faces.  A dart is 2*edge_id + side where side 0 points
# u -> v for the edge as stored and side 1 points v -> u.


def dart(eid: int, side: int) -> int:
    return 2 * eid + side


def dart_edge(d: int) -> int:
    return d // 2


def dart_reverse(d: int) -> int:
    return d ^ 1


def dart_tail(g: WeightedGraph, d: int) -> int:
    u, v, _ = g.edges[d // 2]
    return u if d % 2 == 0 else v


def dart_head(g: WeightedGraph, d: int) -> int:
    u, v, _ = g.edges[d // 2]
    return v if d % 2 == 0 else u


def dart_from(g: WeightedGraph, tail: int, eid: int) -> int:
    u, v, _ = g.edges[eid]
    if tail == u:
        return 2 * eid
    if tail == v:
        return 2 * eid + 1
    raise GraphError(f"vertex {tail} not on edge {eid}")


@dataclass(frozen=True)
class PlanarEmbedding:
    """Rotation system (per-vertex cyclic edge order) plus a designated
    outer face given as a dart cycle."""

    rotation: tuple[tuple[int, ...], ...]
    outer_face: tuple[int, ...]


def next_face_dart(g: WeightedGraph, rotation, d: int) -> int:
    """Successor of dart d along its face: at head(d), leave along the edge
    following edge(d) in the rotation."""
    v = dart_head(g, d)
    rot = rotation[v]
    pos = rot.index(d // 2)
    eid = rot[(pos + 1) % len(rot)]
    return dart_from(g, v, eid)


def trace_faces(g: WeightedGraph, rotation) -> list[tuple[int, ...]]:
    """Face orbits of the rotation system; every dart lies in exactly one."""
    for v in range(g.n):
        incident = sorted(eid for _, eid, _ in g.adj[v])
        if sorted(rotation[v]) != incident:
            raise NotPlanarEmbeddingError(f"rotation at {v} does not match incident edges")
    seen = [False] * (2 * g.m)
    faces = []
    for d0 in range(2 * g.m):
        if seen[d0]:
            continue
        face = []
        d = d0
        while not seen[d]:
            seen[d] = True
            face.append(d)
            d = next_face_dart(g, rotation, d)
        if d != d0:
            raise NotPlanarEmbeddingError("face tracing did not close a cycle")
        faces.append(tuple(face))
    return faces


def check_embedding(g: WeightedGraph, emb: PlanarEmbedding) -> list[tuple[int, ...]]:
    """Euler check: the rotation must produce exactly E - V + 2 faces and the
    outer face must be one of them."""
    faces = trace_faces(g, emb.rotation)
    expect = g.m - g.n + 2
    if len(faces) != expect:
        raise NotPlanarEmbeddingError(
            f"face count {len(faces)} != E - V + 2 = {expect}; not a planar embedding"
        )
    outer = _canonical_cycle(emb.outer_face)
    if outer not in {_canonical_cycle(f) for f in faces}:
        raise NotPlanarEmbeddingError("outer face is not a traced face")
    return faces


def _canonical_cycle(cycle: tuple[int, ...]) -> tuple[int, ...]:
    if not cycle:
        return cycle
    k = cycle.index(min(cycle))
    return cycle[k:] + cycle[:k]


def face_vertices(g: WeightedGraph, face: tuple[int, ...]) -> list[int]:
    return [dart_tail(g, d) for d in face]


# ---------------------------------------------------------------------------
# Text format:
#   p <n> <m>
#   e <u> <v> <w>            (m lines, edge ids in order)
#   r <v> <e1> <e2> ...      (optional rotation lines)
#   outer <d1> <d2> ...      (optional outer face darts)


def write_graph_text(g: WeightedGraph, emb: PlanarEmbedding | None = None) -> str:
    lines = [f"p {g.n} {g.m}"]
    for u, v, w in g.edges:
        lines.append(f"e {u} {v} {w!r}")
    if emb is not None:
        for v in range(g.n):
            rot = " ".join(str(e) for e in emb.rotation[v])
            lines.append(f"r {v} {rot}".rstrip())
        lines.append("outer " + " ".join(str(d) for d in emb.outer_face))
    return "\n".join(lines) + "\n"


def read_graph_text(text: str) -> tuple[WeightedGraph, PlanarEmbedding | None]:
    n = m = -1
    edges: list[tuple[int, int, float]] = []
    rotation: dict[int, tuple[int, ...]] = {}
    outer: tuple[int, ...] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            n, m = int(parts[1]), int(parts[2])
        elif parts[0] == "e":
            edges.append((int(parts[1]), int(parts[2]), float(parts[3])))
        elif parts[0] == "r":
            rotation[int(parts[1])] = tuple(int(x) for x in parts[2:])
        elif parts[0] == "outer":
            outer = tuple(int(x) for x in parts[1:])
        else:
            raise GraphError(f"unrecognized line: {line}")
    if n < 0:
        raise GraphError("missing problem line")
    if len(edges) != m:
        raise GraphError(f"expected {m} edges, found {len(edges)}")
    g = build_graph(n, edges)
    emb = None
    if rotation:
        if set(rotation) != set(range(n)) or outer is None:
            raise GraphError("incomplete embedding data")
        emb = PlanarEmbedding(tuple(rotation[v] for v in range(n)), outer)
        check_embedding(g, emb)
    return g, emb
