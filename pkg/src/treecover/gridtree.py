"""Gridtrees and gridtree hierarchies for planar graphs.

A gridtree partitions a connected plane subgraph into *columns* (width-w
neighborhoods of shortest paths) and *leftover sets*, arranged as a tree so
that edges only connect partition classes adjacent in the tree.  Recursing on
leftover components yields a gridtree hierarchy.

Topology bookkeeping: every recursion step keeps the outer face of the
current subgraph as an explicit dart walk, computed by re-tracing the
inherited rotation system.  Attachment points between a removed neighborhood
and a surviving component are read off this walk, which is what bounds them
by two per component.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .graph import (
    GraphError,
    WeightedGraph,
    dart_from,
    dart_head,
    dart_tail,
    dijkstra,
    multi_source_labels,
)


class GridtreeConstructionError(GraphError):
    """Raised when the recursion's structural assumptions fail; carries a
    diagnostic payload instead of emitting a malformed gridtree."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


# ---------------------------------------------------------------------------
# scoped rotation/walk helpers


def _scoped_rotation(g: WeightedGraph, rotation, v: int, scope: frozenset[int]) -> list[int]:
    return [e for e in rotation[v] if g.other_endpoint(e, v) in scope]


def _next_dart_scoped(g: WeightedGraph, rotation, d: int, scope: frozenset[int]) -> int:
    v = dart_head(g, d)
    rot = _scoped_rotation(g, rotation, v, scope)
    pos = rot.index(d // 2)
    return dart_from(g, v, rot[(pos + 1) % len(rot)])


def _trace_walk(g: WeightedGraph, rotation, d0: int, scope: frozenset[int]) -> tuple[int, ...]:
    walk = [d0]
    d = _next_dart_scoped(g, rotation, d0, scope)
    while d != d0:
        walk.append(d)
        d = _next_dart_scoped(g, rotation, d, scope)
    return tuple(walk)


def subscope_walk(
    g: WeightedGraph,
    rotation,
    parent_scope: frozenset[int],
    parent_walk: tuple[int, ...],
    child_scope: frozenset[int],
) -> tuple[int, ...]:
    """Outer-face walk of a connected child scope, inherited from its parent.

    Removed material merges into one face of the child that also contains the
    old outer region, so the child's outer face is anchored either at a
    surviving parent-walk dart or at the corner left behind by a removed edge.
    """
    if len(child_scope) == 1:
        return ()
    for d in parent_walk:
        if dart_tail(g, d) in child_scope and dart_head(g, d) in child_scope:
            return _trace_walk(g, rotation, d, child_scope)
    removed = parent_scope - child_scope
    for y in sorted(child_scope):
        rot = _scoped_rotation(g, rotation, y, parent_scope)
        rm_pos = next(
            (i for i, e in enumerate(rot) if g.other_endpoint(e, y) in removed), None
        )
        if rm_pos is None:
            continue
        k = len(rot)
        for step in range(1, k):
            e = rot[(rm_pos + step) % k]
            if g.other_endpoint(e, y) in child_scope:
                return _trace_walk(g, rotation, dart_from(g, y, e), child_scope)
    raise GridtreeConstructionError("no outer-walk anchor found for subscope")


def walk_vertices(g: WeightedGraph, walk: tuple[int, ...]) -> frozenset[int]:
    return frozenset(dart_tail(g, d) for d in walk)


def _components(g: WeightedGraph, scope: frozenset[int]) -> list[frozenset[int]]:
    """Connected components of the induced subgraph, ordered by minimum vertex."""
    left = set(scope)
    comps = []
    while left:
        start = min(left)
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u, _, _ in g.adj[v]:
                if u in left and u not in seen:
                    seen.add(u)
                    stack.append(u)
        left -= seen
        comps.append(frozenset(seen))
    return sorted(comps, key=min)


def _ball(
    g: WeightedGraph, sources: tuple[int, ...], scope: frozenset[int], radius: float
) -> frozenset[int]:
    dist, _, _ = multi_source_labels(g, [(v, (0,)) for v in sources], scope=scope)
    return frozenset(v for v, d in dist.items() if d <= radius)


# ---------------------------------------------------------------------------
# recursion tree (one gridtree's worth)


@dataclass
class PathNode:
    """One node of the path-selection recursion."""

    nid: int
    parent: int | None
    level: int
    scope: frozenset[int]
    walk: tuple[int, ...]
    spine: tuple[int, ...]
    core: frozenset[int] = field(default=frozenset())  # the neighborhood N
    leftover_components: tuple[frozenset[int], ...] = ()
    children: tuple[int, ...] = ()


def select_paths(
    g: WeightedGraph,
    rotation,
    host_scope: frozenset[int],
    host_walk: tuple[int, ...],
    w: float,
    pi0: tuple[int, ...] | None = None,
) -> list[PathNode]:
    """Recursive path selection over a plane subgraph.

    Each node carves the width-w neighborhood of its path out of its scope;
    components still holding a host-external vertex recurse on a path between
    their (at most two) attachment points on the current outer walk, the rest
    become leftover sets.
    """
    host_ext = walk_vertices(g, host_walk) if host_walk else host_scope
    if pi0 is None:
        pi0 = (min(host_ext),)
    if any(v not in host_scope for v in pi0):
        raise GraphError("initial path leaves the host scope")
    nodes: list[PathNode] = []
    work: list[tuple[int | None, int, frozenset[int], tuple[int, ...], tuple[int, ...]]] = [
        (None, 0, host_scope, host_walk, pi0)
    ]
    while work:
        parent, level, scope, walk, spine = work.pop(0)
        nid = len(nodes)
        core = _ball(g, spine, scope, w)
        walk_edge_to_core: dict[int, list[int]] = {}
        for d in walk:
            a, b = dart_tail(g, d), dart_head(g, d)
            if a in core and b not in core:
                walk_edge_to_core.setdefault(b, []).append(a)
            if b in core and a not in core:
                walk_edge_to_core.setdefault(a, []).append(b)
        leftovers: list[frozenset[int]] = []
        for comp in _components(g, scope - core):
            if not (comp & host_ext):
                leftovers.append(comp)
                continue
            attach = sorted(y for y in walk_edge_to_core if y in comp)
            if not 1 <= len(attach) <= 2:
                raise GridtreeConstructionError(
                    f"component attaches to the walk at {len(attach)} points, expected 1 or 2",
                    diagnostics={
                        "component": sorted(comp),
                        "attachments": attach,
                        "spine": spine,
                        "scope_size": len(scope),
                    },
                )
            if len(attach) == 1:
                child_spine: tuple[int, ...] = (attach[0],)
            else:
                spt = dijkstra(g, attach[0], scope=comp)
                child_spine = tuple(spt.path_to(attach[1]))
            child_walk = subscope_walk(g, rotation, scope, walk, comp)
            ext_in_comp = comp & host_ext
            if len(comp) > 1 and not ext_in_comp <= walk_vertices(g, child_walk):
                raise GridtreeConstructionError(
                    "host-external vertex fell off the inherited outer walk",
                    diagnostics={"component": sorted(comp)},
                )
            work.append((nid, level + 1, comp, child_walk, child_spine))
        nodes.append(
            PathNode(
                nid=nid,
                parent=parent,
                level=level,
                scope=scope,
                walk=walk,
                spine=spine,
                core=core,
                leftover_components=tuple(leftovers),
            )
        )
    # child ids are only known once the worklist drains; fill them in now
    by_parent: dict[int, list[int]] = {}
    for node in nodes:
        if node.parent is not None:
            by_parent.setdefault(node.parent, []).append(node.nid)
    return [
        PathNode(
            n.nid,
            n.parent,
            n.level,
            n.scope,
            n.walk,
            n.spine,
            n.core,
            n.leftover_components,
            tuple(by_parent.get(n.nid, ())),
        )
        for n in nodes
    ]


# ---------------------------------------------------------------------------
# gridtree: columns, leftover sets, and the width-2w reassignment pass


@dataclass(frozen=True)
class Column:
    cid: int
    parent: int | None
    level: int
    vertices: frozenset[int]
    spine: tuple[int, ...]
    core: frozenset[int]  # neighborhood before the reassignment pass


@dataclass(frozen=True)
class Gridtree:
    width: float
    host: frozenset[int]
    host_walk: tuple[int, ...]
    columns: tuple[Column, ...]
    # leftover set of the tree edge above each column; the root's entry is the
    # leftover attached to its virtual parent edge
    leftovers: tuple[tuple[frozenset[int], ...], ...]

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {c.cid: [] for c in self.columns}
        for c in self.columns:
            if c.parent is not None:
                out[c.parent].append(c.cid)
        return out

    def subtree(self, cid: int) -> list[int]:
        kids = self.children()
        order = [cid]
        i = 0
        while i < len(order):
            order.extend(kids[order[i]])
            i += 1
        return order

    def subgraph_of(self, cid: int) -> frozenset[int]:
        """Vertices of the column's recursion subgraph: the column, everything
        below it, and the leftover set on its parent edge."""
        out: set[int] = set()
        for c in self.subtree(cid):
            out |= self.columns[c].vertices
            for comp in self.leftovers[c]:
                out |= comp
        return frozenset(out)

    def column_of(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.columns:
            for v in c.vertices:
                out[v] = c.cid
        return out

    def leftover_edge_of(self) -> dict[int, int]:
        """Map leftover vertex -> cid whose parent edge holds it."""
        out: dict[int, int] = {}
        for c in self.columns:
            for comp in self.leftovers[c.cid]:
                for v in comp:
                    out[v] = c.cid
        return out


def build_gridtree(
    g: WeightedGraph,
    rotation,
    host_scope: frozenset[int],
    host_walk: tuple[int, ...],
    w: float,
    pi0: tuple[int, ...] | None = None,
    tol: float = 0.0,
) -> Gridtree:
    """Gridtree for a connected plane subgraph: path-selection recursion, then
    reassignment of leftover vertices within distance 2w of a spine to their
    nearest column (only along chains that certifiably keep the in-column
    spine distance at most 2w)."""
    nodes = select_paths(g, rotation, host_scope, host_walk, w, pi0)

    # nearest-column labels over the whole host; label cells are connected
    sources = []
    for node in nodes:
        for v in sorted(node.core):
            sources.append((v, (node.nid,)))
    dist_c, label_c, pred_c = multi_source_labels(g, sources, scope=host_scope)

    # distance to the spine inside each original column
    spine_dist: dict[int, float] = {}
    for node in nodes:
        d, _, _ = multi_source_labels(
            g, [(s, (i,)) for i, s in enumerate(node.spine)], scope=node.core
        )
        for v, dv in d.items():
            spine_dist[v] = dv

    in_column = {v: nid for nid, node in enumerate(nodes) for v in node.core}
    leftover_vertices = sorted(
        (v for v in host_scope if v not in in_column), key=lambda v: (dist_c[v], v)
    )
    moved: dict[int, int] = {}
    cert: dict[int, float] = dict(spine_dist)
    for v in leftover_vertices:
        u = pred_c[v]
        if u is None:
            continue
        target = label_c[v][0]
        if in_column.get(u) == target or moved.get(u) == target:
            s = cert[u] + (dist_c[v] - dist_c[u])
            if s <= 2 * w + tol:
                moved[v] = target
                cert[v] = s

    columns = []
    leftovers = []
    for node in nodes:
        extra = frozenset(v for v, nid in moved.items() if nid == node.nid)
        final = node.core | extra
        columns.append(
            Column(
                cid=node.nid,
                parent=node.parent,
                level=node.level,
                vertices=final,
                spine=node.spine,
                core=node.core,
            )
        )
        remaining: list[frozenset[int]] = []
        for comp in node.leftover_components:
            kept = frozenset(v for v in comp if v not in moved)
            if kept:
                remaining.extend(_components(g, kept))
        leftovers.append(tuple(sorted(remaining, key=min)))
    return Gridtree(
        width=w,
        host=host_scope,
        host_walk=host_walk,
        columns=tuple(columns),
        leftovers=tuple(leftovers),
    )


# ---------------------------------------------------------------------------
# hierarchy


@dataclass(frozen=True)
class HierarchyNode:
    hid: int
    parent: int | None
    layer: int
    host: frozenset[int]
    walk: tuple[int, ...]
    outer: frozenset[int]  # vertices adjacent to a column of the parent gridtree
    gridtree: Gridtree


@dataclass(frozen=True)
class GridtreeHierarchy:
    width: float
    delta: float
    nodes: tuple[HierarchyNode, ...]

    @property
    def depth(self) -> int:
        return max(n.layer for n in self.nodes) + 1

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {n.hid: [] for n in self.nodes}
        for n in self.nodes:
            if n.parent is not None:
                out[n.parent].append(n.hid)
        return out


def build_hierarchy(
    g: WeightedGraph,
    rotation,
    outer_face: tuple[int, ...],
    w: float,
    delta: float,
    tol: float | None = None,
) -> GridtreeHierarchy:
    """Gridtree hierarchy of a connected plane graph: the root covers the
    whole graph; children recurse on leftover components, with their outer
    vertices taken as the neighbors of the parent's columns."""
    if w <= 0:
        raise GraphError("width must be positive")
    if tol is None:
        tol = 1e-9 * delta
    all_vertices = frozenset(range(g.n))
    nodes: list[HierarchyNode] = []
    work: list[tuple[int | None, int, frozenset[int], tuple[int, ...], frozenset[int]]] = [
        (None, 0, all_vertices, outer_face, frozenset())
    ]
    while work:
        parent, layer, host, walk, outer = work.pop(0)
        gt = build_gridtree(g, rotation, host, walk, w, tol=tol)
        hid = len(nodes)
        nodes.append(HierarchyNode(hid, parent, layer, host, walk, outer, gt))
        column_vertices = frozenset(v for c in gt.columns for v in c.vertices)
        for cid in range(len(gt.columns)):
            for comp in gt.leftovers[cid]:
                child_walk = subscope_walk(g, rotation, host, walk, comp)
                child_outer = frozenset(
                    v
                    for v in comp
                    if any(u in column_vertices for u, _, _ in g.adj[v])
                )
                work.append((hid, layer + 1, comp, child_walk, child_outer))
    return GridtreeHierarchy(width=w, delta=delta, nodes=tuple(nodes))


# ---------------------------------------------------------------------------
# checking


@dataclass
class CheckReport:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def note(self, msg: str) -> None:
        self.failures.append(msg)


def check_gridtree(
    g: WeightedGraph, gt: Gridtree, tol: float = 0.0, report: CheckReport | None = None
) -> CheckReport:
    """Exhaustive verification of the partition, adjacency, shortcut, spine,
    and width properties of one gridtree."""
    rep = report if report is not None else CheckReport()
    w = gt.width

    # partition totality and disjointness
    seen: dict[int, str] = {}
    for c in gt.columns:
        for v in c.vertices:
            if v in seen:
                rep.note(f"vertex {v} in column {c.cid} and in {seen[v]}")
            seen[v] = f"column {c.cid}"
    for cid, comps in enumerate(gt.leftovers):
        for comp in comps:
            for v in comp:
                if v in seen:
                    rep.note(f"vertex {v} in leftover above {cid} and in {seen[v]}")
                seen[v] = f"leftover above {cid}"
    if set(seen) != set(gt.host):
        rep.note("columns and leftover sets do not partition the host")

    column_of = gt.column_of()
    leftover_edge = gt.leftover_edge_of()

    # column adjacency: every host edge within a class, between tree-adjacent
    # columns, or between a column and an incident leftover set
    parent = {c.cid: c.parent for c in gt.columns}
    for u, v, _ in g.edges:
        if u not in gt.host or v not in gt.host:
            continue
        cu, cv = column_of.get(u), column_of.get(v)
        if cu is not None and cv is not None:
            if cu != cv and parent[cu] != cv and parent[cv] != cu:
                rep.note(f"edge ({u},{v}) joins non-adjacent columns {cu},{cv}")
        elif cu is None and cv is None:
            eu, ev = leftover_edge[u], leftover_edge[v]
            if eu != ev:
                rep.note(f"edge ({u},{v}) joins distinct leftover sets {eu},{ev}")
        else:
            col = cu if cu is not None else cv
            lo = leftover_edge[v if cu is not None else u]
            if col != lo and parent[lo] != col:
                rep.note(f"edge ({u},{v}) joins column {col} and non-incident leftover {lo}")

    for c in gt.columns:
        spine_inside = set(c.spine) <= c.vertices
        if not spine_inside:
            rep.note(f"column {c.cid}: spine leaves the column")
        sub = gt.subgraph_of(c.cid)
        # spine is a shortest path of the recursion subgraph
        length = 0.0
        okpath = True
        for a, b in zip(c.spine, c.spine[1:]):
            eids = [eid for x, eid, _ in g.adj[a] if x == b]
            if not eids:
                rep.note(f"column {c.cid}: spine edge ({a},{b}) missing")
                okpath = False
                break
            length += g.weight(eids[0])
        if okpath and len(c.spine) > 1:
            d = dijkstra(g, c.spine[0], scope=sub).dist[c.spine[-1]]
            if length > d + tol:
                rep.note(f"column {c.cid}: spine is not a shortest path ({length} > {d})")
        # column shortcut: every column vertex within 2w of the spine inside
        # the induced column subgraph
        if spine_inside:
            dist, _, _ = multi_source_labels(
                g, [(s, (i,)) for i, s in enumerate(c.spine)], scope=c.vertices
            )
            for v in sorted(c.vertices):
                if dist.get(v, float("inf")) > 2 * w + tol:
                    rep.note(f"column {c.cid}: vertex {v} is {dist.get(v)} from the spine (> 2w)")
        # column width: from any column vertex with a neighbor above, every
        # vertex below is at distance >= w within the subgraph below
        above = gt.host - sub
        attach = sorted(
            v for v in c.vertices if any(u in above for u, _, _ in g.adj[v])
        )
        below = sub - c.vertices
        for comp in gt.leftovers[c.cid]:
            below -= comp
        if attach and below:
            dist, _, _ = multi_source_labels(g, [(a, (0,)) for a in attach], scope=sub)
            bad = [v for v in sorted(below) if dist.get(v, float("inf")) < w - tol]
            if bad:
                rep.note(
                    f"column {c.cid}: width violated, vertex {bad[0]} at "
                    f"{dist[bad[0]]} < w from an attachment"
                )
    return rep


def check_hierarchy(g: WeightedGraph, h: GridtreeHierarchy, tol: float | None = None) -> CheckReport:
    """Gridtree checks on every node plus the hierarchy-level properties:
    layer nesting, layer width, depth, and global partition totality."""
    import math

    if tol is None:
        tol = 1e-9 * h.delta
    rep = CheckReport()
    for node in h.nodes:
        check_gridtree(g, node.gridtree, tol=tol, report=rep)

    # layer nesting: children correspond one-to-one to leftover components
    kids = h.children()
    for node in h.nodes:
        comps = [comp for comps in node.gridtree.leftovers for comp in comps]
        child_hosts = sorted((h.nodes[c].host for c in kids[node.hid]), key=min)
        if sorted(comps, key=min) != child_hosts:
            rep.note(f"node {node.hid}: children do not match leftover components")

    # layer width: vertices within w of an outer vertex belong to columns
    for node in h.nodes:
        if not node.outer:
            continue
        dist, _, _ = multi_source_labels(
            g, [(v, (0,)) for v in sorted(node.outer)], scope=node.host
        )
        columned = frozenset(v for c in node.gridtree.columns for v in c.vertices)
        for v in sorted(node.host):
            if dist.get(v, float("inf")) <= h.width + tol and v not in columned:
                rep.note(f"node {node.hid}: vertex {v} within w of outer but not columned")

    bound = math.ceil(h.delta / h.width) + 1
    if h.depth > bound:
        rep.note(f"hierarchy depth {h.depth} exceeds ceil(delta/w)+1 = {bound}")

    # global totality: every vertex in exactly one column across the hierarchy
    owner: dict[int, int] = {}
    for node in h.nodes:
        for c in node.gridtree.columns:
            for v in c.vertices:
                if v in owner:
                    rep.note(f"vertex {v} columned in nodes {owner[v]} and {node.hid}")
                owner[v] = node.hid
    if set(owner) != set(range(g.n)):
        rep.note("hierarchy columns do not cover the graph")
    return rep


# ---------------------------------------------------------------------------
# serialization


def gridtree_to_dict(gt: Gridtree) -> dict:
    return {
        "width": gt.width,
        "host": sorted(gt.host),
        "host_walk": list(gt.host_walk),
        "columns": [
            {
                "cid": c.cid,
                "parent": c.parent,
                "level": c.level,
                "vertices": sorted(c.vertices),
                "spine": list(c.spine),
                "core": sorted(c.core),
            }
            for c in gt.columns
        ],
        "leftovers": [[sorted(comp) for comp in comps] for comps in gt.leftovers],
    }


def gridtree_from_dict(d: dict) -> Gridtree:
    return Gridtree(
        width=d["width"],
        host=frozenset(d["host"]),
        host_walk=tuple(d["host_walk"]),
        columns=tuple(
            Column(
                cid=c["cid"],
                parent=c["parent"],
                level=c["level"],
                vertices=frozenset(c["vertices"]),
                spine=tuple(c["spine"]),
                core=frozenset(c["core"]),
            )
            for c in d["columns"]
        ),
        leftovers=tuple(
            tuple(frozenset(comp) for comp in comps) for comps in d["leftovers"]
        ),
    )


def hierarchy_to_dict(h: GridtreeHierarchy) -> dict:
    return {
        "width": h.width,
        "delta": h.delta,
        "nodes": [
            {
                "hid": n.hid,
                "parent": n.parent,
                "layer": n.layer,
                "host": sorted(n.host),
                "walk": list(n.walk),
                "outer": sorted(n.outer),
                "gridtree": gridtree_to_dict(n.gridtree),
            }
            for n in h.nodes
        ],
    }


def hierarchy_from_dict(d: dict) -> GridtreeHierarchy:
    return GridtreeHierarchy(
        width=d["width"],
        delta=d["delta"],
        nodes=tuple(
            HierarchyNode(
                hid=n["hid"],
                parent=n["parent"],
                layer=n["layer"],
                host=frozenset(n["host"]),
                walk=tuple(n["walk"]),
                outer=frozenset(n["outer"]),
                gridtree=gridtree_from_dict(n["gridtree"]),
            )
            for n in d["nodes"]
        ),
    )
