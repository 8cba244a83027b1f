"""Tree decompositions: validation, PACE 2017 text format, and a min-fill
elimination heuristic for decomposing small graphs."""
from __future__ import annotations

from dataclasses import dataclass

from .graph import GraphError, WeightedGraph


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[tuple[int, ...], ...]
    tree: tuple[tuple[int, int], ...]
    n: int

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    def bag_neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.tree:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def validate_decomposition(g: WeightedGraph, td: TreeDecomposition) -> list[str]:
    """Check the three tree-decomposition axioms; returns a list of violations."""
    problems: list[str] = []
    if td.n != g.n:
        problems.append(f"decomposition is for {td.n} vertices, graph has {g.n}")
    nb = len(td.bags)
    for a, b in td.tree:
        if not (0 <= a < nb and 0 <= b < nb):
            problems.append(f"tree edge ({a},{b}) out of range")
            return problems
    # the bag tree must be a tree (connected, |E| = bags - 1)
    if nb > 1:
        if len(td.tree) != nb - 1:
            problems.append(f"bag tree has {len(td.tree)} edges for {nb} bags")
        adj = td.bag_neighbors()
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != nb:
            problems.append("bag tree is disconnected")
    covered = [False] * g.n
    for bag in td.bags:
        for v in bag:
            if not 0 <= v < g.n:
                problems.append(f"bag vertex {v} out of range")
                return problems
            covered[v] = True
    for v in range(g.n):
        if not covered[v]:
            problems.append(f"vertex {v} in no bag")
    bag_sets = [frozenset(b) for b in td.bags]
    for u, v, _ in g.edges:
        if not any(u in bs and v in bs for bs in bag_sets):
            problems.append(f"edge ({u},{v}) covered by no bag")
    # connectivity of each vertex's bag set
    adj = td.bag_neighbors()
    for v in range(g.n):
        holding = [i for i, bs in enumerate(bag_sets) if v in bs]
        if not holding:
            continue
        reach = {holding[0]}
        stack = [holding[0]]
        holding_set = set(holding)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in holding_set and y not in reach:
                    reach.add(y)
                    stack.append(y)
        if reach != holding_set:
            problems.append(f"bags containing vertex {v} are not connected")
    return problems


def min_fill_decomposition(g: WeightedGraph) -> TreeDecomposition:
    """Heuristic decomposition from a min-fill elimination order
    (ties: min degree, then smallest id). No optimality claim."""
    nbrs: list[set[int]] = [set(g.neighbors(v)) for v in range(g.n)]
    order: list[int] = []
    eliminated = [False] * g.n
    higher: list[set[int]] = [set() for _ in range(g.n)]
    for _ in range(g.n):
        best = None
        for v in range(g.n):
            if eliminated[v]:
                continue
            live = [u for u in sorted(nbrs[v]) if not eliminated[u]]
            fill = 0
            for i in range(len(live)):
                for j in range(i + 1, len(live)):
                    if live[j] not in nbrs[live[i]]:
                        fill += 1
            key = (fill, len(live), v)
            if best is None or key < best[0]:
                best = (key, v, live)
        assert best is not None
        _, v, live = best
        order.append(v)
        eliminated[v] = True
        higher[v] = set(live)
        for i in range(len(live)):
            for j in range(i + 1, len(live)):
                nbrs[live[i]].add(live[j])
                nbrs[live[j]].add(live[i])
    pos = {v: i for i, v in enumerate(order)}
    bags: list[tuple[int, ...]] = []
    bag_of: dict[int, int] = {}
    tree: list[tuple[int, int]] = []
    for v in reversed(order):
        bag_of[v] = len(bags)
        bags.append(tuple(sorted({v} | higher[v])))
    for v in order:
        if higher[v]:
            nxt = min(higher[v], key=lambda u: pos[u])
            tree.append((bag_of[v], bag_of[nxt]))
    if not bags:
        bags = [(0,)]
    return TreeDecomposition(tuple(bags), tuple(tree), g.n)


# ---------------------------------------------------------------------------
# PACE 2017 .td format (1-indexed vertices and bags).


def write_td(td: TreeDecomposition) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {td.n}"]
    for i, bag in enumerate(td.bags):
        lines.append("b " + " ".join(str(x) for x in (i + 1,) + tuple(v + 1 for v in bag)))
    for a, b in td.tree:
        lines.append(f"{a + 1} {b + 1}")
    return "\n".join(lines) + "\n"


def read_td(text: str) -> TreeDecomposition:
    bags: dict[int, tuple[int, ...]] = {}
    tree: list[tuple[int, int]] = []
    nbags = n = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if parts[1] != "td":
                raise GraphError("not a PACE td file")
            nbags, n = int(parts[2]), int(parts[4])
        elif parts[0] == "b":
            bags[int(parts[1]) - 1] = tuple(sorted(int(x) - 1 for x in parts[2:]))
        else:
            tree.append((int(parts[0]) - 1, int(parts[1]) - 1))
    if nbags is None or n is None:
        raise GraphError("missing solution line")
    if set(bags) != set(range(nbags)):
        raise GraphError("bag ids must be 1..nbags")
    return TreeDecomposition(tuple(bags[i] for i in range(nbags)), tuple(tree), n)
