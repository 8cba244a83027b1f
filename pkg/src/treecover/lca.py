"""Euler-tour + sparse-table LCA over rooted trees, with weighted root
distances so tree distances come out of the standard three-term formula."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import GraphError


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree over arbitrary integer vertex ids (Steiner ids may exceed
    the host graph's vertex count).  parent/weight align with `nodes`; the
    root's parent is -1."""

    root: int
    nodes: tuple[int, ...]
    parent: tuple[int, ...]
    weight: tuple[float, ...]
    kind: str  # "spanning" | "steiner-star" | "steiner"

    def __post_init__(self):
        if self.root not in self.nodes:
            raise GraphError("root must be one of the tree's nodes")
        if len(self.parent) != len(self.nodes) or len(self.weight) != len(self.nodes):
            raise GraphError("misaligned tree arrays")

    @property
    def size(self) -> int:
        return len(self.nodes)

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.nodes)

    def edges(self) -> list[tuple[int, int, float]]:
        return [
            (p, v, w)
            for v, p, w in zip(self.nodes, self.parent, self.weight)
            if p != -1
        ]


def tree_from_parent_map(
    root: int, parent: dict[int, tuple[int, float]], kind: str
) -> RootedTree:
    """parent maps each non-root node to (parent, edge weight)."""
    nodes = sorted(set(parent) | {root})
    pa, wt = [], []
    for v in nodes:
        if v == root:
            pa.append(-1)
            wt.append(0.0)
        else:
            p, w = parent[v]
            pa.append(p)
            wt.append(float(w))
    return RootedTree(root, tuple(nodes), tuple(pa), tuple(wt), kind)


class LcaIndex:
    """O(size log size) preprocessing, O(1) LCA and distance queries."""

    def __init__(self, tree: RootedTree):
        self.tree = tree
        index_of = {v: i for i, v in enumerate(tree.nodes)}
        if len(index_of) != len(tree.nodes):
            raise GraphError("duplicate node in tree")
        children: list[list[int]] = [[] for _ in tree.nodes]
        root_i = index_of[tree.root]
        for i, (v, p) in enumerate(zip(tree.nodes, tree.parent)):
            if p != -1:
                children[index_of[p]].append(i)

        n = len(tree.nodes)
        self.index_of = index_of
        self.root_dist = np.zeros(n, dtype=np.float64)
        euler: list[int] = []
        edepth: list[int] = []
        first = np.full(n, -1, dtype=np.int64)

        visited = np.zeros(n, dtype=bool)
        visited[root_i] = True
        first[root_i] = 0
        euler.append(root_i)
        edepth.append(0)
        stack = [(root_i, 0, iter(children[root_i]))]
        while stack:
            i, d, it = stack[-1]
            c = next(it, None)
            if c is None:
                stack.pop()
                if stack:
                    pi, pd, _ = stack[-1]
                    euler.append(pi)
                    edepth.append(pd)
                continue
            if visited[c]:
                raise GraphError("cycle in tree parent structure")
            visited[c] = True
            self.root_dist[c] = self.root_dist[i] + tree.weight[c]
            first[c] = len(euler)
            euler.append(c)
            edepth.append(d + 1)
            stack.append((c, d + 1, iter(children[c])))
        if not visited.all():
            raise GraphError("tree parent structure is disconnected")

        self.euler = np.array(euler, dtype=np.int64)
        self.first = first
        m = len(euler)
        self._depth_at = np.array(edepth, dtype=np.int64)
        self._log = np.zeros(m + 1, dtype=np.int64)
        for i in range(2, m + 1):
            self._log[i] = self._log[i // 2] + 1
        k_max = int(self._log[m]) + 1
        st = np.empty((k_max, m), dtype=np.int64)
        st[0] = np.arange(m)
        for k in range(1, k_max):
            span, half = 1 << k, 1 << (k - 1)
            valid = m - span + 1
            prev = st[k - 1]
            left, right = prev[:valid], prev[half : half + valid]
            st[k, :valid] = np.where(self._depth_at[right] < self._depth_at[left], right, left)
            st[k, valid:] = prev[valid:]  # padding, never queried
        self._st = st

    def has(self, v: int) -> bool:
        return v in self.index_of

    def _rmq(self, lo: int, hi: int) -> int:
        # min-depth euler position in [lo, hi], inclusive
        k = int(self._log[hi - lo + 1])
        a = int(self._st[k, lo])
        b = int(self._st[k, hi - (1 << k) + 1])
        return b if self._depth_at[b] < self._depth_at[a] else a

    def lca(self, u: int, v: int) -> int:
        iu, iv = self.first[self.index_of[u]], self.first[self.index_of[v]]
        lo, hi = (iu, iv) if iu <= iv else (iv, iu)
        return self.tree.nodes[self.euler[self._rmq(int(lo), int(hi))]]

    def dist(self, u: int, v: int) -> float:
        iu, iv = self.index_of[u], self.index_of[v]
        pu, pv = self.first[iu], self.first[iv]
        lo, hi = (pu, pv) if pu <= pv else (pv, pu)
        w = self.euler[self._rmq(int(lo), int(hi))]
        return float(self.root_dist[iu] + self.root_dist[iv] - 2.0 * self.root_dist[w])

    def root_distance(self, v: int) -> float:
        return float(self.root_dist[self.index_of[v]])

    def pairwise(self, vertices: list[int]) -> np.ndarray:
        """Dense matrix of tree distances between the given vertices."""
        idx = np.array([self.index_of[v] for v in vertices], dtype=np.int64)
        pos = self.first[idx]
        k = len(vertices)
        lo = np.minimum.outer(pos, pos)
        hi = np.maximum.outer(pos, pos)
        span = hi - lo + 1
        kk = self._log[span]
        a = self._st[kk, lo]
        b = self._st[kk, hi - (1 << kk) + 1]
        w = np.where(self._depth_at[b] < self._depth_at[a], b, a)
        rd = self.root_dist
        return rd[idx][:, None] + rd[idx][None, :] - 2.0 * rd[self.euler[w]]
