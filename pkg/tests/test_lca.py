import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treecover.graph import GraphError
from treecover.lca import LcaIndex, RootedTree, tree_from_parent_map


def random_tree(n, seed, max_w=5.0):
    rng = random.Random(seed)
    parent = {}
    for v in range(1, n):
        parent[v] = (rng.randrange(v), rng.uniform(0.1, max_w))
    return tree_from_parent_map(0, parent, "spanning")


def brute_dist(tree: RootedTree, u, v):
    """Independent oracle: walk both vertices up to the root."""
    up = {}
    for x, p, w in zip(tree.nodes, tree.parent, tree.weight):
        up[x] = (p, w)
    def chain(x):
        out = {x: 0.0}
        d = 0.0
        while up[x][0] != -1:
            d += up[x][1]
            x = up[x][0]
            out[x] = d
        return out
    cu, cv = chain(u), chain(v)
    return min(cu[x] + cv[x] for x in cu if x in cv)


class TestLcaIndex:
    def test_lca_of_self(self):
        t = random_tree(10, 0)
        idx = LcaIndex(t)
        for v in t.nodes:
            assert idx.lca(v, v) == v

    def test_path_tree_distances(self):
        parent = {i: (i - 1, 1.0) for i in range(1, 6)}
        idx = LcaIndex(tree_from_parent_map(0, parent, "spanning"))
        assert idx.dist(0, 5) == 5.0
        assert idx.dist(2, 4) == 2.0

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_brute_force(self, seed):
        t = random_tree(30, seed)
        idx = LcaIndex(t)
        rng = random.Random(seed + 100)
        for _ in range(80):
            u, v = rng.choice(t.nodes), rng.choice(t.nodes)
            assert idx.dist(u, v) == pytest.approx(brute_dist(t, u, v), abs=1e-9)

    @given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=60, deadline=None)
    def test_three_term_identity(self, n, seed):
        t = random_tree(n, seed)
        idx = LcaIndex(t)
        rng = random.Random(seed)
        u, v = rng.choice(t.nodes), rng.choice(t.nodes)
        w = idx.lca(u, v)
        lhs = idx.dist(u, v)
        rhs = idx.root_distance(u) + idx.root_distance(v) - 2 * idx.root_distance(w)
        assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_pairwise_matches_scalar(self):
        t = random_tree(25, 3)
        idx = LcaIndex(t)
        vs = list(t.nodes)[:12]
        mat = idx.pairwise(vs)
        for i, u in enumerate(vs):
            for j, v in enumerate(vs):
                assert mat[i, j] == pytest.approx(idx.dist(u, v), abs=1e-9)

    def test_steiner_ids_allowed(self):
        parent = {1: (0, 1.0), 100: (1, 2.0)}
        idx = LcaIndex(tree_from_parent_map(0, parent, "steiner"))
        assert idx.dist(0, 100) == 3.0

    def test_rejects_cycle(self):
        with pytest.raises(GraphError):
            LcaIndex(RootedTree(0, (0, 1, 2), (-1, 2, 1), (0.0, 1.0, 1.0), "spanning"))

    def test_rejects_disconnected(self):
        with pytest.raises(GraphError):
            LcaIndex(RootedTree(0, (0, 1, 2), (-1, 0, 2), (0.0, 1.0, 1.0), "spanning"))
