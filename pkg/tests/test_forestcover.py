import math

import numpy as np
import pytest

from treecover.forestcover import (
    cover_from_dict,
    cover_hierarchy,
    cover_to_dict,
    forests_to_trees,
    index_group_count,
    level_group_count,
    verify_cover,
    verify_tree_cover,
)
from treecover.generators import gen_cylinder_grid, gen_grid, gen_random_triangulation
from treecover.graph import build_graph, diameter, exact_oracle, trace_faces
from treecover.gridtree import build_hierarchy
from treecover.lca import LcaIndex
from treecover.partition import cluster_hierarchy


def build_cover(inst, eps, t=0.125):
    g = inst.graph
    delta = diameter(g)
    h = build_hierarchy(
        g, inst.embedding.rotation, inst.embedding.outer_face, t * eps * delta, delta
    )
    p = cluster_hierarchy(g, h, eps, t)
    return g, delta, h, p, cover_hierarchy(g, h, p)


def path_cover(k, eps):
    g = build_graph(k, [(i, i + 1, 1.0) for i in range(k - 1)])
    rotation = tuple(tuple(e for _, e, _ in g.adj[v]) for v in range(k))
    outer = trace_faces(g, rotation)[0]
    delta = float(k - 1)
    t = 0.125
    h = build_hierarchy(g, rotation, outer, t * eps * delta, delta)
    p = cluster_hierarchy(g, h, eps, t)
    return g, delta, h, p, cover_hierarchy(g, h, p)


class TestCoverGridtree:
    def test_single_column_single_center(self):
        g, delta, h, p, fc = path_cover(4, 8.0)  # width t*eps*delta swallows the path
        assert fc.size == 1
        assert len(fc.forests[0]) == 1
        assert fc.forests[0][0].vertex_set() == frozenset(range(4))

    def test_same_column_nearby_centers_split(self):
        g, delta, h, p, fc = path_cover(60, 0.1)
        M = index_group_count(0.1)
        for forest, key in zip(fc.forests, fc.keys):
            ords = []
            for tree in forest:
                c = next(c for c in p.clusters if c.center == tree.root)
                ords.append(c.ordinal)
            assert all(o % M == key[2] for o in ords)
            assert len(set(ords)) == len(ords)

    def test_within_forest_disjointness(self):
        inst = gen_grid(10, 10, seed=3, weight_range=(0.5, 1.5))
        g, delta, h, p, fc = build_cover(inst, 0.25)
        for forest in fc.forests:
            seen = set()
            for tree in forest:
                assert not (seen & tree.vertex_set())
                seen |= tree.vertex_set()

    def test_cluster_disjointness_within_forest(self):
        inst = gen_cylinder_grid(9, 8, seed=1, weight_range=(0.5, 1.5))
        g, delta, h, p, fc = build_cover(inst, 0.5)
        for forest in fc.forests:
            touched: set[int] = set()
            for tree in forest:
                mine = {p.cluster_of[v] for v in tree.vertex_set() if v < g.n}
                assert not (touched & mine)
                touched |= mine


class TestCoverHierarchy:
    def test_depth_one_equals_gridtree_cover(self):
        inst = gen_grid(4, 4)
        g, delta, h, p, fc = build_cover(inst, 2.0)
        assert h.depth == 1
        assert all(k[0] == 0 for k in fc.keys)

    def test_forest_count_within_slot_budget(self):
        inst = gen_grid(8, 8, seed=2)
        g, delta, h, p, fc = build_cover(inst, 0.5)
        assert fc.size <= fc.slot_count
        assert fc.size <= h.depth * index_group_count(0.5) * level_group_count(0.5, 0.125)

    @pytest.mark.parametrize(
        "make,eps",
        [
            (lambda: gen_grid(10, 10, seed=4, weight_range=(0.5, 1.5)), 0.5),
            (lambda: gen_grid(8, 8, seed=5, weight_range=(0.5, 1.5)), 0.25),
            (lambda: gen_cylinder_grid(10, 9, seed=6, weight_range=(0.5, 1.5)), 0.25),
            (lambda: gen_random_triangulation(60, seed=7, weight_range=(0.5, 1.5), delete_frac=0.2), 0.25),
        ],
    )
    def test_additive_error_within_bound(self, make, eps):
        inst = make()
        g, delta, h, p, fc = build_cover(inst, eps)
        rep = verify_cover(g, fc, exact_oracle(g))
        assert rep.ok, rep.failures[:4]
        assert rep.worst_slack <= 2 * 4 * eps * delta + 1e-9 * delta

    def test_trees_are_subgraphs(self):
        inst = gen_grid(6, 6, seed=8, weight_range=(0.5, 1.5))
        g, delta, h, p, fc = build_cover(inst, 0.5)
        ew = {}
        for u, v, w in g.edges:
            ew[(u, v)] = ew[(v, u)] = w
        for forest in fc.forests:
            for tree in forest:
                assert tree.kind == "spanning"
                for pa, v, w in tree.edges():
                    assert ew[(pa, v)] == w


class TestForestsToTrees:
    def test_tree_count_equals_forest_count(self):
        inst = gen_grid(7, 7, seed=9)
        g, delta, h, p, fc = build_cover(inst, 0.5)
        trees = forests_to_trees(fc, steiner_base=g.n)
        assert len(trees) == fc.size

    def test_single_tree_forest_unchanged(self):
        g, delta, h, p, fc = path_cover(4, 8.0)
        trees = forests_to_trees(fc, steiner_base=g.n)
        assert trees[0] is fc.forests[0][0]

    def test_hub_distances_and_domination(self):
        inst = gen_grid(6, 5, seed=10, weight_range=(0.5, 1.5))
        g, delta, h, p, fc = build_cover(inst, 0.5)
        trees = forests_to_trees(fc, steiner_base=g.n, span=frozenset(range(g.n)))
        oracle = exact_oracle(g)
        rep = verify_tree_cover(
            g, trees, oracle, additive_bound=fc.additive_bound, tol=1e-9 * delta
        )
        assert rep.ok, rep.failures[:4]
        # hub-joined cross-tree distances include two delta edges
        for tree in trees:
            if tree.kind == "steiner":
                idx = LcaIndex(tree)
                roots = [v for v, pa in zip(tree.nodes, tree.parent) if pa == tree.root]
                if len(roots) >= 2:
                    assert idx.dist(roots[0], roots[1]) == pytest.approx(2 * delta)

    def test_span_fills_missing_vertices(self):
        inst = gen_grid(5, 5, seed=11)
        g, delta, h, p, fc = build_cover(inst, 0.25)
        trees = forests_to_trees(fc, steiner_base=g.n, span=frozenset(range(g.n)))
        for tree in trees:
            assert frozenset(range(g.n)) <= tree.vertex_set()


class TestVerifyCover:
    def test_detects_undercut(self):
        # a fake cover with a too-short edge must fail domination
        g = build_graph(3, [(0, 1, 2.0), (1, 2, 2.0), (0, 2, 3.0)])
        from treecover.forestcover import ForestCover
        from treecover.lca import tree_from_parent_map

        cheat = tree_from_parent_map(0, {1: (0, 1.0), 2: (0, 1.0)}, "steiner")
        fc = ForestCover(0.5, 4.0, 2.0, ((cheat,),), ((0, 0, 0),), 1)
        rep = verify_cover(g, fc, exact_oracle(g))
        assert any("dominating" in f for f in rep.failures)

    def test_argmin_histogram_totals(self):
        inst = gen_grid(5, 5, seed=12)
        g, delta, h, p, fc = build_cover(inst, 0.5)
        rep = verify_cover(g, fc, exact_oracle(g))
        assert sum(rep.argmin_histogram.values()) == g.n * g.n - g.n

    def test_serialization_roundtrip(self):
        inst = gen_grid(4, 4, seed=13)
        g, delta, h, p, fc = build_cover(inst, 0.5)
        d = cover_to_dict(fc)
        assert cover_to_dict(cover_from_dict(d)) == d
