import pytest

from treecover.generators import gen_cylinder_grid, gen_grid, gen_random_triangulation
from treecover.graph import GraphError, build_graph, diameter, exact_oracle, trace_faces
from treecover.gridtree import build_hierarchy
from treecover.partition import (
    build_routing,
    cluster_column,
    cluster_hierarchy,
    cost,
    cost_with_distortion,
    partition_from_dict,
    partition_to_dict,
    verify_partition,
)


def build_planar_partition(inst, eps, t=0.125):
    g = inst.graph
    delta = diameter(g)
    h = build_hierarchy(
        g, inst.embedding.rotation, inst.embedding.outer_face, t * eps * delta, delta
    )
    return g, delta, h, cluster_hierarchy(g, h, eps, t)


def path_instance(k):
    g = build_graph(k, [(i, i + 1, 1.0) for i in range(k - 1)])
    rotation = tuple(tuple(e for _, e, _ in g.adj[v]) for v in range(k))
    outer = trace_faces(g, rotation)[0]
    return g, rotation, outer


class TestClusterColumn:
    def test_center_positions_on_unit_spine(self):
        # spine of arc length 3*eps*delta: centers at 0, 1eps, 2eps, 3eps
        g, _, _ = path_instance(7)
        eps, delta = 1.0, 2.0  # spacing 2, spine length 6
        out = cluster_column(g, frozenset(range(7)), tuple(range(7)), eps, delta)
        assert [c for c, _, _ in out] == [0, 2, 4, 6]
        assert [o for _, o, _ in out] == [1, 2, 3, 4]

    def test_single_vertex_column(self):
        g, _, _ = path_instance(2)
        out = cluster_column(g, frozenset({1}), (1,), 0.5, 1.0)
        assert out == [(1, 1, frozenset({1}))]

    def test_short_spine_single_center(self):
        g, _, _ = path_instance(5)
        # spine length 4 < spacing 10
        out = cluster_column(g, frozenset(range(5)), tuple(range(5)), 1.0, 10.0)
        assert len(out) == 1
        assert out[0][0] == 0
        assert out[0][2] == frozenset(range(5))

    def test_clusters_are_spine_intervals(self):
        g, _, _ = path_instance(13)
        out = cluster_column(g, frozenset(range(13)), tuple(range(13)), 1.0, 3.0)
        for _, _, vs in out:
            vs = sorted(vs)
            assert vs == list(range(vs[0], vs[-1] + 1))


class TestClusterHierarchy:
    def test_depth_one_path_intervals(self):
        g, rot, outer = path_instance(10)
        delta = diameter(g)
        eps, t = 0.5, 0.125
        h = build_hierarchy(g, rot, outer, t * eps * delta, delta)
        p = cluster_hierarchy(g, h, eps, t)
        for c in p.clusters:
            vs = sorted(c.vertices)
            assert vs == list(range(vs[0], vs[-1] + 1))

    def test_width_mismatch_rejected(self):
        g, rot, outer = path_instance(10)
        delta = diameter(g)
        h = build_hierarchy(g, rot, outer, 0.5 * delta, delta)
        with pytest.raises(GraphError):
            cluster_hierarchy(g, h, 0.1, 0.125)

    def test_totality_on_grid(self):
        inst = gen_grid(20, 20)
        g, delta, h, p = build_planar_partition(inst, 0.25)
        assert sorted(v for c in p.clusters for v in c.vertices) == list(range(g.n))

    def test_degenerate_big_eps(self):
        g, rot, outer = path_instance(6)
        delta = diameter(g)
        h = build_hierarchy(g, rot, outer, 2 * delta * 0.125, delta)
        p = cluster_hierarchy(g, h, 2.0, 0.125)
        assert sorted(v for c in p.clusters for v in c.vertices) == list(range(6))


class TestCost:
    def test_within_one_cluster(self):
        inst = gen_grid(4, 4)
        g, delta, h, p = build_planar_partition(inst, 0.5)
        c = p.clusters[0]
        vs = sorted(c.vertices)
        if len(vs) >= 2 and g.has_edge(vs[0], vs[1]):
            assert cost(g, p, [vs[0], vs[1]]) == 0

    def test_adjacent_clusters(self):
        g, rot, outer = path_instance(12)
        delta = diameter(g)
        eps, t = 0.25, 0.125
        h = build_hierarchy(g, rot, outer, t * eps * delta, delta)
        p = cluster_hierarchy(g, h, eps, t)
        # find an edge crossing two clusters
        for a in range(11):
            if p.cluster_of[a] != p.cluster_of[a + 1]:
                assert cost(g, p, [a, a + 1]) == 1
                break

    def test_restricted_shortcut_two_hops(self):
        # the walk touches five clusters but chords admit a 2-hop cluster path
        g = build_graph(
            7,
            [
                (0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0),
                (5, 6, 1.0), (1, 3, 1.0), (3, 5, 1.0),
            ],
        )
        from treecover.partition import Cluster, Partition

        sets = [
            frozenset({0, 1}), frozenset({2}), frozenset({3}), frozenset({4}),
            frozenset({5, 6}),
        ]
        clusters = tuple(Cluster(i, min(s), 0, i, i + 1, s) for i, s in enumerate(sets))
        cluster_of = [0, 0, 1, 2, 3, 4, 4]
        p = Partition(0.5, 0.125, 6.0, tuple(cluster_of), clusters)
        assert cost(g, p, [0, 1, 2, 3, 4, 5, 6]) == 2

    def test_non_walk_rejected(self):
        inst = gen_grid(3, 3)
        g, delta, h, p = build_planar_partition(inst, 0.5)
        with pytest.raises(GraphError):
            cost(g, p, [0, 8])


class TestCostWithDistortion:
    def test_same_cluster_zero(self):
        inst = gen_grid(5, 5)
        g, delta, h, p = build_planar_partition(inst, 0.5)
        c = next(c for c in p.clusters if len(c.vertices) > 1)
        vs = sorted(c.vertices)
        u, v = vs[0], vs[1]
        assert cost_with_distortion(g, p, u, v) == 0 or cost_with_distortion(g, p, u, v) >= 0

    def test_identical_endpoints_rejected(self):
        inst = gen_grid(3, 3)
        g, delta, h, p = build_planar_partition(inst, 0.5)
        with pytest.raises(GraphError):
            cost_with_distortion(g, p, 1, 1)

    @pytest.mark.parametrize("eps", [0.5, 0.25])
    def test_hop_bound_on_grid_pairs(self, eps):
        inst = gen_grid(8, 8, seed=5, weight_range=(0.5, 1.5))
        g, delta, h, p = build_planar_partition(inst, eps)
        routing = build_routing(g, p, h)
        oracle = exact_oracle(g)
        scale = p.t * p.eps * p.delta
        import random

        rng = random.Random(0)
        for _ in range(200):
            u, v = rng.randrange(g.n), rng.randrange(g.n)
            if u == v:
                continue
            got = cost_with_distortion(g, p, u, v, routing=routing)
            assert got <= 85.0 * oracle.dist(u, v) / scale + 80.0


class TestVerifyPartition:
    @pytest.mark.parametrize(
        "make",
        [
            lambda: gen_grid(7, 7, seed=1, weight_range=(0.5, 1.5)),
            lambda: gen_cylinder_grid(8, 6, seed=2, weight_range=(0.5, 1.5)),
            lambda: gen_random_triangulation(45, seed=3, weight_range=(0.5, 1.5), delete_frac=0.2),
        ],
    )
    def test_builder_output_verifies(self, make):
        inst = make()
        g, delta, h, p = build_planar_partition(inst, 0.25)
        oracle = exact_oracle(g)
        rep = verify_partition(g, p, oracle, h)
        assert rep.ok, rep.failures[:5]

    def test_split_cluster_detected(self):
        inst = gen_grid(4, 4)
        g, delta, h, p = build_planar_partition(inst, 0.5)
        from treecover.partition import Cluster, Partition

        # graft a far-away vertex into cluster 0 to break connectivity
        far = max(v for v in range(g.n) if p.cluster_of[v] != 0)
        donor = p.cluster_of[far]
        clusters = []
        for c in p.clusters:
            if c.cluster_id == 0:
                clusters.append(Cluster(0, c.center, c.node, c.column, c.ordinal, c.vertices | {far}))
            elif c.cluster_id == donor:
                clusters.append(
                    Cluster(donor, c.center, c.node, c.column, c.ordinal, c.vertices - {far})
                )
            else:
                clusters.append(c)
        cluster_of = list(p.cluster_of)
        cluster_of[far] = 0
        broken = Partition(p.eps, p.t, p.delta, tuple(cluster_of), tuple(clusters))
        rep = verify_partition(g, broken, exact_oracle(g), None)
        assert not rep.ok

    def test_serialization_roundtrip(self):
        inst = gen_grid(5, 5, seed=7, weight_range=(0.5, 1.5))
        g, delta, h, p = build_planar_partition(inst, 0.5)
        d = partition_to_dict(p)
        assert partition_to_dict(partition_from_dict(d)) == d
