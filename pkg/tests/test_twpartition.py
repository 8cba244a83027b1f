import pytest

from treecover.generators import gen_series_parallel
from treecover.graph import GraphError, build_graph, diameter, dijkstra, exact_oracle
from treecover.treedecomp import TreeDecomposition
from treecover.twpartition import (
    build_tw_partition,
    hop_bound,
    preprocess,
    verify_tw_partition,
)


def path_with_decomposition(k):
    g = build_graph(k, [(i, i + 1, 1.0) for i in range(k - 1)])
    bags = tuple((i, i + 1) for i in range(k - 1))
    tree = tuple((i, i + 1) for i in range(k - 2))
    return g, TreeDecomposition(bags, tree, k)


class TestPreprocess:
    def test_path_copies_share_zero_edge(self):
        g, td = path_with_decomposition(3)
        pre = preprocess(g, td)
        assert len(pre.copies[1]) == 2
        a, b = pre.copies[1]
        w = next(w for x, _, w in pre.graph.adj[a] if x == b)
        assert w == 0.0

    def test_distances_preserved(self):
        inst = gen_series_parallel(14, seed=2, weight_range=(0.5, 2.0))
        g, td = inst.graph, inst.decomposition
        oracle = exact_oracle(g)
        pre = preprocess(g, td, oracle)
        for u in range(0, g.n, 3):
            cu = pre.any_copy(u)
            spt = dijkstra(pre.graph, cu)
            for v in range(g.n):
                dv = min(spt.dist[c] for c in pre.copies[v])
                assert dv == pytest.approx(oracle.dist(u, v), abs=1e-9)

    def test_single_bag_clique(self):
        g = build_graph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
        td = TreeDecomposition(((0, 1, 2, 3),), (), 4)
        pre = preprocess(g, td)
        assert pre.graph.n == 4
        assert pre.graph.m == 6  # full clique

    def test_invalid_decomposition_rejected(self):
        g = build_graph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
        td = TreeDecomposition(((0, 1), (1, 2)), ((0, 1),), 3)
        with pytest.raises(GraphError):
            preprocess(g, td)


class TestClustering:
    def test_huge_eps_single_ball(self):
        g, td = path_with_decomposition(5)
        p, pre = build_tw_partition(g, td, eps=2.0)
        assert len(p.clusters) == 1
        assert p.clusters[0].vertices == frozenset(range(pre.graph.n))

    def test_all_copies_clustered(self):
        inst = gen_series_parallel(25, seed=1, weight_range=(0.5, 1.5))
        p, pre = build_tw_partition(inst.graph, inst.decomposition, eps=0.3)
        assert all(c != -1 for c in p.cluster_of)
        assert sorted(v for c in p.clusters for v in c.vertices) == list(
            range(pre.graph.n)
        )

    def test_overlap_split_by_smaller_center(self):
        # 3-vertex path, unit edges, centers at both ends with eps*delta = 2:
        # both balls cover the middle; it must join the smaller center id
        g, td = path_with_decomposition(3)
        p, pre = build_tw_partition(g, td, eps=1.0)  # radius = delta = 2
        # round k+1 call roots at bag 0 and clusters everything from one center
        assert len(p.clusters) >= 1
        first = p.clusters[0]
        assert first.center == min(c.center for c in p.clusters)

    def test_clusters_connected_in_copied_graph(self):
        inst = gen_series_parallel(30, seed=4, weight_range=(0.5, 1.5))
        p, pre = build_tw_partition(inst.graph, inst.decomposition, eps=0.25)
        for c in p.clusters:
            spt = dijkstra(pre.graph, c.center, scope=c.vertices)
            assert all(spt.reached(v) for v in c.vertices)

    def test_original_collapse_total(self):
        inst = gen_series_parallel(20, seed=5)
        p, pre = build_tw_partition(inst.graph, inst.decomposition, eps=0.4)
        assert len(p.original_cluster_of) == inst.graph.n
        assert all(0 <= c < len(p.clusters) for c in p.original_cluster_of)


class TestHopBound:
    def test_recurrence_values(self):
        # k = 1, eps = 1: step = 2*(1+3) = 8, J_1 = 2, J_2 = 9*2+8 = 26
        assert hop_bound(1, 1.0) == 26.0

    def test_monotone_in_k(self):
        assert hop_bound(2, 0.5) > hop_bound(1, 0.5)


class TestVerify:
    def test_singleton_graph_vacuous(self):
        g = build_graph(2, [(0, 1, 1.0)])
        td = TreeDecomposition(((0, 1),), (), 2)
        p, pre = build_tw_partition(g, td, eps=0.9)
        rep = verify_tw_partition(g, td, p, pre)
        assert rep.ok, rep.failures

    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("eps", [0.5, 0.25])
    def test_series_parallel_verifies(self, seed, eps):
        inst = gen_series_parallel(30, seed=seed, weight_range=(0.5, 1.5))
        g, td = inst.graph, inst.decomposition
        oracle = exact_oracle(g)
        p, pre = build_tw_partition(g, td, eps=eps, oracle=oracle)
        rep = verify_tw_partition(g, td, p, pre, oracle=oracle)
        assert rep.ok, rep.failures[:5]

    def test_path_width_one_bound(self):
        g, td = path_with_decomposition(12)
        oracle = exact_oracle(g)
        p, pre = build_tw_partition(g, td, eps=0.5, oracle=oracle)
        rep = verify_tw_partition(g, td, p, pre, oracle=oracle)
        assert rep.ok, rep.failures[:5]
