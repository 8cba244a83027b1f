import pytest

from treecover.generators import (
    gen_cylinder_grid,
    gen_grid,
    gen_random_triangulation,
    gen_series_parallel,
    generate,
)
from treecover.graph import (
    GraphError,
    check_embedding,
    diameter,
    face_vertices,
    write_graph_text,
)
from treecover.treedecomp import validate_decomposition


class TestGrid:
    def test_2x2_shape(self):
        inst = gen_grid(2, 2)
        assert inst.graph.n == 4 and inst.graph.m == 4
        assert diameter(inst.graph) == 2.0

    def test_embedding_valid(self):
        for rows, cols in [(2, 2), (3, 3), (4, 6)]:
            inst = gen_grid(rows, cols)
            check_embedding(inst.graph, inst.embedding)

    def test_outer_face_is_boundary(self):
        inst = gen_grid(3, 4)
        boundary = {v for v in range(12) if v // 4 in (0, 2) or v % 4 in (0, 3)}
        assert set(face_vertices(inst.graph, inst.embedding.outer_face)) == boundary

    def test_determinism(self):
        a = gen_grid(4, 5, seed=11, weight_range=(0.5, 2.0))
        b = gen_grid(4, 5, seed=11, weight_range=(0.5, 2.0))
        assert a.graph.edges == b.graph.edges
        assert write_graph_text(a.graph, a.embedding) == write_graph_text(b.graph, b.embedding)

    def test_seed_changes_weights(self):
        a = gen_grid(3, 3, seed=1, weight_range=(0.5, 2.0))
        b = gen_grid(3, 3, seed=2, weight_range=(0.5, 2.0))
        assert a.graph.edges != b.graph.edges


class TestCylinderGrid:
    def test_embedding_valid(self):
        inst = gen_cylinder_grid(8, 8)
        check_embedding(inst.graph, inst.embedding)

    def test_outer_face_is_ring_zero(self):
        inst = gen_cylinder_grid(6, 4)
        assert set(face_vertices(inst.graph, inst.embedding.outer_face)) == set(range(6))

    def test_face_count(self):
        inst = gen_cylinder_grid(5, 3)
        g = inst.graph
        assert g.m - g.n + 2 == 5 * (3 - 1) + 2


class TestRandomTriangulation:
    @pytest.mark.parametrize("seed", range(6))
    def test_embedding_valid(self, seed):
        inst = gen_random_triangulation(30, seed=seed)
        check_embedding(inst.graph, inst.embedding)
        assert len(inst.embedding.outer_face) == 3

    @pytest.mark.parametrize("seed", range(6))
    def test_with_deletions(self, seed):
        inst = gen_random_triangulation(40, seed=seed, delete_frac=0.25)
        check_embedding(inst.graph, inst.embedding)
        # full triangulation has 3 + 3*(n-3) edges; deletions removed some
        assert inst.graph.m < 3 + 3 * 37

    def test_determinism(self):
        a = gen_random_triangulation(25, seed=4, delete_frac=0.2, weight_range=(0.5, 1.5))
        b = gen_random_triangulation(25, seed=4, delete_frac=0.2, weight_range=(0.5, 1.5))
        assert a.graph.edges == b.graph.edges


class TestSeriesParallel:
    @pytest.mark.parametrize("seed", range(5))
    def test_width_two_decomposition(self, seed):
        inst = gen_series_parallel(10, seed=seed)
        assert inst.decomposition.width <= 2
        assert validate_decomposition(inst.graph, inst.decomposition) == []

    def test_size(self):
        inst = gen_series_parallel(12, seed=0)
        assert inst.graph.n == 12 and inst.graph.m == 2 * 12 - 3


class TestDispatch:
    def test_generate_grid(self):
        inst = generate("grid", {"rows": 2, "cols": 2})
        assert inst.graph.n == 4

    def test_unknown_kind(self):
        with pytest.raises(GraphError):
            generate("moebius", {})

    def test_same_seed_identical(self):
        a = generate("random-triangulation", {"n": 20, "weight_range": (0.5, 2.0)}, seed=9)
        b = generate("random-triangulation", {"n": 20, "weight_range": (0.5, 2.0)}, seed=9)
        assert a.graph.edges == b.graph.edges
