import pytest
from hypothesis import given, strategies as st

from hamlab.graph import (
    Digraph,
    PathSystem,
    edges_between,
    graph_profile,
    hamilton_cycle_error,
    is_path_system,
    mask_of,
    path_system_error,
    verify_hamilton_cycle,
)


def directed_cycle(n):
    return Digraph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_digraph(n):
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def random_digraph(n, p, seed):
    import random

    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
    return Digraph(n, edges)


class TestDigraph:
    def test_construction_and_queries(self):
        g = Digraph(4, [(0, 1), (1, 2), (2, 0), (3, 0)])
        assert g.has_edge(0, 1) and not g.has_edge(1, 0)
        assert g.out_neighbors(0) == [1]
        assert g.in_neighbors(0) == [2, 3]
        assert g.edge_count == 4

    def test_rejects_duplicates_and_range(self):
        with pytest.raises(ValueError):
            Digraph(3, [(0, 1), (0, 1)])
        with pytest.raises(ValueError):
            Digraph(3, [(0, 3)])
        with pytest.raises(ValueError):
            Digraph(3, [(1, 1)])
        Digraph(3, [(1, 1)], loops_allowed=True)

    def test_transpose_involution(self):
        g = random_digraph(9, 0.3, seed=1)
        assert g.transpose().transpose() == g

    def test_in_adj_is_transpose(self):
        g = random_digraph(8, 0.4, seed=2)
        t = g.transpose()
        for v in range(g.n):
            assert g.in_neighbors(v) == t.out_neighbors(v)

    def test_induced_relabels(self):
        g = directed_cycle(6)
        sub, ids = g.induced([1, 2, 3])
        assert ids == [1, 2, 3]
        assert sub.edges() == [(0, 1), (1, 2)]

    def test_json_round_trip(self):
        g = random_digraph(7, 0.35, seed=3)
        assert Digraph.from_json_dict(g.to_json_dict()) == g

    def test_edge_count_partition_identity(self):
        g = random_digraph(10, 0.3, seed=4)
        a = list(range(4))
        b = list(range(4, 10))
        v = list(range(10))
        assert len(edges_between(g, a, v)) + len(edges_between(g, b, v)) == g.edge_count


class TestGraphProfile:
    def test_rotational_tournament_profile(self):
        from hamlab.generators import regular_tournament

        p = graph_profile(regular_tournament(5))
        assert p.is_regular == 2 and p.is_oriented

    def test_complete_digraph_profile(self):
        p = graph_profile(complete_digraph(4))
        assert p.is_regular == 3 and not p.is_oriented

    def test_prop15_profile(self):
        from hamlab.generators import prop15_digraph

        p = graph_profile(prop15_digraph(3))
        assert p.n == 6 and p.edge_count == 12
        assert p.is_regular == 2 and not p.is_oriented


class TestEdgesBetween:
    def test_cycle_window(self):
        g = directed_cycle(8)
        got = edges_between(g, range(0, 4), range(1, 5))
        assert got == [(0, 1), (1, 2), (2, 3), (3, 4)]

    def test_empty_source(self):
        g = directed_cycle(5)
        assert edges_between(g, [], range(5)) == []

    def test_complete_all(self):
        g = complete_digraph(4)
        assert len(edges_between(g, range(4), range(4))) == 12

    def test_out_of_range(self):
        g = directed_cycle(4)
        with pytest.raises(ValueError):
            edges_between(g, [5], [0])


class TestPathSystem:
    def test_accepts_disjoint_edges(self):
        g = directed_cycle(8)
        assert is_path_system(g, [(0, 1), (2, 3)])

    def test_rejects_cycle(self):
        g = Digraph(3, [(0, 1), (1, 2), (2, 0)])
        err = path_system_error(g, [(0, 1), (1, 2), (2, 0)])
        assert err is not None and "cycle" in err

    def test_rejects_branching(self):
        g = Digraph(3, [(0, 1), (0, 2)])
        err = path_system_error(g, [(0, 1), (0, 2)])
        assert err is not None and "out-degree" in err

    def test_rejects_foreign_edge(self):
        g = directed_cycle(4)
        assert "not present" in path_system_error(g, [(0, 2)])

    def test_decomposition(self):
        ps = PathSystem([(0, 1), (1, 2), (4, 5)])
        assert ps.paths == ((0, 1, 2), (4, 5))
        assert ps.vertices() == {0, 1, 2, 4, 5}

    @given(st.integers(0, 2**20 - 1))
    def test_decomposition_partitions_edges(self, picks):
        # subsets of a fixed pool of candidate edges on 10 vertices
        pool = [(u, v) for u in range(10) for v in range(10) if u != v][:20]
        chosen = [pool[i] for i in range(20) if picks >> i & 1]
        g = Digraph(10, set(pool))
        err = path_system_error(g, chosen)
        if err is None:
            ps = PathSystem(chosen)
            path_edges = [
                (p[i], p[i + 1]) for p in ps.paths for i in range(len(p) - 1)
            ]
            assert sorted(path_edges) == sorted(set(chosen))
            # interior vertices have in = out = 1 within the system
            for p in ps.paths:
                for v in p[1:-1]:
                    assert sum(1 for e in chosen if e[0] == v) == 1
                    assert sum(1 for e in chosen if e[1] == v) == 1


class TestVerifyHamiltonCycle:
    def test_c4_good(self):
        assert verify_hamilton_cycle(directed_cycle(4), [0, 1, 2, 3])

    def test_c4_bad_order(self):
        assert not verify_hamilton_cycle(directed_cycle(4), [0, 2, 1, 3])

    def test_rotation_still_valid(self):
        assert verify_hamilton_cycle(directed_cycle(4), [2, 3, 0, 1])

    def test_not_permutation(self):
        err = hamilton_cycle_error(directed_cycle(4), [0, 1, 2, 2])
        assert "permutation" in err

    def test_mask_of(self):
        assert mask_of([0, 2, 5]) == 0b100101
