import itertools
import random
from fractions import Fraction as F

import pytest

from hamlab.expander import ExpansionParams, ExpansionWitness, find_witness, rn_plus_size
from hamlab.generators import prop15_digraph, random_regular
from hamlab.graph import Digraph, mask_of
from hamlab.partitions import (
    KSquarePartition,
    PartitionParams,
    bad_edges,
    coarsen,
    extremalize,
    good_edges,
    partition_from_witness,
    validate_partition,
)


def directed_cycle(n):
    return Digraph(n, [(i, (i + 1) % n) for i in range(n)])


def c8_partition():
    return KSquarePartition(
        2, 8, {(0, 0): {1, 2, 3}, (0, 1): {0}, (1, 0): {4}, (1, 1): {5, 6, 7}}
    )


def random_partition(n, k, rng):
    cells = {key: set() for key in itertools.product(range(k), repeat=2)}
    for v in range(n):
        cells[(rng.randrange(k), rng.randrange(k))].add(v)
    return KSquarePartition(k, n, cells)


class TestKSquarePartition:
    def test_rows_and_cols(self):
        p = c8_partition()
        assert p.row(0) == {0, 1, 2, 3} and p.col(0) == {1, 2, 3, 4}
        assert p.imbalances() == [0, 0]

    def test_cells_must_partition(self):
        with pytest.raises(ValueError):
            KSquarePartition(2, 4, {(0, 0): {0, 1}, (1, 1): {1, 2, 3}})

    def test_json_round_trip(self):
        p = c8_partition()
        assert KSquarePartition.from_json_dict(p.to_json_dict()) == p

    def test_imbalances_sum_to_zero(self):
        rng = random.Random(0)
        for _ in range(20):
            p = random_partition(12, rng.choice([2, 3]), rng)
            assert sum(p.imbalances()) == 0


class TestPartitionFromWitness:
    def test_c8(self):
        g = directed_cycle(8)
        params = ExpansionParams(F(1, 8), F(1, 4))
        w = ExpansionWitness(frozenset({0, 1, 2, 3}), 4)
        p = partition_from_witness(g, w, params)
        assert p == c8_partition()
        assert bad_edges(g, p) == []

    def test_prop15_clique_witness(self):
        g = prop15_digraph(4)
        params = ExpansionParams(F(1, 4), F(1, 3))
        members = frozenset(range(4))
        w = ExpansionWitness(members, rn_plus_size(g, mask_of(members), F(1, 4)))
        p = partition_from_witness(g, w, params)
        # the clean picture: both off-diagonal cells empty; every bridge is bad
        assert p.cell(0, 1) == frozenset() and p.cell(1, 0) == frozenset()
        assert bad_edges(g, p) == [(0, 4), (1, 5), (4, 1), (5, 0)]

    def test_stale_witness_rejected(self):
        g = complete = Digraph(8, [(u, v) for u in range(8) for v in range(8) if u != v])
        with pytest.raises(ValueError):
            partition_from_witness(
                g, ExpansionWitness(frozenset({0, 1}), 2), ExpansionParams(F(1, 8), F(1, 4))
            )


class TestBadEdges:
    def test_two_disjoint_triangles_diagonal(self):
        g = Digraph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
        p = KSquarePartition(2, 6, {(0, 0): {0, 1, 2}, (1, 1): {3, 4, 5}})
        assert bad_edges(g, p) == []

    def test_good_bad_complement(self):
        rng = random.Random(4)
        for _ in range(20):
            n = 10
            g = Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.3])
            p = random_partition(n, rng.choice([2, 3]), rng)
            b, go = bad_edges(g, p), good_edges(g, p)
            assert sorted(b + go) == sorted(g.edges())
            assert not set(b) & set(go)


class TestValidatePartition:
    def test_c8_identity(self):
        g = directed_cycle(8)
        rep = validate_partition(g, c8_partition(), PartitionParams(F(1, 8), F(1, 64)))
        assert rep.valid and rep.regular_identity_ok
        assert rep.imbalances == (0, 0) and rep.bad_edge_count == 0

    def test_regular_identity_random(self):
        rng = random.Random(11)
        for _ in range(30):
            n = rng.randint(8, 14)
            d = rng.randint(2, max(2, n // 3))
            g = random_regular(n, d, oriented=False, seed=rng.randint(0, 10**6))
            p = random_partition(n, rng.choice([2, 3]), rng)
            rep = validate_partition(g, p, PartitionParams(F(1, n), F(1, 2)))
            assert rep.regular_identity_ok

    def test_size_floor_flag(self):
        g = directed_cycle(8)
        p = KSquarePartition(2, 8, {(0, 0): {0}, (1, 1): set(range(1, 8))})
        rep = validate_partition(g, p, PartitionParams(F(1, 4), F(1, 2)))
        assert not rep.size_floor_ok and not rep.valid

    def test_cor33_imbalance_bound(self):
        # |n_i| <= gamma n^2 / d whenever bad <= gamma n^2 and g is d-regular
        rng = random.Random(2)
        for _ in range(30):
            n = rng.randint(8, 14)
            d = rng.randint(2, max(2, n // 3))
            g = random_regular(n, d, oriented=False, seed=rng.randint(0, 10**6))
            p = random_partition(n, 2, rng)
            rep = validate_partition(g, p, PartitionParams(F(1, n), F(1, 2)))
            gamma_actual = F(rep.bad_edge_count, n * n)
            for ni in rep.imbalances:
                assert abs(ni) <= gamma_actual * n * n / d


class TestCoarsen:
    def test_identity_grouping(self):
        rng = random.Random(3)
        p = random_partition(9, 3, rng)
        assert coarsen(p, [[0], [1], [2]]) == p

    def test_lemma53_grouping_shapes(self):
        rng = random.Random(5)
        p = random_partition(12, 3, rng)
        w = coarsen(p, [[2], [0, 1]])
        assert w.k == 2
        assert w.cell(0, 0) == p.cell(2, 2)
        assert w.cell(0, 1) == p.cell(2, 0) | p.cell(2, 1)
        assert w.cell(1, 0) == p.cell(0, 2) | p.cell(1, 2)

    def test_bad_edges_never_increase(self):
        rng = random.Random(6)
        for _ in range(20):
            n = 12
            g = Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.3])
            p = random_partition(n, 3, rng)
            w = coarsen(p, [[2], [0, 1]])
            assert len(bad_edges(g, w)) <= len(bad_edges(g, p))

    def test_invalid_groups(self):
        rng = random.Random(7)
        p = random_partition(9, 3, rng)
        with pytest.raises(ValueError):
            coarsen(p, [[0], [1]])
        with pytest.raises(ValueError):
            coarsen(p, [[0, 1], [1, 2]])


class TestExtremalize:
    def test_zero_bad_is_fixed_point(self):
        g = directed_cycle(8)
        p = c8_partition()
        assert extremalize(g, p, PartitionParams(F(1, 8), F(1, 64))) == p

    def test_crafted_instance_reaches_global_minimum(self):
        # two disjoint 3-cycles; start with a scrambled partition and compare
        # the fixed point against an exhaustive scan of all 4^6 assignments
        g = Digraph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
        params = PartitionParams(F(1, 6), F(1, 2))
        p0 = KSquarePartition(2, 6, {(0, 0): {0, 1}, (0, 1): {3}, (1, 1): {2, 4, 5}})
        start_bad = len(bad_edges(g, p0))
        fixed = extremalize(g, p0, params)
        fixed_bad = len(bad_edges(g, fixed))
        assert fixed_bad < start_bad
        best = min(
            len(bad_edges(g, p))
            for assignment in itertools.product(range(4), repeat=6)
            for p in [
                KSquarePartition(
                    2, 6,
                    {
                        (0, 0): {v for v in range(6) if assignment[v] == 0},
                        (0, 1): {v for v in range(6) if assignment[v] == 1},
                        (1, 0): {v for v in range(6) if assignment[v] == 2},
                        (1, 1): {v for v in range(6) if assignment[v] == 3},
                    },
                )
            ]
            if all(len(p.row(i)) >= 1 and len(p.col(i)) >= 1 for i in range(2))
        )
        assert fixed_bad == best

    def test_never_increases_bad(self):
        rng = random.Random(8)
        for _ in range(15):
            n = rng.randint(8, 12)
            d = rng.randint(2, 4)
            g = random_regular(n, d, oriented=False, seed=rng.randint(0, 10**6))
            p = random_partition(n, 2, rng)
            fixed = extremalize(g, p, PartitionParams(F(1, n), F(1, 2)))
            assert len(bad_edges(g, fixed)) <= len(bad_edges(g, p))

    def test_fixed_point_degree_inequalities(self):
        rng = random.Random(9)
        for _ in range(15):
            n = 10
            d = 4
            g = random_regular(n, d, oriented=False, seed=rng.randint(0, 10**6))
            p = random_partition(n, 2, rng)
            params = PartitionParams(F(1, n), F(1, 2))
            fixed = extremalize(g, p, params)
            floor = 1  # ceil(n * 1/n)
            for w in range(n):
                i, j = fixed.cell_of(w)
                out_by_col = [
                    (g.out_masks[w] & fixed.col_mask(c)).bit_count() for c in range(2)
                ]
                in_by_row = [
                    (g.in_masks[w] & fixed.row_mask(r)).bit_count() for r in range(2)
                ]
                # the inequality is guaranteed whenever the tau floor allows the move
                row_movable = len(fixed.row(i)) - 1 >= floor
                col_movable = len(fixed.col(j)) - 1 >= floor
                if row_movable:
                    assert all(out_by_col[a] <= out_by_col[i] for a in range(2))
                    assert out_by_col[i] >= d / 2  # good out-degree >= d/k
                if col_movable:
                    assert all(in_by_row[b] <= in_by_row[j] for b in range(2))
                    assert in_by_row[j] >= d / 2
