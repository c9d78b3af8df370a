import pytest

from hamlab.generators import (
    GeneratorSpec,
    counterexample,
    prop15_digraph,
    prop15_oriented,
    prop71_oriented,
    prop72_oriented,
    random_regular,
    regular_tournament,
)
from hamlab.graph import graph_profile
from hamlab.oracle import find_hamilton_exact, strong_k_connectivity, strongly_well_connected


class TestRegularTournament:
    def test_m5(self):
        g = regular_tournament(5)
        p = graph_profile(g)
        assert p.is_regular == 2 and p.edge_count == 10 and p.is_oriented

    def test_m3_triangle(self):
        g = regular_tournament(3)
        assert g.edges() == [(0, 1), (1, 2), (2, 0)]

    def test_m7_hamiltonian(self):
        res = find_hamilton_exact(regular_tournament(7))
        assert res.found

    def test_even_rejected(self):
        with pytest.raises(ValueError):
            regular_tournament(6)


class TestProp15Digraph:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_contract(self, n):
        g = prop15_digraph(n)
        p = graph_profile(g)
        assert p.n == 2 * n and p.is_regular == n - 1 and not p.is_oriented

    def test_not_hamiltonian(self):
        assert find_hamilton_exact(prop15_digraph(3)).outcome == "not_hamiltonian"

    def test_strongly_2_connected_not_swc(self):
        g = prop15_digraph(3)
        assert strong_k_connectivity(g, 2)
        assert strongly_well_connected(g).status == "false"

    def test_minimum_n(self):
        with pytest.raises(ValueError):
            prop15_digraph(2)


class TestProp15Oriented:
    def test_structure(self):
        g = prop15_oriented(3)
        p = graph_profile(g)
        assert p.n == 14 and p.is_regular == 2 and p.is_oriented

    def test_not_hamiltonian(self):
        assert find_hamilton_exact(prop15_oriented(3)).outcome == "not_hamiltonian"

    def test_strongly_2_connected(self):
        assert strong_k_connectivity(prop15_oriented(3), 2)


class TestProp71:
    def test_structure(self):
        g = prop71_oriented(1)
        p = graph_profile(g)
        assert p.n == 23 and p.is_regular == 3 and p.is_oriented

    def test_cut_gives_three_components(self):
        from hamlab.oracle import weak_component_count

        g = prop71_oriented(1)
        z = 21
        assert weak_component_count(g, [z, z + 1]) == 3

    def test_n2_structure(self):
        p = graph_profile(prop71_oriented(2))
        assert p.n == 41 and p.is_regular == 6 and p.is_oriented


class TestProp72:
    def test_structure(self):
        g = prop72_oriented(1)
        p = graph_profile(g)
        assert p.n == 17 and p.is_regular == 2 and p.is_oriented

    def test_cut_a_gives_five_components(self):
        from hamlab.oracle import weak_component_count

        g = prop72_oriented(1)
        assert weak_component_count(g, range(4)) == 5

    def test_n2_structure(self):
        p = graph_profile(prop72_oriented(2))
        assert p.n == 33 and p.is_regular == 4 and p.is_oriented


class TestRandomRegular:
    def test_one_regular_is_cycle_cover(self):
        g = random_regular(6, 1, oriented=False, seed=0)
        p = graph_profile(g)
        assert p.is_regular == 1

    def test_oriented_profile(self):
        g = random_regular(9, 4, oriented=True, seed=7)
        p = graph_profile(g)
        assert p.is_regular == 4 and p.is_oriented

    def test_oriented_bound_rejected(self):
        with pytest.raises(ValueError):
            random_regular(4, 2, oriented=True, seed=0)

    def test_deterministic(self):
        a = random_regular(12, 3, oriented=False, seed=42)
        b = random_regular(12, 3, oriented=False, seed=42)
        assert a == b

    @pytest.mark.parametrize("seed", range(5))
    def test_varied_seeds_digraph(self, seed):
        g = random_regular(14, 5, oriented=False, seed=seed)
        assert graph_profile(g).is_regular == 5

    @pytest.mark.parametrize("seed", range(5))
    def test_varied_seeds_oriented(self, seed):
        g = random_regular(15, 6, oriented=True, seed=seed)
        p = graph_profile(g)
        assert p.is_regular == 6 and p.is_oriented


class TestCounterexampleRecords:
    def test_prop15_record(self):
        g, props = counterexample(GeneratorSpec("prop15_digraph", 4))
        assert props.vertex_count == 8 == g.n
        assert props.degree == 3 and props.hamiltonian is False

    def test_prop71_record_cut(self):
        g, props = counterexample(GeneratorSpec("prop71_oriented", 1))
        assert props.natural_cut == (21, 22) and props.cut_components == 3

    def test_random_spec_needs_degree(self):
        with pytest.raises(ValueError):
            counterexample(GeneratorSpec("random_regular_digraph", 10))
