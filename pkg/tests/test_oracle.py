import itertools
import random

import pytest

from hamlab.graph import Digraph, verify_hamilton_cycle
from hamlab.oracle import (
    CutCertificate,
    branch_and_bound,
    check_cut_certificate,
    find_hamilton_exact,
    held_karp,
    non_hamiltonicity_certificate,
    strong_k_connectivity,
    strongly_connected,
    strongly_well_connected,
    weak_component_count,
)


def directed_cycle(n):
    return Digraph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_digraph(n):
    return Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def random_digraph(n, p, seed):
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
    return Digraph(n, edges)


class TestHeldKarp:
    def test_c4(self):
        res = held_karp(directed_cycle(4))
        assert res.found and res.cycle == (0, 1, 2, 3)

    def test_prop15_not_hamiltonian(self):
        from hamlab.generators import prop15_digraph

        res = held_karp(prop15_digraph(3))
        assert res.outcome == "not_hamiltonian" and res.exhaustive

    def test_tournament7(self):
        from hamlab.generators import regular_tournament

        res = held_karp(regular_tournament(7))
        assert res.found

    def test_two_cycle(self):
        g = Digraph(2, [(0, 1), (1, 0)])
        assert held_karp(g).found

    def test_single_vertex(self):
        assert held_karp(Digraph(1)).outcome == "not_hamiltonian"

    def test_cap(self):
        with pytest.raises(ValueError):
            held_karp(Digraph(30))


class TestBranchAndBound:
    def test_c6(self):
        res = branch_and_bound(directed_cycle(6))
        assert res.found

    def test_no_cycle(self):
        g = Digraph(4, [(0, 1), (1, 2), (2, 3)])
        res = branch_and_bound(g)
        assert res.outcome == "not_hamiltonian" and res.exhaustive

    def test_budget_exhaustion_returns_unknown(self):
        g = complete_digraph(12)
        res = branch_and_bound(g, budget=3)
        assert res.outcome in ("unknown", "found")

    def test_larger_than_hk_cap(self):
        res = find_hamilton_exact(directed_cycle(30))
        assert res.found


class TestCrossCheck:
    def test_dp_and_bnb_agree_small(self):
        rng = random.Random(11)
        for _ in range(60):
            n = rng.randint(2, 8)
            g = random_digraph(n, rng.uniform(0.1, 0.6), rng.randint(0, 10**6))
            a = held_karp(g)
            b = branch_and_bound(g, budget=10**6)
            assert a.outcome == b.outcome
            if a.found:
                assert verify_hamilton_cycle(g, a.cycle)
                assert verify_hamilton_cycle(g, b.cycle)

    def test_determinism(self):
        g = random_digraph(10, 0.4, seed=5)
        assert find_hamilton_exact(g).to_json_dict() == find_hamilton_exact(g).to_json_dict()


class TestCertificates:
    def test_component_count(self):
        g = Digraph(5, [(0, 1), (1, 0), (3, 4)])
        assert weak_component_count(g) == 3
        assert weak_component_count(g, [1]) == 3  # {0}, {2}, {3,4}

    def test_prop71_candidate(self):
        from hamlab.generators import prop71_oriented

        g = prop71_oriented(1)
        z = 3 * 7
        cert = non_hamiltonicity_certificate(g, max_cut_size=0, candidates=[(z, z + 1)])
        assert cert == CutCertificate((z, z + 1), 3)
        assert check_cut_certificate(g, cert)

    def test_prop72_candidate(self):
        from hamlab.generators import prop72_oriented

        g = prop72_oriented(1)
        cert = non_hamiltonicity_certificate(g, max_cut_size=0, candidates=[tuple(range(4))])
        assert cert is not None and cert.component_count == 5
        assert check_cut_certificate(g, cert)

    def test_c4_has_no_certificate(self):
        assert non_hamiltonicity_certificate(directed_cycle(4), max_cut_size=2) is None

    def test_search_finds_cut_without_candidates(self):
        from hamlab.generators import prop71_oriented

        g = prop71_oriented(1)
        cert = non_hamiltonicity_certificate(g, max_cut_size=2)
        assert cert is not None and cert.component_count > len(cert.cut)


class TestConnectivity:
    def test_strongly_connected(self):
        assert strongly_connected(directed_cycle(5))
        assert not strongly_connected(Digraph(3, [(0, 1), (1, 2)]))

    def test_prop15_strongly_2_connected(self):
        from hamlab.generators import prop15_digraph

        assert strong_k_connectivity(prop15_digraph(3), 2)

    def test_cycle_not_2_connected(self):
        assert strong_k_connectivity(directed_cycle(5), 1)
        assert not strong_k_connectivity(directed_cycle(5), 2)

    def test_complete_high_connectivity(self):
        assert strong_k_connectivity(complete_digraph(5), 4)

    def test_prop72_strongly_1_connected(self):
        from hamlab.generators import prop72_oriented

        assert strong_k_connectivity(prop72_oriented(1), 1)


class TestWellConnected:
    def test_directed_cycles(self):
        # C4 fails at exactly the alternating bipartition: all four crossing
        # edge pairs share a vertex.  C5 and up are strongly well-connected.
        rep4 = strongly_well_connected(directed_cycle(4))
        assert rep4.status == "false"
        assert {frozenset(w) for w in rep4.witness} == {frozenset({0, 2}), frozenset({1, 3})}
        assert strongly_well_connected(directed_cycle(5)).status == "true"
        assert strongly_well_connected(directed_cycle(6)).status == "true"

    def test_prop15_refuted_with_clique_bipartition(self):
        from hamlab.generators import prop15_digraph

        rep = strongly_well_connected(prop15_digraph(3))
        assert rep.status == "false"
        a, b = rep.witness
        assert {frozenset(a), frozenset(b)} == {frozenset(range(3)), frozenset(range(3, 6))}

    def test_complete_digraph(self):
        assert strongly_well_connected(complete_digraph(6)).status == "true"

    def test_sampled_mode_one_sided(self):
        from hamlab.generators import prop71_oriented

        rep = strongly_well_connected(prop71_oriented(1), mode="sampled", samples=200, seed=3)
        assert rep.status == "unknown"  # no violation found

    def test_too_small(self):
        with pytest.raises(ValueError):
            strongly_well_connected(directed_cycle(3))
