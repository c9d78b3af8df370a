"""Exact Hamiltonicity decision, cut certificates, and connectivity checks.

The Held-Karp bitmask DP gives exact Found/NotHamiltonian up to `HK_CAP`
vertices; branch-and-bound (degree forcing + reachability pruning) handles
larger instances and may return Unknown on budget exhaustion.  A cheap
branch-and-bound probe runs first so that easy instances never pay the full
DP cost; the answer for n <= HK_CAP is always exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .graph import Digraph, bits, hamilton_cycle_error, mask_of

__all__ = [
    "HK_CAP",
    "OracleResult",
    "CutCertificate",
    "find_hamilton_exact",
    "held_karp",
    "branch_and_bound",
    "non_hamiltonicity_certificate",
    "check_cut_certificate",
    "weak_component_count",
    "strongly_connected",
    "strong_k_connectivity",
    "strongly_well_connected",
    "WellConnectedness",
]

HK_CAP = 24
SWC_EXACT_CAP = 20
_PROBE_BUDGET = 50_000

_pc16: Optional[np.ndarray] = None


def _popcount_table() -> np.ndarray:
    global _pc16
    if _pc16 is None:
        _pc16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.uint8)
    return _pc16


@dataclass(frozen=True)
class OracleResult:
    """Outcome of an exact Hamiltonicity search."""

    outcome: str  # "found" | "not_hamiltonian" | "unknown"
    cycle: Optional[tuple[int, ...]] = None
    exhaustive: bool = False  # for not_hamiltonian: search space fully covered
    nodes: int = 0
    method: str = ""

    @property
    def found(self) -> bool:
        return self.outcome == "found"

    def to_json_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "cycle": list(self.cycle) if self.cycle is not None else None,
            "exhaustive": self.exhaustive,
            "nodes": self.nodes,
            "method": self.method,
        }


def _stripped_masks(g: Digraph) -> tuple[list[int], list[int]]:
    out = [g.out_masks[v] & ~(1 << v) for v in range(g.n)]
    inn = [g.in_masks[v] & ~(1 << v) for v in range(g.n)]
    return out, inn


def held_karp(g: Digraph) -> OracleResult:
    """Exact Hamiltonicity by bitmask DP over end-vertex sets (start fixed at 0)."""
    n = g.n
    if n > HK_CAP:
        raise ValueError(f"held_karp capped at n={HK_CAP}, got {n}")
    if n < 2:
        return OracleResult("not_hamiltonian", exhaustive=True, method="held_karp")
    out_m, in_m = _stripped_masks(g)
    if any(m == 0 for m in out_m) or any(m == 0 for m in in_m):
        return OracleResult("not_hamiltonian", exhaustive=True, method="held_karp")
    size = 1 << n
    dp = np.zeros(size, dtype=np.uint32)
    dp[1] = 1
    pc16 = _popcount_table()
    masks = np.arange(size, dtype=np.uint32)
    pc = pc16[masks & 0xFFFF] + pc16[masks >> 16]
    in_np = np.array(in_m, dtype=np.uint32)
    for k in range(1, n):
        layer = np.flatnonzero((pc == k) & ((masks & 1) == 1)).astype(np.uint32)
        layer = layer[dp[layer] != 0]
        if layer.size == 0:
            return OracleResult("not_hamiltonian", exhaustive=True, method="held_karp")
        vals = dp[layer]
        for v in range(1, n):
            bit = np.uint32(1 << v)
            sel = (layer & bit) == 0
            good = sel & ((vals & in_np[v]) != 0)
            if good.any():
                tgt = layer[good] | bit
                dp[tgt] |= bit
    full = size - 1
    ends = int(dp[full]) & in_m[0]
    if ends == 0:
        return OracleResult("not_hamiltonian", exhaustive=True, method="held_karp")
    # walk the DP table backwards, always taking the lowest feasible vertex
    end = (ends & -ends).bit_length() - 1
    seq_rev = [end]
    mask = full
    while mask != 1:
        mask ^= 1 << end
        cands = int(dp[mask]) & in_m[end]
        end = (cands & -cands).bit_length() - 1
        seq_rev.append(end)
    cycle = tuple(reversed(seq_rev))
    assert hamilton_cycle_error(g, cycle) is None
    return OracleResult("found", cycle=cycle, method="held_karp")


def _reachable(start_mask: int, allowed: int, adj: Sequence[int]) -> int:
    reach = start_mask & allowed
    frontier = reach
    while frontier:
        new = 0
        for v in bits(frontier):
            new |= adj[v]
        new &= allowed & ~reach
        reach |= new
        frontier = new
    return reach


def branch_and_bound(g: Digraph, budget: int = 200_000) -> OracleResult:
    """DFS from vertex 0 with degree-zero pruning and reachability pruning."""
    n = g.n
    if n < 2:
        return OracleResult("not_hamiltonian", exhaustive=True, method="branch_and_bound")
    out_m, in_m = _stripped_masks(g)
    if any(m == 0 for m in out_m) or any(m == 0 for m in in_m):
        return OracleResult("not_hamiltonian", exhaustive=True, method="branch_and_bound")
    full = (1 << n) - 1
    nodes = 0

    def prune(cur: int, visited: int) -> bool:
        rem = full & ~visited
        fwd_allowed = rem | 1
        reach = _reachable(out_m[cur] & fwd_allowed, fwd_allowed, out_m)
        if fwd_allowed & ~reach:
            return True
        back_allowed = rem | (1 << cur)
        coreach = _reachable(in_m[0] & back_allowed, back_allowed, in_m)
        if back_allowed & ~coreach:
            return True
        for v in bits(rem):
            if out_m[v] & (rem | 1) == 0:
                return True
            if in_m[v] & (rem | (1 << cur)) == 0:
                return True
        return False

    path = [0]
    # frame: iterator over successor choices for the vertex at that depth
    def choices(cur: int, visited: int) -> list[int]:
        rem = full & ~visited
        if rem == 0:
            return []
        cand = list(bits(out_m[cur] & rem))
        cand.sort(key=lambda v: ((out_m[v] & (rem | 1)).bit_count(), v))
        return cand

    stack = [iter(choices(0, 1))]
    visited = 1
    while stack:
        it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            visited ^= 1 << path.pop()
            continue
        nodes += 1
        if nodes > budget:
            return OracleResult("unknown", nodes=nodes, method="branch_and_bound")
        new_visited = visited | (1 << nxt)
        if new_visited == full:
            if out_m[nxt] & 1:
                cycle = tuple(path + [nxt])
                assert hamilton_cycle_error(g, cycle) is None
                return OracleResult("found", cycle=cycle, nodes=nodes, method="branch_and_bound")
            continue
        if prune(nxt, new_visited):
            continue
        path.append(nxt)
        visited = new_visited
        stack.append(iter(choices(nxt, visited)))
    return OracleResult("not_hamiltonian", exhaustive=True, nodes=nodes, method="branch_and_bound")


def find_hamilton_exact(g: Digraph, budget: int = 400_000, hk_cap: int = HK_CAP) -> OracleResult:
    """Exact for n <= hk_cap; beyond that branch-and-bound, Unknown on exhaustion.

    A bounded branch-and-bound probe runs first; the Held-Karp table is only
    built when the probe is inconclusive.
    """
    g = g.without_loops()
    probe = branch_and_bound(g, budget=min(budget, _PROBE_BUDGET) if g.n <= hk_cap else budget)
    if probe.outcome != "unknown":
        return probe
    if g.n <= hk_cap:
        return held_karp(g)
    return probe


# -- non-Hamiltonicity certificates ---------------------------------------


@dataclass(frozen=True)
class CutCertificate:
    """Vertex set whose removal leaves more weak components than its size."""

    cut: tuple[int, ...]
    component_count: int

    def to_json_dict(self) -> dict:
        return {"cut": list(self.cut), "component_count": self.component_count}


def weak_component_count(g: Digraph, dropped: Iterable[int] = ()) -> int:
    drop_mask = mask_of(dropped)
    alive = g.vertex_mask() & ~drop_mask
    seen = 0
    count = 0
    adj = [(g.out_masks[v] | g.in_masks[v]) for v in range(g.n)]
    for v in bits(alive):
        if seen >> v & 1:
            continue
        count += 1
        comp = _reachable(1 << v, alive, adj)
        seen |= comp
    return count


def check_cut_certificate(g: Digraph, cert: CutCertificate) -> bool:
    cut = set(cert.cut)
    if len(cut) != len(cert.cut) or any(not 0 <= v < g.n for v in cut):
        return False
    comps = weak_component_count(g, cut)
    return comps == cert.component_count and comps > len(cut)


def non_hamiltonicity_certificate(
    g: Digraph,
    max_cut_size: int = 4,
    candidates: Iterable[Iterable[int]] = (),
) -> Optional[CutCertificate]:
    """Search candidate cuts, then all cuts up to `max_cut_size`, for a witness.

    A cut C with more than |C| weak components refutes Hamiltonicity: a
    Hamilton cycle minus |C| vertices splits into at most |C| paths.
    """
    for cand in candidates:
        cut = tuple(sorted(set(cand)))
        comps = weak_component_count(g, cut)
        if comps > len(cut):
            return CutCertificate(cut, comps)
    deg = [g.out_degree(v) + g.in_degree(v) for v in range(g.n)]
    order = sorted(range(g.n), key=lambda v: (-deg[v], v))
    for size in range(1, min(max_cut_size, g.n - 1) + 1):
        for combo in itertools.combinations(order, size):
            cut = tuple(sorted(combo))
            comps = weak_component_count(g, cut)
            if comps > size:
                return CutCertificate(cut, comps)
    return None


# -- connectivity ----------------------------------------------------------


def strongly_connected(g: Digraph) -> bool:
    if g.n == 0:
        return False
    if g.n == 1:
        return True
    alive = g.vertex_mask()
    fwd = _reachable(1, alive, list(g.out_masks))
    if fwd != alive:
        return False
    bwd = _reachable(1, alive, list(g.in_masks))
    return bwd == alive


def _vertex_disjoint_paths(g: Digraph, s: int, t: int, need: int) -> int:
    """Count internally-vertex-disjoint s->t paths, stopping at `need`."""
    # split network: node 2v = v_in, 2v+1 = v_out; internal arc capped at 1
    n = g.n
    cap: dict[tuple[int, int], int] = {}

    def add(a: int, b: int, c: int) -> None:
        cap[(a, b)] = cap.get((a, b), 0) + c
        cap.setdefault((b, a), 0)

    big = n + 1
    for v in range(n):
        if v != s and v != t:
            add(2 * v, 2 * v + 1, 1)
    for u in range(n):
        for v in bits(g.out_masks[u]):
            if u == v:
                continue
            add(2 * u + 1, 2 * v, big)
    adj: dict[int, list[int]] = {}
    for a, b in cap:
        adj.setdefault(a, []).append(b)
    for lst in adj.values():
        lst.sort()
    source, sink = 2 * s + 1, 2 * t
    flow = 0
    while flow < need:
        parent = {source: source}
        queue = [source]
        while queue and sink not in parent:
            a = queue.pop(0)
            for b in adj.get(a, ()):
                if b not in parent and cap[(a, b)] > 0:
                    parent[b] = a
                    queue.append(b)
        if sink not in parent:
            break
        b = sink
        while b != source:
            a = parent[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    return flow


def strong_k_connectivity(g: Digraph, k: int) -> bool:
    """True iff g stays strongly connected after deleting any k-1 vertices."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if g.n <= 1:
        return g.n == 1
    if k == 1:
        return strongly_connected(g)
    for s in range(g.n):
        for t in range(g.n):
            if s == t or g.has_edge(s, t):
                continue
            if _vertex_disjoint_paths(g, s, t, k) < k:
                return False
    return True


@dataclass(frozen=True)
class WellConnectedness:
    """Result of a strong well-connectivity check."""

    status: str  # "true" | "false" | "unknown"
    witness: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None
    bipartitions_checked: int = 0

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "witness": [list(w) for w in self.witness] if self.witness else None,
            "bipartitions_checked": self.bipartitions_checked,
        }


def crossing_pair(g: Digraph, a_set: Iterable[int], b_set: Iterable[int]) -> Optional[tuple[tuple[int, int], tuple[int, int]]]:
    """Two non-incident edges ab (A->B) and cd (B->A), or None."""
    a_sorted = sorted(set(a_set))
    b_mask = mask_of(b_set)
    a_mask = mask_of(a_sorted)
    e1 = [(u, v) for u in a_sorted for v in bits(g.out_masks[u] & b_mask)]
    e2 = [(u, v) for u in bits(b_mask) for v in bits(g.out_masks[u] & a_mask)]
    if not e1 or not e2:
        return None
    a0, b0 = e1[0]
    for c, d in e2:
        if c != b0 and d != a0:
            return (a0, b0), (c, d)
    # every B->A edge touches {a0, b0}: few of them, scan pairs directly
    for c, d in e2:
        for a, b in e1:
            if len({a, b, c, d}) == 4:
                return (a, b), (c, d)
    return None


def strongly_well_connected(
    g: Digraph,
    mode: str = "exact",
    samples: int = 2000,
    seed: int = 0,
    exact_cap: int = SWC_EXACT_CAP,
) -> WellConnectedness:
    """Every bipartition (A,B), |A|,|B| >= 2, has non-incident opposite crossing edges.

    Exact mode enumerates all bipartitions (n <= exact_cap); sampled mode is
    one-sided: a violating bipartition refutes, absence of one is "unknown".
    """
    if g.n < 4:
        raise ValueError("strong well-connectivity needs at least 4 vertices")
    if mode == "exact":
        if g.n > exact_cap:
            raise ValueError(f"exact mode capped at n={exact_cap}, got {g.n}")
        checked = 0
        n = g.n
        for rest_mask in range(1 << (n - 1)):
            a_mask = (rest_mask << 1) | 1  # vertex 0 always in A
            size = a_mask.bit_count()
            if size < 2 or n - size < 2:
                continue
            checked += 1
            a = list(bits(a_mask))
            b = [v for v in range(n) if not a_mask >> v & 1]
            if crossing_pair(g, a, b) is None:
                return WellConnectedness("false", (tuple(a), tuple(b)), checked)
        return WellConnectedness("true", None, checked)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    import random

    rng = random.Random(seed)
    n = g.n
    for i in range(samples):
        size = rng.randint(2, n - 2)
        a = rng.sample(range(n), size)
        b = [v for v in range(n) if v not in set(a)]
        if crossing_pair(g, a, b) is None:
            return WellConnectedness("false", (tuple(sorted(a)), tuple(b)), i + 1)
    return WellConnectedness("unknown", None, samples)
