"""Matching engine: bounded matchings via multigraph edge coloring, joint
matchings across several matchings by random marking, and cycle-free path
system selection from edge-disjoint subgraphs.

Every operation re-verifies its own output inequalities exactly (rational
arithmetic) and raises HypothesisViolation when the input sits outside the
regime in which the guarantees are provable; nothing is silently weakened.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .edge_coloring import EdgeColoring, Multigraph, edge_color_multigraph
from .graph import Digraph, PathSystem, bits, mask_of

__all__ = [
    "HypothesisViolation",
    "BoundedMatchingResult",
    "bounded_matching",
    "JointMatchingResult",
    "joint_matching",
    "CycleFreeResult",
    "cycle_free_path_systems",
    "union_has_cycle",
]


class HypothesisViolation(ValueError):
    """The input is outside the regime in which the guarantee is provable."""


def _undirected_degrees(edges: Iterable[tuple[int, int]]) -> dict[int, int]:
    deg: dict[int, int] = {}
    for u, v in edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    return deg


def _is_matching(edges: Sequence[tuple[int, int]]) -> bool:
    seen: set[int] = set()
    for u, v in edges:
        if u in seen or v in seen or u == v:
            return False
        seen.add(u)
        seen.add(v)
    return True


# -- bounded matchings (degree-thresholded Vizing selection) ----------------


@dataclass(frozen=True)
class BoundedMatchingResult:
    matching: tuple[tuple[int, int], ...]  # directed edges of the source graph
    w_plus: frozenset[int]
    w_minus: frozenset[int]

    def to_json_dict(self) -> dict:
        return {
            "matching": [list(e) for e in self.matching],
            "w_plus": sorted(self.w_plus),
            "w_minus": sorted(self.w_minus),
        }


def check_bounded_matching(g: Digraph, d: Fraction, theta: Fraction,
                           res: BoundedMatchingResult) -> Optional[str]:
    """None iff the (i)(ii)(iii) inequalities hold exactly."""
    e_g = g.edge_count
    m = len(res.matching)
    if not _is_matching(res.matching):
        return "output is not a matching"
    if any(not g.has_edge(u, v) for u, v in res.matching):
        return "matching edge not in graph"
    if 4 * theta * m + len(res.w_plus) + len(res.w_minus) < Fraction(e_g) / d:
        return "(i) fails: 4*theta*e(M) + |W+| + |W-| < e(G)/d"
    if any(u in res.w_plus or v in res.w_minus for u, v in res.matching):
        return "(ii) fails: matching touches a W set on the wrong side"
    if m > Fraction(e_g) / (theta * d):
        return "(iii) fails: e(M) > e(G)/(theta d)"
    return None


def bounded_matching(g: Digraph, d: Fraction | int, theta: Fraction) -> BoundedMatchingResult:
    """A matching avoiding the high-degree sets, sized so that
    4*theta*e(M) + |W+| + |W-| >= e(G)/d and e(M) <= e(G)/(theta*d).

    W+ / W- collect the vertices with out-/in-degree at least theta*d.
    For theta*d < 1 the empty matching works; otherwise the surviving edges
    form a multigraph whose largest Vizing color class is the matching,
    trimmed to the (iii) cap.
    """
    d = Fraction(d)
    if not 0 < theta < 1:
        raise ValueError("need 0 < theta < 1")
    if d <= 0 or any(g.out_degree(v) > d or g.in_degree(v) > d for v in range(g.n)):
        raise ValueError("need Delta0(g) <= d")
    w_plus = frozenset(v for v in range(g.n) if g.out_degree(v) >= theta * d)
    w_minus = frozenset(v for v in range(g.n) if g.in_degree(v) >= theta * d)
    if theta * d < 1:
        res = BoundedMatchingResult((), w_plus, w_minus)
    else:
        surviving = [
            (u, v)
            for u, v in g.edges()
            if u not in w_plus and v not in w_minus
        ]
        h = Multigraph(g.n, surviving)  # antiparallel pairs become parallel
        if h.edge_count == 0:
            res = BoundedMatchingResult((), w_plus, w_minus)
        else:
            coloring = edge_color_multigraph(h)
            picked = sorted(surviving[i] for i in coloring.largest_class())
            cap = Fraction(g.edge_count) / (theta * d)
            while len(picked) > cap:
                picked.pop()  # drop the lexicographically largest
            res = BoundedMatchingResult(tuple(picked), w_plus, w_minus)
    err = check_bounded_matching(g, d, theta, res)
    if err is not None:
        raise HypothesisViolation(f"bounded_matching: {err}")
    return res


# -- joint matchings across several matchings --------------------------------


@dataclass(frozen=True)
class JointMatchingResult:
    matching: tuple[tuple[int, int], ...]
    per_input_counts: tuple[int, ...]
    retries: int
    method: str  # "random_marking" | "exact_fallback" | "trivial"


def _quotas_met(counts: Sequence[int], sizes: Sequence[int], r: int) -> bool:
    return all(c * (r * r + 1) >= s for c, s in zip(counts, sizes))


def joint_matching(
    matchings: Sequence[Sequence[tuple[int, int]]],
    r: Optional[int] = None,
    seed: int = 0,
    retry_cap: int = 64,
    exact_cap: int = 24,
) -> JointMatchingResult:
    """A single matching H inside the union with |H & M_i| >= e(M_i)/(r^2+1).

    Random marking, as many times as the retry cap allows: every vertex of
    the union keeps one incident edge uniformly at random and marks the
    rest; the unmarked edges form a matching.  On cap exhaustion, unions of
    at most `exact_cap` edges get an exhaustive search; otherwise the
    failure signals that the e(M_i) sizes are too small for the guarantee.
    """
    ms = [list(dict.fromkeys(m)) for m in matchings]
    for i, m in enumerate(ms):
        if not _is_matching(m):
            raise ValueError(f"input {i} is not a matching")
    all_edges = [e for m in ms for e in m]
    if len(set(all_edges)) != len(all_edges):
        raise ValueError("input matchings must be pairwise edge-disjoint")
    deg = _undirected_degrees(all_edges)
    max_deg = max(deg.values(), default=0)
    if r is None:
        r = max_deg
    elif max_deg > r:
        raise ValueError(f"union degree {max_deg} exceeds r={r}")
    sizes = [len(m) for m in ms]
    owner = {e: i for i, m in enumerate(ms) for e in m}

    def counts_of(h: Iterable[tuple[int, int]]) -> tuple[int, ...]:
        c = [0] * len(ms)
        for e in h:
            c[owner[e]] += 1
        return tuple(c)

    if max_deg <= 1:  # the union is already a matching
        h = sorted(all_edges)
        return JointMatchingResult(tuple(h), counts_of(h), 0, "trivial")
    incident: dict[int, list[tuple[int, int]]] = {}
    for e in all_edges:
        for v in e:
            incident.setdefault(v, []).append(e)
    rng = random.Random(seed)
    for attempt in range(retry_cap):
        keep = {v: rng.choice(es) for v, es in sorted(incident.items())}
        h = sorted(e for e in all_edges if keep[e[0]] == e and keep[e[1]] == e)
        counts = counts_of(h)
        if _quotas_met(counts, sizes, r):
            assert _is_matching(h)
            return JointMatchingResult(tuple(h), counts, attempt, "random_marking")
    if len(all_edges) <= exact_cap:
        found = _exact_joint(all_edges, owner, sizes, r)
        if found is not None:
            h = sorted(found)
            return JointMatchingResult(tuple(h), counts_of(h), retry_cap, "exact_fallback")
    raise HypothesisViolation(
        "joint_matching: quotas unreachable; input matchings are too small "
        "for the e(M_i) > 2(r^3+r)^2 ln k regime"
    )


def _exact_joint(
    edges: list[tuple[int, int]],
    owner: dict[tuple[int, int], int],
    sizes: Sequence[int],
    r: int,
) -> Optional[list[tuple[int, int]]]:
    k = len(sizes)
    need = [math.ceil(Fraction(s, r * r + 1)) for s in sizes]
    remaining = [0] * k
    for e in edges:
        remaining[owner[e]] += 1
    chosen: list[tuple[int, int]] = []
    used: set[int] = set()
    got = [0] * k

    def rec(idx: int) -> bool:
        if all(g >= n for g, n in zip(got, need)):
            return True
        if idx == len(edges):
            return False
        # prune: even taking everything left cannot meet some quota
        if any(got[i] + remaining[i] < need[i] for i in range(k)):
            return False
        e = edges[idx]
        remaining[owner[e]] -= 1
        if e[0] not in used and e[1] not in used:
            chosen.append(e)
            used.update(e)
            got[owner[e]] += 1
            if rec(idx + 1):
                remaining[owner[e]] += 1
                return True
            got[owner[e]] -= 1
            used.difference_update(e)
            chosen.pop()
        result = rec(idx + 1)
        remaining[owner[e]] += 1
        return result

    return chosen if rec(0) else None


# -- cycle-free path systems --------------------------------------------------


def union_has_cycle(edge_sets: Iterable[Iterable[tuple[int, int]]]) -> bool:
    adj: dict[int, list[int]] = {}
    for es in edge_sets:
        for u, v in es:
            adj.setdefault(u, []).append(v)
    state: dict[int, int] = {}  # 0 = open, 1 = done

    def dfs(v: int) -> bool:
        state[v] = 0
        for w in adj.get(v, ()):
            if w not in state:
                if dfs(w):
                    return True
            elif state[w] == 0:
                return True
        state[v] = 1
        return False

    return any(v not in state and dfs(v) for v in list(adj))


@dataclass(frozen=True)
class CycleFreeResult:
    systems: tuple[PathSystem, ...]
    theta: float
    paper_interval_empty: bool
    joint_retries: int


def _choose_theta(gamma: float, alpha: float, k: int) -> tuple[float, bool]:
    """sqrt(8*gamma)/alpha < theta < 1/(8k(k^3+k)^2) when the interval exists;
    a clamped surrogate otherwise."""
    lower = math.sqrt(8 * gamma) / alpha
    upper = 1 / (8 * k * (k**3 + k) ** 2)
    empty = lower >= upper
    gm = math.sqrt(lower * upper) if lower > 0 else 0.0
    theta = min(upper / 2, max(lower * 2, gm))
    if not 0 < theta < 1:
        theta = min(max(theta, upper / 2), 1 / 2)
    return theta, empty


def cycle_free_path_systems(
    g: Digraph,
    subgraphs: Sequence[Iterable[tuple[int, int]]],
    alpha: Fraction,
    seed: int = 0,
) -> CycleFreeResult:
    """Pick a path system from each edge-disjoint subgraph so that the union
    is cycle-free and e(Q_i) = floor(e(G_i) / (alpha*n)) for every i.

    Follows the selection route: per-subgraph bounded matchings at a
    threshold theta, one joint matching across them, trimming to the exact
    quota, then a greedy completion that matches every thresholded
    high-degree vertex to a fresh partner.
    """
    subs = [sorted(set(es)) for es in subgraphs]
    k = len(subs)
    n = g.n
    alpha_n = alpha * n
    seen: set[tuple[int, int]] = set()
    for i, es in enumerate(subs):
        for u, v in es:
            if not g.has_edge(u, v):
                raise ValueError(f"subgraph {i}: edge ({u},{v}) not in graph")
            if (u, v) in seen:
                raise ValueError(f"subgraphs not edge-disjoint at ({u},{v})")
            seen.add((u, v))
        degs = _directed_degrees(es)
        if any(max(dout, din) > alpha_n for dout, din in degs.values()):
            raise ValueError(f"subgraph {i}: Delta0 exceeds alpha*n")
    quotas = [int(Fraction(len(es)) / alpha_n) if es else 0 for es in subs]
    if all(q == 0 for q in quotas) and all(not es for es in subs):
        return CycleFreeResult(tuple(PathSystem(()) for _ in subs), 0.0, False, 0)
    gamma = sum(len(es) for es in subs) / (n * n)
    theta_f, interval_empty = _choose_theta(gamma, float(alpha), max(k, 1))
    theta = Fraction(theta_f).limit_denominator(10**6)
    sub_graphs = [Digraph(n, es) for es in subs]
    bm = [bounded_matching(sg, alpha_n, theta) for sg in sub_graphs]
    in_r = [i for i in range(k) if 4 * theta * len(bm[i].matching) >= 1]
    joint_retries = 0
    n_sets: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    if in_r:
        jm = joint_matching([bm[i].matching for i in in_r], r=k, seed=seed)
        joint_retries = jm.retries
        for e in jm.matching:
            for pos, i in enumerate(in_r):
                if e in set(bm[i].matching):
                    n_sets[i].append(e)
                    break
    w_plus = [sorted(bm[i].w_plus) for i in range(k)]
    w_minus = [sorted(bm[i].w_minus) for i in range(k)]
    for i in range(k):
        have = len(n_sets[i]) + len(w_plus[i]) + len(w_minus[i])
        if have < quotas[i]:
            raise HypothesisViolation(
                f"cycle_free_path_systems: subgraph {i} cannot reach its quota "
                f"({have} < {quotas[i]}); the gamma << alpha regime does not hold"
            )
        # trim to exact equality: W- first, then W+, then joint-matching edges
        excess = have - quotas[i]
        while excess and w_minus[i]:
            w_minus[i].pop()
            excess -= 1
        while excess and w_plus[i]:
            w_plus[i].pop()
            excess -= 1
        while excess:
            n_sets[i].pop()
            excess -= 1
    used = set()
    for i in range(k):
        used.update(v for e in n_sets[i] for v in e)
        used.update(w_plus[i])
        used.update(w_minus[i])
    systems: list[PathSystem] = []
    for i in range(k):
        picked: list[tuple[int, int]] = []
        sg = sub_graphs[i]
        for a in w_plus[i]:
            b = next((v for v in sg.out_neighbors(a) if v not in used), None)
            if b is None:
                raise HypothesisViolation(
                    f"cycle_free_path_systems: no fresh out-partner for vertex {a} "
                    f"in subgraph {i}"
                )
            used.add(b)
            picked.append((a, b))
        for a in w_minus[i]:
            b = next((v for v in sg.in_neighbors(a) if v not in used), None)
            if b is None:
                raise HypothesisViolation(
                    f"cycle_free_path_systems: no fresh in-partner for vertex {a} "
                    f"in subgraph {i}"
                )
            used.add(b)
            picked.append((b, a))
        edges = sorted(set(picked) | set(n_sets[i]))
        systems.append(PathSystem(edges))
        used.update(v for e in edges for v in e)
    if union_has_cycle(s.edges for s in systems):
        raise AssertionError("cycle-free construction produced a cycle")
    for i, s in enumerate(systems):
        assert s.edge_count == quotas[i]
    return CycleFreeResult(tuple(systems), theta_f, interval_empty, joint_retries)


def _directed_degrees(edges: Iterable[tuple[int, int]]) -> dict[int, tuple[int, int]]:
    deg: dict[int, list[int]] = {}
    for u, v in edges:
        deg.setdefault(u, [0, 0])[0] += 1
        deg.setdefault(v, [0, 0])[1] += 1
    return {v: (o, i) for v, (o, i) in deg.items()}
