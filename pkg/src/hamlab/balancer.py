"""Balancing machinery over k^2-partitions: typed path systems, symmetric /
anti-symmetric 3-sets, anti-directed path decomposition, sign selection, the
nine- and four-partition balancing path systems, and path contraction with
exact cycle expansion.

All label gymnastics (transposes and index permutations that normalize the
imbalances) happen in an explicit relabeling layer; outputs are always mapped
back to, and verified against, the caller's coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .graph import Digraph, PathSystem, bits, hamilton_cycle_error, mask_of
from .matchings import HypothesisViolation, cycle_free_path_systems
from .oracle import crossing_pair
from .partitions import KSquarePartition, bad_edges

__all__ = [
    "TypedPathSystem",
    "ThreeSetClass",
    "classify_three_set",
    "AntiDirectedPath",
    "Decomposition",
    "decompose_anti_directed",
    "choose_signs",
    "BalanceResult",
    "balance_nine",
    "balance_four",
    "WellConnectivityRefuted",
    "ContractionRecord",
    "contract",
    "expand_cycle",
]

_FORWARD_TYPES = {(0, 1), (1, 2), (2, 0)}
_BACKWARD_TYPES = {(1, 0), (2, 1), (0, 2)}


@dataclass(frozen=True)
class TypedPathSystem:
    """A path system whose edges all run from V_i* to V_*j (type i -> j)."""

    system: PathSystem
    source: int
    target: int

    @staticmethod
    def build(system: PathSystem, source: int, target: int, p: KSquarePartition) -> "TypedPathSystem":
        if source == target:
            raise ValueError("typed systems need source != target")
        row = p.row(source)
        col = p.col(target)
        for u, v in system.edges:
            if u not in row or v not in col:
                raise ValueError(f"edge ({u},{v}) is not type {source+1}{target+1}")
        return TypedPathSystem(system, source, target)

    @property
    def type_pair(self) -> tuple[int, int]:
        return (self.source, self.target)


@dataclass(frozen=True)
class ThreeSetClass:
    classification: str  # "symmetric" | "anti_symmetric"
    special: Optional[int]  # index into the input list, anti-symmetric only


def classify_three_set(systems: Sequence[TypedPathSystem]) -> ThreeSetClass:
    """Symmetric iff the three types form one directed-triangle orientation
    class; otherwise the lone minority-orientation system is special."""
    if len(systems) != 3:
        raise ValueError("need exactly three typed path systems")
    types = [s.type_pair for s in systems]
    if len(set(types)) != 3:
        raise ValueError("types must be pairwise distinct")
    fwd = [i for i, t in enumerate(types) if t in _FORWARD_TYPES]
    bwd = [i for i, t in enumerate(types) if t in _BACKWARD_TYPES]
    if len(fwd) == 3 or len(bwd) == 3:
        return ThreeSetClass("symmetric", None)
    special = fwd[0] if len(fwd) == 1 else bwd[0]
    return ThreeSetClass("anti_symmetric", special)


@dataclass(frozen=True)
class AntiDirectedPath:
    """Maximal anti-directed path: ordered edges, no two consecutive aligned."""

    edges: tuple[tuple[int, int], ...]
    owners: tuple[int, ...]  # index of the source system per edge

    @property
    def length(self) -> int:
        return len(self.edges)

    def sort_key(self):
        return tuple(sorted(self.edges))


@dataclass(frozen=True)
class Decomposition:
    kind: str  # "paths_and_cycles" | "anti_directed"
    paths: tuple[AntiDirectedPath, ...]
    special: Optional[int]


def _link_parity(e: tuple[int, int], f: tuple[int, int]) -> Optional[int]:
    """The shared vertex if e and f are anti-aligned (head-head or tail-tail)."""
    if e[1] == f[1]:
        return e[1]
    if e[0] == f[0]:
        return e[0]
    return None


def decompose_anti_directed(
    systems: Sequence[TypedPathSystem], p: KSquarePartition
) -> Decomposition:
    """Symmetric 3-sets give a disjoint union of paths and cycles (verified);
    anti-symmetric 3-sets are split into maximal anti-directed paths of
    length at most three, middle / unique edge in the special system."""
    cls = classify_three_set(systems)
    tagged: list[tuple[tuple[int, int], int]] = []
    seen: set[tuple[int, int]] = set()
    for idx, ts in enumerate(systems):
        for e in sorted(ts.system.edges):
            if e in seen:
                raise ValueError(f"systems are not edge-disjoint at {e}")
            seen.add(e)
            tagged.append((e, idx))
    owner_map = dict(tagged)
    if cls.classification == "symmetric":
        succ: dict[int, int] = {}
        pred: dict[int, int] = {}
        for (u, v), _ in tagged:
            if u in succ or v in pred:
                raise ValueError("symmetric union is not a union of paths/cycles")
            succ[u] = v
            pred[v] = u
        comps: list[AntiDirectedPath] = []
        visited: set[int] = set()
        for start in sorted(succ):
            if start in pred or start in visited:
                continue
            path = [start]
            while path[-1] in succ:
                path.append(succ[path[-1]])
            visited.update(path)
            es = tuple((path[i], path[i + 1]) for i in range(len(path) - 1))
            comps.append(AntiDirectedPath(es, tuple(owner_map[e] for e in es)))
        for start in sorted(succ):  # leftovers are directed cycles
            if start in visited:
                continue
            cyc = [start]
            while succ[cyc[-1]] != cyc[0]:
                cyc.append(succ[cyc[-1]])
            visited.update(cyc)
            es = tuple((cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc)))
            comps.append(AntiDirectedPath(es, tuple(owner_map[e] for e in es)))
        comps.sort(key=AntiDirectedPath.sort_key)
        return Decomposition("paths_and_cycles", tuple(comps), None)
    # anti-symmetric: walk maximal anti-directed paths
    unused: dict[tuple[int, int], int] = dict(tagged)
    by_head: dict[int, list[tuple[int, int]]] = {}
    by_tail: dict[int, list[tuple[int, int]]] = {}
    for e, _ in tagged:
        by_tail.setdefault(e[0], []).append(e)
        by_head.setdefault(e[1], []).append(e)

    def partners(e: tuple[int, int], at: int) -> list[tuple[int, int]]:
        cands = by_head.get(at, []) if e[1] == at else []
        cands = cands + (by_tail.get(at, []) if e[0] == at else [])
        return [f for f in cands if f != e and f in unused]

    paths: list[AntiDirectedPath] = []
    for e0, _tag in tagged:
        if e0 not in unused:
            continue
        chain = [e0]
        del unused[e0]
        # grow on both undirected ends
        for end_pos in (0, 1):
            while True:
                edge = chain[-1] if end_pos else chain[0]
                prev = chain[-2] if end_pos and len(chain) > 1 else (chain[1] if not end_pos and len(chain) > 1 else None)
                # the exposed vertex of `edge` is the endpoint not shared with prev
                if prev is None:
                    exposed = [edge[0], edge[1]]
                else:
                    shared = set(edge) & set(prev)
                    exposed = [v for v in edge if v not in shared]
                ext = None
                for at in exposed:
                    for f in sorted(partners(edge, at)):
                        other = f[0] if f[1] == at else f[1]
                        if any(other in g_ for g_ in chain):
                            raise ValueError("anti-directed walk revisited a vertex")
                        ext = f
                        break
                    if ext:
                        break
                if ext is None:
                    break
                del unused[ext]
                if end_pos:
                    chain.append(ext)
                else:
                    chain.insert(0, ext)
        owners = tuple(owner_map[e] for e in chain)
        paths.append(AntiDirectedPath(tuple(chain), owners))
    special = cls.special
    for path in paths:
        if path.length > 3:
            raise ValueError("anti-directed path longer than three edges")
        special_count = sum(1 for o in path.owners if o == special)
        if path.length == 2 and special_count != 1:
            raise ValueError("length-2 anti-directed path without a unique special edge")
        if path.length == 3:
            if len(set(path.owners)) != 3 or path.owners[1] != special:
                raise ValueError("length-3 anti-directed path is not special-centered")
    paths.sort(key=AntiDirectedPath.sort_key)
    return Decomposition("anti_directed", tuple(paths), special)


def choose_signs(t: int, xs: Sequence[int]) -> tuple[int, int, int, int, int]:
    """Signs m with m1x1+m2x2+m3x3 = t = m1x1+m4x4+m5x5; first in the scan
    over all 32 sign vectors (-1 before +1)."""
    if t not in (0, 1) or len(xs) != 5 or any(x not in (0, 1) for x in xs):
        raise ValueError("t and the five x_i must be bits")
    x1, x2, x3, x4, x5 = xs
    if (x1 + x2 + x3) % 2 != t % 2 or (x1 + x4 + x5) % 2 != t % 2:
        raise ValueError("congruence precondition violated")
    for ms in itertools.product((-1, 1), repeat=5):
        m1, m2, m3, m4, m5 = ms
        if m1 * x1 + m2 * x2 + m3 * x3 == t == m1 * x1 + m4 * x4 + m5 * x5:
            return ms
    raise AssertionError("sign scan exhausted despite congruence")  # unreachable


# -- balancing -----------------------------------------------------------------


@dataclass(frozen=True)
class BalanceResult:
    system: PathSystem
    a_matrix: dict
    imbalances: tuple[int, ...]
    case: str
    edge_bound: Optional[Fraction] = None  # reported, not asserted

    def to_json_dict(self) -> dict:
        return {
            "edges": sorted(list(e) for e in self.system.edges),
            "a_matrix": {f"{i+1}{j+1}": v for (i, j), v in sorted(self.a_matrix.items())},
            "imbalances": list(self.imbalances),
            "case": self.case,
            "edge_bound": str(self.edge_bound) if self.edge_bound is not None else None,
        }


class WellConnectivityRefuted(Exception):
    """Case (i) needed a non-incident opposite crossing pair and none exists;
    the bipartition is a strong-well-connectivity refutation."""

    def __init__(self, a: Iterable[int], b: Iterable[int]):
        self.a = tuple(sorted(a))
        self.b = tuple(sorted(b))
        super().__init__(f"no crossing pair across ({self.a}, {self.b})")


def _regular_degree_or_raise(g: Digraph) -> int:
    degs = {g.out_degree(v) for v in range(g.n)} | {g.in_degree(v) for v in range(g.n)}
    if len(degs) != 1:
        raise ValueError("graph must be regular")
    return degs.pop()


def _a_matrix(edges: Iterable[tuple[int, int]], p: KSquarePartition) -> dict:
    rows = {v: i for i in range(p.k) for v in p.row(i)}
    cols = {v: j for j in range(p.k) for v in p.col(j)}
    a = {(i, j): 0 for i in range(p.k) for j in range(p.k) if i != j}
    for u, v in edges:
        i, j = rows[u], cols[v]
        if i != j:
            a[(i, j)] += 1
    return a


def check_balance_identity(edges: Iterable[tuple[int, int]], p: KSquarePartition) -> bool:
    a = _a_matrix(edges, p)
    for i in range(p.k):
        lhs = sum(a.get((i, j), 0) for j in range(p.k) if j != i) - sum(
            a.get((j, i), 0) for j in range(p.k) if j != i
        )
        if lhs != len(p.row(i)) - len(p.col(i)):
            return False
    return True


def _block_edges(g: Digraph, p: KSquarePartition, i: int, j: int) -> list[tuple[int, int]]:
    cmask = p.col_mask(j)
    return [
        (u, v)
        for u in sorted(p.row(i))
        for v in bits(g.out_masks[u] & cmask)
    ]


def _check_block_degrees(g: Digraph, p: KSquarePartition, pairs: Iterable[tuple[int, int]], d: int) -> None:
    for i, j in pairs:
        es = _block_edges(g, p, i, j)
        outd: dict[int, int] = {}
        ind: dict[int, int] = {}
        for u, v in es:
            outd[u] = outd.get(u, 0) + 1
            ind[v] = ind.get(v, 0) + 1
        if any(2 * x > d for x in outd.values()) or any(2 * x > d for x in ind.values()):
            raise HypothesisViolation(
                f"block G_{i+1}{j+1} has semi-degree above d/2; "
                "the partition is not extremal enough"
            )


def balance_nine(g: Digraph, p3: KSquarePartition, seed: int = 0) -> BalanceResult:
    """A path system inside the bad edges of a 9-partition whose type counts
    a_ij satisfy a_i* - a_*i = |V_i*| - |V_*i| for every i.

    Normalizes by an optional transpose plus an index permutation so the
    first two imbalances are nonnegative and the 1->2 block majority is
    forward, then runs the symmetric (three forward types) or anti-symmetric
    (special 1->3 type) selection; the result is mapped back and re-verified
    in the caller's coordinates.
    """
    if p3.k != 3:
        raise ValueError("balance_nine needs a 9-partition")
    d = _regular_degree_or_raise(g)
    orig_imbalances = tuple(p3.imbalances())

    work_g, work_p = g, p3
    transposed = False
    ni = list(work_p.imbalances())
    if sum(1 for x in ni if x < 0) >= 2:
        work_g, work_p = work_g.transpose(), work_p.transpose()
        transposed = True
        ni = list(work_p.imbalances())
    perm = sorted(range(3), key=lambda i: (ni[i] < 0, i))
    work_p = work_p.relabel(perm)
    ni = list(work_p.imbalances())
    assert ni[0] >= 0 and ni[1] >= 0

    def m(i, j):
        return len(_block_edges(work_g, work_p, i, j)) - len(_block_edges(work_g, work_p, j, i))

    if m(0, 1) < 0:
        work_p = work_p.relabel([1, 0, 2])
        ni = list(work_p.imbalances())
    m01, m20, m12 = m(0, 1), m(2, 0), m(1, 2)
    assert m12 >= m01 >= m(2, 0) and m01 >= 0
    x = Fraction(m01, d)
    s = math.floor(x)
    t_frac = x - s
    alpha = Fraction(d, 2 * g.n)  # alpha * n = d/2

    if m20 >= 0:
        case = "symmetric"
        blocks = [(1, 2), (2, 0), (0, 1)]  # types 23, 31, 12
        targets = [s + ni[1], s - ni[0], s]
    else:
        case = "anti_symmetric"
        blocks = [(0, 2), (1, 2), (0, 1)]  # A = 13 (special), B = 23, C = 12
        targets = [
            2 * ni[0] + math.floor(-2 * x),
            math.floor(2 * x) + 2 * ni[1],
            math.floor(2 * x),
        ]
    _check_block_degrees(work_g, work_p, blocks, d)
    subgraphs = [_block_edges(work_g, work_p, i, j) for i, j in blocks]
    res = cycle_free_path_systems(work_g, subgraphs, alpha, seed=seed)
    for (bi, bj), system, target in zip(blocks, res.systems, targets):
        if target < 0 or system.edge_count < target:
            raise HypothesisViolation(
                f"quota shortfall in block {bi+1}{bj+1}: "
                f"have {system.edge_count}, need {target}"
            )
    trimmed = [
        sorted(system.edges)[:target] for system, target in zip(res.systems, targets)
    ]

    if case == "symmetric":
        q_edges = sorted(e for tr in trimmed for e in tr)
    else:
        typed = [
            TypedPathSystem.build(PathSystem(tr), bi, bj, work_p)
            for (bi, bj), tr in zip(blocks, trimmed)
        ]
        decomp = decompose_anti_directed(typed, work_p)
        classes: dict[str, list[AntiDirectedPath]] = {
            "ABC": [], "AB": [], "AC": [], "A": [], "B": [], "C": []
        }
        label = {0: "A", 1: "B", 2: "C"}
        for path in decomp.paths:
            names = sorted({label[o] for o in path.owners})
            key = "".join(names)
            if key not in classes:
                raise HypothesisViolation(f"unexpected anti-directed class {key}")
            classes[key].append(path)
        r = {key: len(v) % 2 for key, v in classes.items()}
        t_hat = -math.floor(2 * t_frac) - math.floor(-2 * t_frac)
        assert (r["AB"] + r["A"] + r["C"]) % 2 == t_hat % 2 == (r["AC"] + r["A"] + r["B"]) % 2
        m_a, m_ab, m_c, m_ac, m_b = choose_signs(
            t_hat, (r["A"], r["AB"], r["C"], r["AC"], r["B"])
        )
        signs = {"A": m_a, "AB": m_ab, "C": m_c, "AC": m_ac, "B": m_b, "ABC": 1}
        q_edges = []

        def take(key: str, count: int) -> list[AntiDirectedPath]:
            assert 0 <= count <= len(classes[key]) and count == int(count)
            picked = classes[key][:count]
            classes[key] = classes[key][count:]
            return picked

        def special_edge(path: AntiDirectedPath) -> tuple[int, int]:
            return next(e for e, o in zip(path.edges, path.owners) if o == 0)

        def non_special_edges(path: AntiDirectedPath) -> list[tuple[int, int]]:
            return [e for e, o in zip(path.edges, path.owners) if o != 0]

        # steps 1-4: split the multi-edge classes between the special side
        # and the non-special side to hit the sign-selected parities
        for path in take("ABC", (len(classes["ABC"]) + r["ABC"]) // 2):
            q_edges.append(special_edge(path))
        for path in take("AB", (len(classes["AB"]) + signs["AB"] * r["AB"]) // 2):
            q_edges.append(special_edge(path))
        for path in take("AC", (len(classes["AC"]) + signs["AC"] * r["AC"]) // 2):
            q_edges.append(special_edge(path))
        for path in take("ABC", len(classes["ABC"])):
            q_edges.extend(non_special_edges(path))
        for path in take("AB", len(classes["AB"])):
            q_edges.extend(non_special_edges(path))
        for path in take("AC", len(classes["AC"])):
            q_edges.extend(non_special_edges(path))
        # step 5: singleton classes
        for key in ("A", "B", "C"):
            for path in take(key, (len(classes[key]) + signs[key] * r[key]) // 2):
                q_edges.extend(path.edges)

    system = PathSystem(q_edges)
    if not check_balance_identity(system.edges, work_p):
        raise AssertionError("balance identity failed in normalized coordinates")
    final_edges = [(v, u) for u, v in system.edges] if transposed else list(system.edges)
    final = PathSystem(final_edges)
    bad = set(bad_edges(g, p3))
    assert set(final.edges) <= bad
    if not check_balance_identity(final.edges, p3):
        raise AssertionError("balance identity failed in original coordinates")
    bound = Fraction(2 * len(bad), d) if d else None
    return BalanceResult(final, _a_matrix(final.edges, p3), orig_imbalances, case, bound)


def balance_four(
    g: Digraph, p2: KSquarePartition, well_connected: bool = True, seed: int = 0
) -> tuple[BalanceResult, KSquarePartition]:
    """The four-partition balancing cases: returns (result, partition), where
    the partition may differ from the input in the degenerate single-vertex
    case that relocates the lone off-diagonal vertex.

    Cases (with |V12| >= |V21| after an optional recorded transpose):
      both empty      -> two non-incident opposite crossing edges (needs
                         strong well-connectivity; absence refutes it),
      both nonempty   -> a path system of exactly |V12| - |V21| forward edges,
      |V12| >= 2 only -> additionally one path from V11 to V22 so both
                         off-diagonal cells are nonempty after contraction,
      |V12| = 1 only  -> a single V11 -> V22 edge, or relocate the vertex.
    """
    if p2.k != 2:
        raise ValueError("balance_four needs a 4-partition")
    d = _regular_degree_or_raise(g)
    orig_imbalances = tuple(p2.imbalances())

    transposed = False
    work_g, work_p = g, p2
    if len(work_p.cell(0, 1)) < len(work_p.cell(1, 0)):
        work_g, work_p = work_g.transpose(), work_p.transpose()
        transposed = True

    v12 = sorted(work_p.cell(0, 1))
    v21 = sorted(work_p.cell(1, 0))
    r = len(v12) - len(v21)
    alpha = Fraction(d, 2 * work_g.n)

    def finish(edges: list[tuple[int, int]], case: str, p_final: KSquarePartition):
        system = PathSystem(edges)
        if not check_balance_identity(system.edges, p_final):
            raise AssertionError("balance identity failed (normalized)")
        final_edges = [(v, u) for u, v in system.edges] if transposed else list(system.edges)
        p_out = p_final.transpose() if transposed else p_final
        final = PathSystem(final_edges)
        assert set(final.edges) <= set(bad_edges(g, p_out))
        assert check_balance_identity(final.edges, p_out)
        a = _a_matrix(final.edges, p_out)
        bound = Fraction(2 * len(bad_edges(work_g, work_p)), d) if d else None
        return BalanceResult(final, a, tuple(p_out.imbalances()), case, bound), p_out

    if not v12 and not v21:
        if not well_connected:
            raise WellConnectivityRefuted(work_p.row(0), work_p.row(1))
        pair = crossing_pair(work_g, work_p.cell(0, 0), work_p.cell(1, 1))
        if pair is None:
            raise WellConnectivityRefuted(work_p.cell(0, 0), work_p.cell(1, 1))
        (a_, b_), (c_, d_) = pair
        return finish([(a_, b_), (c_, d_)], "both-empty", work_p)

    if v21:  # both nonempty
        if r == 0:
            return finish([], "balanced", work_p)
        _check_block_degrees(work_g, work_p, [(0, 1)], d)
        block = _block_edges(work_g, work_p, 0, 1)
        res = cycle_free_path_systems(work_g, [block], alpha, seed=seed)
        if res.systems[0].edge_count < r:
            raise HypothesisViolation(
                f"quota shortfall: path system has {res.systems[0].edge_count} < r={r}"
            )
        return finish(sorted(res.systems[0].edges)[:r], "surplus", work_p)

    if len(v12) >= 2:
        _check_block_degrees(work_g, work_p, [(0, 1)], d)
        block = _block_edges(work_g, work_p, 0, 1)
        res = cycle_free_path_systems(work_g, [block], alpha, seed=seed)
        qp = res.systems[0]
        if qp.edge_count < 2 * r:
            raise HypothesisViolation(
                f"quota shortfall: need 2|V12|={2*r} edges, have {qp.edge_count}"
            )
        v11, v22 = work_p.cell(0, 0), work_p.cell(1, 1)
        bridge = next(
            (
                path
                for path in qp.paths
                if path[0] in v11 and path[-1] in v22 and len(path) - 1 <= r
            ),
            None,
        )
        if bridge is None:
            raise HypothesisViolation("no V11 -> V22 path of length <= |V12| found")
        bridge_edges = [(bridge[i], bridge[i + 1]) for i in range(len(bridge) - 1)]
        rest = [e for e in sorted(qp.edges) if e not in set(bridge_edges)]
        edges = bridge_edges + rest[: r - len(bridge_edges)]
        return finish(edges, "deficit-many", work_p)

    # |V12| = 1, V21 empty
    x_v = v12[0]
    v11, v22 = work_p.cell(0, 0), work_p.cell(1, 1)
    din = (work_g.in_masks[x_v] & mask_of(v11)).bit_count()
    dout = (work_g.out_masks[x_v] & mask_of(v22)).bit_count()
    if 2 * din > d or 2 * dout > d:
        raise HypothesisViolation("lone V12 vertex exceeds d/2 on a diagonal side")
    if 2 * din == d and 2 * dout == d:
        moved = work_p.replace_cells(
            {(0, 1): set(), (0, 0): set(work_p.cell(0, 0)) | {x_v}}
        )
        pair = crossing_pair(work_g, moved.cell(0, 0), moved.cell(1, 1))
        if pair is None:
            raise WellConnectivityRefuted(moved.cell(0, 0), moved.cell(1, 1))
        (a_, b_), (c_, d_) = pair
        return finish([(a_, b_), (c_, d_)], "lone-moved", moved)
    cands = [
        (u, v) for u in sorted(v11) for v in bits(work_g.out_masks[u] & mask_of(v22))
    ]
    if not cands:
        raise HypothesisViolation("no E(V11, V22) edge despite the degree slack")
    return finish([cands[0]], "lone-edge", work_p)


# -- contraction ---------------------------------------------------------------


@dataclass(frozen=True)
class ContractionRecord:
    """Everything needed to expand a Hamilton cycle of the contracted graph."""

    original: Digraph
    contracted: Digraph
    new_to_old: tuple[tuple[str, tuple[int, ...]], ...]  # ("v", (id,)) or ("p", path)

    def to_json_dict(self) -> dict:
        return {
            "n_original": self.original.n,
            "n_contracted": self.contracted.n,
            "map": [
                {"kind": kind, "vertices": list(vs)} for kind, vs in self.new_to_old
            ],
        }


def contract(
    g: Digraph, p: KSquarePartition, q: PathSystem
) -> tuple[Digraph, KSquarePartition, ContractionRecord]:
    """Replace each path u -> ... -> v of q by a fresh vertex with u's
    in-neighbours and v's out-neighbours, placed in cell (row(v), col(u));
    all path vertices are deleted.  Self-loops arising from v -> u edges
    are dropped."""
    if q.edge_count == 0:
        record = ContractionRecord(
            g, g, tuple(("v", (v,)) for v in range(g.n))
        )
        return g, p, record
    err_edges = [e for e in q.edges if not g.has_edge(*e)]
    if err_edges:
        raise ValueError(f"path system uses edges outside the graph: {err_edges}")
    path_list = sorted(q.paths)
    path_vertices = {v for path in path_list for v in path}
    survivors = [v for v in range(g.n) if v not in path_vertices]
    new_to_old: list[tuple[str, tuple[int, ...]]] = [("v", (v,)) for v in survivors]
    new_to_old += [("p", tuple(path)) for path in path_list]
    index = {v: i for i, v in enumerate(survivors)}
    n_new = len(survivors) + len(path_list)
    heads = {len(survivors) + i: path[0] for i, path in enumerate(path_list)}
    tails = {len(survivors) + i: path[-1] for i, path in enumerate(path_list)}
    edges = []
    for a in survivors:
        for b in bits(g.out_masks[a]):
            if b in index:
                edges.append((index[a], index[b]))
    for x in range(len(survivors), n_new):
        u, v = heads[x], tails[x]
        for b in bits(g.out_masks[v]):
            if b in index:
                edges.append((x, index[b]))
        for a in bits(g.in_masks[u]):
            if a in index:
                edges.append((index[a], x))
        for y in range(len(survivors), n_new):
            if y != x and g.has_edge(v, heads[y]):
                edges.append((x, y))
    g_new = Digraph(n_new, sorted(set(edges)))
    rows = {vtx: i for i in range(p.k) for vtx in p.row(i)}
    cols = {vtx: j for j in range(p.k) for vtx in p.col(j)}
    cells: dict[tuple[int, int], set[int]] = {
        key: set() for key in itertools.product(range(p.k), repeat=2)
    }
    for a in survivors:
        cells[p.cell_of(a)].add(index[a])
    for x in range(len(survivors), n_new):
        u, v = heads[x], tails[x]
        cells[(rows[v], cols[u])].add(x)
    p_new = KSquarePartition(p.k, n_new, cells)
    record = ContractionRecord(g, g_new, tuple(new_to_old))
    return g_new, p_new, record


def expand_cycle(record: ContractionRecord, cycle: Sequence[int]) -> list[int]:
    """Splice each replacement vertex's original path back into the cycle;
    the input is verified against the contracted graph and the output
    against the original."""
    err = hamilton_cycle_error(record.contracted, cycle)
    if err is not None:
        raise ValueError(f"cycle invalid in contracted graph: {err}")
    out: list[int] = []
    for x in cycle:
        kind, vs = record.new_to_old[x]
        out.extend(vs)
    err = hamilton_cycle_error(record.original, out)
    if err is not None:
        raise AssertionError(f"expanded cycle invalid in original graph: {err}")
    return out
