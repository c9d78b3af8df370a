"""k^2-partitions: construction from witnesses, good/bad edge classification,
validation, coarsening, and extremalization by single-vertex moves.

Cells are 0-indexed internally; JSON keys use the 1-based digit-pair style
("11", "12", ...).  A partition is "extremal" here in the local sense: no
single-vertex cell move strictly decreases the bad-edge count while
respecting the tau size floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .expander import ExpansionParams, ExpansionWitness, is_witness, robust_out_neighbourhood
from .graph import Digraph, bits, mask_of

__all__ = [
    "KSquarePartition",
    "PartitionParams",
    "PartitionReport",
    "partition_from_witness",
    "bad_edges",
    "good_edges",
    "validate_partition",
    "coarsen",
    "extremalize",
]


@dataclass(frozen=True)
class PartitionParams:
    tau: Fraction
    gamma: Fraction

    def __post_init__(self):
        if not (0 < self.tau < 1 and 0 < self.gamma):
            raise ValueError(f"need 0 < tau < 1 and gamma > 0, got {self}")


class KSquarePartition:
    """k x k array of cells V_ij partitioning [0, n); cells may be empty."""

    __slots__ = ("k", "n", "cells")

    def __init__(self, k: int, n: int, cells: dict[tuple[int, int], Iterable[int]]):
        if k not in (2, 3):
            raise ValueError("only k=2 and k=3 partitions are supported")
        full: dict[tuple[int, int], frozenset[int]] = {}
        seen: set[int] = set()
        total = 0
        for i in range(k):
            for j in range(k):
                cell = frozenset(cells.get((i, j), ()))
                for v in cell:
                    if not 0 <= v < n:
                        raise ValueError(f"vertex {v} out of range")
                total += len(cell)
                seen |= cell
                full[(i, j)] = cell
        if total != n or len(seen) != n:
            raise ValueError("cells must partition the vertex set")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "cells", full)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("KSquarePartition is immutable")

    def cell(self, i: int, j: int) -> frozenset[int]:
        return self.cells[(i, j)]

    def row(self, i: int) -> frozenset[int]:
        """Row union V_i* = union_j V_ij."""
        return frozenset().union(*(self.cells[(i, j)] for j in range(self.k)))

    def col(self, j: int) -> frozenset[int]:
        """Column union V_*j = union_i V_ij."""
        return frozenset().union(*(self.cells[(i, j)] for i in range(self.k)))

    def row_mask(self, i: int) -> int:
        return mask_of(self.row(i))

    def col_mask(self, j: int) -> int:
        return mask_of(self.col(j))

    def cell_of(self, v: int) -> tuple[int, int]:
        for key, cell in self.cells.items():
            if v in cell:
                return key
        raise ValueError(f"vertex {v} not in partition")

    def imbalances(self) -> list[int]:
        """n_i = |V_i*| - |V_*i| for each i; these sum to zero."""
        return [len(self.row(i)) - len(self.col(i)) for i in range(self.k)]

    def relabel(self, perm: Sequence[int]) -> "KSquarePartition":
        """Apply an index permutation: new cell (i,j) = old cell (perm[i], perm[j])."""
        return KSquarePartition(
            self.k, self.n,
            {(i, j): self.cells[(perm[i], perm[j])] for i in range(self.k) for j in range(self.k)},
        )

    def transpose(self) -> "KSquarePartition":
        """Cell (i,j) -> (j,i); matches reversing all edges of the graph."""
        return KSquarePartition(
            self.k, self.n,
            {(i, j): self.cells[(j, i)] for i in range(self.k) for j in range(self.k)},
        )

    def replace_cells(self, updates: dict[tuple[int, int], Iterable[int]]) -> "KSquarePartition":
        new = {key: set(cell) for key, cell in self.cells.items()}
        new.update({key: set(val) for key, val in updates.items()})
        return KSquarePartition(self.k, self.n, new)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, KSquarePartition)
            and self.k == other.k
            and self.n == other.n
            and self.cells == other.cells
        )

    def __repr__(self) -> str:
        sizes = {f"{i+1}{j+1}": len(self.cells[(i, j)]) for i in range(self.k) for j in range(self.k)}
        return f"KSquarePartition(k={self.k}, sizes={sizes})"

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "cells": {
                f"{i+1}{j+1}": sorted(self.cells[(i, j)])
                for i in range(self.k)
                for j in range(self.k)
            },
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "KSquarePartition":
        k = int(data["k"])
        cells = {}
        for key, vals in data["cells"].items():
            i, j = int(key[0]) - 1, int(key[1]) - 1
            cells[(i, j)] = [int(v) for v in vals]
        return cls(k, int(data["n"]), cells)


def partition_from_witness(g: Digraph, w: ExpansionWitness, params: ExpansionParams) -> KSquarePartition:
    """The 4-partition V11 = S&RN, V12 = S-RN, V21 = RN-S, V22 = rest.

    Rechecks the witness first: a stale witness (graph changed, or the
    inequality no longer strict) is rejected.
    """
    if not is_witness(g, w.members, params):
        raise ValueError("stale witness: recheck against the graph failed")
    s = set(w.members)
    rn = robust_out_neighbourhood(g, s, params.nu)
    rest = set(range(g.n)) - s - rn
    return KSquarePartition(
        2, g.n,
        {(0, 0): s & rn, (0, 1): s - rn, (1, 0): rn - s, (1, 1): rest},
    )


def bad_edges(g: Digraph, p: KSquarePartition) -> list[tuple[int, int]]:
    """Union over i != j of E(V_i*, V_*j)."""
    col_masks = [p.col_mask(j) for j in range(p.k)]
    out = []
    for i in range(p.k):
        bad_mask = 0
        for j in range(p.k):
            if j != i:
                bad_mask |= col_masks[j]
        for u in sorted(p.row(i)):
            for v in bits(g.out_masks[u] & bad_mask):
                out.append((u, v))
    return sorted(out)


def good_edges(g: Digraph, p: KSquarePartition) -> list[tuple[int, int]]:
    """Union over i of E(V_i*, V_*i); complement of the bad edges."""
    out = []
    for i in range(p.k):
        cmask = p.col_mask(i)
        for u in sorted(p.row(i)):
            for v in bits(g.out_masks[u] & cmask):
                out.append((u, v))
    return sorted(out)


@dataclass(frozen=True)
class PartitionReport:
    k: int
    bad_edge_count: int
    row_sizes: tuple[int, ...]
    col_sizes: tuple[int, ...]
    imbalances: tuple[int, ...]  # n_i = |V_i*| - |V_*i|
    size_floor_ok: bool
    bad_bound_ok: bool
    regular_identity_ok: Optional[bool]  # None when the graph is not regular

    @property
    def valid(self) -> bool:
        return self.size_floor_ok and self.bad_bound_ok

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "bad_edge_count": self.bad_edge_count,
            "row_sizes": list(self.row_sizes),
            "col_sizes": list(self.col_sizes),
            "imbalances": list(self.imbalances),
            "size_floor_ok": self.size_floor_ok,
            "bad_bound_ok": self.bad_bound_ok,
            "regular_identity_ok": self.regular_identity_ok,
            "valid": self.valid,
        }


def _regular_degree(g: Digraph) -> Optional[int]:
    degs = {g.out_degree(v) for v in range(g.n)} | {g.in_degree(v) for v in range(g.n)}
    return degs.pop() if len(degs) == 1 else None


def validate_partition(g: Digraph, p: KSquarePartition, params: PartitionParams) -> PartitionReport:
    """Check the (k^2, tau, gamma) conditions and, for regular g, the exact
    counting identity d*(|V_i*| - |V_*i|) = sum_{j != i} (e(G_ij) - e(G_ji))."""
    n = g.n
    rows = [p.row(i) for i in range(p.k)]
    cols = [p.col(j) for j in range(p.k)]
    bad_count = len(bad_edges(g, p))
    floor = math.ceil(params.tau * n)
    size_ok = all(len(r) >= floor for r in rows) and all(len(c) >= floor for c in cols)
    bad_ok = bad_count <= params.gamma * n * n
    imb = tuple(len(rows[i]) - len(cols[i]) for i in range(p.k))
    d = _regular_degree(g)
    identity_ok: Optional[bool] = None
    if d is not None:
        row_masks = [mask_of(r) for r in rows]
        col_masks = [mask_of(c) for c in cols]

        def e_between(rm: int, cm: int) -> int:
            return sum((g.out_masks[u] & cm).bit_count() for u in bits(rm))

        identity_ok = True
        for i in range(p.k):
            rhs = sum(
                e_between(row_masks[i], col_masks[j]) - e_between(row_masks[j], col_masks[i])
                for j in range(p.k)
                if j != i
            )
            if d * imb[i] != rhs:
                identity_ok = False
    return PartitionReport(
        p.k, bad_count,
        tuple(len(r) for r in rows), tuple(len(c) for c in cols),
        imb, size_ok, bad_ok, identity_ok,
    )


def coarsen(p: KSquarePartition, groups: Sequence[Iterable[int]]) -> KSquarePartition:
    """Merge index groups: W_{i'j'} = union of V_ij over i in I_{i'}, j in I_{j'}."""
    gl = [sorted(set(grp)) for grp in groups]
    flat = [i for grp in gl for i in grp]
    if not gl or any(not grp for grp in gl) or sorted(flat) != list(range(p.k)):
        raise ValueError("groups must be nonempty, disjoint, and cover the index set")
    ell = len(gl)
    if ell not in (2, 3):
        raise ValueError("coarsened k must be 2 or 3")
    cells = {}
    for a in range(ell):
        for b in range(ell):
            merged: set[int] = set()
            for i in gl[a]:
                for j in gl[b]:
                    merged |= p.cells[(i, j)]
            cells[(a, b)] = merged
    return KSquarePartition(ell, p.n, cells)


def extremalize(g: Digraph, p: KSquarePartition, params: PartitionParams) -> KSquarePartition:
    """Greedy single-vertex moves to a local minimum of the bad-edge count.

    A vertex w in V_ij may move to V_aj (changing its row) when it has
    strictly more out-neighbours in V_*a than in V_*i, or to V_ib (changing
    its column) when it has strictly more in-neighbours in V_b* than in V_j*.
    Moves that would push a row or column union below the tau floor are
    skipped.  Scan order: vertices ascending, row targets before column
    targets, first improving move applied; each move strictly decreases the
    nonnegative bad-edge count, so this terminates.
    """
    floor = math.ceil(params.tau * g.n)
    cells = {key: set(cell) for key, cell in p.cells.items()}
    k = p.k

    def row_size(i):
        return sum(len(cells[(i, j)]) for j in range(k))

    def col_size(j):
        return sum(len(cells[(i, j)]) for i in range(k))

    def col_mask(j):
        return mask_of(v for i in range(k) for v in cells[(i, j)])

    def row_mask(i):
        return mask_of(v for j in range(k) for v in cells[(i, j)])

    changed = True
    while changed:
        changed = False
        col_masks = [col_mask(j) for j in range(k)]
        row_masks = [row_mask(i) for i in range(k)]
        for w in range(g.n):
            i, j = next((key for key, cell in cells.items() if w in cell))
            out_by_col = [(g.out_masks[w] & col_masks[c]).bit_count() for c in range(k)]
            in_by_row = [(g.in_masks[w] & row_masks[r]).bit_count() for r in range(k)]
            move = None
            for a in range(k):
                if a != i and out_by_col[a] > out_by_col[i] and row_size(i) - 1 >= floor:
                    move = ("row", a)
                    break
            if move is None:
                for b in range(k):
                    if b != j and in_by_row[b] > in_by_row[j] and col_size(j) - 1 >= floor:
                        move = ("col", b)
                        break
            if move is not None:
                cells[(i, j)].discard(w)
                if move[0] == "row":
                    cells[(move[1], j)].add(w)
                else:
                    cells[(i, move[1])].add(w)
                changed = True
                break
    return KSquarePartition(p.k, p.n, cells)
