"""Robust outexpansion: robust nu-outneighbourhoods, witness enumeration,
and a local-search heuristic for graphs beyond the exact cap.

Thresholds are exact rational comparisons throughout (count*q >= p*n for
nu = p/q), so witnesses are bit-reproducible; see the module tests for the
boundary cases.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .graph import Digraph, bits, mask_of

__all__ = [
    "EXACT_N_CAP",
    "ExpansionParams",
    "ExpansionWitness",
    "robust_out_neighbourhood",
    "rn_plus_size",
    "size_window",
    "is_witness",
    "find_witness",
    "is_robust_outexpander",
]

EXACT_N_CAP = 22


@dataclass(frozen=True)
class ExpansionParams:
    nu: Fraction
    tau: Fraction

    def __post_init__(self):
        if not (0 < self.nu < self.tau < 1):
            raise ValueError(f"need 0 < nu < tau < 1, got nu={self.nu}, tau={self.tau}")


@dataclass(frozen=True)
class ExpansionWitness:
    """A windowed set S with |RN+(S)| < |S| + nu*n, refuting robust expansion."""

    members: frozenset[int]
    rn_size: int

    @property
    def size(self) -> int:
        return len(self.members)

    def to_json_dict(self) -> dict:
        return {"S": sorted(self.members), "rn_size": self.rn_size}


def robust_out_neighbourhood(g: Digraph, s: Iterable[int], nu: Fraction) -> set[int]:
    """RN+_nu(S) = vertices with at least nu*n in-neighbours inside S."""
    s_mask = mask_of(s)
    p, q = nu.numerator, nu.denominator
    return {
        v
        for v in range(g.n)
        if (g.in_masks[v] & s_mask).bit_count() * q >= p * g.n
    }


def rn_plus_size(g: Digraph, s_mask: int, nu: Fraction) -> int:
    p, q = nu.numerator, nu.denominator
    thresh = p * g.n
    return sum(
        1 for v in range(g.n) if (g.in_masks[v] & s_mask).bit_count() * q >= thresh
    )


def size_window(n: int, tau: Fraction) -> tuple[int, int]:
    """The set sizes tau*n <= |S| <= (1-tau)*n, as [ceil, floor]."""
    return math.ceil(tau * n), math.floor((1 - tau) * n)


def is_witness(g: Digraph, members: Iterable[int], params: ExpansionParams) -> bool:
    m = frozenset(members)
    lo, hi = size_window(g.n, params.tau)
    if not lo <= len(m) <= hi:
        return False
    rn = rn_plus_size(g, mask_of(m), params.nu)
    p, q = params.nu.numerator, params.nu.denominator
    return rn * q < len(m) * q + p * g.n


def _lex_smaller(a_mask: int, b_mask: int) -> bool:
    """For equal popcount: ascending-vertex-tuple lexicographic order.

    The smaller tuple is the one owning the lowest differing vertex.
    """
    diff = a_mask ^ b_mask
    return bool(a_mask & (diff & -diff))


def _find_witness_exact(g: Digraph, params: ExpansionParams) -> Optional[ExpansionWitness]:
    n = g.n
    lo, hi = size_window(n, params.tau)
    if lo > hi or lo > n:
        return None
    p, q = params.nu.numerator, params.nu.denominator
    n1 = n // 2
    n2 = n - n1
    # per-half tables of |N^-(v) & S_half| for every half-subset
    ind = np.zeros((n, n), dtype=np.uint8)
    for v in range(n):
        for u in bits(g.in_masks[v]):
            ind[u, v] = 1
    cnt_low = np.zeros((1 << n1, n), dtype=np.uint8)
    half_ids = np.arange(1 << n1, dtype=np.uint32)
    for u in range(n1):
        sel = (half_ids >> u) & 1 == 1
        cnt_low[sel] += ind[u]
    cnt_high = np.zeros((1 << n2, n), dtype=np.uint8)
    high_ids = np.arange(1 << n2, dtype=np.uint32)
    for u in range(n2):
        sel = (high_ids >> u) & 1 == 1
        cnt_high[sel] += ind[n1 + u]
    pc_low = np.array([x.bit_count() for x in range(1 << n1)], dtype=np.int32)
    pc_high = np.array([x.bit_count() for x in range(1 << n2)], dtype=np.int32)
    thresh = p * n
    cnt_high32 = cnt_high.astype(np.int64) * q
    best_mask: Optional[int] = None
    best_size = hi + 1
    for s_low in range(1 << n1):
        sizes = pc_high + pc_low[s_low]
        window = (sizes >= lo) & (sizes <= hi) & (sizes <= best_size)
        if not window.any():
            continue
        counts = cnt_high32 + cnt_low[s_low].astype(np.int64) * q
        rn = (counts >= thresh).sum(axis=1).astype(np.int64)
        # witness: rn*q < |S|*q + p*n
        hit = window & (rn * q < sizes.astype(np.int64) * q + thresh)
        if not hit.any():
            continue
        batch_min = int(sizes[hit].min())
        if batch_min > best_size:
            continue
        if batch_min < best_size:
            best_size = batch_min
            best_mask = None
        for s_high in np.flatnonzero(hit & (sizes == best_size)):
            mask = s_low | (int(s_high) << n1)
            if best_mask is None or _lex_smaller(mask, best_mask):
                best_mask = mask
    if best_mask is None:
        return None
    members = frozenset(bits(best_mask))
    return ExpansionWitness(members, rn_plus_size(g, best_mask, params.nu))


def _deficiency(g: Digraph, s_mask: int, params: ExpansionParams) -> int:
    """Scaled rn*q - |S|*q - p*n; negative iff the witness inequality holds."""
    p, q = params.nu.numerator, params.nu.denominator
    return rn_plus_size(g, s_mask, params.nu) * q - s_mask.bit_count() * q - p * g.n


def _find_witness_heuristic(
    g: Digraph, params: ExpansionParams, budget: int, seed: int
) -> Optional[ExpansionWitness]:
    n = g.n
    lo, hi = size_window(n, params.tau)
    if lo > hi or lo > n:
        return None
    rng = random.Random(seed)
    evals = 0
    by_out = sorted(range(n), key=lambda v: (g.out_degree(v), v))
    by_in = sorted(range(n), key=lambda v: (g.in_degree(v), v))
    seeds = [by_out[:lo], by_in[:lo], by_out[-lo:], by_in[-lo:]]
    while evals < budget:
        if seeds:
            cur = mask_of(seeds.pop(0))
        else:
            cur = mask_of(rng.sample(range(n), rng.randint(lo, hi)))
        val = _deficiency(g, cur, params)
        evals += 1
        improved = True
        while improved and evals < budget:
            if val < 0:
                members = frozenset(bits(cur))
                if is_witness(g, members, params):  # re-derive before returning
                    return ExpansionWitness(members, rn_plus_size(g, cur, params.nu))
            improved = False
            size = cur.bit_count()
            moves = []
            if size < hi:
                moves += [cur | (1 << v) for v in range(n) if not cur >> v & 1]
            if size > lo:
                moves += [cur ^ (1 << v) for v in bits(cur)]
            for v in bits(cur):
                for u in range(n):
                    if not cur >> u & 1:
                        moves.append((cur ^ (1 << v)) | (1 << u))
            best_move, best_val = None, val
            for m in moves:
                if evals >= budget:
                    break
                evals += 1
                mv = _deficiency(g, m, params)
                if mv < best_val:
                    best_move, best_val = m, mv
            if best_move is not None:
                cur, val = best_move, best_val
                improved = True
    return None


def find_witness(
    g: Digraph,
    params: ExpansionParams,
    mode: str = "exact",
    budget: int = 20_000,
    seed: int = 0,
    exact_n_cap: int = EXACT_N_CAP,
) -> Optional[ExpansionWitness]:
    """Find a non-expansion witness.

    Exact mode enumerates every windowed subset (n <= exact_n_cap) and is
    two-sided: None certifies robust (nu,tau)-outexpansion.  Heuristic mode
    is one-sided: any returned witness is re-verified, absence says nothing.
    """
    if mode == "exact":
        if g.n > exact_n_cap:
            raise ValueError(f"exact mode capped at n={exact_n_cap}, got n={g.n}")
        return _find_witness_exact(g, params)
    if mode == "heuristic":
        return _find_witness_heuristic(g, params, budget, seed)
    raise ValueError(f"unknown mode {mode!r}")


def is_robust_outexpander(g: Digraph, params: ExpansionParams,
                          exact_n_cap: int = EXACT_N_CAP) -> bool:
    """Exact decision (n <= cap): no windowed witness exists."""
    return find_witness(g, params, mode="exact", exact_n_cap=exact_n_cap) is None
