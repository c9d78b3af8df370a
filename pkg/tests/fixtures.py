"""Shared test fixtures: planted k^2-partition instances.

Builds d-regular (di)graphs whose edges are good for a prescribed partition
except for an explicit plan of bad edges; the plan must satisfy the regular
counting identity d*(|V_i*| - |V_*i|) = sum_j (bad_out_ij - bad_in_ji), or
no regular graph exists and construction fails.
"""

from __future__ import annotations

import itertools
import random

from hamlab.graph import Digraph
from hamlab.partitions import KSquarePartition


def _fill_block(rng, left_need, right_need, used, oriented, forbid_self=True):
    """Randomized greedy bipartite fill: left vertex u gets left_need[u] distinct
    partners v with right_need[v] > 0.  Returns edge list or None on dead end."""
    edges = []
    order = sorted(left_need)
    rng.shuffle(order)
    for u in order:
        for _ in range(left_need[u]):
            cands = [
                v
                for v, need in right_need.items()
                if need > 0
                and (not forbid_self or v != u)
                and (u, v) not in used
                and (not oriented or (v, u) not in used)
            ]
            if not cands:
                return None
            cands.sort(key=lambda v: (-right_need[v], rng.random()))
            v = cands[0]
            right_need[v] -= 1
            used.add((u, v))
            edges.append((u, v))
    return edges


def planted_partition(
    cell_sizes: list[list[int]],
    d: int,
    bad_plan: dict[tuple[int, int], int],
    seed: int = 0,
    oriented: bool = False,
    tries: int = 200,
) -> tuple[Digraph, KSquarePartition]:
    """d-regular graph with the given k^2 cell sizes whose bad edges are
    exactly the planned counts per off-diagonal block."""
    k = len(cell_sizes)
    n = sum(sum(row) for row in cell_sizes)
    cells = {}
    nxt = 0
    for i in range(k):
        for j in range(k):
            cells[(i, j)] = set(range(nxt, nxt + cell_sizes[i][j]))
            nxt += cell_sizes[i][j]
    part = KSquarePartition(k, n, cells)
    rows = [sorted(part.row(i)) for i in range(k)]
    cols = [sorted(part.col(j)) for j in range(k)]
    for i in range(k):
        lhs = d * (len(rows[i]) - len(cols[i]))
        rhs = sum(bad_plan.get((i, j), 0) for j in range(k) if j != i) - sum(
            bad_plan.get((j, i), 0) for j in range(k) if j != i
        )
        if lhs != rhs:
            raise ValueError(
                f"inconsistent plan at index {i}: d*imbalance={lhs} but bad surplus={rhs}"
            )
    for attempt in range(tries):
        rng = random.Random((seed << 16) ^ attempt)
        used: set[tuple[int, int]] = set()
        bad_out = {v: 0 for v in range(n)}
        bad_in = {v: 0 for v in range(n)}
        ok = True
        for (i, j), count in sorted(bad_plan.items()):
            if count == 0:
                continue
            if i == j:
                raise ValueError("bad plan must be off-diagonal")
            tails = rng.sample(rows[i], count)
            heads = rng.sample(cols[j], count)
            rng.shuffle(heads)
            if any(t == h for t, h in zip(tails, heads)) or any(
                (t, h) in used or (oriented and (h, t) in used)
                for t, h in zip(tails, heads)
            ):
                ok = False
                break
            for t, h in zip(tails, heads):
                used.add((t, h))
                bad_out[t] += 1
                bad_in[h] += 1
        if not ok:
            continue
        all_edges = sorted(used)
        for i in range(k):
            left_need = {u: d - bad_out[u] for u in rows[i]}
            right_need = {v: d - bad_in[v] for v in cols[i]}
            if any(x < 0 for x in left_need.values()) or any(
                x < 0 for x in right_need.values()
            ):
                ok = False
                break
            got = _fill_block(rng, left_need, right_need, used, oriented)
            if got is None:
                ok = False
                break
            all_edges += got
        if not ok:
            continue
        g = Digraph(n, sorted(set(all_edges)))
        degs = {g.out_degree(v) for v in range(n)} | {g.in_degree(v) for v in range(n)}
        if degs == {d}:
            return g, part
    raise RuntimeError("planted_partition: no feasible construction found")
