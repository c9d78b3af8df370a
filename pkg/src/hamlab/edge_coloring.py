"""Proper edge coloring of loopless multigraphs with Delta + mu colors.

Fan recoloring with folding, reduction via two-color alternating chains, and
a verified result: the palette is fixed at Delta(H) + mu(H) up front, every
returned coloring is checked proper, and a stuck fan triggers a reshuffled
retry (plus an exhaustive fallback for tiny instances) rather than ever
returning a bad coloring.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

__all__ = ["Multigraph", "EdgeColoring", "edge_color_multigraph"]


class Multigraph:
    """Loopless undirected multigraph: a list of endpoint pairs with repeats."""

    __slots__ = ("n", "edges")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        es = []
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at {u} not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range")
            es.append((min(u, v), max(u, v)))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(es))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Multigraph is immutable")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def max_degree(self) -> int:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return max(deg, default=0)

    def multiplicity(self) -> int:
        from collections import Counter

        c = Counter(self.edges)
        return max(c.values(), default=0)


@dataclass(frozen=True)
class EdgeColoring:
    """color[i] is the color of edge instance i; palette is [0, palette_size)."""

    colors: tuple[int, ...]
    palette_size: int

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.palette_size)]
        for i, c in enumerate(self.colors):
            out[c].append(i)
        return out

    def largest_class(self) -> list[int]:
        """Edge instances of the most used color; ties go to the smaller color."""
        best = max(self.classes(), key=len)
        return best


def _is_proper(h: Multigraph, colors: Sequence[Optional[int]]) -> bool:
    at_vertex: dict[int, set[int]] = {}
    for i, (u, v) in enumerate(h.edges):
        c = colors[i]
        if c is None:
            return False
        for w in (u, v):
            s = at_vertex.setdefault(w, set())
            if c in s:
                return False
            s.add(c)
    return True


class _FanStuck(Exception):
    pass


class _Coloring:
    """Mutable coloring state over a fixed palette."""

    def __init__(self, h: Multigraph, palette: int, order: Sequence[int]):
        self.h = h
        self.k = palette
        self.color: list[Optional[int]] = [None] * h.edge_count
        self.incident: list[list[int]] = [[] for _ in range(h.n)]
        for i, (u, v) in enumerate(h.edges):
            self.incident[u].append(i)
            self.incident[v].append(i)
        self.at: list[dict[int, int]] = [dict() for _ in range(h.n)]  # color -> edge
        self.order = order

    def other(self, e: int, v: int) -> int:
        u, w = self.h.edges[e]
        return w if v == u else u

    def missing(self, v: int) -> set[int]:
        return set(range(self.k)) - set(self.at[v])

    def assign(self, e: int, c: int) -> None:
        u, v = self.h.edges[e]
        old = self.color[e]
        if old is not None:
            del self.at[u][old]
            del self.at[v][old]
        self.color[e] = c
        if c in self.at[u] or c in self.at[v]:
            raise _FanStuck("improper assignment attempted")
        self.at[u][c] = e
        self.at[v][c] = e

    # -- fan machinery ----------------------------------------------------

    def color_edge(self, e0: int) -> None:
        x, y = self.h.edges[e0]
        common = self.missing(x) & self.missing(y)
        if common:
            self.assign(e0, min(common))
            return
        # anchor at the lower-degree endpoint (ties: lower id)
        if (len(self.incident[y]), y) < (len(self.incident[x]), x):
            x, y = y, x
        self._fan(e0, x, y)

    def _fan(self, e0: int, x: int, y0: int) -> None:
        fan = [e0]
        rim = [y0]
        in_fan = {e0}
        missing_union = self.missing(y0)
        x_missing = self.missing(x)
        for _ in range(4 * len(self.incident[x]) + 4):
            nxt = None
            for f in self.incident[x]:
                if f not in in_fan and self.color[f] is not None and self.color[f] in missing_union:
                    nxt = f
                    break
            if nxt is None:
                raise _FanStuck("no extendable fan edge")
            fan.append(nxt)
            in_fan.add(nxt)
            yn = self.other(nxt, x)
            rim.append(yn)
            yn_missing = self.missing(yn)
            missing_union |= yn_missing
            if x_missing & yn_missing:
                self._fold(fan, rim, x)
                return
            idx = self._reducible(rim)
            if idx is not None:
                self._reduce(fan, rim, x, idx)
                return
        raise _FanStuck("fan did not terminate")

    def _fold(self, fan: list[int], rim: list[int], x: int) -> None:
        while True:
            last = rim[-1]
            common = self.missing(x) & self.missing(last)
            if not common:
                raise _FanStuck("fold without a common missing color")
            new = min(common)
            old = self.color[fan[-1]]
            self.assign(fan[-1], new)
            if len(fan) == 1:
                return
            idx = None
            for i in range(len(fan) - 1):
                if old in self.missing(rim[i]):
                    idx = i
                    break
            if idx is None:
                raise _FanStuck("fold lost its witness")
            del fan[idx + 1 :]
            del rim[idx + 1 :]

    def _reducible(self, rim: list[int]) -> Optional[int]:
        yn = rim[-1]
        yn_missing = self.missing(yn)
        for i in range(len(rim) - 1):
            if rim[i] != yn and (yn_missing & self.missing(rim[i])):
                return i
        return None

    def _reduce(self, fan: list[int], rim: list[int], x: int, i: int) -> None:
        yi, yn = rim[i], rim[-1]
        a = min(self.missing(yi) & self.missing(yn))
        b = min(self.missing(x))
        if self._chain_swap(yi, a, b, x):
            del fan[i + 1 :]
            del rim[i + 1 :]
            self._fold(fan, rim, x)
        else:
            if not self._chain_swap(yn, a, b, x):
                raise _FanStuck("both alternating chains reached the anchor")
            self._fold(fan, rim, x)

    def _chain_swap(self, y: int, a: int, b: int, x: int) -> bool:
        """Walk the maximal a/b-alternating chain from y (first edge colored b);
        swap the two colors along it unless it ends at x."""
        cur = b
        z = y
        chain = []
        while cur in self.at[z]:
            e = self.at[z][cur]
            chain.append(e)
            z = self.other(e, z)
            cur = a if cur == b else b
        if z == x:
            return False
        for e in chain:  # phase 1: clear the chain
            c = self.color[e]
            u, v = self.h.edges[e]
            del self.at[u][c]
            del self.at[v][c]
            self.color[e] = None
        for t, e in enumerate(chain):  # phase 2: re-add with toggled colors
            new = a if t % 2 == 0 else b  # walk started on a b-edge
            u, v = self.h.edges[e]
            self.color[e] = new
            self.at[u][new] = e
            self.at[v][new] = e
        return True

    def run(self) -> None:
        for e in self.order:
            self.color_edge(e)


def _brute_force(h: Multigraph, palette: int) -> Optional[list[int]]:
    """Exhaustive proper coloring with the given palette (tiny inputs only)."""
    colors: list[Optional[int]] = [None] * h.edge_count
    at: list[set[int]] = [set() for _ in range(h.n)]

    def rec(i: int) -> bool:
        if i == h.edge_count:
            return True
        u, v = h.edges[i]
        for c in range(palette):
            if c not in at[u] and c not in at[v]:
                colors[i] = c
                at[u].add(c)
                at[v].add(c)
                if rec(i + 1):
                    return True
                at[u].discard(c)
                at[v].discard(c)
        colors[i] = None
        return False

    return [c for c in colors] if rec(0) else None  # type: ignore[misc]


def edge_color_multigraph(h: Multigraph, retries: int = 32) -> EdgeColoring:
    """Proper edge coloring with at most Delta(H) + mu(H) colors.

    The fan algorithm colors one edge at a time; a stuck fan restarts the
    whole coloring under a reshuffled edge order (seeded by the attempt
    index).  Instances of at most 10 edges fall back to exhaustive search
    as a last resort.  The returned coloring is always verified proper.
    """
    if h.edge_count == 0:
        return EdgeColoring((), 0)
    palette = h.max_degree() + h.multiplicity()
    base = list(range(h.edge_count))
    for attempt in range(retries):
        order = base[:]
        if attempt:
            random.Random(attempt).shuffle(order)
        state = _Coloring(h, palette, order)
        try:
            state.run()
        except _FanStuck:
            continue
        colors = state.color
        if _is_proper(h, colors):
            return EdgeColoring(tuple(colors), palette)  # type: ignore[arg-type]
    if h.edge_count <= 10:
        colors = _brute_force(h, palette)
        if colors is not None:
            return EdgeColoring(tuple(colors), palette)
    raise RuntimeError("edge coloring failed within the Delta+mu palette")
