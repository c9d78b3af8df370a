"""Core digraph carrier: bitmask adjacency, degree queries, path systems, cycle checks.

Vertices are dense integer ids in [0, n).  All neighbourhoods are stored as
int bitmasks in both directions, since the machinery built on top queries
in-neighbourhoods as often as out-neighbourhoods.  Digraph values are
immutable after construction; every "mutation" builds a new value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

__all__ = [
    "Digraph",
    "GraphProfile",
    "PathSystem",
    "bits",
    "mask_of",
    "graph_profile",
    "edges_between",
    "is_path_system",
    "path_system_error",
    "verify_hamilton_cycle",
    "hamilton_cycle_error",
]


def mask_of(vertices: Iterable[int]) -> int:
    """Pack an iterable of vertex ids into a bitmask."""
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Iterate the set bits of a mask in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Digraph:
    """Immutable digraph on vertices [0, n) with per-vertex out/in bitmasks.

    At most one edge per ordered pair; loops only when `loops_allowed`.
    """

    __slots__ = ("n", "out_masks", "in_masks", "loops_allowed")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), loops_allowed: bool = False):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        out = [0] * n
        inn = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v and not loops_allowed:
                raise ValueError(f"loop at vertex {u} but loops_allowed is false")
            if out[u] >> v & 1:
                raise ValueError(f"duplicate edge ({u},{v})")
            out[u] |= 1 << v
            inn[v] |= 1 << u
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "out_masks", tuple(out))
        object.__setattr__(self, "in_masks", tuple(inn))
        object.__setattr__(self, "loops_allowed", loops_allowed)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Digraph is immutable")

    @classmethod
    def _from_masks(cls, out_masks: Sequence[int], loops_allowed: bool) -> "Digraph":
        g = object.__new__(cls)
        n = len(out_masks)
        inn = [0] * n
        for u, m in enumerate(out_masks):
            for v in bits(m):
                inn[v] |= 1 << u
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "out_masks", tuple(out_masks))
        object.__setattr__(g, "in_masks", tuple(inn))
        object.__setattr__(g, "loops_allowed", loops_allowed)
        return g

    # -- queries ---------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.out_masks[u] >> v & 1)

    def out_neighbors(self, v: int) -> list[int]:
        return list(bits(self.out_masks[v]))

    def in_neighbors(self, v: int) -> list[int]:
        return list(bits(self.in_masks[v]))

    def out_degree(self, v: int) -> int:
        return self.out_masks[v].bit_count()

    def in_degree(self, v: int) -> int:
        return self.in_masks[v].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.out_masks[u])]

    @property
    def edge_count(self) -> int:
        return sum(m.bit_count() for m in self.out_masks)

    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Digraph)
            and self.n == other.n
            and self.out_masks == other.out_masks
            and self.loops_allowed == other.loops_allowed
        )

    def __hash__(self) -> int:
        return hash((self.n, self.out_masks, self.loops_allowed))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, e={self.edge_count})"

    # -- derived graphs ---------------------------------------------------

    def transpose(self) -> "Digraph":
        g = object.__new__(Digraph)
        object.__setattr__(g, "n", self.n)
        object.__setattr__(g, "out_masks", self.in_masks)
        object.__setattr__(g, "in_masks", self.out_masks)
        object.__setattr__(g, "loops_allowed", self.loops_allowed)
        return g

    def without_loops(self) -> "Digraph":
        if not self.loops_allowed:
            return self
        out = [m & ~(1 << v) for v, m in enumerate(self.out_masks)]
        return Digraph._from_masks(out, loops_allowed=False)

    def induced(self, vertices: Iterable[int]) -> tuple["Digraph", list[int]]:
        """Induced subgraph on `vertices`; returns (subgraph, old ids by new id)."""
        keep = sorted(set(vertices))
        for v in keep:
            if not 0 <= v < self.n:
                raise ValueError(f"vertex {v} out of range")
        index = {v: i for i, v in enumerate(keep)}
        keep_mask = mask_of(keep)
        out = [0] * len(keep)
        for new_u, u in enumerate(keep):
            for v in bits(self.out_masks[u] & keep_mask):
                out[new_u] |= 1 << index[v]
        return Digraph._from_masks(out, self.loops_allowed), keep

    def without_vertices(self, drop: Iterable[int]) -> tuple["Digraph", list[int]]:
        drop_set = set(drop)
        return self.induced(v for v in range(self.n) if v not in drop_set)

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"n": self.n, "edges": [[u, v] for u, v in self.edges()], "loops_allowed": self.loops_allowed}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Digraph":
        edges = [(int(u), int(v)) for u, v in data.get("edges", [])]
        return cls(int(data["n"]), edges, bool(data.get("loops_allowed", False)))

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        for v in range(self.n):
            lines.append(f"  {v};")
        for u, v in self.edges():
            lines.append(f"  {u} -> {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GraphProfile:
    """Degree/regularity summary of a digraph."""

    n: int
    edge_count: int
    min_semidegree: int
    max_semidegree: int
    is_regular: Optional[int]  # the degree d, or None
    is_oriented: bool

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "edge_count": self.edge_count,
            "min_semidegree": self.min_semidegree,
            "max_semidegree": self.max_semidegree,
            "is_regular": self.is_regular,
            "is_oriented": self.is_oriented,
        }


def graph_profile(g: Digraph) -> GraphProfile:
    """Report regularity degree (iff all in/out degrees agree) and orientedness."""
    if g.n == 0:
        return GraphProfile(0, 0, 0, 0, 0, True)
    degs = [g.out_degree(v) for v in range(g.n)] + [g.in_degree(v) for v in range(g.n)]
    lo, hi = min(degs), max(degs)
    regular = lo if lo == hi else None
    oriented = True
    for u in range(g.n):
        if g.out_masks[u] >> u & 1:
            oriented = False
            break
        if any(g.out_masks[v] >> u & 1 for v in bits(g.out_masks[u])):
            oriented = False
            break
    return GraphProfile(g.n, g.edge_count, lo, hi, regular, oriented)


def edges_between(g: Digraph, a: Iterable[int], b: Iterable[int]) -> list[tuple[int, int]]:
    """E(A,B): edges with tail in A and head in B (A and B may overlap)."""
    a_list = sorted(set(a))
    b_mask = 0
    for v in b:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range")
        b_mask |= 1 << v
    result = []
    for u in a_list:
        if not 0 <= u < g.n:
            raise ValueError(f"vertex {u} out of range")
        for v in bits(g.out_masks[u] & b_mask):
            result.append((u, v))
    return result


def _decompose(edges: Iterable[tuple[int, int]]) -> tuple[Optional[str], list[list[int]]]:
    """Split an edge set with semi-degree <= 1 into maximal paths.

    Returns (error, paths).  error is set when some vertex has two out- or
    two in-edges, or when a directed cycle remains.
    """
    succ: dict[int, int] = {}
    pred: dict[int, int] = {}
    for u, v in edges:
        if u in succ:
            return f"vertex {u} has out-degree 2", []
        if v in pred:
            return f"vertex {v} has in-degree 2", []
        succ[u] = v
        pred[v] = u
    paths = []
    seen = set()
    for start in sorted(succ):
        if start in pred or start in seen:
            continue
        path = [start]
        seen.add(start)
        while path[-1] in succ:
            nxt = succ[path[-1]]
            path.append(nxt)
            seen.add(nxt)
        paths.append(path)
    leftover = [u for u in sorted(succ) if u not in seen]
    if leftover:
        # every leftover vertex has in = out = 1 within the set: a cycle
        cyc = [leftover[0]]
        while succ[cyc[-1]] != cyc[0]:
            cyc.append(succ[cyc[-1]])
        return f"directed cycle {cyc}", []
    return None, paths


def path_system_error(g: Digraph, edges: Iterable[tuple[int, int]]) -> Optional[str]:
    """None iff `edges` form a path system in g; otherwise the violation."""
    edge_list = list(edges)
    seen = set()
    for u, v in edge_list:
        if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
            return f"edge ({u},{v}) not present in graph"
        if (u, v) in seen:
            return f"duplicate edge ({u},{v})"
        seen.add((u, v))
    err, _ = _decompose(edge_list)
    return err


def is_path_system(g: Digraph, edges: Iterable[tuple[int, int]]) -> bool:
    return path_system_error(g, edges) is None


class PathSystem:
    """A set of vertex-disjoint directed paths, stored as its edge set.

    Invariants (checked at construction): every vertex has at most one
    in-edge and one out-edge, and the edge set contains no directed cycle.
    """

    __slots__ = ("edges", "paths")

    def __init__(self, edges: Iterable[tuple[int, int]]):
        edge_set = frozenset((int(u), int(v)) for u, v in edges)
        err, paths = _decompose(sorted(edge_set))
        if err is not None:
            raise ValueError(f"not a path system: {err}")
        object.__setattr__(self, "edges", edge_set)
        object.__setattr__(self, "paths", tuple(tuple(p) for p in paths))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PathSystem is immutable")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def vertices(self) -> set[int]:
        return {v for e in self.edges for v in e}

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.paths)

    def __repr__(self) -> str:
        return f"PathSystem(paths={len(self.paths)}, edges={len(self.edges)})"


def hamilton_cycle_error(g: Digraph, cycle: Sequence[int]) -> Optional[str]:
    """None iff `cycle` is a Hamilton cycle of g; otherwise the reason."""
    seq = list(cycle)
    if g.n < 2:
        return "graph has fewer than 2 vertices"
    if len(seq) != g.n:
        return f"sequence length {len(seq)} != n {g.n}"
    if set(seq) != set(range(g.n)):
        return "sequence is not a permutation of the vertices"
    for i, u in enumerate(seq):
        v = seq[(i + 1) % g.n]
        if u == v or not g.has_edge(u, v):
            return f"missing edge ({u},{v})"
    return None


def verify_hamilton_cycle(g: Digraph, cycle: Sequence[int]) -> bool:
    return hamilton_cycle_error(g, cycle) is None
