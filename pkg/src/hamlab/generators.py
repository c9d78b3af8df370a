"""Graph families: rotational tournaments, the four counterexample
constructions, and seeded random regular digraphs / oriented graphs.

Every generator returns plain `Digraph` values; `counterexample` also returns
the properties the construction promises, so callers can re-verify them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .graph import Digraph, graph_profile
from .oracle import find_hamilton_exact

__all__ = [
    "GeneratorSpec",
    "ExpectedProperties",
    "regular_tournament",
    "prop15_digraph",
    "prop15_oriented",
    "prop71_oriented",
    "prop72_oriented",
    "random_regular",
    "counterexample",
    "FAMILIES",
]

FAMILIES = (
    "rotational_tournament",
    "prop15_digraph",
    "prop15_oriented",
    "prop71_oriented",
    "prop72_oriented",
    "random_regular_digraph",
    "random_regular_oriented",
)


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    d: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")


@dataclass(frozen=True)
class ExpectedProperties:
    """What a construction promises; used for re-verification and CLI output."""

    family: str
    n_param: int
    vertex_count: int
    degree: int
    oriented: bool
    hamiltonian: Optional[bool] = None
    strongly_k_connected: Optional[int] = None
    well_connected: Optional[bool] = None
    natural_cut: tuple[int, ...] = ()
    cut_components: Optional[int] = None

    def to_json_dict(self) -> dict:
        return {
            "family": self.family,
            "n_param": self.n_param,
            "vertex_count": self.vertex_count,
            "degree": self.degree,
            "oriented": self.oriented,
            "hamiltonian": self.hamiltonian,
            "strongly_k_connected": self.strongly_k_connected,
            "well_connected": self.well_connected,
            "natural_cut": list(self.natural_cut),
            "cut_components": self.cut_components,
        }


def regular_tournament(m: int) -> Digraph:
    """Rotational tournament: i -> i+1, ..., i+(m-1)/2 (mod m).  m odd."""
    if m < 3 or m % 2 == 0:
        raise ValueError("regular tournament needs odd m >= 3")
    half = (m - 1) // 2
    edges = [(i, (i + k) % m) for i in range(m) for k in range(1, half + 1)]
    return Digraph(m, edges)


def prop15_digraph(n: int) -> Digraph:
    """Two complete digraphs K_n wired by four bridge edges.

    Vertices [0,n) and [n,2n); a=0, b=1, c=n, d=n+1.  Deletes ab, ba, cd, dc
    and adds ac, cb, bd, da, giving a strongly 2-connected (n-1)-regular
    digraph on 2n vertices with no Hamilton cycle.
    """
    if n < 3:
        raise ValueError("prop15_digraph needs n >= 3")
    a, b, c, d = 0, 1, n, n + 1
    edges = []
    for base in (0, n):
        for u in range(base, base + n):
            for v in range(base, base + n):
                if u != v:
                    edges.append((u, v))
    removed = {(a, b), (b, a), (c, d), (d, c)}
    edges = [e for e in edges if e not in removed]
    edges += [(a, c), (c, b), (b, d), (d, a)]
    return Digraph(2 * n, edges)


_two_cycle_cache: dict[int, tuple[list[int], list[int]]] = {}


def _spanning_two_cycles(m: int) -> tuple[list[int], list[int]]:
    """Two edge-disjoint directed cycles of the rotational tournament on m
    vertices that together span it and share exactly the two vertices {0, b}.

    Brute force over the common pair and the split of the remaining vertices;
    each side needs a Hamilton cycle of the induced subtournament.
    """
    if m in _two_cycle_cache:
        return _two_cycle_cache[m]
    t = regular_tournament(m)

    def cycle_edges(cyc: list[int]) -> set[tuple[int, int]]:
        return {(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))}

    def ham_cycle(part: list[int], forbid: set[tuple[int, int]]) -> Optional[list[int]]:
        sub, ids = t.induced(part)
        if forbid:
            keep = [(u, v) for u, v in sub.edges() if (ids[u], ids[v]) not in forbid]
            sub = Digraph(sub.n, keep)
        res = find_hamilton_exact(sub)
        return [ids[v] for v in res.cycle] if res.found else None

    a = 0
    rest_all = [v for v in range(m) if v != a]
    for b in rest_all:
        rest = [v for v in rest_all if v != b]
        for split in range(1, (1 << len(rest)) - 1):
            p1 = [rest[i] for i in range(len(rest)) if split >> i & 1]
            p2 = [rest[i] for i in range(len(rest)) if not split >> i & 1]
            c1 = ham_cycle(p1 + [a, b], set())
            if c1 is None:
                continue
            # the only edge the cycles could share is the unique a-b edge
            c2 = ham_cycle(p2 + [a, b], cycle_edges(c1))
            if c2 is None:
                continue
            e1, e2 = cycle_edges(c1), cycle_edges(c2)
            assert not e1 & e2 and set(c1) & set(c2) == {a, b}
            assert set(c1) | set(c2) == set(range(m))
            _two_cycle_cache[m] = (c1, c2)
            return c1, c2
    raise RuntimeError(f"no spanning two-cycle decomposition found for m={m}")


def prop15_oriented(n: int) -> Digraph:
    """Oriented analogue: two regular tournaments, each stripped of a spanning
    two-cycle pair, wired by the same four bridge edges."""
    if n < 3:
        raise ValueError("prop15_oriented needs n >= 3")
    m = 2 * n + 1
    c1, c1p = _spanning_two_cycles(m)
    t = regular_tournament(m)
    a, b = 0, [v for v in c1 if v in set(c1p) and v != 0][0]

    def cycle_edges(cyc: list[int]) -> set[tuple[int, int]]:
        return {(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))}

    drop = cycle_edges(c1) | cycle_edges(c1p)
    local = [e for e in t.edges() if e not in drop]
    edges = []
    for off in (0, m):
        edges += [(u + off, v + off) for u, v in local]
    aa, bb, cc, dd = a, b, a + m, b + m
    edges += [(aa, cc), (cc, bb), (bb, dd), (dd, aa)]
    return Digraph(2 * m, edges)


def prop71_oriented(n: int) -> Digraph:
    """Three regular tournaments on 6n+1 vertices, each minus a 2n-matching,
    plus hub vertices z, z' wired to the matching endpoints.

    3n-regular oriented graph on 18n+5 vertices; deleting {z, z'} leaves
    three components, refuting Hamiltonicity.
    """
    if n < 1:
        raise ValueError("prop71_oriented needs n >= 1")
    m = 6 * n + 1
    t = regular_tournament(m)
    z = 3 * m
    zp = z + 1
    edges = []
    matching = [(2 * j, 2 * j + 1) for j in range(2 * n)]  # consecutive pairs
    drop = set(matching)
    local = [e for e in t.edges() if e not in drop]
    for i in range(3):
        off = i * m
        edges += [(u + off, v + off) for u, v in local]
        for j in range(n):
            x, y = matching[j]
            edges += [(x + off, z), (z, y + off)]
        for j in range(n, 2 * n):
            x, y = matching[j]
            edges += [(x + off, zp), (zp, y + off)]
    return Digraph(3 * m + 2, edges)


def _circulant_bipartite(n: int) -> list[tuple[int, int]]:
    """2n-regular oriented bipartite graph on classes of size 4n.

    a_i -> b_{i+j} for j in [1, 2n]; b_i -> a_{i+j} for j in [0, 2n-1]
    (indices mod 4n; a_i has global id i, b_i has global id 4n+i).
    """
    size = 4 * n
    edges = []
    for i in range(size):
        for j in range(1, 2 * n + 1):
            edges.append((i, size + (i + j) % size))
        for j in range(0, 2 * n):
            edges.append((size + i, (i + j) % size))
    return edges


def prop72_oriented(n: int) -> Digraph:
    """Bipartite circulant minus one B-vertex, two tournaments minus small
    matchings, re-wired so every vertex is 2n-regular.

    Strongly n-connected oriented graph on 16n+1 vertices; deleting side A
    (4n vertices) leaves 4n+1 components.
    """
    if n < 1:
        raise ValueError("prop72_oriented needs n >= 1")
    size = 4 * n
    # global ids: A = [0, 4n); B-minus-b0: b_i -> 4n + i - 1 for i in [1, 4n);
    # G1 = [8n-1, 12n); G2 = [12n, 16n+1)
    g1_off = 8 * n - 1
    g2_off = 12 * n
    edges = []
    for u, v in _circulant_bipartite(n):
        def remap(w: int) -> Optional[int]:
            if w < size:
                return w
            i = w - size
            return None if i == 0 else size + i - 1
        uu, vv = remap(u), remap(v)
        if uu is not None and vv is not None:
            edges.append((uu, vv))
    # b0's neighbourhoods in the circulant: out = a_0..a_{2n-1}, in = a_{2n}..a_{4n-1}
    a_plus = list(range(0, 2 * n))
    a_minus = list(range(2 * n, 4 * n))
    m = 4 * n + 1
    t = regular_tournament(m)
    matching = [(2 * j, 2 * j + 1) for j in range(n)]
    drop = set(matching)
    local = [e for e in t.edges() if e not in drop]
    for off in (g1_off, g2_off):
        edges += [(u + off, v + off) for u, v in local]
    for j in range(n):
        x1, y1 = matching[j]
        edges += [(x1 + g1_off, a_plus[j]), (a_minus[j], y1 + g1_off)]
        x2, y2 = matching[j]
        edges += [(x2 + g2_off, a_plus[j + n]), (a_minus[j + n], y2 + g2_off)]
    return Digraph(16 * n + 1, edges)


def _compatible_permutation(n: int, forbidden: set[tuple[int, int]],
                            rng: random.Random) -> Optional[list[int]]:
    """Random fixed-point-free permutation avoiding `forbidden` pairs.

    Randomized Kuhn matching: always completes when a compatible permutation
    exists, with the rng only steering which one comes out.
    """
    targets = [
        [u for u in range(n) if u != v and (v, u) not in forbidden] for v in range(n)
    ]
    match_left: dict[int, int] = {}
    match_right: dict[int, int] = {}

    def augment(v: int, visited: set[int]) -> bool:
        cands = targets[v][:]
        rng.shuffle(cands)
        for u in cands:
            if u in visited:
                continue
            visited.add(u)
            if u not in match_right or augment(match_right[u], visited):
                match_left[v] = u
                match_right[u] = v
                return True
        return False

    order = list(range(n))
    rng.shuffle(order)
    for v in order:
        if not augment(v, set()):
            return None
    return [match_left[v] for v in range(n)]


def random_regular(n: int, d: int, oriented: bool, seed: int = 0,
                   restarts: int = 64, per_perm_tries: int = 60) -> Digraph:
    """d-regular digraph as the union of d random fixed-point-free permutations.

    Each permutation is resampled until the union stays simple (no loops, no
    duplicate edges, and no 2-cycles when oriented); the whole bundle restarts
    with an incremented internal seed when a permutation cannot be placed.
    Uniformity over regular digraphs is not attempted.
    """
    if not 1 <= d < n:
        raise ValueError(f"infeasible (n={n}, d={d})")
    if oriented and 2 * d > n - 1:
        raise ValueError(f"infeasible for oriented graphs (d={d} > (n-1)/2)")
    for attempt in range(restarts):
        rng = random.Random((seed << 16) ^ attempt)
        edges: set[tuple[int, int]] = set()
        ok = True
        for _ in range(d):
            placed = False
            for _ in range(per_perm_tries):
                forbidden = set(edges)
                if oriented:
                    forbidden |= {(v, u) for u, v in edges}
                perm = _compatible_permutation(n, forbidden, rng)
                if perm is None:
                    break
                cand = [(v, perm[v]) for v in range(n)]
                cand_set = set(cand)
                if oriented and any((v, u) in cand_set for u, v in cand):
                    continue  # the new permutation carries its own 2-cycle
                edges.update(cand)
                placed = True
                break
            if not placed:
                ok = False
                break
        if ok:
            return Digraph(n, sorted(edges))
    raise RuntimeError(f"random_regular retry budget exhausted (n={n}, d={d}, oriented={oriented})")


def counterexample(spec: GeneratorSpec) -> tuple[Digraph, ExpectedProperties]:
    """Build the requested family together with its promised properties."""
    fam, n = spec.family, spec.n
    if fam == "rotational_tournament":
        g = regular_tournament(n)
        props = ExpectedProperties(fam, n, n, (n - 1) // 2, True)
    elif fam == "prop15_digraph":
        g = prop15_digraph(n)
        props = ExpectedProperties(
            fam, n, 2 * n, n - 1, False,
            hamiltonian=False, strongly_k_connected=2, well_connected=False,
        )
    elif fam == "prop15_oriented":
        g = prop15_oriented(n)
        props = ExpectedProperties(
            fam, n, 4 * n + 2, n - 1, True,
            hamiltonian=False, strongly_k_connected=2, well_connected=False,
        )
    elif fam == "prop71_oriented":
        g = prop71_oriented(n)
        z = 3 * (6 * n + 1)
        props = ExpectedProperties(
            fam, n, 18 * n + 5, 3 * n, True,
            hamiltonian=False, well_connected=True,
            natural_cut=(z, z + 1), cut_components=3,
        )
    elif fam == "prop72_oriented":
        g = prop72_oriented(n)
        props = ExpectedProperties(
            fam, n, 16 * n + 1, 2 * n, True,
            hamiltonian=False, strongly_k_connected=n,
            natural_cut=tuple(range(4 * n)), cut_components=4 * n + 1,
        )
    elif fam in ("random_regular_digraph", "random_regular_oriented"):
        if spec.d is None:
            raise ValueError("random families need a degree d")
        oriented = fam.endswith("oriented")
        g = random_regular(n, spec.d, oriented, spec.seed)
        props = ExpectedProperties(fam, n, n, spec.d, oriented)
    else:  # pragma: no cover - guarded by GeneratorSpec
        raise ValueError(fam)
    profile = graph_profile(g)
    if profile.is_regular != props.degree or profile.is_oriented != props.oriented:
        raise AssertionError(f"{fam}: generated graph violates its own contract: {profile}")
    return g, props
