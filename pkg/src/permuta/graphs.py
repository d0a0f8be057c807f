"""Simple graphs, the join/union constructor algebra, isomorphism and subgraph search."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

from .groups import FiniteGroup, Subgroup, SubgroupLattice, bits, closure, permutes


class NoProperSubgroups(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ValueError("adjacency must have one row per vertex")
        for v, row in enumerate(self.adj):
            if row >> v & 1:
                raise ValueError(f"loop at vertex {v}")
            for w in bits(row):
                if w >= self.n or not self.adj[w] >> v & 1:
                    raise ValueError(f"adjacency not symmetric at ({v}, {w})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj), tuple(labels) if labels is not None else None)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return bits(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u]) if u < v]

    @property
    def m(self) -> int:
        return sum(r.bit_count() for r in self.adj) // 2

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    def induced(self, vs: Sequence[int]) -> "Graph":
        pos = {v: i for i, v in enumerate(vs)}
        edges = [(pos[u], pos[w]) for u in vs for w in self.neighbors(u) if w in pos and u < w]
        labels = [self.label(v) for v in vs] if self.labels else None
        return Graph.from_edges(len(vs), edges, labels)

    def remove_edge(self, u: int, v: int) -> "Graph":
        adj = list(self.adj)
        adj[u] &= ~(1 << v)
        adj[v] &= ~(1 << u)
        return Graph(self.n, tuple(adj), self.labels)

    def components(self) -> list[list[int]]:
        seen, out = 0, []
        for s in range(self.n):
            if seen >> s & 1:
                continue
            comp, frontier = 1 << s, 1 << s
            while frontier:
                nxt = 0
                for v in bits(frontier):
                    nxt |= self.adj[v]
                frontier = nxt & ~comp
                comp |= frontier
            seen |= comp
            out.append(bits(comp))
        return out

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def to_networkx(self):
        import networkx as nx
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g


# -- constructor algebra -----------------------------------------------------

@dataclass(frozen=True)
class Complete:
    n: int


@dataclass(frozen=True)
class Empty:
    n: int


@dataclass(frozen=True)
class CompleteBipartite:
    m: int
    n: int


@dataclass(frozen=True)
class Path:
    """A path with ``length`` edges (``length + 1`` vertices)."""
    length: int


@dataclass(frozen=True)
class Cycle:
    """A cycle with ``length`` edges and vertices."""
    length: int


@dataclass(frozen=True)
class Join:
    a: object
    b: object


@dataclass(frozen=True)
class Union:
    a: object
    b: object


@dataclass(frozen=True)
class Copies:
    k: int
    a: object


@dataclass(frozen=True)
class Complement:
    a: object


GraphExpr = Complete | Empty | CompleteBipartite | Path | Cycle | Join | Union | Copies | Complement


def _disjoint(g: Graph, h: Graph, join: bool) -> Graph:
    n = g.n + h.n
    adj = list(g.adj) + [row << g.n for row in h.adj]
    if join:
        low = (1 << g.n) - 1
        high = ((1 << h.n) - 1) << g.n
        for v in range(g.n):
            adj[v] |= high
        for v in range(g.n, n):
            adj[v] |= low
    return Graph(n, tuple(adj))


def build(e) -> Graph:
    """Materialize a graph expression; vertices of the left operand come first."""
    if isinstance(e, Graph):
        return e
    if isinstance(e, Complete):
        full = (1 << e.n) - 1
        return Graph(e.n, tuple(full & ~(1 << v) for v in range(e.n)))
    if isinstance(e, Empty):
        return Graph(e.n, (0,) * e.n)
    if isinstance(e, CompleteBipartite):
        return _disjoint(build(Empty(e.m)), build(Empty(e.n)), join=True)
    if isinstance(e, Path):
        return Graph.from_edges(e.length + 1, [(i, i + 1) for i in range(e.length)])
    if isinstance(e, Cycle):
        if e.length < 3:
            raise ValueError("a simple cycle needs length >= 3")
        return Graph.from_edges(e.length, [(i, (i + 1) % e.length) for i in range(e.length)])
    if isinstance(e, Join):
        return _disjoint(build(e.a), build(e.b), join=True)
    if isinstance(e, Union):
        return _disjoint(build(e.a), build(e.b), join=False)
    if isinstance(e, Copies):
        if e.k < 1:
            raise ValueError("need at least one copy")
        g = base = build(e.a)
        for _ in range(e.k - 1):
            g = _disjoint(g, base, join=False)
        return g
    if isinstance(e, Complement):
        g = build(e.a)
        full = (1 << g.n) - 1
        return Graph(g.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(g.adj)))
    raise TypeError(f"not a graph expression: {e!r}")


# -- permutability graph ---------------------------------------------------

def generator_label(g: FiniteGroup, h: Subgroup) -> str:
    """A short generating set of ``h`` rendered as ⟨x, y⟩ using the group's labels."""
    orders = g.element_orders
    cand = sorted(h.elements(), key=lambda x: (-orders[x], x))
    gens, cur = [], 1 << g.identity
    for x in cand:
        if cur == h.members:
            break
        if not cur >> x & 1:
            gens.append(x)
            cur = closure(g, gens).members
    return "⟨" + ", ".join(g.label(x) for x in gens) + "⟩"


def permutability_graph(g: FiniteGroup, lat: SubgroupLattice | None = None) -> Graph:
    """Proper subgroups as vertices, joined when they permute."""
    if lat is None:
        from .groups import all_subgroups
        lat = all_subgroups(g)
    subs = lat.proper
    if not subs:
        raise NoProperSubgroups(f"{g.name or 'group'} of order {g.order} has no proper subgroups")
    edges = [(i, j) for i in range(len(subs)) for j in range(i + 1, len(subs))
             if permutes(g, subs[i], subs[j])]
    return Graph.from_edges(len(subs), edges, [generator_label(g, h) for h in subs])


# -- color refinement and isomorphism ---------------------------------------

def refine(graphs: Sequence[Graph], init: Sequence[Sequence[int]] | None = None) -> list[list[int]]:
    """Joint 1-dimensional Weisfeiler-Leman refinement; colors comparable across graphs."""
    cols = [list(init[i]) if init else [0] * g.n for i, g in enumerate(graphs)]
    while True:
        sigs = []
        for g, c in zip(graphs, cols):
            sigs.append([(c[v], tuple(sorted(c[w] for w in bits(g.adj[v])))) for v in range(g.n)])
        palette = {s: i for i, s in enumerate(sorted({s for sg in sigs for s in sg}))}
        new = [[palette[s] for s in sg] for sg in sigs]
        if sum(len(set(c)) for c in new) == sum(len(set(c)) for c in cols) and \
                len({x for c in new for x in c}) == len({x for c in cols for x in c}):
            return new
        cols = new


def invariant_hash(g: Graph) -> str:
    """Isomorphism-invariant digest from the refined color histogram."""
    (cols,) = refine([g])
    sigs = sorted((cols.count(c), c, tuple(sorted(cols[w] for w in bits(g.adj[v]))))
                  for v, c in enumerate(cols))
    data = repr((g.n, g.m, sigs)).encode()
    return hashlib.sha256(data).hexdigest()[:24]


def find_isomorphism(g: Graph, h: Graph) -> dict[int, int] | None:
    """A vertex bijection g -> h preserving adjacency, or None."""
    if g.n != h.n or g.m != h.m:
        return None
    if g.n == 0:
        return {}
    cg, ch = refine([g, h])
    if sorted(cg) != sorted(ch):
        return None
    size = {}
    for c in cg:
        size[c] = size.get(c, 0) + 1
    order = _search_order(g, key=lambda v: (size[cg[v]], -g.degree(v)))
    by_color: dict[int, list[int]] = {}
    for v in range(h.n):
        by_color.setdefault(ch[v], []).append(v)
    mapping: dict[int, int] = {}
    used = 0

    def extend(k: int) -> bool:
        nonlocal used
        if k == len(order):
            return True
        v = order[k]
        for w in by_color[cg[v]]:
            if used >> w & 1:
                continue
            if all(g.has_edge(v, x) == h.has_edge(w, y) for x, y in mapping.items()):
                mapping[v] = w
                used |= 1 << w
                if extend(k + 1):
                    return True
                del mapping[v]
                used &= ~(1 << w)
        return False

    return dict(mapping) if extend(0) else None


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


def _search_order(g: Graph, key) -> list[int]:
    """Greedy order: each next vertex has the most neighbours already placed."""
    left = set(range(g.n))
    placed = 0
    order = []
    while left:
        v = min(left, key=lambda u: (-(g.adj[u] & placed).bit_count(), key(u), u))
        order.append(v)
        placed |= 1 << v
        left.remove(v)
    return order


# -- subgraph containment ---------------------------------------------------

def twin_classes(g: Graph) -> list[int]:
    """Representative index per vertex; twins (same open or closed neighbourhood) share one."""
    rep = list(range(g.n))
    for v in range(g.n):
        for u in range(v):
            if rep[u] != u:
                continue
            open_twins = g.adj[u] & ~(1 << v) == g.adj[v] & ~(1 << u)
            if open_twins:
                rep[v] = u
                break
    return rep


def has_subgraph(g: Graph, pattern: Graph) -> dict[int, int] | None:
    """A (non-induced) embedding of ``pattern`` into ``g`` as pattern-vertex -> g-vertex."""
    if pattern.n > g.n or pattern.m > g.m:
        return None
    if pattern.n == 0:
        return {}
    order = _search_order(pattern, key=lambda v: -pattern.degree(v))
    pos = {v: i for i, v in enumerate(order)}
    rep = twin_classes(pattern)
    # previous twin in search order: its image must be smaller (twin swaps are automorphisms)
    prev_twin = {}
    last_of: dict[int, int] = {}
    for v in order:
        r = rep[v]
        if r in last_of:
            prev_twin[v] = last_of[r]
        last_of[r] = v
    pdeg = [pattern.degree(v) for v in range(pattern.n)]
    gdeg = [g.degree(v) for v in range(g.n)]
    earlier_nbrs = [[u for u in pattern.neighbors(v) if pos[u] < pos[v]] for v in order]
    full = (1 << g.n) - 1
    eligible = {}
    for d in set(pdeg):
        m = 0
        for w in range(g.n):
            if gdeg[w] >= d:
                m |= 1 << w
        eligible[d] = m
    image = [0] * pattern.n
    used = 0

    def extend(k: int) -> bool:
        nonlocal used
        if k == len(order):
            return True
        v = order[k]
        cand = eligible[pdeg[v]] & ~used & full
        for u in earlier_nbrs[k]:
            cand &= g.adj[image[u]]
        if v in prev_twin:
            floor = image[prev_twin[v]]
            cand &= ~((1 << (floor + 1)) - 1)
        while cand:
            low = cand & -cand
            w = low.bit_length() - 1
            cand ^= low
            image[v] = w
            used |= low
            if extend(k + 1):
                return True
            used &= ~low
        return False

    if not extend(0):
        return None
    found = {v: image[v] for v in range(pattern.n)}
    for a, b in pattern.edges():
        assert g.has_edge(found[a], found[b]), "subgraph map is not edge-preserving"
    return found


# -- named patterns ---------------------------------------------------------

PATTERNS = {
    "k33": CompleteBipartite(3, 3),
    "k15": CompleteBipartite(1, 5),
    "c6": Cycle(6),
    "p5": Path(5),
    "p6": Path(6),
    "k37": CompleteBipartite(3, 7),
    "k45": CompleteBipartite(4, 5),
    "k35": CompleteBipartite(3, 5),
    "k44": CompleteBipartite(4, 4),
    "k7": Complete(7),
    "k8": Complete(8),
    "a1": Join(Complete(3), Union(Complete(3), Complete(2))),
}

FORBIDDEN = ("k33", "k15", "c6", "p5", "p6")


def pattern(name: str) -> Graph:
    try:
        return build(PATTERNS[name.lower()])
    except KeyError:
        raise ValueError(f"unknown pattern {name!r}; known: {sorted(PATTERNS)}") from None


def forbidden_profile(g: Graph) -> dict[str, bool]:
    """For each of K_{3,3}, K_{1,5}, C_6, P_5, P_6: True iff ``g`` is free of it."""
    return {name: has_subgraph(g, pattern(name)) is None for name in FORBIDDEN}


# -- graph6 and DOT ----------------------------------------------------------

def _n_bytes(n: int) -> bytes:
    if n < 63:
        return bytes([n + 63])
    if n < 258048:
        return bytes([126] + [(n >> s & 63) + 63 for s in (12, 6, 0)])
    return bytes([126, 126] + [(n >> s & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])


def to_graph6(g: Graph) -> str:
    bitlist = [1 if g.has_edge(i, j) else 0 for j in range(1, g.n) for i in range(j)]
    bitlist += [0] * (-len(bitlist) % 6)
    body = bytes(63 + int("".join(map(str, bitlist[k:k + 6])), 2) for k in range(0, len(bitlist), 6))
    return (_n_bytes(g.n) + body).decode("ascii")


def from_graph6(s: str) -> Graph:
    s = s.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    data = [c - 63 for c in s.encode("ascii")]
    if any(not 0 <= c < 64 for c in data):
        raise ValueError("graph6 characters must lie in '?'..'~'")
    if data[0] != 63:
        n, rest = data[0], data[1:]
    elif data[1] != 63:
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        rest = data[4:]
    else:
        n = 0
        for c in data[2:8]:
            n = n << 6 | c
        rest = data[8:]
    need = (n * (n - 1) // 2 + 5) // 6
    if len(rest) != need:
        raise ValueError(f"graph6 body has {len(rest)} bytes, expected {need}")
    stream = [c >> (5 - k) & 1 for c in rest for k in range(6)]
    edges = []
    idx = 0
    for j in range(1, n):
        for i in range(j):
            if stream[idx]:
                edges.append((i, j))
            idx += 1
    return Graph.from_edges(n, edges)


def to_dot(g: Graph, name: str = "G") -> str:
    lines = [f'graph "{name}" {{']
    for v in range(g.n):
        lab = g.label(v).replace('"', '\\"')
        lines.append(f'  {v} [label="{lab}"];')
    for u, v in g.edges():
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
