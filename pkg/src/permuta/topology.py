"""Exact planarity / torus / projective-plane decisions for small graphs.

Embeddings are signed rotation systems.  The search grows an embedding one
edge at a time (a spanning tree of pendant insertions interleaved with
closing edges), tracks faces by face tracing, and prunes on Euler genus and
on bridges that no longer fit inside a single face.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .graphs import (Graph, find_isomorphism, from_graph6, has_subgraph, invariant_hash,
                     pattern, to_graph6)
from .groups import bits

SURFACE_EULER_GENUS = {"sphere": 0, "projective": 1, "torus": 2}
DEFAULT_NODE_BUDGET = 10 ** 9


class BudgetExceeded(RuntimeError):
    def __init__(self, nodes: int, reason: str = "node budget"):
        super().__init__(f"embedding search gave up after {nodes} nodes ({reason})")
        self.nodes = nodes


class HashMismatch(ValueError):
    pass


class DegreeNotThree(ValueError):
    pass


class ParamsOutOfRange(ValueError):
    pass


# -- rotation systems and face tracing -------------------------------------

@dataclass
class RotationSystem:
    """``rotations[v]`` lists neighbours of v in cyclic order; ``signs`` maps (u, v), u < v, to -1."""
    rotations: list[list[int]]
    signs: dict[tuple[int, int], int] = field(default_factory=dict)

    def sign(self, u: int, v: int) -> int:
        return self.signs.get((u, v) if u < v else (v, u), 1)

    def edges(self) -> set[tuple[int, int]]:
        return {(min(u, v), max(u, v)) for u, r in enumerate(self.rotations) for v in r}


def trace_faces(rs: RotationSystem) -> list[list[tuple[int, int]]]:
    """Face boundary walks as lists of (vertex, corner) pairs; isolated vertices give one face each."""
    rot = rs.rotations
    orientable = not any(s < 0 for s in rs.signs.values())
    seen = set()
    claimed = set()
    faces = []
    for v in range(len(rot)):
        if not rot[v]:
            faces.append([(v, 0)])
            continue
        for i in range(len(rot[v])):
            for s in ((1,) if orientable else (1, -1)):
                if (v, i, s) in seen:
                    continue
                walk = []
                st = (v, i, s)
                while st not in seen:
                    seen.add(st)
                    x, j, t = st
                    w = rot[x][j]
                    t2 = t * rs.sign(x, w)
                    dw = len(rot[w])
                    pj = rot[w].index(x)
                    c = pj if t2 == 1 else (pj - 1) % dw
                    walk.append((w, c))
                    st = (w, (pj + t2) % dw, t2)
                if walk[0] in claimed:
                    continue
                claimed.update(walk)
                faces.append(walk)
    return faces


def euler_genus(g: Graph, rs: RotationSystem) -> int:
    """2c - V + E - F over the components of ``g``."""
    f = len(trace_faces(rs))
    return 2 * len(g.components()) - g.n + g.m - f


def has_orientation_reversing_cycle(g: Graph, rs: RotationSystem) -> bool:
    """True iff some cycle carries an odd number of negative edges (switching test)."""
    side = [0] * g.n
    for comp in g.components():
        root = comp[0]
        side[root] = 1
        stack = [root]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                want = side[u] * rs.sign(u, w)
                if side[w] == 0:
                    side[w] = want
                    stack.append(w)
                elif side[w] != want:
                    return True
    return False


# -- certificates ------------------------------------------------------------

@dataclass
class EmbeddingCertificate:
    graph6: str
    rotations: list[list[int]]
    signs: dict[tuple[int, int], int]
    faces: int
    surface: str
    nodes: int = 0

    @property
    def graph_hash(self) -> str:
        return self.graph6

    def rotation_system(self) -> RotationSystem:
        return RotationSystem([list(r) for r in self.rotations], dict(self.signs))

    def to_json(self) -> dict:
        return {
            "graph6": self.graph6,
            "rotations": self.rotations,
            "signs": {f"{u}-{v}": s for (u, v), s in sorted(self.signs.items())},
            "faces": self.faces,
            "surface": self.surface,
        }

    @classmethod
    def from_json(cls, data: dict) -> "EmbeddingCertificate":
        signs = {}
        for key, s in data.get("signs", {}).items():
            u, v = (int(x) for x in key.split("-"))
            signs[(min(u, v), max(u, v))] = int(s)
        return cls(data["graph6"], [list(map(int, r)) for r in data["rotations"]], signs,
                   int(data["faces"]), data["surface"])

    def dump(self, path: str | Path) -> None:
        _atomic_write(Path(path), json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingCertificate":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def make_certificate(g: Graph, rs: RotationSystem, surface: str, nodes: int = 0) -> EmbeddingCertificate:
    signs = {e: -1 for e, s in rs.signs.items() if s < 0}
    return EmbeddingCertificate(to_graph6(g), [list(r) for r in rs.rotations], signs,
                                len(trace_faces(rs)), surface, nodes)


def verify_certificate(g: Graph, c: EmbeddingCertificate) -> bool:
    """Replay the face tracing and check Euler's relation for the claimed surface."""
    if c.graph6 != to_graph6(g):
        raise HashMismatch("certificate was issued for a different graph")
    if c.surface not in SURFACE_EULER_GENUS or len(c.rotations) != g.n:
        return False
    for v, r in enumerate(c.rotations):
        if sorted(r) != g.neighbors(v):
            return False
    rs = c.rotation_system()
    if any(not g.has_edge(u, v) for u, v in rs.signs):
        return False
    faces = len(trace_faces(rs))
    if faces != c.faces:
        return False
    eg = 2 * len(g.components()) - g.n + g.m - faces
    if eg != SURFACE_EULER_GENUS[c.surface]:
        return False
    reversing = has_orientation_reversing_cycle(g, rs)
    if c.surface == "projective":
        return reversing
    return not reversing


def transport(c: EmbeddingCertificate, g: Graph, iso: dict[int, int]) -> EmbeddingCertificate:
    """Re-express a certificate for graph h on isomorphic ``g`` given iso: V(g) -> V(h)."""
    back = {w: v for v, w in iso.items()}
    rot = [[back[w] for w in c.rotations[iso[v]]] for v in range(g.n)]
    signs = {}
    for (a, b), s in c.signs.items():
        u, v = back[a], back[b]
        signs[(min(u, v), max(u, v))] = s
    return EmbeddingCertificate(to_graph6(g), rot, signs, c.faces, c.surface, c.nodes)


# -- closed forms --------------------------------------------------------------

def reference_genus(kind: str, *params: int) -> tuple[int, int]:
    """(orientable genus, nonorientable genus) of K_n or K_{m,n}."""
    if kind == "complete":
        (n,) = params
        if n < 3:
            raise ParamsOutOfRange("complete graphs need n >= 3")
        gam = math.ceil((n - 3) * (n - 4) / 12)
        cross = 3 if n == 7 else math.ceil((n - 3) * (n - 4) / 6)
        return gam, cross
    if kind == "complete_bipartite":
        m, n = params
        if m < 2 or n < 2:
            raise ParamsOutOfRange("complete bipartite graphs need m, n >= 2")
        return math.ceil((m - 2) * (n - 2) / 4), math.ceil((m - 2) * (n - 2) / 2)
    raise ParamsOutOfRange(f"unknown kind {kind!r}")


def girth_lower_bound(g: Graph) -> int:
    for u, v in g.edges():
        if g.adj[u] & g.adj[v]:
            return 3
    return 4


def euler_bound_excludes(g: Graph, euler_genus_: int) -> bool:
    """True when E exceeds what any connected graph of this girth can have on the surface."""
    if g.m == 0 or g.m < g.n:
        return False
    gi = girth_lower_bound(g)
    chi = 2 - euler_genus_
    return (gi - 2) * g.m > gi * (g.n - chi)


# -- the search ----------------------------------------------------------------

def _edge_order(g: Graph) -> list[tuple[int, int, bool]]:
    """Insertion order (u, w, w_is_new): a Kuratowski subgraph first when there is one."""
    import networkx as nx
    if g.m == 0:
        return []
    order: list[tuple[int, int, bool]] = []
    done: set[tuple[int, int]] = set()
    pos: dict[int, int] = {}

    def place(v: int, allowed) -> None:
        if pos:
            parent = min((w for w in g.neighbors(v) if w in pos and allowed(v, w)), key=pos.get)
            order.append((parent, v, True))
            done.add((min(parent, v), max(parent, v)))
        pos[v] = len(pos)
        for w in sorted((w for w in g.neighbors(v) if w in pos and w != v), key=pos.get):
            e = (min(v, w), max(v, w))
            if e not in done and allowed(v, w):
                order.append((w, v, False))
                done.add(e)

    planar, cert = nx.check_planarity(g.to_networkx(), counterexample=True)
    if not planar:
        kedges = {(min(a, b), max(a, b)) for a, b in cert.edges()}
        in_k = lambda a, b: (min(a, b), max(a, b)) in kedges
        start = max(cert.nodes(), key=lambda v: (cert.degree(v), -v))
        seq = list(nx.bfs_tree(cert, start))
        for v in seq:
            place(v, in_k)
        for v in sorted(pos, key=pos.get):
            for w in sorted((w for w in g.neighbors(v) if w in pos and pos[w] < pos[v]), key=pos.get):
                e = (min(v, w), max(v, w))
                if e not in done:
                    order.append((w, v, False))
                    done.add(e)
    else:
        pos[max(range(g.n), key=lambda v: (g.degree(v), -v))] = 0
    placed = sum(1 << v for v in pos)
    left = set(range(g.n)) - set(pos)
    while left:
        v = min(left, key=lambda u: (-(g.adj[u] & placed).bit_count(), -g.degree(u), u))
        place(v, lambda a, b: True)
        placed |= 1 << v
        left.remove(v)
    return order


class _Search:
    """Static edge order; prune on Euler genus and, once the target is reached, on bridges."""

    def __init__(self, g: Graph, target: int, orientable: bool, budget: "_Budget"):
        self.g = g
        self.n = g.n
        self.target = target
        self.orientable = orientable
        self.budget = budget
        self.order = _edge_order(g)
        self.rot: list[list[int]] = [[] for _ in range(g.n)]
        self.sgn = [[1] * g.n for _ in range(g.n)]
        self.root = self.order[0][0] if self.order else 0
        self.placed = 0
        self.emb = [0] * g.n
        self.result = None

    def _link(self, u: int, w: int) -> None:
        self.emb[u] |= 1 << w
        self.emb[w] |= 1 << u

    def _unlink(self, u: int, w: int) -> None:
        self.emb[u] &= ~(1 << w)
        self.emb[w] &= ~(1 << u)

    def faces(self):
        """Per face: (vertex mask, [(vertex, corner, flag), ...])."""
        rot, sgn = self.rot, self.sgn
        seen = set()
        claimed = set()
        out = []
        flags = (1,) if self.orientable else (1, -1)
        for v in bits(self.placed):
            if not rot[v]:
                out.append((1 << v, [(v, 0, 1)]))
            for i in range(len(rot[v])):
                for s in flags:
                    if (v, i, s) in seen:
                        continue
                    walk = []
                    mask = 0
                    st = (v, i, s)
                    while st not in seen:
                        seen.add(st)
                        x, j, t = st
                        w = rot[x][j]
                        t2 = t * sgn[x][w]
                        rw = rot[w]
                        pj = rw.index(x)
                        c = pj if t2 == 1 else (pj - 1) % len(rw)
                        walk.append((w, c, t2))
                        mask |= 1 << w
                        st = (w, (pj + t2) % len(rw), t2)
                    if (walk[0][0], walk[0][1]) in claimed:
                        continue
                    claimed.update((w, c) for w, c, _ in walk)
                    out.append((mask, walk))
        return out

    def _path(self, comp: int, a: int, b: int) -> list[int]:
        """Shortest path a .. b whose interior lies in ``comp``."""
        g = self.g
        prev = {x: a for x in bits(g.adj[a] & comp)}
        frontier = list(prev)
        while frontier:
            nxt = []
            for x in frontier:
                if g.adj[x] >> b & 1:
                    path = [b, x]
                    while path[-1] != a:
                        path.append(prev[path[-1]])
                    return path[::-1]
                for y in bits(g.adj[x] & comp):
                    if y not in prev:
                        prev[y] = x
                        nxt.append(y)
            frontier = nxt
        raise AssertionError("bridge is not connected")

    def _bridges(self) -> bool:
        """Target reached: every remaining bridge must split a single face."""
        self.budget.tick()
        g, placed, rot, sgn = self.g, self.placed, self.rot, self.sgn
        faces = self.faces()
        at = []
        for _, walk in faces:
            d: dict[int, list[tuple[int, int]]] = {}
            for x, c, t in walk:
                d.setdefault(x, []).append((c, t))
            at.append(d)
        best = None
        for u in bits(placed):
            for w in bits(g.adj[u] & placed & ~self.emb[u]):
                if w < u:
                    continue
                opts = [(fd[u], fd[w]) for fd in at if u in fd and w in fd]
                cnt = sum(len(x) * len(y) for x, y in opts)
                if best is None or cnt < best[0]:
                    best = (cnt, [u, w], opts)
                    if cnt == 0:
                        return False
        rest = ((1 << self.n) - 1) & ~placed
        while rest:
            comp = frontier = rest & -rest
            while frontier:
                nxt = 0
                for x in bits(frontier):
                    nxt |= g.adj[x]
                frontier = nxt & rest & ~comp
                comp |= frontier
            rest &= ~comp
            att = 0
            for x in bits(comp):
                att |= g.adj[x] & placed
            atts = bits(att)
            if len(atts) == 1:
                a = atts[0]
                x = (g.adj[a] & comp & -(g.adj[a] & comp)).bit_length() - 1
                opts = [(fd[a], None) for fd in at if a in fd]
                cnt = sum(len(o[0]) for o in opts)
                path = [a, x]
            else:
                opts = [fd for fd in at if all(y in fd for y in atts)]
                a, b = atts[0], atts[1]
                opts = [(fd[a], fd[b]) for fd in opts]
                cnt = sum(len(x) * len(y) for x, y in opts)
                path = None
            if best is None or cnt < best[0]:
                if cnt == 0:
                    return False
                best = (cnt, path or (comp, atts[0], atts[1]), opts)
        if best is None:
            self.result = ([list(r) for r in rot], [list(r) for r in sgn])
            return True
        _, spec, opts = best
        path = spec if isinstance(spec, list) else self._path(*spec)
        a, b = path[0], path[-1]
        for ca_list, cb_list in opts:
            for ca, ta in ca_list:
                for cb, tb in (cb_list if cb_list is not None else [(None, 1)]):
                    self._insert_path(path, ca, cb, ta * tb)
                    ok = self._bridges()
                    self._remove_path(path, ca, cb)
                    if ok:
                        return True
        return False

    def _insert_path(self, path: list[int], ca: int, cb, sign: int) -> None:
        rot, sgn = self.rot, self.sgn
        a = path[0]
        rot[a].insert(ca + 1 if rot[a] else 0, path[1])
        for i in range(1, len(path)):
            self._link(path[i - 1], path[i])
        if cb is None:
            rot[path[1]].append(a)
            self.placed |= 1 << path[1]
            return
        b = path[-1]
        for i in range(1, len(path) - 1):
            rot[path[i]].extend((path[i - 1], path[i + 1]))
            self.placed |= 1 << path[i]
        rot[b].insert(cb + 1, path[-2])
        sgn[path[-2]][b] = sgn[b][path[-2]] = sign

    def _remove_path(self, path: list[int], ca: int, cb) -> None:
        rot, sgn = self.rot, self.sgn
        a = path[0]
        for i in range(1, len(path)):
            self._unlink(path[i - 1], path[i])
        if cb is None:
            rot[path[1]].clear()
            self.placed &= ~(1 << path[1])
            rot[a].pop(ca + 1 if len(rot[a]) > 1 else 0)
            return
        b = path[-1]
        sgn[path[-2]][b] = sgn[b][path[-2]] = 1
        rot[b].pop(cb + 1)
        for i in range(1, len(path) - 1):
            rot[path[i]].clear()
            self.placed &= ~(1 << path[i])
        rot[a].pop(ca + 1 if len(rot[a]) > 1 else 0)

    def run(self) -> RotationSystem | None:
        if not self.order:
            return RotationSystem(self.rot)
        self.placed = 1 << self.root
        if self._rec(0, 0):
            rot, sgn = self.result
            signs = {(u, w): -1 for u in range(self.n) for w in rot[u] if u < w and sgn[u][w] < 0}
            return RotationSystem(rot, signs)
        return None

    def _rec(self, k: int, eg: int) -> bool:
        self.budget.tick()
        if k == len(self.order):
            if eg != self.target:
                return False
            self.result = ([list(r) for r in self.rot], [list(r) for r in self.sgn])
            return True
        if eg == self.target:
            return self._bridges()
        faces = None
        rot, sgn = self.rot, self.sgn
        u, w, pend = self.order[k]
        if pend:
            du = len(rot[u])
            corners = range(du) if du else (0,)
            if u == self.root and du == 2:
                corners = (0,)
            self.placed |= 1 << w
            ok = False
            for c in corners:
                at = c + 1 if du else 0
                rot[u].insert(at, w)
                rot[w].append(u)
                self._link(u, w)
                ok = self._rec(k + 1, eg)
                self._unlink(u, w)
                rot[w].pop()
                rot[u].pop(at)
                if ok:
                    break
            self.placed &= ~(1 << w)
            return ok
        if faces is None:
            faces = self.faces()
        at_u, at_w = [], []
        for fid, (_, walk) in enumerate(faces):
            for x, c, t in walk:
                if x == u:
                    at_u.append((fid, c, t))
                elif x == w:
                    at_w.append((fid, c, t))
        if u == self.root and len(rot[u]) == 2:
            at_u = [x for x in at_u if x[1] == 0]
        elif w == self.root and len(rot[w]) == 2:
            at_w = [x for x in at_w if x[1] == 0]
        for fu, cu, tu in at_u:
            for fw, cw, tw in at_w:
                if fu == fw:
                    split = tu * tw
                    choices = [(split, eg)]
                    if not self.orientable and eg + 1 <= self.target:
                        choices.append((-split, eg + 1))
                elif eg + 2 <= self.target:
                    choices = [(1, eg + 2)] if self.orientable else [(1, eg + 2), (-1, eg + 2)]
                else:
                    continue
                for s, eg2 in choices:
                    rot[u].insert(cu + 1, w)
                    rot[w].insert(cw + 1, u)
                    sgn[u][w] = sgn[w][u] = s
                    self._link(u, w)
                    ok = self._rec(k + 1, eg2)
                    self._unlink(u, w)
                    sgn[u][w] = sgn[w][u] = 1
                    rot[w].pop(cw + 1)
                    rot[u].pop(cu + 1)
                    if ok:
                        return True
        return False


class _Budget:
    def __init__(self, nodes: int | None, seconds: float | None):
        self.limit = nodes if nodes is not None else DEFAULT_NODE_BUDGET
        self.deadline = time.monotonic() + seconds if seconds else None
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise BudgetExceeded(self.nodes)
        if self.deadline is not None and self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise BudgetExceeded(self.nodes, "time budget")


def _strip_pendants(g: Graph) -> tuple[list[int], list[tuple[int, int]]]:
    """Iteratively remove degree <= 1 vertices; returns (core vertices, removal log (v, parent))."""
    alive = (1 << g.n) - 1
    log = []
    changed = True
    while changed:
        changed = False
        for v in bits(alive):
            nb = g.adj[v] & alive
            if nb.bit_count() <= 1:
                alive &= ~(1 << v)
                log.append((v, nb.bit_length() - 1 if nb else -1))
                changed = True
    return bits(alive), log


def search_embedding(g: Graph, euler_genus_: int, orientable: bool,
                     node_budget: int | None = None, time_budget: float | None = None,
                     budget: _Budget | None = None) -> tuple[RotationSystem | None, int]:
    """Cellular embedding of connected ``g`` with exactly this Euler genus, or None."""
    budget = budget or _Budget(node_budget, time_budget)
    core, log = _strip_pendants(g)
    sub = g.induced(core)
    found = _Search(sub, euler_genus_, orientable, budget).run()
    if found is None:
        return None, budget.nodes
    rot = [[] for _ in range(g.n)]
    for i, r in enumerate(found.rotations):
        rot[core[i]] = [core[x] for x in r]
    signs = {(min(core[a], core[b]), max(core[a], core[b])): s for (a, b), s in found.signs.items()}
    for v, parent in reversed(log):
        if parent >= 0:
            rot[parent].append(v)
            rot[v].append(parent)
    return RotationSystem(rot, signs), budget.nodes


# -- planarity -------------------------------------------------------------------

def is_planar(g: Graph) -> bool:
    import networkx as nx
    return nx.check_planarity(g.to_networkx())[0]


def planar_rotation(g: Graph) -> RotationSystem | None:
    import networkx as nx
    ok, emb = nx.check_planarity(g.to_networkx())
    if not ok:
        return None
    return RotationSystem([list(emb.neighbors_cw_order(v)) if g.degree(v) else [] for v in range(g.n)])


# -- cache ----------------------------------------------------------------------

GOLDEN_DIR = Path(__file__).parent / "data" / "certificates"


def cache_dir() -> Path:
    env = os.environ.get("PERMUTA_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "permuta"


def lookup_dirs() -> list[Path]:
    """User cache first, then the shipped golden certificates unless PERMUTA_GOLDEN=0."""
    dirs = [cache_dir()]
    if os.environ.get("PERMUTA_GOLDEN", "1") != "0":
        dirs.append(GOLDEN_DIR)
    return dirs


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


@dataclass
class SearchStats:
    searches: int = 0
    cache_hits: int = 0
    nodes: int = 0


STATS = SearchStats()


def _cache_key(g: Graph, surface: str) -> str:
    return f"{invariant_hash(g)}-{surface}.json"


def cache_lookup(g: Graph, surface: str, dirs: Iterable[Path] | None = None):
    """Cached decision for a graph isomorphic to ``g``: a certificate, False (proved negative) or None."""
    key = _cache_key(g, surface)
    for d in (dirs if dirs is not None else lookup_dirs()):
        path = Path(d) / key
        if not path.exists():
            continue
        with open(path) as fh:
            data = json.load(fh)
        h = from_graph6(data["graph6"])
        iso = find_isomorphism(g, h)
        if iso is None:
            continue
        if data.get("embeddable") is False:
            return False
        cert = transport(EmbeddingCertificate.from_json(data), g, iso)
        if verify_certificate(g, cert):
            return cert
    return None


def cache_store(g: Graph, surface: str, cert: EmbeddingCertificate | None, nodes: int = 0,
                directory: Path | None = None) -> None:
    path = Path(directory or cache_dir()) / _cache_key(g, surface)
    if cert is None:
        data = {"graph6": to_graph6(g), "surface": surface, "embeddable": False, "nodes": nodes}
    else:
        data = cert.to_json()
    _atomic_write(path, json.dumps(data, indent=1))


# -- embeddability ------------------------------------------------------------

def embeddable_on(g: Graph, surface: str, node_budget: int | None = None,
                  time_budget: float | None = None, use_cache: bool = True) -> EmbeddingCertificate | None:
    """A verified certificate that ``g`` embeds on ``surface``, or None when it provably does not.

    Planar graphs get a sphere certificate (a sphere embedding sits inside every
    surface).  Disconnected graphs embed iff at most one component is non-planar
    and that component embeds.  Raises BudgetExceeded when the search gives up.
    """
    if surface not in ("torus", "projective", "sphere"):
        raise ValueError(f"unsupported surface {surface!r}")
    rs = planar_rotation(g)
    if rs is not None:
        return make_certificate(g, rs, "sphere")
    if surface == "sphere":
        return None
    comps = g.components()
    if len(comps) > 1:
        return _embed_disconnected(g, comps, surface, node_budget, time_budget, use_cache)
    target = SURFACE_EULER_GENUS[surface]
    if euler_bound_excludes(g, target):
        return None
    if use_cache:
        hit = cache_lookup(g, surface)
        if hit is not None:
            STATS.cache_hits += 1
            return hit or None
    STATS.searches += 1
    found, nodes = search_embedding(g, target, surface == "torus", node_budget, time_budget)
    STATS.nodes += nodes
    cert = make_certificate(g, found, surface, nodes) if found is not None else None
    if cert is not None and not verify_certificate(g, cert):
        raise AssertionError("search produced an invalid certificate")
    if use_cache:
        cache_store(g, surface, cert, nodes)
    return cert


def _embed_disconnected(g, comps, surface, node_budget, time_budget, use_cache):
    rot = [[] for _ in range(g.n)]
    signs = {}
    hard = 0
    for comp in comps:
        sub = g.induced(comp)
        cert = planar_rotation(sub)
        if cert is None:
            hard += 1
            if hard > 1:
                return None
            c = embeddable_on(sub, surface, node_budget, time_budget, use_cache)
            if c is None:
                return None
            cert = c.rotation_system()
        for i, r in enumerate(cert.rotations):
            rot[comp[i]] = [comp[x] for x in r]
        for (a, b), s in cert.signs.items():
            signs[(min(comp[a], comp[b]), max(comp[a], comp[b]))] = s
    return make_certificate(g, RotationSystem(rot, signs), surface)


# -- witnesses --------------------------------------------------------------------

# name -> (excludes torus, excludes projective plane)
WITNESSES = (
    ("k8", True, True),
    ("k45", True, True),
    ("k37", True, True),
    ("k7", False, True),
    ("k35", False, True),
    ("k44", False, True),
    ("a1", True, False),
)


@dataclass
class Witness:
    name: str
    mapping: dict[int, int]
    torus: bool
    projective: bool


def quick_bound(g: Graph, need_torus: bool = True, need_projective: bool = True) -> list[Witness]:
    """Witness subgraphs showing genus > 1 and/or crosscap number > 1."""
    out = []
    for name, tor, proj in WITNESSES:
        if not ((tor and need_torus) or (proj and need_projective)):
            continue
        m = has_subgraph(g, pattern(name))
        if m is not None:
            out.append(Witness(name, m, tor, proj))
            need_torus &= not tor
            need_projective &= not proj
            if not (need_torus or need_projective):
                break
    return out


def wye_delta(g: Graph, v: int) -> Graph:
    """Replace degree-3 vertex ``v`` by a triangle on its neighbours."""
    nb = g.neighbors(v)
    if len(nb) != 3:
        raise DegreeNotThree(f"vertex {v} has degree {len(nb)}")
    keep = [x for x in range(g.n) if x != v]
    edges = {(a, b) for a, b in g.edges() if v not in (a, b)}
    a, b, c = nb
    edges |= {(a, b), (a, c), (b, c)}
    pos = {x: i for i, x in enumerate(keep)}
    labels = [g.label(x) for x in keep] if g.labels else None
    return Graph.from_edges(len(keep), [(pos[x], pos[y]) for x, y in edges], labels)


# -- classification ----------------------------------------------------------

@dataclass
class SurfaceClass:
    planar: bool | None
    toroidal: bool | None
    projective: bool | None
    evidence: dict[str, object] = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return None in (self.planar, self.toroidal, self.projective)


def classify_surface(g: Graph, node_budget: int | None = None, time_budget: float | None = None,
                     use_cache: bool = True) -> SurfaceClass:
    """Planar, toroidal (genus exactly 1) and projective-planar (crosscap exactly 1) flags."""
    if is_planar(g):
        return SurfaceClass(True, False, False, {"planar": "planarity test"})
    out = SurfaceClass(False, None, None)
    for w in quick_bound(g):
        if w.torus and out.toroidal is None:
            out.toroidal = False
            out.evidence["torus"] = f"witness {w.name}"
        if w.projective and out.projective is None:
            out.projective = False
            out.evidence["projective"] = f"witness {w.name}"
    for surface, attr in (("torus", "toroidal"), ("projective", "projective")):
        if getattr(out, attr) is not None:
            continue
        try:
            cert = embeddable_on(g, surface, node_budget, time_budget, use_cache)
        except BudgetExceeded as exc:
            out.evidence[surface] = f"inconclusive after {exc.nodes} nodes"
            continue
        setattr(out, attr, cert is not None)
        if cert is not None:
            out.evidence[surface] = cert
        elif euler_bound_excludes(g, SURFACE_EULER_GENUS[surface]):
            out.evidence[surface] = "euler bound"
        else:
            out.evidence[surface] = "exhaustive search"
    return out
