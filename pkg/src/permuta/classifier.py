"""Closed-form classification of group descriptors and the pipeline cross-check.

The oracle reads only descriptors; the pipeline reads only Cayley tables.
``cross_validate`` runs both and compares every flag.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .graphs import NoProperSubgroups, forbidden_profile, permutability_graph
from .groups import (FiniteGroup, all_subgroups, closure, commutator_subgroup, is_prime,
                     prime_factors)
from .topology import SurfaceClass, classify_surface
from .zoo import (D, GroupDescriptor, InvalidParameters, NoSuchParameter, abelian_invariants,
                  construct, expected_order, find_action_parameter, has_eigenvector, mat_mul,
                  mat_order, mult_order)

FLAGS = ("planar", "toroidal", "projective")


class UnrecognizedDescriptor(ValueError):
    pass


@dataclass
class ClassificationRecord:
    planar: bool | None
    toroidal: bool | None
    projective: bool | None
    forbidden: dict[str, bool | None]
    source: str
    evidence: dict[str, object] = field(default_factory=dict)

    def flags(self) -> dict[str, bool | None]:
        out = {k: getattr(self, k) for k in FLAGS}
        out.update({f"{k}free": v for k, v in self.forbidden.items()})
        return out


# -- descriptor normal forms ------------------------------------------------

def _kind(d: GroupDescriptor) -> tuple:
    """Reduce a descriptor to the shape the classification lists are stated in."""
    f, ps = d.family, d.params
    if f == "Opaque":
        raise UnrecognizedDescriptor("opaque tables carry no family information")
    if f == "Cyclic":
        return ("abelian", abelian_invariants(ps))
    if f == "ElementaryAbelian":
        return ("abelian", abelian_invariants([ps[0]] * ps[1]))
    if f == "DirectProduct":
        facs = [x for x in (d.factors or [D("Cyclic", n) for n in ps]) if expected_order(x) > 1]
        kinds = [_kind(x) for x in facs]
        if len(kinds) == 1:
            return kinds[0]
        if all(k[0] == "abelian" for k in kinds):
            return ("abelian", abelian_invariants([n for k in kinds for n in k[1]]))
        if any(k[0] == "nonsolvable" for k in kinds):
            return ("nonsolvable", "direct factor")
        return ("other", "direct product with a non-abelian factor")
    if f == "Dihedral":
        n = ps[0]
        return ("ZqZp", n, 2) if is_prime(n) else ("other", f"dihedral of order {2 * n}")
    if f == "GeneralizedQuaternion":
        return ("Q8",) if ps[0] == 3 else ("other", f"generalized quaternion of order {2 ** ps[0]}")
    if f == "Modular":
        return ("other", "modular group")
    if f == "Symmetric":
        return {3: ("ZqZp", 3, 2), 4: ("other", "S4"), 5: ("nonsolvable", "S5")}[ps[0]]
    if f == "Alternating":
        return {3: ("abelian", (3,)), 4: ("A4",), 5: ("nonsolvable", "A5")}[ps[0]]
    if f == "MetacyclicSemidirect":
        q, p, a, t = ps
        if t == 0:
            return ("abelian", abelian_invariants([q, p ** a]))
        if a == 1:
            return ("ZqZp", q, p)
        if a == 2:
            return ("ZqZp2", q, p, t)
        return ("other", f"Z_{q} by Z_{p}^{a}")
    if f == "SplitMetacyclic":
        m, n, i = ps
        if i % m == 1 % m:
            return ("abelian", abelian_invariants([m, n]))
        pf = prime_factors(n)
        if is_prime(m) and len(pf) == 1 and m not in pf:
            (p, a), = pf.items()
            k = mult_order(i, m)
            return _kind(D("MetacyclicSemidirect", m, p, a, prime_factors(k)[p]))
        return ("other", "split metacyclic group")
    if f == "PPSemidirectQ":
        p, q = ps[:2]
        find_action_parameter(p, q) if len(ps) == 2 else None
        return ("A4",) if (p, q) == (2, 3) else ("PPQ", p, q)
    if f == "PPSemidirectC4":
        if ps[0] != 0:
            raise NoSuchParameter(f"l={ps[0]} gives no matrix of order dividing 4")
        return ("PPC4",)
    if f == "MatrixSemidirect":
        p, n = ps[:2]
        m = tuple(v % p for v in ps[2:])
        k = mat_order(m, p)
        if k == 1:
            return ("abelian", abelian_invariants([p, p, n]))
        if n != k:
            return ("other", "action with a kernel")
        if p == 2 and k == 3:
            return ("A4",)
        if is_prime(k) and not has_eigenvector(m, p):
            return ("PPQ", p, k)
        if p == 3 and k == 4:
            return ("PPC4",)
        return ("other", f"(Z_{p} x Z_{p}) by Z_{n}")
    raise UnrecognizedDescriptor(f"no classification rule for family {f}")


def _abelian_flags(inv: tuple[int, ...]) -> tuple[bool, bool, bool]:
    if len(inv) <= 1:
        n = inv[0] if inv else 1
        r = 1
        for a in prime_factors(n).values():
            r *= a + 1
        r -= 2
        if r < 1:
            raise NoProperSubgroups(f"Z_{n} has no proper non-trivial subgroups")
        return r <= 4, r in (5, 6, 7), r in (5, 6)
    if inv in ((2, 2), (3, 3)):
        return True, False, False
    if inv in ((2, 4), (5, 5)):
        return False, True, True
    return False, False, False


def _surface_flags(kind: tuple) -> tuple[bool, bool, bool, str]:
    tag = kind[0]
    if tag == "abelian":
        return (*_abelian_flags(kind[1]), "abelian classification")
    if tag in ("Q8", "A4", "ZqZp"):
        return True, False, False, "planar list"
    if tag == "ZqZp2":
        q, p, t = kind[1:]
        if t == 2:
            return True, False, False, "planar list (Z_q x|_2 Z_p^2)"
        if (q, p) == (3, 2):
            return False, True, True, "toroidal and projective lists (Z_3 x| Z_4)"
        if (q, p) == (5, 2):
            return False, True, False, "toroidal list (Z_5 x| Z_4)"
        return False, False, False, "not listed"
    if tag == "PPQ":
        p, q = kind[1:]
        if p == 3:
            return False, True, True, "toroidal and projective lists (p = 3)"
        if p == 5:
            return False, True, False, "toroidal list (p = 5)"
        return False, False, False, "not listed"
    if tag == "PPC4":
        return False, True, True, "toroidal and projective lists ((Z_3 x Z_3) x| Z_4)"
    if tag == "nonsolvable":
        return False, False, False, "non-solvable"
    return False, False, False, f"not listed ({kind[1]})"


def _forbidden_flags(kind: tuple) -> dict[str, bool]:
    """Membership in the five forbidden-subgraph lists, keyed like ``forbidden_profile``."""
    tag = kind[0]
    if tag == "abelian":
        inv = kind[1]
        if len(inv) <= 1:
            n = inv[0] if inv else 1
            r = 1
            for a in prime_factors(n).values():
                r *= a + 1
            r -= 2
            small = 1 <= r <= 4
            return {"k15": small, "p5": r <= 5, "p6": r <= 6, "c6": r <= 5, "k33": r <= 5}
        base = inv in ((2, 2), (3, 3))
        return {"k15": base, "p5": base, "c6": base, "k33": base,
                "p6": base or inv in ((5, 5), (2, 4))}
    if tag == "Q8":
        return dict.fromkeys(("k15", "p5", "p6", "c6", "k33"), True)
    if tag in ("ZqZp", "A4"):
        s3 = kind == ("ZqZp", 3, 2)
        return {"k15": s3, "p5": True, "p6": True, "c6": True, "k33": True}
    if tag == "ZqZp2" and kind[3] == 2:
        return {"k15": False, "p5": False, "p6": False, "c6": False, "k33": True}
    if tag == "PPQ" and kind[1:] == (3, 2):
        return {"k15": False, "p5": False, "p6": True, "c6": True, "k33": True}
    return dict.fromkeys(("k15", "p5", "p6", "c6", "k33"), False)


def oracle_classify(d: GroupDescriptor) -> ClassificationRecord:
    """Surface flags and forbidden-subgraph memberships read off the classification lists."""
    kind = _kind(d)
    planar, toroidal, projective, rule = _surface_flags(kind)
    return ClassificationRecord(planar, toroidal, projective, _forbidden_flags(kind), "oracle",
                                {"rule": rule, "kind": kind})


def forbidden_class_membership(d: GroupDescriptor) -> dict[str, bool]:
    return _forbidden_flags(_kind(d))


def nonsolvable_claim() -> ClassificationRecord:
    """What the lists say about any non-solvable group: on none of them."""
    kind = ("nonsolvable", "table")
    planar, toroidal, projective, rule = _surface_flags(kind)
    return ClassificationRecord(planar, toroidal, projective, _forbidden_flags(kind), "oracle",
                                {"rule": rule, "kind": kind})


# -- recognition ------------------------------------------------------------

def _fingerprint(g: FiniteGroup) -> tuple:
    hist: dict[int, int] = {}
    for k in g.element_orders:
        hist[k] = hist.get(k, 0) + 1
    t = g.array
    center = int(np.sum(np.all(t == t.T, axis=1)))
    return (g.order, tuple(sorted(hist.items())), center, commutator_subgroup(g, g.full).order)


def _generators(g: FiniteGroup) -> list[int]:
    gens: list[int] = []
    current = closure(g, [])
    by_order = sorted(range(g.order), key=lambda x: -g.element_orders[x])
    while current.order < g.order:
        best = None
        for x in by_order:
            if x in current:
                continue
            h = closure(g, [*gens, x])
            if best is None or h.order > best[1].order:
                best = (x, h)
                if h.order == g.order:
                    break
        gens.append(best[0])
        current = best[1]
    return gens


def group_isomorphism(g: FiniteGroup, h: FiniteGroup) -> dict[int, int] | None:
    """An isomorphism h -> g found by backtracking over generator images."""
    if g.order != h.order or _fingerprint(g) != _fingerprint(h):
        return None
    gens = _generators(h)
    ho, go = h.element_orders, g.element_orders
    pools = [[x for x in range(g.order) if go[x] == ho[y]] for y in gens]
    ht, gt = h.table, g.table

    def extend(images: list[int]) -> dict[int, int] | None:
        phi = {h.identity: g.identity}
        used = {g.identity}
        queue = [h.identity]
        for x in queue:
            for y, gy in zip(gens, images):
                z, gz = ht[x][y], gt[phi[x]][gy]
                if z in phi:
                    if phi[z] != gz:
                        return None
                elif gz in used:
                    return None
                else:
                    phi[z] = gz
                    used.add(gz)
                    queue.append(z)
        return phi if len(phi) == h.order else None

    def rec(images: list[int]) -> dict[int, int] | None:
        k = len(images)
        if k == len(gens):
            return extend(images)
        for x in pools[k]:
            if any(go[gt[x][im]] != ho[ht[gens[k]][gens[j]]] for j, im in enumerate(images)):
                continue
            found = rec(images + [x])
            if found is not None:
                return found
        return None

    return rec([])


@lru_cache(maxsize=None)
def _gl2_classes(p: int) -> tuple[tuple[int, int, int, int], ...]:
    """Representatives of conjugacy classes of GL_2(p), up to replacing M by a generator of <M>."""
    mats = [m for m in itertools.product(range(p), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % p]
    inv = {}
    for m in mats:
        a, b, c, d = m
        det_inv = pow((a * d - b * c) % p, -1, p)
        inv[m] = (d * det_inv % p, -b * det_inv % p, -c * det_inv % p, a * det_inv % p)
    seen, reps = set(), []
    for m in mats:
        if m in seen:
            continue
        reps.append(m)
        k = mat_order(m, p)
        powers = [m]
        x = m
        for j in range(2, k):
            x = mat_mul(x, m, p)
            if np.gcd(j, k) == 1:
                powers.append(x)
        for y in powers:
            for s in mats:
                seen.add(mat_mul(mat_mul(s, y, p), inv[s], p))
    return tuple(reps)


def _abelian_descriptor(inv: tuple[int, ...]) -> GroupDescriptor:
    if len(inv) == 1:
        return D("Cyclic", inv[0])
    if len(set(inv)) == 1 and is_prime(inv[0]):
        return D("ElementaryAbelian", inv[0], len(inv))
    return D("DirectProduct", *inv)


def _abelian_groups(n: int):
    """All abelian groups of order n, as invariant-factor tuples."""
    parts = []
    for p, k in prime_factors(n).items():
        parts.append([[p ** e for e in part] for part in _partitions(k)])
    for combo in itertools.product(*parts):
        yield abelian_invariants([x for c in combo for x in c])


def _partitions(k: int, largest: int | None = None):
    largest = k if largest is None else largest
    if k == 0:
        yield []
        return
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first):
            yield [first, *rest]


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def candidates(n: int, products: bool = True):
    """Non-abelian zoo descriptors of order n, in the preferred naming order."""
    pf = prime_factors(n)
    if n in (6, 24, 120):
        yield D("Symmetric", {6: 3, 24: 4, 120: 5}[n])
    if n in (12, 60):
        yield D("Alternating", {12: 4, 60: 5}[n])
    if len(pf) == 1:
        (p, a), = pf.items()
        if p == 2 and a >= 3:
            yield D("GeneralizedQuaternion", a)
        if a >= 3:
            yield D("Modular", p, a)
    if n % 2 == 0 and n // 2 >= 3:
        yield D("Dihedral", n // 2)
    for q in pf:
        rest = prime_factors(n // q)
        if len(rest) == 1 and q not in rest:
            (p, a), = rest.items()
            for t in range(1, a + 1):
                if (q - 1) % p ** t == 0:
                    yield D("MetacyclicSemidirect", q, p, a, t)
    for p, e in pf.items():
        if e >= 2:
            q = n // p ** 2
            if is_prime(q) and q != p:
                try:
                    yield D("PPSemidirectQ", p, q, find_action_parameter(p, q))
                except NoSuchParameter:
                    pass
    if n == 36:
        yield D("PPSemidirectC4", 0)
    if products:
        for a in reversed(_divisors(n)):
            b = n // a
            if a < 2 or b < 6:
                continue
            for inv in _abelian_groups(a):
                for x in candidates(b, products=False):
                    yield GroupDescriptor("DirectProduct", (a, b), (_abelian_descriptor(inv), x))
            if a >= 6 and a <= b:
                for x in candidates(a, products=False):
                    for y in candidates(b, products=False):
                        yield GroupDescriptor("DirectProduct", (a, b), (x, y))
    for m in _divisors(n):
        k = n // m
        if m < 3 or k < 2:
            continue
        for i in range(2, m):
            if np.gcd(i, m) == 1 and pow(i, k, m) == 1:
                yield D("SplitMetacyclic", m, k, i)
    for p, e in pf.items():
        if e >= 2 and p <= 7:
            k = n // p ** 2
            for m in _gl2_classes(p):
                o = mat_order(m, p)
                if o > 1 and k % o == 0:
                    yield D("MatrixSemidirect", p, k, *m)


@lru_cache(maxsize=4096)
def _built(d: GroupDescriptor) -> tuple[FiniteGroup, tuple]:
    g = construct(d)
    return g, _fingerprint(g)


def recognize(g: FiniteGroup) -> GroupDescriptor:
    """Name ``g`` by a zoo descriptor, or Opaque when no candidate is isomorphic."""
    if g.is_abelian:
        return _abelian_descriptor(_abelian_invariants_of(g))
    if not _solvable(g):
        return GroupDescriptor("Opaque", source=f"{g.name} (non-solvable)")
    fp = _fingerprint(g)
    for d in candidates(g.order):
        try:
            h, hfp = _built(d)
        except InvalidParameters:
            continue
        if hfp == fp and group_isomorphism(g, h) is not None:
            return d
    return GroupDescriptor("Opaque", source=g.name)


def _abelian_invariants_of(g: FiniteGroup) -> tuple[int, ...]:
    """Invariant factors of an abelian group from its element orders.

    With s_k = log_p #{x : x^(p^k) = 1}, the number of cyclic p-factors of
    exponent at least k is s_k - s_(k-1).
    """
    orders = g.element_orders
    out = []
    for p, e in prime_factors(g.order).items():
        s = [0]
        while s[-1] < e:
            cnt = sum(1 for o in orders if p ** len(s) % o == 0)
            k = 0
            while cnt > 1:
                cnt //= p
                k += 1
            s.append(k)
        at_least = [s[k] - s[k - 1] for k in range(1, len(s))] + [0]
        for k in range(1, len(s)):
            out += [p ** k] * (at_least[k - 1] - at_least[k])
    return abelian_invariants(out) if out else (1,)


# -- cross validation -------------------------------------------------------

@dataclass
class CrossValidationReport:
    name: str
    order: int
    descriptor: GroupDescriptor
    pipeline: ClassificationRecord
    oracle: ClassificationRecord | None
    agreements: list[str]
    disagreements: list[str]
    inconclusive: list[str]
    note: str = ""
    runtime_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.disagreements and not self.inconclusive


def pipeline_classify(g: FiniteGroup, node_budget: int | None = None,
                      time_budget: float | None = None, use_cache: bool = True) -> ClassificationRecord:
    lat = all_subgroups(g)
    graph = permutability_graph(g, lat)
    sc: SurfaceClass = classify_surface(graph, node_budget, time_budget, use_cache)
    prof = forbidden_profile(graph)
    ev = dict(sc.evidence)
    ev["graph"] = f"{graph.n} vertices, {graph.m} edges"
    return ClassificationRecord(sc.planar, sc.toroidal, sc.projective, prof, "pipeline", ev)


def cross_validate(g: FiniteGroup, node_budget: int | None = None, time_budget: float | None = None,
                   use_cache: bool = True, expected: GroupDescriptor | None = None) -> CrossValidationReport:
    """Pipeline on the table versus oracle on the recognised descriptor."""
    t0 = time.perf_counter()
    pipe = pipeline_classify(g, node_budget, time_budget, use_cache)
    desc = recognize(g)
    note = ""
    oracle = None
    solvable = _solvable(g)
    if desc.family == "Opaque" and not solvable:
        oracle = nonsolvable_claim()
        note = "non-solvable: on none of the lists"
    elif desc.family == "Opaque":
        note = "no oracle claim"
    else:
        try:
            oracle = oracle_classify(desc)
        except NoSuchParameter as exc:
            note = f"vacuous family per parameter search: {exc}"
    agree, disagree, inconc = [], [], []
    pf = pipe.flags()
    if oracle is not None:
        for key, want in oracle.flags().items():
            got = pf[key]
            if got is None:
                inconc.append(key)
            elif got == want:
                agree.append(key)
            else:
                disagree.append(key)
    else:
        inconc += [k for k, v in pf.items() if v is None]
        if expected is not None and expected.family != "Opaque" and solvable:
            disagree.append("recognition")
            note += f"; expected {expected.text()}"
    return CrossValidationReport(g.name, g.order, desc, pipe, oracle, agree, disagree, inconc, note,
                                 (time.perf_counter() - t0) * 1000)


def _solvable(g: FiniteGroup) -> bool:
    from .groups import derived_series
    return derived_series(g)[-1].order == 1
