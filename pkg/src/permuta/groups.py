"""Finite groups as validated Cayley tables, their subgroups, and permutability."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

ORDER_CAP = 512


class GroupError(ValueError):
    """Base class for malformed group input."""


class NotLatinSquare(GroupError):
    pass


class NotAssociative(GroupError):
    pass


class NoIdentity(GroupError):
    pass


class OrderExceedsCap(GroupError):
    pass


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class Subgroup:
    members: int
    gens: tuple[int, ...] = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return self.members.bit_count()

    def elements(self) -> list[int]:
        return bits(self.members)

    def __contains__(self, x: int) -> bool:
        return bool(self.members >> x & 1)

    def __le__(self, other: "Subgroup") -> bool:
        return self.members & ~other.members == 0


def _sort_key(h: Subgroup) -> tuple[int, tuple[int, ...]]:
    return (h.order, tuple(h.elements()))


@dataclass(frozen=True)
class SubgroupLattice:
    all: tuple[Subgroup, ...]
    proper: tuple[Subgroup, ...]


@dataclass(frozen=True)
class GroupInvariants:
    is_abelian: bool
    is_solvable: bool
    sylow_counts: dict[int, int]
    element_order_histogram: dict[int, int]


class FiniteGroup:
    """A group given by its Cayley table; ``table[x][y]`` is ``x * y``.

    Construction validates the group axioms eagerly, so everything downstream
    can assume a genuine group.
    """

    def __init__(self, table: Sequence[Sequence[int]], name: str = "", *,
                 cap: int = ORDER_CAP, labels: Sequence[str] | None = None):
        arr = np.asarray(table, dtype=np.int64)
        n = len(arr)
        if n == 0 or arr.ndim != 2 or arr.shape != (n, n):
            raise NotLatinSquare("table must be a non-empty square array")
        if n > cap:
            raise OrderExceedsCap(f"order {n} exceeds cap {cap}")
        if arr.min() < 0 or arr.max() >= n:
            raise NotLatinSquare("table entries must lie in 0..order-1")
        _check_latin(arr)
        e = _find_identity(arr)
        _check_associative(arr)
        self.order = n
        self.identity = e
        self.name = name
        self.array = arr
        self.table = arr.tolist()
        self.labels = list(labels) if labels is not None else None
        inv = [0] * n
        for x in range(n):
            inv[x] = int(np.nonzero(arr[x] == e)[0][0])
        self.inverse = inv

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def label(self, x: int) -> str:
        if self.labels is not None:
            return self.labels[x]
        return str(x)

    @cached_property
    def full(self) -> Subgroup:
        return Subgroup((1 << self.order) - 1, tuple(range(self.order)))

    @cached_property
    def trivial(self) -> Subgroup:
        return Subgroup(1 << self.identity, ())

    @cached_property
    def element_orders(self) -> list[int]:
        out = []
        for x in range(self.order):
            k, y = 1, x
            while y != self.identity:
                y = self.table[y][x]
                k += 1
            out.append(k)
        return out

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.array == self.array.T).all())


def _check_latin(arr: np.ndarray) -> None:
    n = len(arr)
    want = np.arange(n)
    for r in range(n):
        if not np.array_equal(np.sort(arr[r]), want):
            vals, counts = np.unique(arr[r], return_counts=True)
            dup = int(vals[counts > 1][0])
            raise NotLatinSquare(f"row {r} repeats {dup}")
    for c in range(n):
        if not np.array_equal(np.sort(arr[:, c]), want):
            vals, counts = np.unique(arr[:, c], return_counts=True)
            dup = int(vals[counts > 1][0])
            raise NotLatinSquare(f"column {c} repeats {dup}")


def _find_identity(arr: np.ndarray) -> int:
    n = len(arr)
    want = np.arange(n)
    for e in range(n):
        if np.array_equal(arr[e], want) and np.array_equal(arr[:, e], want):
            return e
    raise NoIdentity("no two-sided identity element")


def _check_associative(arr: np.ndarray) -> None:
    # (xy)z == x(yz), one x-slab at a time to bound memory
    for x in range(len(arr)):
        left = arr[arr[x]]            # left[y, z] = (x y) z
        right = arr[x][arr]           # right[y, z] = x (y z)
        bad = np.argwhere(left != right)
        if len(bad):
            y, z = (int(v) for v in bad[0])
            raise NotAssociative(f"(x*y)*z != x*(y*z) for (x, y, z) = ({x}, {y}, {z})")


def make_group(table: Sequence[Sequence[int]], name: str = "", **kw) -> FiniteGroup:
    return FiniteGroup(table, name, **kw)


def group_from_permutations(gens: Sequence[Sequence[int]], name: str = "",
                            cap: int = ORDER_CAP) -> FiniteGroup:
    """Tabulate the group generated by permutations (images of 0..d-1).

    Composition is right-to-left: ``(p * q)(i) = p(q(i))``.
    """
    if not gens:
        raise GroupError("need at least one generator")
    degree = len(gens[0])
    for g in gens:
        if sorted(g) != list(range(degree)):
            raise GroupError(f"not a permutation of 0..{degree - 1}: {list(g)}")
    ident = tuple(range(degree))
    elems = [ident]
    index = {ident: 0}
    gens = [tuple(g) for g in gens]
    i = 0
    while i < len(elems):
        p = elems[i]
        for g in gens:
            q = tuple(p[g[k]] for k in range(degree))
            if q not in index:
                if len(elems) >= cap:
                    raise OrderExceedsCap(f"generated group exceeds cap {cap}")
                index[q] = len(elems)
                elems.append(q)
        i += 1
    table = [[index[tuple(p[q[k]] for k in range(degree))] for q in elems] for p in elems]
    return FiniteGroup(table, name, cap=cap, labels=[_cycle_string(p) for p in elems])


def _cycle_string(p: Sequence[int]) -> str:
    seen, parts = set(), []
    for s in range(len(p)):
        if s in seen or p[s] == s:
            continue
        cyc, x = [], s
        while x not in seen:
            seen.add(x)
            cyc.append(x + 1)
            x = p[x]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def load_group(path: str | Path, cap: int = ORDER_CAP) -> FiniteGroup:
    """Read either JSON group form: an explicit table or permutation generators."""
    with open(path) as fh:
        data = json.load(fh)
    name = data.get("name", Path(path).stem)
    if "table" in data:
        if "order" in data and data["order"] != len(data["table"]):
            raise GroupError(f"declared order {data['order']} != table size {len(data['table'])}")
        return FiniteGroup(data["table"], name, cap=cap)
    if "permutation_generators" in data:
        gens = data["permutation_generators"]
        if "degree" in data and any(len(g) != data["degree"] for g in gens):
            raise GroupError("generator length does not match degree")
        return group_from_permutations(gens, name, cap=cap)
    raise GroupError("group JSON needs 'table' or 'permutation_generators'")


def dump_group(g: FiniteGroup, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump({"name": g.name, "order": g.order, "table": g.table}, fh)


# -- subgroups -------------------------------------------------------------

def _check_indices(g: FiniteGroup, xs: Iterable[int]) -> list[int]:
    xs = list(xs)
    for x in xs:
        if not 0 <= x < g.order:
            raise IndexError(f"element index {x} out of range for order {g.order}")
    return xs


def closure(g: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    """Smallest subgroup containing ``gens``."""
    gens = _check_indices(g, gens)
    t = g.table
    gens = [x for x in dict.fromkeys(gens) if x != g.identity]
    mask = 1 << g.identity
    frontier = [g.identity]
    while frontier:
        nxt = []
        for x in frontier:
            row = t[x]
            for s in gens:
                y = row[s]
                if not mask >> y & 1:
                    mask |= 1 << y
                    nxt.append(y)
        frontier = nxt
    return Subgroup(mask, tuple(gens))


def all_subgroups(g: FiniteGroup, cap: int = ORDER_CAP) -> SubgroupLattice:
    """Every subgroup of ``g``: cyclic seeds, then joins with cyclic subgroups to a fixpoint."""
    if g.order > cap:
        raise OrderExceedsCap(f"order {g.order} exceeds cap {cap}")
    cyclic: dict[int, Subgroup] = {}
    for x in range(g.order):
        h = closure(g, [x])
        cyclic.setdefault(h.members, h)
    found: dict[int, Subgroup] = dict(cyclic)
    queue = list(found.values())
    cyc = list(cyclic.values())
    while queue:
        h = queue.pop()
        for c in cyc:
            if c.members & ~h.members == 0:
                continue
            j = closure(g, h.gens + c.gens)
            if j.members not in found:
                found[j.members] = j
                queue.append(j)
    subs = sorted(found.values(), key=_sort_key)
    proper = tuple(h for h in subs if 1 < h.order < g.order)
    return SubgroupLattice(tuple(subs), proper)


def all_subgroups_bruteforce(g: FiniteGroup) -> set[int]:
    """Independent enumeration: closure of every subset (exponential; tests only)."""
    n = g.order
    seen = set()
    for subset in range(1 << n):
        seen.add(closure(g, bits(subset)).members)
    return seen


def product_set(g: FiniteGroup, h: Subgroup, k: Subgroup) -> int:
    """The set HK as a bitmask."""
    t = g.table
    ks = k.elements()
    mask = 0
    for x in h.elements():
        row = t[x]
        for y in ks:
            mask |= 1 << row[y]
    return mask


def is_closed(g: FiniteGroup, mask: int) -> bool:
    t = g.table
    xs = bits(mask)
    for x in xs:
        row = t[x]
        for y in xs:
            if not mask >> row[y] & 1:
                return False
    return True


def permutes(g: FiniteGroup, h: Subgroup, k: Subgroup) -> bool:
    """True iff HK = KH."""
    if h.members & ~k.members == 0 or k.members & ~h.members == 0:
        return True
    hk = product_set(g, h, k)
    # |HK| = |H||K|/|H∩K| with HK = KH forces the size to divide |G|
    if g.order % hk.bit_count():
        return False
    return hk == product_set(g, k, h)


def is_normal(g: FiniteGroup, h: Subgroup) -> bool:
    t, inv = g.table, g.inverse
    gens = h.gens or tuple(h.elements())
    for x in range(g.order):
        row = t[x]
        for s in gens:
            if not h.members >> t[row[s]][inv[x]] & 1:
                return False
    return True


def quotient(g: FiniteGroup, n: Subgroup) -> tuple[FiniteGroup, list[int]]:
    """G/N for normal N, plus the projection as a list: element -> coset index."""
    if not is_normal(g, n):
        raise GroupError("quotient needs a normal subgroup")
    coset = [-1] * g.order
    reps = []
    for x in range(g.order):
        if coset[x] < 0:
            for y in n.elements():
                coset[g.table[x][y]] = len(reps)
            reps.append(x)
    table = [[coset[g.table[a][b]] for b in reps] for a in reps]
    return FiniteGroup(table, f"{g.name}/N"), coset


# -- invariants ------------------------------------------------------------

def commutator_subgroup(g: FiniteGroup, h: Subgroup) -> Subgroup:
    t, inv = g.table, g.inverse
    xs = h.elements()
    comms = set()
    for x in xs:
        for y in xs:
            comms.add(t[t[inv[x]][inv[y]]][t[x][y]])
    return closure(g, comms)


def derived_series(g: FiniteGroup) -> list[Subgroup]:
    series = [g.full]
    while True:
        d = commutator_subgroup(g, series[-1])
        if d.members == series[-1].members:
            return series
        series.append(d)


def prime_factors(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and prime_factors(n) == {n: 1}


def invariants(g: FiniteGroup, lattice: SubgroupLattice | None = None) -> GroupInvariants:
    solvable = derived_series(g)[-1].order == 1
    hist: dict[int, int] = {}
    for k in g.element_orders:
        hist[k] = hist.get(k, 0) + 1
    lat = lattice if lattice is not None else all_subgroups(g)
    sylow = {}
    for p, k in prime_factors(g.order).items():
        sylow[p] = sum(1 for h in lat.all if h.order == p ** k)
    return GroupInvariants(g.is_abelian, solvable, sylow, dict(sorted(hist.items())))
