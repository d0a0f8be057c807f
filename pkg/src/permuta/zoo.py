"""Constructors for the named group families, tabulated through ``make_group``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from .groups import FiniteGroup, GroupError, is_prime, load_group, prime_factors

FAMILIES = (
    "Cyclic", "DirectProduct", "ElementaryAbelian", "Dihedral", "GeneralizedQuaternion",
    "Modular", "MetacyclicSemidirect", "PPSemidirectQ", "PPSemidirectC4", "Symmetric",
    "Alternating", "SplitMetacyclic", "MatrixSemidirect", "Opaque",
)


class InvalidParameters(GroupError):
    pass


class NoSuchParameter(InvalidParameters):
    """No companion matrix of the requested order exists."""


@dataclass(frozen=True)
class GroupDescriptor:
    family: str
    params: tuple[int, ...] = ()
    factors: tuple["GroupDescriptor", ...] = ()
    source: str = field(default="", compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameters(f"unknown family {self.family!r}")

    @property
    def presentation(self) -> str:
        return presentation(self)

    def text(self) -> str:
        return to_text(self)

    def __str__(self) -> str:
        return self.text()


def D(family: str, *params: int, factors: Sequence[GroupDescriptor] = ()) -> GroupDescriptor:
    return GroupDescriptor(family, tuple(params), tuple(factors))


# -- small number theory and matrices over F_p -----------------------------

def mult_order(i: int, m: int) -> int:
    i %= m
    k, x = 1, i
    while x != 1 % m:
        x = x * i % m
        k += 1
        if k > m:
            raise InvalidParameters(f"{i} is not a unit mod {m}")
    return k


def element_of_order(m: int, k: int) -> int | None:
    """Smallest unit mod ``m`` of multiplicative order exactly ``k``."""
    for i in range(1, m + 1):
        if _gcd(i, m) == 1 and mult_order(i, m) == k:
            return i % m if m > 1 else 0
    return None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


Mat = tuple[int, int, int, int]


def mat_mul(x: Mat, y: Mat, p: int) -> Mat:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def mat_order(m: Mat, p: int, limit: int | None = None) -> int | None:
    ident = (1, 0, 0, 1)
    limit = limit or p * p
    x, k = tuple(v % p for v in m), 1
    while x != ident:
        x = mat_mul(x, m, p)
        k += 1
        if k > limit:
            return None
    return k


def companion(l: int, p: int) -> Mat:
    return (0, (-1) % p, 1, l % p)


def action_matrix(l: int, p: int) -> Mat:
    """Column action of c on (a, b): a -> b^-1, b -> a b^l."""
    return (0, 1, (-1) % p, l % p)


def find_action_parameter(p: int, required_order: int) -> int:
    """Smallest l with [[0,-1],[1,l]] of order exactly ``required_order`` in GL_2(p)."""
    if not is_prime(p):
        raise InvalidParameters(f"p={p} is not prime")
    if required_order < 2:
        raise InvalidParameters("required_order must be at least 2")
    for l in range(p):
        if mat_order(companion(l, p), p) == required_order:
            return l
    raise NoSuchParameter(f"no l in 0..{p - 1} gives a companion matrix of order "
                          f"{required_order} in GL_2({p})")


def has_eigenvector(m: Mat, p: int) -> bool:
    a, b, c, d = m
    for lam in range(p):
        if ((a - lam) * (d - lam) - b * c) % p == 0:
            return True
    return False


# -- generic tabulation ----------------------------------------------------

def tabulate(elements: Sequence[Hashable], mul: Callable, name: str,
             label: Callable[[Hashable], str] = str) -> FiniteGroup:
    index = {x: i for i, x in enumerate(elements)}
    table = [[index[mul(x, y)] for y in elements] for x in elements]
    return FiniteGroup(table, name, labels=[label(x) for x in elements])


def _power_label(sym: str, k: int) -> str:
    if k == 0:
        return ""
    return sym if k == 1 else f"{sym}^{k}"


def _word(*parts: tuple[str, int]) -> str:
    w = "".join(_power_label(s, k) for s, k in parts)
    return w or "1"


def split_metacyclic(m: int, n: int, i: int, name: str) -> FiniteGroup:
    """<a, b | a^m = b^n = 1, b a b^-1 = a^i>, elements a^x b^y."""
    elems = [(x, y) for y in range(n) for x in range(m)]
    pw = [pow(i, y, m) for y in range(n)]

    def mul(s, t):
        return ((s[0] + t[0] * pw[s[1]]) % m, (s[1] + t[1]) % n)

    return tabulate(elems, mul, name, lambda s: _word(("a", s[0]), ("b", s[1])))


def matrix_semidirect(p: int, n: int, m: Mat, name: str) -> FiniteGroup:
    """(Z_p x Z_p) x| Z_n, the generator c acting on column vectors by ``m``."""
    pows = [(1, 0, 0, 1)]
    for _ in range(n - 1):
        pows.append(mat_mul(pows[-1], m, p))
    elems = [(x, y, k) for k in range(n) for y in range(p) for x in range(p)]

    def mul(s, t):
        a, b, c, d = pows[s[2]]
        x, y = t[0], t[1]
        return ((s[0] + a * x + b * y) % p, (s[1] + c * x + d * y) % p, (s[2] + t[2]) % n)

    return tabulate(elems, mul, name, lambda s: _word(("a", s[0]), ("b", s[1]), ("c", s[2])))


def direct_product(groups: Sequence[FiniteGroup], name: str) -> FiniteGroup:
    elems = list(itertools.product(*[range(g.order) for g in groups]))

    def mul(s, t):
        return tuple(g.table[x][y] for g, x, y in zip(groups, s, t))

    def label(s):
        return "(" + ",".join(g.label(x) for g, x in zip(groups, s)) + ")"

    return tabulate(elems, mul, name, label)


def _perm_group_gens(kind: str, n: int) -> list[list[int]]:
    if kind == "sym":
        gens = [[1, 0] + list(range(2, n)), list(range(1, n)) + [0]]
    else:
        gens = []
        for k in range(2, n):
            p = list(range(n))
            p[0], p[1], p[k] = 1, k, 0
            gens.append(p)
    return gens


# -- construct -------------------------------------------------------------

def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameters(msg)


def _arity(d: GroupDescriptor, k: int) -> None:
    _need(len(d.params) == k, f"{d.family} takes {k} parameters, got {len(d.params)}")


def construct(d: GroupDescriptor) -> FiniteGroup:
    f, ps = d.family, d.params
    name = to_text(d)
    if f == "Cyclic":
        _arity(d, 1)
        n = ps[0]
        _need(n >= 1, "cyclic order must be positive")
        return tabulate(list(range(n)), lambda x, y: (x + y) % n, name,
                        lambda x: _word(("a", x)))
    if f == "ElementaryAbelian":
        _arity(d, 2)
        p, k = ps
        _need(is_prime(p) and k >= 1, "ElementaryAbelian needs prime p and k >= 1")
        return direct_product([construct(D("Cyclic", p))] * k, name)
    if f == "DirectProduct":
        facs = d.factors or tuple(D("Cyclic", n) for n in ps)
        _need(len(facs) >= 2, "DirectProduct needs at least two factors")
        return direct_product([construct(x) for x in facs], name)
    if f == "Dihedral":
        _arity(d, 1)
        n = ps[0]
        _need(n >= 3, "Dihedral(n) needs n >= 3 (order 2n)")
        return split_metacyclic(n, 2, n - 1, name)
    if f == "GeneralizedQuaternion":
        _arity(d, 1)
        n = ps[0]
        _need(n >= 3, "GeneralizedQuaternion(n) needs n >= 3 (order 2^n)")
        half = 2 ** (n - 1)
        elems = [(x, y) for y in range(2) for x in range(half)]

        def mul(s, t):
            x = (s[0] + (t[0] if s[1] == 0 else -t[0])) % half
            y = s[1] + t[1]
            if y == 2:
                x, y = (x + half // 2) % half, 0
            return (x, y)

        return tabulate(elems, mul, name, lambda s: _word(("a", s[0]), ("b", s[1])))
    if f == "Modular":
        _arity(d, 2)
        p, a = ps
        _need(is_prime(p) and a >= 3, "Modular(p, alpha) needs prime p and alpha >= 3")
        m = p ** (a - 1)
        return split_metacyclic(m, p, 1 + p ** (a - 2), name)
    if f == "MetacyclicSemidirect":
        _arity(d, 4)
        q, p, a, t = ps
        _need(is_prime(q) and is_prime(p) and p != q, "q and p must be distinct primes")
        _need(a >= 1 and 0 <= t <= a, "need alpha >= 1 and 0 <= t <= alpha")
        _need((q - 1) % p ** t == 0, f"p^t = {p ** t} must divide q - 1 = {q - 1}")
        i = element_of_order(q, p ** t)
        return split_metacyclic(q, p ** a, i, name)
    if f == "SplitMetacyclic":
        _arity(d, 3)
        m, n, i = ps
        _need(m >= 1 and n >= 1, "orders must be positive")
        _need(_gcd(i % m, m) == 1 and pow(i, n, m) == 1 % m,
              f"{i} must be a unit mod {m} with {i}^{n} = 1")
        return split_metacyclic(m, n, i % m, name)
    if f == "PPSemidirectQ":
        p, q, l = _ppq_params(d)
        return matrix_semidirect(p, q, action_matrix(l, p), name)
    if f == "PPSemidirectC4":
        _arity(d, 1)
        (l,) = ps
        _need(0 <= l < 3, "l must lie in 0..2")
        k = mat_order(companion(l, 3), 3)
        _need(k is not None and 4 % k == 0,
              f"[[0,-1],[1,{l}]] has order {k} in GL_2(3), which does not divide 4")
        return matrix_semidirect(3, 4, action_matrix(l, 3), name)
    if f == "MatrixSemidirect":
        _arity(d, 6)
        p, n = ps[:2]
        m = tuple(v % p for v in ps[2:])
        _need(is_prime(p) and n >= 1, "MatrixSemidirect needs prime p and n >= 1")
        _need((m[0] * m[3] - m[1] * m[2]) % p != 0, "matrix must be invertible")
        k = mat_order(m, p)
        _need(k is not None and n % k == 0, f"matrix order {k} must divide n = {n}")
        return matrix_semidirect(p, n, m, name)
    if f in ("Symmetric", "Alternating"):
        _arity(d, 1)
        n = ps[0]
        _need(3 <= n <= 5, f"{f} degree must lie in 3..5")
        from .groups import group_from_permutations
        return group_from_permutations(_perm_group_gens("sym" if f == "Symmetric" else "alt", n), name)
    if f == "Opaque":
        _need(bool(d.source), "Opaque descriptor needs a source file")
        return load_group(d.source)
    raise InvalidParameters(f"cannot construct family {f}")


def _ppq_params(d: GroupDescriptor) -> tuple[int, int, int]:
    _need(len(d.params) in (2, 3), "PPSemidirectQ takes (p, q) or (p, q, l)")
    p, q = d.params[:2]
    _need(is_prime(p) and is_prime(q) and p != q, "p and q must be distinct primes")
    if len(d.params) == 3:
        l = d.params[2]
        _need(0 <= l < p, f"l must lie in 0..{p - 1}")
        _need(mat_order(companion(l, p), p) == q,
              f"[[0,-1],[1,{l}]] does not have order {q} in GL_2({p})")
    else:
        l = find_action_parameter(p, q)
    return p, q, l


def expected_order(d: GroupDescriptor) -> int:
    f, ps = d.family, d.params
    if f == "Cyclic":
        return ps[0]
    if f == "ElementaryAbelian":
        return ps[0] ** ps[1]
    if f == "DirectProduct":
        out = 1
        for x in (d.factors or [D("Cyclic", n) for n in ps]):
            out *= expected_order(x)
        return out
    if f == "Dihedral":
        return 2 * ps[0]
    if f == "GeneralizedQuaternion":
        return 2 ** ps[0]
    if f == "Modular":
        return ps[0] ** ps[1]
    if f == "MetacyclicSemidirect":
        return ps[0] * ps[1] ** ps[2]
    if f == "SplitMetacyclic":
        return ps[0] * ps[1]
    if f == "PPSemidirectQ":
        return ps[0] ** 2 * ps[1]
    if f == "PPSemidirectC4":
        return 36
    if f == "MatrixSemidirect":
        return ps[0] ** 2 * ps[1]
    if f == "Symmetric":
        return [1, 1, 2, 6, 24, 120][ps[0]]
    if f == "Alternating":
        return [1, 1, 1, 3, 12, 60][ps[0]]
    raise InvalidParameters(f"order of {f} is not determined by its descriptor")


def presentation(d: GroupDescriptor) -> str:
    f, ps = d.family, d.params
    if f == "Cyclic":
        return f"<a | a^{ps[0]}>"
    if f == "Dihedral":
        return f"<a, b | a^{ps[0]} = b^2 = 1, ab = ba^-1>"
    if f == "GeneralizedQuaternion":
        n = ps[0]
        return f"<a, b | a^{2 ** (n - 1)} = b^4 = 1, a^{2 ** (n - 2)} = b^2, bab^-1 = a^-1>"
    if f == "Modular":
        p, a = ps
        return f"<a, b | a^{p ** (a - 1)} = b^{p} = 1, bab^-1 = a^{p ** (a - 2) + 1}>"
    if f == "MetacyclicSemidirect":
        q, p, a, t = ps
        return f"<a, b | a^{q} = b^{p ** a} = 1, bab^-1 = a^i, ord_{q}(i) = {p ** t}>"
    if f == "SplitMetacyclic":
        m, n, i = ps
        return f"<a, b | a^{m} = b^{n} = 1, bab^-1 = a^{i}>"
    if f in ("PPSemidirectQ", "PPSemidirectC4"):
        p, q = (ps[0], ps[1]) if f == "PPSemidirectQ" else (3, 4)
        l = ps[-1] if (f == "PPSemidirectC4" or len(ps) == 3) else "l"
        return (f"<a, b, c | a^{p} = b^{p} = c^{q} = 1, ab = ba, cac^-1 = b^-1, "
                f"cbc^-1 = ab^{l}>")
    if f == "MatrixSemidirect":
        p, n, a, b, c, dd = ps
        return (f"<a, b, c | a^{p} = b^{p} = c^{n} = 1, ab = ba, cac^-1 = a^{a}b^{c}, "
                f"cbc^-1 = a^{b}b^{dd}>")
    if f == "DirectProduct":
        facs = d.factors or tuple(D("Cyclic", n) for n in ps)
        return " x ".join(presentation(x) for x in facs)
    if f == "ElementaryAbelian":
        return f"(Z_{ps[0]})^{ps[1]}"
    if f in ("Symmetric", "Alternating"):
        return f"{f}({ps[0]})"
    return "opaque table"


# -- text syntax -----------------------------------------------------------

_KEYWORDS = {
    "cyclic": ("Cyclic", ["n"]),
    "dihedral": ("Dihedral", ["n"]),
    "quaternion": ("GeneralizedQuaternion", ["n"]),
    "modular": ("Modular", ["p", "alpha"]),
    "semidirect": ("MetacyclicSemidirect", ["q", "p", "a", "t"]),
    "metacyclic": ("SplitMetacyclic", ["m", "n", "i"]),
    "ppq": ("PPSemidirectQ", ["p", "q", "l"]),
    "ppc4": ("PPSemidirectC4", ["l"]),
    "matrix": ("MatrixSemidirect", ["p", "n", "a", "b", "c", "d"]),
    "elemab": ("ElementaryAbelian", ["p", "k"]),
    "sym": ("Symmetric", ["n"]),
    "alt": ("Alternating", ["n"]),
}
_TEXT_NAME = {fam: kw for kw, (fam, _) in _KEYWORDS.items()}


def parse_descriptor(text: str) -> GroupDescriptor:
    """Parse the CLI descriptor syntax, e.g. ``semidirect:q=3,p=2,a=2,t=1``."""
    text = text.strip()
    head, _, rest = text.partition(":")
    head = head.lower()
    if head == "file":
        return GroupDescriptor("Opaque", source=rest)
    if head == "direct":
        ns = tuple(int(x) for x in rest.split(","))
        return GroupDescriptor("DirectProduct", ns)
    if head == "product":
        facs = tuple(parse_descriptor(x) for x in rest.split("*"))
        return GroupDescriptor("DirectProduct", tuple(expected_order(x) for x in facs), facs)
    if head not in _KEYWORDS:
        raise InvalidParameters(f"unknown descriptor keyword {head!r} in {text!r}")
    family, names = _KEYWORDS[head]
    values: list[int | None] = [None] * len(names)
    for pos, item in enumerate(x for x in rest.split(",") if x):
        if "=" in item:
            key, val = item.split("=", 1)
            key = {"alpha": "alpha"}.get(key, key)
            if key not in names:
                raise InvalidParameters(f"unknown parameter {key!r} for {head}")
            values[names.index(key)] = int(val)
        else:
            values[pos] = int(item)
    while values and values[-1] is None:
        values.pop()
    if any(v is None for v in values):
        raise InvalidParameters(f"missing parameter in {text!r}")
    return GroupDescriptor(family, tuple(values))


def to_text(d: GroupDescriptor) -> str:
    if d.family == "Opaque":
        return f"file:{d.source}"
    if d.family == "DirectProduct":
        if d.factors and any(x.family != "Cyclic" for x in d.factors):
            return "product:" + "*".join(to_text(x) for x in d.factors)
        ns = d.params if not d.factors else tuple(x.params[0] for x in d.factors)
        return "direct:" + ",".join(map(str, ns))
    kw = _TEXT_NAME[d.family]
    names = _KEYWORDS[kw][1]
    if len(names) == 1:
        return f"{kw}:{d.params[0]}"
    if d.family == "Modular":
        return f"{kw}:{d.params[0]},{d.params[1]}"
    return f"{kw}:" + ",".join(f"{k}={v}" for k, v in zip(names, d.params))


def abelian_invariants(ns: Sequence[int]) -> tuple[int, ...]:
    """Invariant factors (d1 | d2 | ...) of Z_n1 x Z_n2 x ..., trivial factors dropped."""
    powers: dict[int, list[int]] = {}
    for n in ns:
        for p, k in prime_factors(n).items():
            powers.setdefault(p, []).append(p ** k)
    for v in powers.values():
        v.sort(reverse=True)
    width = max((len(v) for v in powers.values()), default=0)
    out = []
    for j in range(width):
        x = 1
        for v in powers.values():
            if j < len(v):
                x *= v[j]
        out.append(x)
    return tuple(sorted(out))


def primary_factors(ns: Sequence[int]) -> list[tuple[int, int]]:
    """Elementary divisors as (p, exponent) pairs."""
    out = []
    for n in ns:
        out.extend(prime_factors(n).items())
    return sorted(out)
