"""Finite sets, function tables and the (surjection, injection) factorisation.

Elements are plain tagged tuples so that Python's tuple ordering gives the
structural total order for free:

    atom("a")        -> (0, "a")
    STAR             -> (1,)
    pair(a, b)       -> (2, a, b)
    inl(a), inr(a)   -> (3, a), (4, a)
    table(items)     -> (5, ((k0, v0), (k1, v1), ...))   keys in canonical order

Objects keep their elements sorted and deduplicated, so object equality is
tuple equality and every image is a canonical sublist of its codomain.
"""
from __future__ import annotations

import contextlib
import itertools
from bisect import bisect_left
from contextvars import ContextVar
from dataclasses import dataclass, replace
from operator import itemgetter
from typing import Callable, Iterable, Iterator, Mapping

from .errors import SizeLimitExceeded, SquareDoesNotCommute

ATOM, STAR_TAG, PAIR, INL, INR, TABLE = range(6)
STAR = (STAR_TAG,)

Elem = tuple


def atom(name) -> Elem:
    return (ATOM, str(name))


def pair(a: Elem, b: Elem) -> Elem:
    return (PAIR, a, b)


def inl(a: Elem) -> Elem:
    return (INL, a)


def inr(a: Elem) -> Elem:
    return (INR, a)


def table(items: Iterable[tuple[Elem, Elem]]) -> Elem:
    return (TABLE, tuple(items))


def tabulate(dom: "FinSetObj", fn: Callable[[Elem], Elem]) -> Elem:
    """The table element of ``fn`` restricted to ``dom``."""
    return (TABLE, tuple((x, fn(x)) for x in dom.elems))


_key0 = itemgetter(0)


def apply(t: Elem, x: Elem) -> Elem:
    items = t[1]
    i = bisect_left(items, x, key=_key0)
    if i == len(items) or items[i][0] != x:
        raise KeyError(f"{show(x)} not in the domain of {show(t)}")
    return items[i][1]


def update(t: Elem, x: Elem, v: Elem) -> Elem:
    items = t[1]
    i = bisect_left(items, x, key=_key0)
    if i == len(items) or items[i][0] != x:
        raise KeyError(show(x))
    return (TABLE, items[:i] + ((x, v),) + items[i + 1:])


def table_values(t: Elem) -> tuple:
    return tuple(v for _, v in t[1])


def show(e: Elem) -> str:
    tag = e[0]
    if tag == ATOM:
        return e[1]
    if tag == STAR_TAG:
        return "*"
    if tag == PAIR:
        return f"({show(e[1])}, {show(e[2])})"
    if tag == INL:
        return f"inl {_show_arg(e[1])}"
    if tag == INR:
        return f"inr {_show_arg(e[1])}"
    return "[" + "; ".join(f"{show(k)} => {show(v)}" for k, v in e[1]) + "]"


def _show_arg(e):
    s = show(e)
    return f"({s})" if e[0] in (INL, INR) else s


# ---------------------------------------------------------------- limits


@dataclass(frozen=True)
class Limits:
    max_carrier: int = 1_000_000
    max_saturation: int = 100_000


_limits: ContextVar[Limits] = ContextVar("effet_limits", default=Limits())


def current_limits() -> Limits:
    return _limits.get()


@contextlib.contextmanager
def limits(**changes):
    """Temporarily override size limits, e.g. ``with limits(max_carrier=500):``."""
    token = _limits.set(replace(_limits.get(), **changes))
    try:
        yield _limits.get()
    finally:
        _limits.reset(token)


def guard_size(n: int, what: str) -> None:
    bound = _limits.get().max_carrier
    if n > bound:
        raise SizeLimitExceeded(f"{what} would have {n} elements (limit {bound})")


# ---------------------------------------------------------------- objects


class FinSetObj:
    """A finite set with canonically ordered elements."""

    __slots__ = ("elems", "_index")

    def __init__(self, elems: Iterable[Elem] = (), *, canonical: bool = False):
        self.elems = tuple(elems) if canonical else tuple(sorted(set(elems)))
        self._index = None

    @property
    def index(self) -> dict:
        if self._index is None:
            self._index = {x: i for i, x in enumerate(self.elems)}
        return self._index

    def __len__(self):
        return len(self.elems)

    def __iter__(self) -> Iterator[Elem]:
        return iter(self.elems)

    def __contains__(self, x):
        return x in self.index

    def __eq__(self, other):
        return isinstance(other, FinSetObj) and self.elems == other.elems

    def __hash__(self):
        return hash(self.elems)

    def __le__(self, other: "FinSetObj"):
        return all(x in other for x in self.elems)

    def __repr__(self):
        body = ", ".join(show(x) for x in self.elems[:8])
        more = ", ..." if len(self.elems) > 8 else ""
        return f"FinSetObj({{{body}{more}}})"


def atoms(*names) -> FinSetObj:
    return FinSetObj(atom(n) for n in names)


def sized(n: int, prefix: str = "x") -> FinSetObj:
    """A canonical n-element set of atoms ``x0 .. x{n-1}``."""
    return FinSetObj(atom(f"{prefix}{i}") for i in range(n))


def terminal() -> FinSetObj:
    return FinSetObj((STAR,), canonical=True)


def initial() -> FinSetObj:
    return FinSetObj((), canonical=True)


def product(X: FinSetObj, Y: FinSetObj) -> FinSetObj:
    guard_size(len(X) * len(Y), "product")
    return FinSetObj((pair(x, y) for x in X.elems for y in Y.elems), canonical=True)


def coproduct(X: FinSetObj, Y: FinSetObj) -> FinSetObj:
    guard_size(len(X) + len(Y), "coproduct")
    return FinSetObj(
        [inl(x) for x in X.elems] + [inr(y) for y in Y.elems], canonical=True
    )


def exponential(X: FinSetObj, Y: FinSetObj) -> FinSetObj:
    """All tables X -> Y; |Y|^|X| elements, in lexicographic order of values."""
    n = len(Y) ** len(X)
    guard_size(n * max(len(X), 1), "exponential")
    keys = X.elems
    return FinSetObj(
        ((TABLE, tuple(zip(keys, vals))) for vals in itertools.product(Y.elems, repeat=len(keys))),
        canonical=True,
    )


def functions_into(X: FinSetObj, values: Iterable[Elem]) -> Iterator[Elem]:
    """Lazily enumerate tables from X into the given candidate values."""
    values = tuple(values)
    keys = X.elems
    for vals in itertools.product(values, repeat=len(keys)):
        yield (TABLE, tuple(zip(keys, vals)))


# ---------------------------------------------------------------- functions


class FinFn:
    """A total function between finite sets, stored as a dict."""

    __slots__ = ("dom", "cod", "table")

    def __init__(self, dom: FinSetObj, cod: FinSetObj, table: Mapping[Elem, Elem], check: bool = True):
        self.dom = dom
        self.cod = cod
        self.table = dict(table)
        if check:
            if len(self.table) != len(dom) or any(x not in self.table for x in dom.elems):
                raise ValueError("function table is not total on its domain")
            for x, y in self.table.items():
                if y not in cod:
                    raise ValueError(f"image {show(y)} of {show(x)} lies outside the codomain")

    @classmethod
    def tabulate(cls, dom: FinSetObj, cod: FinSetObj, fn: Callable[[Elem], Elem], check: bool = True):
        return cls(dom, cod, {x: fn(x) for x in dom.elems}, check=check)

    def __call__(self, x: Elem) -> Elem:
        return self.table[x]

    def __eq__(self, other):
        return (
            isinstance(other, FinFn)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.table == other.table
        )

    def __hash__(self):
        return hash((self.dom, self.cod, tuple(self.table[x] for x in self.dom.elems)))

    def __repr__(self):
        rows = ", ".join(f"{show(x)} -> {show(self.table[x])}" for x in self.dom.elems[:6])
        return f"FinFn({rows}{', ...' if len(self.dom) > 6 else ''})"

    def as_elem(self) -> Elem:
        return (TABLE, tuple((x, self.table[x]) for x in self.dom.elems))

    def image(self) -> FinSetObj:
        return FinSetObj(self.table.values())

    def is_injective(self) -> bool:
        return len(set(self.table.values())) == len(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table.values())) == len(self.cod)

    def differs_at(self, other: "FinFn"):
        """First domain element on which two parallel functions disagree, or None."""
        for x in self.dom.elems:
            if self.table[x] != other.table[x]:
                return x
        return None


def identity(X: FinSetObj) -> FinFn:
    return FinFn(X, X, {x: x for x in X.elems}, check=False)


def compose(g: FinFn, f: FinFn) -> FinFn:
    """g after f."""
    if f.cod != g.dom:
        raise ValueError("cannot compose: codomain/domain mismatch")
    gt = g.table
    return FinFn(f.dom, g.cod, {x: gt[y] for x, y in f.table.items()}, check=False)


def inclusion(sub: FinSetObj, X: FinSetObj) -> FinFn:
    return FinFn(sub, X, {x: x for x in sub.elems})


def fst_proj(X: FinSetObj, Y: FinSetObj) -> FinFn:
    P = product(X, Y)
    return FinFn(P, X, {p: p[1] for p in P.elems}, check=False)


def snd_proj(X: FinSetObj, Y: FinSetObj) -> FinFn:
    P = product(X, Y)
    return FinFn(P, Y, {p: p[2] for p in P.elems}, check=False)


def pairing(f: FinFn, g: FinFn) -> FinFn:
    if f.dom != g.dom:
        raise ValueError("pairing needs a common domain")
    return FinFn(f.dom, product(f.cod, g.cod), {x: pair(f.table[x], g.table[x]) for x in f.dom.elems}, check=False)


def product_map(f: FinFn, g: FinFn) -> FinFn:
    dom = product(f.dom, g.dom)
    return FinFn(dom, product(f.cod, g.cod), {p: pair(f.table[p[1]], g.table[p[2]]) for p in dom.elems}, check=False)


def inl_map(X: FinSetObj, Y: FinSetObj) -> FinFn:
    return FinFn(X, coproduct(X, Y), {x: inl(x) for x in X.elems}, check=False)


def inr_map(X: FinSetObj, Y: FinSetObj) -> FinFn:
    return FinFn(Y, coproduct(X, Y), {y: inr(y) for y in Y.elems}, check=False)


def copair(f: FinFn, g: FinFn) -> FinFn:
    if f.cod != g.cod:
        raise ValueError("copairing needs a common codomain")
    dom = coproduct(f.dom, g.dom)
    tab = {inl(x): y for x, y in f.table.items()}
    tab.update({inr(x): y for x, y in g.table.items()})
    return FinFn(dom, f.cod, tab, check=False)


def eval_map(X: FinSetObj, Y: FinSetObj) -> FinFn:
    """ev : Y^X x X -> Y."""
    dom = product(exponential(X, Y), X)
    return FinFn(dom, Y, {p: apply(p[1], p[2]) for p in dom.elems}, check=False)


def curry(f: FinFn, Z: FinSetObj, X: FinSetObj) -> FinFn:
    """Transpose f : Z x X -> Y into Z -> Y^X."""
    cod = exponential(X, f.cod)
    return FinFn(Z, cod, {z: tabulate(X, lambda x, z=z: f.table[pair(z, x)]) for z in Z.elems}, check=False)


def exp_map(Y: FinSetObj, f: FinFn) -> FinFn:
    """Post-composition f^Y : A^Y -> B^Y."""
    dom = exponential(Y, f.dom)
    cod = exponential(Y, f.cod)
    ft = f.table
    return FinFn(dom, cod, {t: (TABLE, tuple((k, ft[v]) for k, v in t[1])) for t in dom.elems}, check=False)


def pullback(f: FinFn, g: FinFn):
    """Pullback of f : X -> Z and g : Y -> Z as (P, p1, p2)."""
    if f.cod != g.cod:
        raise ValueError("pullback needs a common codomain")
    P = FinSetObj(pair(x, y) for x in f.dom.elems for y in g.dom.elems if f.table[x] == g.table[y])
    p1 = FinFn(P, f.dom, {p: p[1] for p in P.elems}, check=False)
    p2 = FinFn(P, g.dom, {p: p[2] for p in P.elems}, check=False)
    return P, p1, p2


# ---------------------------------------------------------------- factorisation


@dataclass(frozen=True)
class Factorisation:
    e: FinFn
    m: FinFn
    of: FinFn

    @property
    def image(self) -> FinSetObj:
        return self.e.cod


def factorise(f: FinFn) -> Factorisation:
    """Canonical (surjection, injection) factorisation of f."""
    img = f.image()
    e = FinFn(f.dom, img, f.table, check=False)
    m = FinFn(img, f.cod, {y: y for y in img.elems}, check=False)
    return Factorisation(e, m, f)


def fill_in(e: FinFn, m: FinFn, f: FinFn, g: FinFn) -> FinFn:
    """Unique diagonal h : X -> Y of the square m . f = g . e.

    e : W ->> X surjective, f : W -> Y, g : X -> Z, m : Y >-> Z injective;
    h satisfies h . e = f and m . h = g.
    """
    if compose(m, f) != compose(g, e):
        raise SquareDoesNotCommute("m . f != g . e")
    if not e.is_surjective():
        raise ValueError("left edge of the square is not surjective")
    if not m.is_injective():
        raise ValueError("right edge of the square is not injective")
    h = {}
    for w in e.dom.elems:
        h.setdefault(e.table[w], f.table[w])
    hfn = FinFn(e.cod, f.cod, h)
    # both triangles are theorems here; a failure is a kernel bug
    assert compose(hfn, e) == f and compose(m, hfn) == g
    return hfn


def factorise_square(f: FinFn, f2: FinFn, g1: FinFn, g2: FinFn) -> FinFn:
    """Induced map between the images of f and f2 for a square g2 . f = f2 . g1."""
    if compose(g2, f) != compose(f2, g1):
        raise SquareDoesNotCommute("g2 . f != f2 . g1")
    a, b = factorise(f), factorise(f2)
    return fill_in(a.e, b.m, compose(b.e, g1), compose(g2, a.m))
