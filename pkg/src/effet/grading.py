"""Graded carriers T_eps X as the image of the free eps-monad inside T X.

The image is computed as the least subset of T X that contains the units
and is closed under binding the eps-generic effects against continuations
into the subset.  Over finite carriers this monotone iteration reaches its
least fixpoint after finitely many rounds; every element reached is the
interpretation of some free term and conversely, so the fixpoint is the
image of the initial eps-monad morphism.  Continuations are only ever
enumerated over elements already reached, so T X itself is never built.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable

from .errors import SaturationLimitExceeded
from .finset import FinFn, FinSetObj, current_limits, guard_size, limits, pair, product, show
from .monads import MonadModel


def _eps_key(eps) -> tuple:
    return tuple(sorted(eps))


def _continuations(B: FinSetObj, old: list, delta: list):
    """All tuples over B with values in old+delta using at least one delta value."""
    n = len(B)
    cur = old + delta
    for i in range(n):
        for prefix in itertools.product(old, repeat=i):
            for d in delta:
                for suffix in itertools.product(cur, repeat=n - i - 1):
                    yield prefix + (d,) + suffix


@dataclass
class GradedCarrier:
    model: MonadModel
    eps: frozenset
    base: FinSetObj
    subset: FinSetObj
    rounds: int
    family: "GradedFamily" = field(repr=False, default=None)

    def __len__(self):
        return len(self.subset)

    def __contains__(self, m):
        return m in self.subset

    def unit(self, x):
        return self.model.unit(self.base, x)

    def bind(self, m, f, Y: FinSetObj):
        """Restricted bind T_eps X x (T_eps Y)^X -> T_eps Y."""
        return self.model.bind(self.base, Y, m, f)

    def strength(self, A: FinSetObj, a, m):
        return self.model.strength(A, self.base, a, m)

    def generic(self, op, a):
        if op not in self.eps:
            raise KeyError(f"{op} is not in {sorted(self.eps)}")
        return self.model.generic(op, a)

    def embed(self, m):
        """The mono T_eps X >-> T X on elements (subset inclusion)."""
        return m

    @property
    def mono(self) -> FinFn:
        return FinFn(self.subset, self.model.carrier(self.base), {m: m for m in self.subset.elems}, check=False)

    @property
    def unit_table(self) -> FinFn:
        return FinFn.tabulate(self.base, self.subset, self.unit)


def image_fixpoint(T: MonadModel, eps: Iterable[str], X: FinSetObj, trace: list | None = None) -> GradedCarrier:
    """Least subset of T X containing the units and closed under eps."""
    eps = frozenset(eps)
    unknown = eps - set(T.ops)
    if unknown:
        raise KeyError(f"operations {sorted(unknown)} have no generic effect in the {T.name} model")
    bound = current_limits().max_saturation
    seen = set()
    delta = []
    for x in X.elems:
        u = T.unit(X, x)
        if u not in seen:
            seen.add(u)
            delta.append(u)
    old: list = []
    rounds = 0
    ops = sorted(eps)
    gens = {op: [(a, T.generic(op, a)) for a in T.ops[op][0].elems] for op in ops}
    nullary_done = set()
    while delta:
        rounds += 1
        if trace is not None:
            trace.append(len(old) + len(delta))
        new = []
        for op in ops:
            B = T.ops[op][1]
            if len(B) == 0:
                if op in nullary_done:
                    continue
                nullary_done.add(op)
                conts = [()]
            else:
                guard_size((len(old) + len(delta)) ** len(B), f"continuation space for {op}")
                conts = _continuations(B, old, delta)
            keys = B.elems
            for g in conts:
                gmap = dict(zip(keys, g))
                for _, gen in gens[op]:
                    r = T.bind(B, X, gen, gmap.__getitem__)
                    if r not in seen:
                        seen.add(r)
                        new.append(r)
                        if len(seen) > bound:
                            raise SaturationLimitExceeded(
                                f"T_{{{','.join(ops)}}} at |X|={len(X)} exceeds {bound} elements"
                            )
        old = old + delta
        delta = new
    return GradedCarrier(T, eps, X, FinSetObj(seen), rounds)


class GradedFamily:
    """Memoised (eps, X) -> T_eps X for one model."""

    def __init__(self, model: MonadModel):
        self.model = model
        self._cache: dict = {}

    def carrier(self, eps, X: FinSetObj) -> GradedCarrier:
        key = (_eps_key(eps), X)
        c = self._cache.get(key)
        if c is None:
            c = image_fixpoint(self.model, eps, X)
            c.family = self
            self._cache[key] = c
        return c

    def __call__(self, eps, X):
        return self.carrier(eps, X)


def inclusion(family: GradedFamily, eps, eps2, X: FinSetObj) -> FinFn:
    """T_eps X -> T_eps2 X for eps a subset of eps2."""
    eps, eps2 = frozenset(eps), frozenset(eps2)
    if not eps <= eps2:
        raise ValueError(f"{sorted(eps)} is not contained in {sorted(eps2)}")
    small, big = family.carrier(eps, X), family.carrier(eps2, X)
    missing = [m for m in small.subset.elems if m not in big.subset]
    if missing:
        raise RuntimeError(f"graded carrier not monotone: {show(missing[0])} escapes")
    return FinFn(small.subset, big.subset, {m: m for m in small.subset.elems}, check=False)


# ---------------------------------------------------------------- commutativity


@dataclass
class CommutativityResult:
    commutative: bool
    witness: tuple | None = None
    checked: int = 0
    method: str = "exhaustive"

    def __bool__(self):
        return self.commutative


def sequence_left(T: MonadModel, X, Y, m, n):
    XY = product(X, Y) if T.needs_objects else None
    return T.bind(X, XY, m, lambda x: T.strength(X, Y, x, n))


def sequence_right(T: MonadModel, X, Y, m, n):
    XY = product(X, Y) if T.needs_objects else None
    YX = product(Y, X) if T.needs_objects else None
    swap = lambda p: pair(p[2], p[1])  # noqa: E731
    return T.bind(Y, XY, n, lambda y: T.fmap(YX, XY, swap, T.strength(Y, X, y, m)))


def check_commutative(family: GradedFamily, eps, X: FinSetObj, Y: FinSetObj,
                       exhaustive: bool = False) -> CommutativityResult:
    """Do the two sequencings T_eps X x T_eps Y -> T_eps(X x Y) agree?

    By default only the generic effects are compared pairwise.  That
    decides the question for nonempty X and Y: every element is a free
    term over the generics, and a non-commuting pair of generics maps into
    T_eps X and T_eps Y along constant functions.  ``exhaustive`` compares
    every pair of carrier elements instead.
    """
    T = family.model
    eps = frozenset(eps)
    if not exhaustive:
        if len(X) == 0 or len(Y) == 0:
            return CommutativityResult(True, None, 0, "empty")
        return commute_generics(T, eps)
    cx, cy = family.carrier(eps, X), family.carrier(eps, Y)
    checked = 0
    for m in cx.subset.elems:
        for n in cy.subset.elems:
            checked += 1
            if sequence_left(T, X, Y, m, n) != sequence_right(T, X, Y, m, n):
                return CommutativityResult(False, (m, n), checked)
    return CommutativityResult(True, None, checked)


def commute_generics(T: MonadModel, eps) -> CommutativityResult:
    """Compare both sequencings of every pair of eps-generic effects."""
    checked = 0
    ops = sorted(eps)
    for i, op1 in enumerate(ops):
        A1, B1 = T.ops[op1]
        for op2 in ops[i:]:
            A2, B2 = T.ops[op2]
            for a1 in A1.elems:
                for a2 in A2.elems:
                    checked += 1
                    m, n = T.generic(op1, a1), T.generic(op2, a2)
                    if sequence_left(T, B1, B2, m, n) != sequence_right(T, B1, B2, m, n):
                        return CommutativityResult(False, (m, n), checked, "generators")
    return CommutativityResult(True, None, checked, "generators")


# ---------------------------------------------------------------- free terms


@total_ordering
@dataclass(frozen=True)
class Leaf:
    x: tuple

    def sort_key(self):
        return (0, self.x)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    @property
    def depth(self):
        return 0


@total_ordering
@dataclass(frozen=True)
class Node:
    op: str
    arg: tuple
    kont: tuple  # ((b, FreeTerm), ...) in canonical order of b

    def sort_key(self):
        return (1, self.op, self.arg, tuple((b, t.sort_key()) for b, t in self.kont))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    @property
    def depth(self):
        return 1 + max((t.depth for _, t in self.kont), default=0)


def count_free_terms(T: MonadModel, eps, X: FinSetObj, depth: int) -> int:
    n = len(X)
    for _ in range(depth):
        n = len(X) + sum(len(T.ops[op][0]) * n ** len(T.ops[op][1]) for op in eps)
    return n


def enumerate_free_terms(T: MonadModel, eps, X: FinSetObj, depth: int) -> list:
    """All free eps-terms over X of depth <= depth, canonically ordered."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    eps = sorted(eps)
    guard_size(count_free_terms(T, eps, X, depth), "free-term enumeration")
    leaves = [Leaf(x) for x in X.elems]
    level = list(leaves)
    for _ in range(depth):
        nxt = list(leaves)
        for op in eps:
            A, B = T.ops[op]
            for a in A.elems:
                for ks in itertools.product(level, repeat=len(B)):
                    nxt.append(Node(op, a, tuple(zip(B.elems, ks))))
        level = nxt
    return sorted(set(level))


def interpret_free_term(T: MonadModel, t, X: FinSetObj, memo: dict | None = None):
    """Fold a free term into T X: leaves are units, nodes bind the generic effect."""
    if memo is None:
        memo = {}
    hit = memo.get(t)
    if hit is not None:
        return hit
    if isinstance(t, Leaf):
        r = T.unit(X, t.x)
    else:
        B = T.ops[t.op][1]
        kont = dict(t.kont)
        r = T.bind(B, X, T.generic(t.op, t.arg), lambda b: interpret_free_term(T, kont[b], X, memo))
    memo[t] = r
    return r


def free_term_image(T: MonadModel, eps, X: FinSetObj, max_depth: int = 8):
    """Interpretations of all free terms, with depth raised until the image is stable.

    Returns (image, depth) where depth is the first depth whose image equals
    the previous one.
    """
    memo: dict = {}
    prev = None
    for d in range(max_depth + 1):
        img = frozenset(interpret_free_term(T, t, X, memo) for t in enumerate_free_terms(T, eps, X, d))
        if img == prev:
            return img, d
        prev = img
    raise SaturationLimitExceeded(f"free-term image not stable by depth {max_depth}")


# ---------------------------------------------------------------- isomorphisms


@dataclass
class IsoReport:
    bijective: bool
    preserves_unit: bool
    preserves_bind: bool
    preserves_generics: bool
    checked: int
    witness: str | None = None

    @property
    def ok(self):
        return self.bijective and self.preserves_unit and self.preserves_bind and self.preserves_generics


def check_carrier_iso(T1: MonadModel, C1: GradedCarrier, T2: MonadModel, C2: GradedCarrier, phi: dict,
                      budget: int = 5000, seed: int = 0) -> IsoReport:
    """Check that phi : C1 -> C2 is a bijection commuting with unit, bind and generics."""
    X = C1.base
    rng = random.Random(seed)
    bij = set(phi) == set(C1.subset.elems) and sorted(phi.values()) == list(C2.subset.elems)
    unit_ok = all(phi.get(T1.unit(X, x)) == T2.unit(X, x) for x in X.elems)
    gens_ok = True
    for op in sorted(C1.eps):
        A, B = T1.ops[op]
        if len(B) == 0:
            continue
        # compare generics through the unit continuation into X when B embeds in X
        for a in A.elems:
            for kvals in itertools.product(X.elems, repeat=len(B)):
                k = dict(zip(B.elems, kvals))
                g1 = T1.bind(B, X, T1.generic(op, a), lambda b: T1.unit(X, k[b]))
                g2 = T2.bind(B, X, T2.generic(op, a), lambda b: T2.unit(X, k[b]))
                if phi.get(g1) != g2:
                    gens_ok = False
    total = len(C1) ** len(X)
    if total <= budget:
        conts = [dict(zip(X.elems, vs)) for vs in itertools.product(C1.subset.elems, repeat=len(X))]
    else:
        conts = [{x: rng.choice(C1.subset.elems) for x in X.elems} for _ in range(budget)]
    checked = 0
    bind_ok, witness = True, None
    if bij:
        for m in C1.subset.elems:
            for f in conts:
                checked += 1
                lhs = phi[T1.bind(X, X, m, f.__getitem__)]
                rhs = T2.bind(X, X, phi[m], lambda x: phi[f[x]])
                if lhs != rhs:
                    bind_ok, witness = False, f"m={show(m)}"
                    break
            if not bind_ok:
                break
    return IsoReport(bij, unit_ok, bind_ok and bij, gens_ok, checked, witness)


def free_term_correspondence(T1: MonadModel, T2: MonadModel, eps, X: FinSetObj, max_depth: int = 8) -> dict:
    """The relation {(m1(t), m2(t))} induced by interpreting the same free terms in two models.

    Raises ValueError when it is not a function.
    """
    memo1, memo2 = {}, {}
    phi: dict = {}
    prev_size = -1
    for d in range(max_depth + 1):
        for t in enumerate_free_terms(T1, eps, X, d):
            a = interpret_free_term(T1, t, X, memo1)
            b = interpret_free_term(T2, t, X, memo2)
            if phi.setdefault(a, b) != b:
                raise ValueError(f"free term {t} separates elements identified by {T1.name}")
        if len(phi) == prev_size:
            return phi
        prev_size = len(phi)
    raise SaturationLimitExceeded(f"correspondence not stable by depth {max_depth}")


def state_to_writer(state: MonadModel, m):
    """Read a write-only state behaviour as (overwrite record, result).

    A location is untouched when the final state agrees with the start state
    everywhere; otherwise its final value must be constant.
    """
    from .finset import STAR, apply, inl, inr, tabulate

    rows = m[1]
    results = {p[2] for _, p in rows}
    if len(results) != 1:
        raise ValueError("not a write-only behaviour: the result depends on the state")
    cells = {}
    for l in state.loc.elems:
        finals = [(apply(s, l), apply(p[1], l)) for s, p in rows]
        if all(a == b for a, b in finals):
            cells[l] = inl(STAR)
        else:
            vals = {b for _, b in finals}
            if len(vals) != 1:
                raise ValueError("not a write-only behaviour: a location is updated state-dependently")
            cells[l] = inr(vals.pop())
    return pair(tabulate(state.loc, cells.__getitem__), results.pop())


# ---------------------------------------------------------------- graded laws


def check_graded_laws(family: GradedFamily, eps, objects, seed: int = 0, max_object_cost: int = 20_000):
    """Monad and strength laws for T_eps, with closure of every operation in the carriers.

    Carriers are subsets of T X, so the laws themselves are inherited; what
    is new is that unit, bind, strength and the eps-generics never leave
    the carriers.  Returns a :class:`LawReport`.
    """
    with limits(max_carrier=min(max_object_cost, current_limits().max_carrier)):
        return _check_graded_laws(family, eps, objects, seed)


def _check_graded_laws(family, eps, objects, seed):
    from .monads import LawReport, LawResult, _skip_oversized

    T = family.model
    eps = frozenset(eps)
    rng = random.Random(seed)
    objects = list(objects)
    name = f"{T.name} T_{{{','.join(sorted(eps))}}}"
    res = {n: LawResult(n) for n in (
        "unit closure", "bind closure", "strength closure", "generic closure",
        "left unit", "right unit", "associativity", "inclusion functoriality")}

    def sample(seq, n):
        seq = list(seq)
        if len(seq) <= n:
            return seq
        return rng.sample(seq, n)

    def kleisli(X, C, n):
        total = len(C) ** len(X)
        if total <= n:
            return [dict(zip(X.elems, vs)) for vs in itertools.product(C.subset.elems, repeat=len(X))], True
        return [{x: rng.choice(C.subset.elems) for x in X.elems} for _ in range(n)], False

    for X in objects:
        CX = family.carrier(eps, X)
        r = res["unit closure"]
        for x in X.elems:
            r.checked += 1
            if T.unit(X, x) not in CX:
                r.fail(f"unit {show(x)}")
        for Y in objects:
            CY = family.carrier(eps, Y)
            fs, full = kleisli(X, CY, 40)
            ms = sample(CX.subset.elems, 40)
            full = full and len(ms) == len(CX)
            for m in ms:
                for f in fs:
                    b = T.bind(X, Y, m, f.__getitem__)
                    res["bind closure"].checked += 1
                    if b not in CY:
                        res["bind closure"].fail(f"m={show(m)}")
            if not full:
                res["bind closure"].exhaustive = False
            with _skip_oversized(res["strength closure"]):
                CAX = family.carrier(eps, product(Y, X))
                for a in Y.elems:
                    for m in ms:
                        res["strength closure"].checked += 1
                        if T.strength(Y, X, a, m) not in CAX:
                            res["strength closure"].fail(f"a={show(a)}, m={show(m)}")
        # restricted monad laws
        fs, full = kleisli(X, CX, 30)
        ms = sample(CX.subset.elems, 30)
        for x in X.elems:
            for f in fs:
                res["left unit"].checked += 1
                if T.bind(X, X, T.unit(X, x), f.__getitem__) != f[x]:
                    res["left unit"].fail(f"x={show(x)}")
        for m in ms:
            res["right unit"].checked += 1
            if T.bind(X, X, m, lambda x: T.unit(X, x)) != m:
                res["right unit"].fail(show(m))
            for f in fs[:10]:
                for g in fs[:10]:
                    res["associativity"].checked += 1
                    lhs = T.bind(X, X, T.bind(X, X, m, f.__getitem__), g.__getitem__)
                    rhs = T.bind(X, X, m, lambda x: T.bind(X, X, f[x], g.__getitem__))
                    if lhs != rhs:
                        res["associativity"].fail(show(m))
        if not full or len(ms) < len(CX):
            for k in ("left unit", "right unit", "associativity"):
                res[k].exhaustive = False
        # inclusions compose: T_e -> T_e' -> T_eps equals T_e -> T_eps
        subsets = [frozenset(c) for n in range(len(eps) + 1) for c in itertools.combinations(sorted(eps), n)]
        r = res["inclusion functoriality"]
        for e1 in subsets:
            for e2 in subsets:
                if e1 <= e2:
                    direct = inclusion(family, e1, eps, X)
                    via = inclusion(family, e2, eps, X).table
                    step = inclusion(family, e1, e2, X)
                    for m in family.carrier(e1, X).subset.elems:
                        r.checked += 1
                        if via[step(m)] != direct(m):
                            r.fail(f"{sorted(e1)} <= {sorted(e2)} at {show(m)}")
    r = res["generic closure"]
    for op in sorted(eps):
        A, B = T.ops[op]
        CB = family.carrier(eps, B)
        for a in A.elems:
            r.checked += 1
            if T.generic(op, a) not in CB:
                r.fail(f"{op}({show(a)})")
    return LawReport(name, list(res.values()))
