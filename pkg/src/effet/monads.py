"""Strong monads on finite sets, their generic effects, and law checking.

Every model works element-wise: ``unit(X, x)``, ``bind(X, Y, m, f)`` with
``f`` any Python callable from elements of X to elements of TY.  Models
whose elements depend on the object (continuations) set ``needs_objects``;
the others accept ``None`` for object arguments.  Table-valued views
(``unit_at``, ``mult_at`` ...) are built on demand and respect the size
limits.
"""
from __future__ import annotations

import contextlib
import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from .errors import MonoidLawViolation, SizeLimitExceeded
from .finset import (
    STAR, TABLE, FinFn, FinSetObj, apply, coproduct, current_limits, exponential, guard_size, limits, inl, inr, pair, product,
    show, tabulate, terminal, update,
)


class MonadModel:
    name = "monad"
    needs_objects = False
    primitive_mult = False

    def __init__(self, ops: dict | None = None):
        # op -> (argument object, result object)
        self.ops = dict(ops or {})
        self._carriers: dict = {}

    def key(self) -> tuple:
        return (self.name,)

    def __repr__(self):
        return f"<{self.name} monad>"

    # -- structure, element-wise
    def carrier(self, X: FinSetObj) -> FinSetObj:
        c = self._carriers.get(X)
        if c is None:
            c = self._carriers[X] = self._carrier(X)
        return c

    def _carrier(self, X):
        raise NotImplementedError

    def unit(self, X, x):
        raise NotImplementedError

    def bind(self, X, Y, m, f: Callable):
        raise NotImplementedError

    def mult(self, X, mm):
        TX = self.carrier(X) if self.needs_objects else None
        return self.bind(TX, X, mm, lambda m: m)

    def fmap(self, X, Y, f: Callable, m):
        return self.bind(X, Y, m, lambda x: self.unit(Y, f(x)))

    def strength(self, A, X, a, m):
        AX = product(A, X) if self.needs_objects else None
        return self.bind(X, AX, m, lambda x: self.unit(AX, pair(a, x)))

    def generic(self, op: str, a):
        raise NotImplementedError

    def arity(self, op: str) -> tuple:
        return self.ops[op]

    def random_element(self, X: FinSetObj, rng: random.Random):
        return rng.choice(self.carrier(X).elems)

    # -- structure, as tables
    def unit_at(self, X: FinSetObj) -> FinFn:
        return FinFn.tabulate(X, self.carrier(X), lambda x: self.unit(X, x), check=False)

    def mult_at(self, X: FinSetObj) -> FinFn:
        TTX = self.carrier(self.carrier(X))
        return FinFn.tabulate(TTX, self.carrier(X), lambda mm: self.mult(X, mm), check=False)

    def strength_at(self, A: FinSetObj, X: FinSetObj) -> FinFn:
        dom = product(A, self.carrier(X))
        cod = self.carrier(product(A, X))
        return FinFn.tabulate(dom, cod, lambda p: self.strength(A, X, p[1], p[2]), check=False)

    def fmap_fn(self, f: FinFn) -> FinFn:
        X, Y = f.dom, f.cod
        return FinFn.tabulate(self.carrier(X), self.carrier(Y), lambda m: self.fmap(X, Y, f, m), check=False)

    def bind_fn(self, f: FinFn, Y: FinSetObj) -> FinFn:
        """Kleisli extension of f : X -> TY as a table TX -> TY."""
        X = f.dom
        return FinFn.tabulate(self.carrier(X), self.carrier(Y), lambda m: self.bind(X, Y, m, f), check=False)

    def generic_fn(self, op: str) -> FinFn:
        A, B = self.ops[op]
        return FinFn.tabulate(A, self.carrier(B), lambda a: self.generic(op, a), check=False)


# ---------------------------------------------------------------- state-like models


def store(loc: FinSetObj, values: FinSetObj) -> FinSetObj:
    """State = V^Loc."""
    return exponential(loc, values)


def _state_ops(loc, values, which=("get", "set")):
    ops = {}
    if "get" in which:
        ops["get"] = (loc, values)
    if "set" in which:
        ops["set"] = (product(loc, values), terminal())
    return ops


class StateMonad(MonadModel):
    """TX = (S x X)^S with S = V^Loc."""

    name = "state"
    primitive_mult = True

    def __init__(self, loc: FinSetObj, values: FinSetObj):
        super().__init__(_state_ops(loc, values))
        self.loc, self.values = loc, values
        self.S = store(loc, values)
        self._sidx = self.S.index

    def key(self):
        return (self.name, self.loc.elems, self.values.elems)

    def _carrier(self, X):
        return exponential(self.S, product(self.S, X))

    def _tab(self, fn):
        return (TABLE, tuple((s, fn(s)) for s in self.S.elems))

    def at(self, m, s):
        return m[1][self._sidx[s]][1]

    def unit(self, X, x):
        return self._tab(lambda s: (2, s, x))

    def bind(self, X, Y, m, f):
        idx = self._sidx
        out, cache = [], {}
        for s, (_, s1, x) in m[1]:
            n = cache.get(x)
            if n is None:
                n = cache[x] = f(x)
            out.append((s, n[1][idx[s1]][1]))
        return (TABLE, tuple(out))

    def mult(self, X, mm):
        idx = self._sidx
        return (TABLE, tuple((s, m[1][idx[s1]][1]) for s, (_, s1, m) in mm[1]))

    def strength(self, A, X, a, m):
        return (TABLE, tuple((s, (2, s1, (2, a, x))) for s, (_, s1, x) in m[1]))

    def generic(self, op, a):
        if op == "get":
            return self._tab(lambda s: pair(s, apply(s, a)))
        if op == "set":
            loc, v = a[1], a[2]
            return self._tab(lambda s: pair(update(s, loc, v), STAR))
        raise KeyError(op)

    def random_element(self, X, rng):
        xs = X.elems
        return self._tab(lambda s: pair(rng.choice(self.S.elems), rng.choice(xs)))


class ReaderMonad(MonadModel):
    """TX = X^S; only ``get`` is available."""

    name = "reader"
    primitive_mult = True

    def __init__(self, loc: FinSetObj, values: FinSetObj):
        super().__init__(_state_ops(loc, values, ("get",)))
        self.loc, self.values = loc, values
        self.S = store(loc, values)
        self._sidx = self.S.index

    def key(self):
        return (self.name, self.loc.elems, self.values.elems)

    def _carrier(self, X):
        return exponential(self.S, X)

    def unit(self, X, x):
        return (TABLE, tuple((s, x) for s in self.S.elems))

    def bind(self, X, Y, m, f):
        idx = self._sidx
        return (TABLE, tuple((s, f(x)[1][idx[s]][1]) for s, x in m[1]))

    def mult(self, X, mm):
        idx = self._sidx
        return (TABLE, tuple((s, m[1][idx[s]][1]) for s, m in mm[1]))

    def strength(self, A, X, a, m):
        return (TABLE, tuple((s, (2, a, x)) for s, x in m[1]))

    def generic(self, op, a):
        if op != "get":
            raise KeyError(op)
        return (TABLE, tuple((s, apply(s, a)) for s in self.S.elems))

    def random_element(self, X, rng):
        return (TABLE, tuple((s, rng.choice(X.elems)) for s in self.S.elems))


@dataclass
class Monoid:
    carrier: FinSetObj
    unit: tuple
    mult: FinFn
    _tab: dict = field(default=None, repr=False)

    def op(self, a, b):
        if self._tab is None:
            self._tab = self.mult.table
        return self._tab[pair(a, b)]


def check_monoid_laws(M: Monoid) -> list:
    """Exhaustive unit, associativity and idempotence checks; returns failures."""
    failures = []
    for a in M.carrier:
        if M.op(M.unit, a) != a:
            failures.append(("left unit", a))
        if M.op(a, M.unit) != a:
            failures.append(("right unit", a))
    for a, b, c in itertools.product(M.carrier.elems, repeat=3):
        if M.op(M.op(a, b), c) != M.op(a, M.op(b, c)):
            failures.append(("associativity", (a, b, c)))
    return failures


def is_idempotent(M: Monoid):
    """First a with a * a != a, or None."""
    for a in M.carrier:
        if M.op(a, a) != a:
            return a
    return None


def overwriting_monoid(loc: FinSetObj, values: FinSetObj) -> Monoid:
    """(1 + V)^Loc under right-biased overwrite; inl * means "location untouched"."""
    cells = coproduct(terminal(), values)
    carrier = exponential(loc, cells)
    keep = inl(STAR)
    unit = tabulate(loc, lambda _: keep)

    def mul(a, b):
        return (TABLE, tuple((l, vb if vb != keep else va) for (l, va), (_, vb) in zip(a[1], b[1])))

    dom = product(carrier, carrier)
    mult = FinFn(dom, carrier, {p: mul(p[1], p[2]) for p in dom.elems}, check=False)
    return Monoid(carrier, unit, mult)


class WriterMonad(MonadModel):
    """TX = M x X for a finite monoid M."""

    name = "writer"
    primitive_mult = True

    def __init__(self, monoid: Monoid, ops: dict | None = None, generics: dict | None = None, check: bool = True):
        if check:
            bad = check_monoid_laws(monoid)
            if bad:
                law, witness = bad[0]
                raise MonoidLawViolation(f"{law} fails at {witness!r}")
        super().__init__(ops)
        self.monoid = monoid
        self._generics = dict(generics or {})

    def key(self):
        return (self.name, self.monoid.carrier.elems, self.monoid.unit)

    def _carrier(self, X):
        return product(self.monoid.carrier, X)

    def unit(self, X, x):
        return (2, self.monoid.unit, x)

    def bind(self, X, Y, m, f):
        _, w, x = m
        _, w2, y = f(x)
        return (2, self.monoid.op(w, w2), y)

    def mult(self, X, mm):
        _, w, (_, w2, x) = mm
        return (2, self.monoid.op(w, w2), x)

    def strength(self, A, X, a, m):
        return (2, m[1], (2, a, m[2]))

    def generic(self, op, a):
        return self._generics[op](a)

    def random_element(self, X, rng):
        return pair(rng.choice(self.monoid.carrier.elems), rng.choice(X.elems))


def writer_monad(monoid: Monoid, ops=None, generics=None) -> WriterMonad:
    return WriterMonad(monoid, ops, generics)


def overwriting_writer(loc: FinSetObj, values: FinSetObj) -> WriterMonad:
    """Writer over the overwriting monoid with ``set`` recording one update."""
    M = overwriting_monoid(loc, values)

    def set_(a):
        return pair(update(M.unit, a[1], inr(a[2])), STAR)

    w = WriterMonad(M, _state_ops(loc, values, ("set",)), {"set": set_})
    w.loc, w.values = loc, values
    return w


class IdentityMonad(MonadModel):
    name = "identity"
    primitive_mult = True

    def __init__(self, ops: dict | None = None, generics: dict | None = None):
        super().__init__(ops)
        self._generics = dict(generics or {})

    def _carrier(self, X):
        return X

    def unit(self, X, x):
        return x

    def bind(self, X, Y, m, f):
        return f(m)

    def mult(self, X, mm):
        return mm

    def strength(self, A, X, a, m):
        return pair(a, m)

    def generic(self, op, a):
        return self._generics[op](a)

    def random_element(self, X, rng):
        return rng.choice(X.elems)


class ContStateMonad(MonadModel):
    """Continuations with state-indexed answers: TX = (R^S)^((R^S)^X).

    ``get``/``set`` are the usual continuation-passing state operations:
    get l = \\k s. k (s l) s and set (l, v) = \\k s. k * (s[l := v]).
    """

    name = "cont_state"
    needs_objects = True

    def __init__(self, answers: FinSetObj, loc: FinSetObj, values: FinSetObj):
        super().__init__(_state_ops(loc, values))
        self.R, self.loc, self.values = answers, loc, values
        self.S = store(loc, values)
        self.RS = exponential(self.S, answers)
        self._konts: dict = {}
        self._units: dict = {}

    def key(self):
        return (self.name, self.R.elems, self.loc.elems, self.values.elems)

    def konts(self, X: FinSetObj) -> FinSetObj:
        """Continuations (R^S)^X, indexed for lookup."""
        K = self._konts.get(X)
        if K is None:
            K = self._konts[X] = exponential(X, self.RS)
        return K

    def _carrier(self, X):
        K = self.konts(X)
        guard_size(len(self.RS) ** len(K), "continuation carrier")
        return exponential(K, self.RS)

    def unit(self, X, x):
        key = (X, x)
        u = self._units.get(key)
        if u is None:
            i = X.index[x]
            u = self._units[key] = (TABLE, tuple((k, k[1][i][1]) for k in self.konts(X).elems))
        return u

    def bind(self, X, Y, m, f):
        # (R^S)^X is enumerated in mixed-radix order (first x most significant),
        # so the position of the continuation x -> f(x)(k) is computed, not looked up
        KY = self.konts(Y)
        rs_index = self.RS.index
        q, n = len(self.RS), len(X)
        cols = [[rs_index[r] for _, r in f(x)[1]] for x in X.elems]
        weights = [q ** (n - 1 - i) for i in range(n)]
        mv = m[1]
        out = []
        for j, k in enumerate(KY.elems):
            pos = 0
            for w, col in zip(weights, cols):
                pos += w * col[j]
            out.append((k, mv[pos][1]))
        return (TABLE, tuple(out))

    def _bind_by_lookup(self, X, Y, m, f):
        """Reference bind that looks continuations up by value."""
        KX, KY = self.konts(X), self.konts(Y)
        fx = [(x, f(x)[1]) for x in X.elems]
        out = []
        for j, k in enumerate(KY.elems):
            cont = (TABLE, tuple((x, row[j][1]) for x, row in fx))
            out.append((k, m[1][KX.index[cont]][1]))
        return (TABLE, tuple(out))

    def generic(self, op, a):
        if op == "get":
            V = self.values
            vi = {v: i for i, v in enumerate(V.elems)}
            return (TABLE, tuple(
                (k, tabulate(self.S, lambda s, k=k: apply(k[1][vi[apply(s, a)]][1], s)))
                for k in self.konts(V).elems
            ))
        if op == "set":
            one = terminal()
            loc, v = a[1], a[2]
            return (TABLE, tuple(
                (k, tabulate(self.S, lambda s, k=k: apply(k[1][0][1], update(s, loc, v))))
                for k in self.konts(one).elems
            ))
        raise KeyError(op)

    def run(self, X, m, k, s):
        """Feed continuation k and start state s to m."""
        return apply(apply(m, k), s)

    def random_element(self, X, rng):
        rs = self.RS.elems
        return (TABLE, tuple((k, rng.choice(rs)) for k in self.konts(X).elems))


def state_monad(loc, values) -> StateMonad:
    return StateMonad(loc, values)


def reader_monad(loc, values) -> ReaderMonad:
    return ReaderMonad(loc, values)


def identity_monad(ops=None, generics=None) -> IdentityMonad:
    return IdentityMonad(ops, generics)


def cont_state_monad(answers, loc, values) -> ContStateMonad:
    return ContStateMonad(answers, loc, values)


# ---------------------------------------------------------------- algebraic operations


def generic_to_algebraic(T: MonadModel, op: str, X: FinSetObj) -> FinFn:
    """alpha_X : (TX)^B -> (TX)^A, alpha_X(k)(a) = bind(generic(op)(a), k)."""
    A, B = T.ops[op]
    TX = T.carrier(X)
    dom = exponential(B, TX)
    cod = exponential(A, TX)

    def alpha(k):
        return tabulate(A, lambda a: T.bind(B, X, T.generic(op, a), lambda b: apply(k, b)))

    return FinFn.tabulate(dom, cod, alpha, check=False)


def algebraic_to_generic(T: MonadModel, op: str, alpha_at_B: FinFn) -> FinFn:
    """Recover the generic effect by feeding alpha_B the unit continuation."""
    A, B = T.ops[op]
    k = tabulate(B, lambda b: T.unit(B, b))
    row = alpha_at_B(k)
    return FinFn(A, T.carrier(B), {a: v for a, v in row[1]}, check=False)


# ---------------------------------------------------------------- law checking


@dataclass
class LawResult:
    law: str
    passed: bool = True
    checked: int = 0
    exhaustive: bool = True
    witness: str | None = None
    note: str | None = None
    skipped: int = 0

    def fail(self, witness: str):
        if self.passed:
            self.passed = False
            self.witness = witness


@dataclass
class LawReport:
    model: str
    results: list

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, law) -> LawResult:
        for r in self.results:
            if r.law == law:
                return r
        raise KeyError(law)

    def lines(self) -> list:
        out = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            if r.note and not r.checked:
                out.append(f"N/A  {self.model}: {r.law} [{r.note}]")
                continue
            mode = "exhaustive" if r.exhaustive else "sampled"
            line = f"{status} {self.model}: {r.law} ({r.checked} checks, {mode})"
            if r.note:
                line += f" [{r.note}]"
            if r.skipped:
                line += f" [{r.skipped} object combinations skipped: over the carrier limit]"
            if r.witness:
                line += f" witness: {r.witness}"
            out.append(line)
        return out


@contextlib.contextmanager
def _skip_oversized(r: LawResult):
    try:
        yield
    except SizeLimitExceeded:
        r.skipped += 1


class _Elements:
    """Element and function supplies for law checking, exhaustive when small."""

    def __init__(self, T, budget, rng):
        self.T, self.budget, self.rng = T, budget, rng
        self.exhaustive = True

    def of_T(self, X, n=None):
        n = n or self.budget
        try:
            TX = self.T.carrier(X)
        except SizeLimitExceeded:
            TX = None
        if TX is not None and len(TX) <= n:
            return list(TX.elems)
        self.exhaustive = False
        if TX is not None:
            return self.rng.sample(TX.elems, n)
        return [self.T.random_element(X, self.rng) for _ in range(n)]

    def kleisli(self, X, Y, n=None):
        """Functions X -> TY as dicts."""
        n = n or self.budget
        values = self.of_T(Y, n)
        total = len(values) ** len(X)
        if total <= n:
            return [dict(zip(X.elems, vs)) for vs in itertools.product(values, repeat=len(X))]
        self.exhaustive = False
        return [{x: self.rng.choice(values) for x in X.elems} for _ in range(n)]

    def plain(self, X, Y, n=None):
        n = n or self.budget
        total = len(Y) ** len(X)
        if total <= n:
            return [dict(zip(X.elems, vs)) for vs in itertools.product(Y.elems, repeat=len(X))]
        self.exhaustive = False
        return [{x: self.rng.choice(Y.elems) for x in X.elems} for _ in range(n)]


def check_monad_laws(T: MonadModel, objects, budget: int = 400, seed: int = 0,
                     max_object_cost: int = 50_000) -> LawReport:
    """Check functor, monad, strength and coincidence laws on the given objects.

    Everything is exhaustive when the relevant supply has at most ``budget``
    members, and a seeded sample of that size otherwise; each result records
    which.  Object combinations whose intermediate carriers would exceed
    ``max_object_cost`` are skipped and counted.
    """
    with limits(max_carrier=min(max_object_cost, current_limits().max_carrier)):
        return _check_monad_laws(T, objects, budget, seed)


def _check_monad_laws(T, objects, budget, seed) -> LawReport:
    rng = random.Random(seed)
    objects = list(objects)
    results = {}

    def law(name) -> LawResult:
        return results.setdefault(name, LawResult(name))

    def run(name, body):
        r = law(name)
        sup = _Elements(T, budget, rng)
        body(r, sup)
        r.exhaustive = r.exhaustive and sup.exhaustive

    one = terminal()
    pairs_of_objects = [(X, Y) for X in objects for Y in objects]
    small = [X for X in objects if len(X) <= 2] or objects[:1]

    def left_unit(r, sup):
        for X, Y in pairs_of_objects:
            with _skip_oversized(r):
                for f in sup.kleisli(X, Y, 64):
                    for x in X.elems:
                        r.checked += 1
                        if T.bind(X, Y, T.unit(X, x), f.__getitem__) != f[x]:
                            r.fail(f"x={show(x)}")

    def right_unit(r, sup):
        for X in objects:
            for m in sup.of_T(X):
                r.checked += 1
                if T.bind(X, X, m, lambda x: T.unit(X, x)) != m:
                    r.fail(show(m))

    def assoc(r, sup):
        for X in objects:
            for Y in small:
                with _skip_oversized(r):
                    fs = sup.kleisli(X, Y, 12)
                    gs = sup.kleisli(Y, X, 12)
                    ms = sup.of_T(X, 24)
                    for m in ms:
                        for f in fs:
                            for g in gs:
                                r.checked += 1
                                lhs = T.bind(Y, X, T.bind(X, Y, m, f.__getitem__), g.__getitem__)
                                rhs = T.bind(X, X, m, lambda x: T.bind(Y, X, f[x], g.__getitem__))
                                if lhs != rhs:
                                    r.fail(f"m={show(m)}")

    def functor_id(r, sup):
        for X in objects:
            for m in sup.of_T(X):
                r.checked += 1
                if T.fmap(X, X, lambda x: x, m) != m:
                    r.fail(show(m))

    def functor_comp(r, sup):
        for X in objects:
            for Y in small:
                with _skip_oversized(r):
                    fs = sup.plain(X, Y, 16)
                    gs = sup.plain(Y, X, 16)
                    for m in sup.of_T(X, 24):
                        for f in fs:
                            for g in gs:
                                r.checked += 1
                                lhs = T.fmap(X, X, lambda x: g[f[x]], m)
                                rhs = T.fmap(Y, X, g.__getitem__, T.fmap(X, Y, f.__getitem__, m))
                                if lhs != rhs:
                                    r.fail(show(m))

    def strength_unit(r, sup):
        for X in objects:
            with _skip_oversized(r):
                for m in sup.of_T(X):
                    r.checked += 1
                    t = T.strength(one, X, STAR, m)
                    if T.fmap(product(one, X), X, lambda p: p[2], t) != m:
                        r.fail(show(m))

    def strength_eta(r, sup):
        for A, X in pairs_of_objects:
            with _skip_oversized(r):
                AX = product(A, X)
                for a in A.elems:
                    for x in X.elems:
                        r.checked += 1
                        if T.strength(A, X, a, T.unit(X, x)) != T.unit(AX, pair(a, x)):
                            r.fail(f"a={show(a)}, x={show(x)}")

    def strength_assoc(r, sup):
        for A in small:
            for B in small:
                for X in objects:
                    with _skip_oversized(r):
                        AB, BX = product(A, B), product(B, X)
                        ABX, A_BX = product(AB, X), product(A, BX)
                        for m in sup.of_T(X, 32):
                            for a in A.elems:
                                for b in B.elems:
                                    r.checked += 1
                                    lhs = T.fmap(ABX, A_BX, lambda p: pair(p[1][1], pair(p[1][2], p[2])),
                                                 T.strength(AB, X, pair(a, b), m))
                                    rhs = T.strength(A, BX, a, T.strength(B, X, b, m))
                                    if lhs != rhs:
                                        r.fail(f"a={show(a)}, b={show(b)}, m={show(m)}")

    def strength_bind(r, sup):
        for A in small:
            for X in objects:
                for Y in small:
                    with _skip_oversized(r):
                        AY = product(A, Y)
                        fs = sup.kleisli(X, Y, 12)
                        for m in sup.of_T(X, 24):
                            for f in fs:
                                for a in A.elems:
                                    r.checked += 1
                                    lhs = T.strength(A, Y, a, T.bind(X, Y, m, f.__getitem__))
                                    rhs = T.bind(X, AY, m, lambda x: T.strength(A, Y, a, f[x]))
                                    if lhs != rhs:
                                        r.fail(f"a={show(a)}, m={show(m)}")

    def strength_natural(r, sup):
        for A in small:
            for X in objects:
                with _skip_oversized(r):
                    fs = sup.plain(A, A, 8)
                    gs = sup.plain(X, X, 8)
                    AX = product(A, X)
                    for m in sup.of_T(X, 16):
                        for f in fs:
                            for g in gs:
                                for a in A.elems:
                                    r.checked += 1
                                    lhs = T.fmap(AX, AX, lambda p: pair(f[p[1]], g[p[2]]), T.strength(A, X, a, m))
                                    rhs = T.strength(A, X, f[a], T.fmap(X, X, g.__getitem__, m))
                                    if lhs != rhs:
                                        r.fail(f"a={show(a)}, m={show(m)}")

    def mult_laws(r, sup):
        if not T.primitive_mult:
            r.note = "bind-primitive model: mult is derived from bind"
            return
        for X in objects:
            for m in sup.of_T(X):
                TX = T.carrier(X)
                r.checked += 2
                if T.mult(X, T.unit(TX, m)) != m:
                    r.fail(f"mu . eta_T at {show(m)}")
                if T.mult(X, T.fmap(X, TX, lambda x: T.unit(X, x), m)) != m:
                    r.fail(f"mu . T eta at {show(m)}")

    def mult_assoc(r, sup):
        if not T.primitive_mult:
            r.note = "bind-primitive model: mult is derived from bind"
            return
        for X in small:
            TX = T.carrier(X)
            TTX = T.carrier(TX)
            for mmm in sup.of_T(TTX, 200):
                r.checked += 1
                lhs = T.mult(X, T.mult(TX, mmm))
                rhs = T.mult(X, T.fmap(TTX, TX, lambda mm: T.mult(X, mm), mmm))
                if lhs != rhs:
                    r.fail(show(mmm))

    def coincide(r, sup):
        if not T.primitive_mult:
            r.note = "bind-primitive model: mult and strength are derived from bind"
            return
        for X in objects:
            for Y in small:
                with _skip_oversized(r):
                    TY = T.carrier(Y)
                    fs = sup.kleisli(X, Y, 16)
                    for m in sup.of_T(X, 32):
                        for f in fs:
                            r.checked += 1
                            via_mult = T.mult(Y, T.fmap(X, TY, f.__getitem__, m))
                            if T.bind(X, Y, m, f.__getitem__) != via_mult:
                                r.fail(f"bind vs mult at m={show(m)}")
                        for a in Y.elems:
                            r.checked += 1
                            derived = T.bind(X, product(Y, X), m, lambda x: T.unit(product(Y, X), pair(a, x)))
                            if T.strength(Y, X, a, m) != derived:
                                r.fail(f"strength vs bind at a={show(a)}, m={show(m)}")

    run("left unit", left_unit)
    run("right unit", right_unit)
    run("associativity", assoc)
    run("functor identity", functor_id)
    run("functor composition", functor_comp)
    run("mult unit laws", mult_laws)
    run("mult associativity", mult_assoc)
    run("strength unit", strength_unit)
    run("strength eta", strength_eta)
    run("strength associativity", strength_assoc)
    run("strength bind", strength_bind)
    run("strength naturality", strength_natural)
    run("bind/mult coincidence", coincide)
    return LawReport(T.name, list(results.values()))
