"""Syntax-directed type-and-effect inference.

Effects follow the union rules exactly; widening only happens at
ascriptions and in :func:`check`.  Injections and ``absurd`` leave a
component of their type open, so inference carries first-order type
metavariables that are solved by unification and default to ``0`` when
nothing constrains them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import EffectExceeded, TypeMismatch, UnboundVariable, UnknownName, UnknownOperation
from .syntax import (
    EMPTY, PURE, TOP, UNIT, Absurd, App, Arrow, Ascribe, Case, Const, Fst, Inl, Inr, Lam, Let,
    Meta, OpApp, Pair, Prod, Signature, Snd, Sum, Term, TypeExpr, UnitVal, Var, erase_type,
    print_effect, print_term, print_type,
)


@dataclass(frozen=True)
class TMeta:
    id: int


@dataclass(frozen=True)
class Judgment:
    ctx: tuple
    term: Term
    type: TypeExpr
    eff: frozenset | None  # None for unrefined judgments

    def __str__(self):
        ctx = ", ".join(f"{x}:{print_type(A)}" for x, A in self.ctx)
        head = f"{ctx} |- " if ctx else "|- "
        tail = "" if self.eff is None else f" ! {print_effect(self.eff)}"
        return f"{head}{print_term(self.term)} : {print_type(self.type)}{tail}"


@dataclass(frozen=True)
class Typed:
    """A term node decorated with its principal type and effect."""

    term: Term
    type: TypeExpr
    eff: frozenset
    kids: tuple = ()


def as_ctx(ctx: Mapping | Iterable | None) -> tuple:
    if ctx is None:
        return ()
    if isinstance(ctx, Mapping):
        return tuple(ctx.items())
    return tuple(ctx)


def normalise_top(A: TypeExpr, ops: frozenset) -> TypeExpr:
    """Read every TOP annotation as the full operation set."""
    if isinstance(A, Arrow):
        eff = ops if A.eff is TOP else A.eff
        return Arrow(normalise_top(A.dom, ops), eff, normalise_top(A.cod, ops))
    if isinstance(A, Prod):
        return Prod(normalise_top(A.left, ops), normalise_top(A.right, ops))
    if isinstance(A, Sum):
        return Sum(normalise_top(A.left, ops), normalise_top(A.right, ops))
    return A


class _Inferer:
    def __init__(self, sig: Signature, refined: bool):
        self.sig = sig
        self.refined = refined
        self.subst: dict = {}
        self.counter = itertools.count()

    def fresh(self):
        return TMeta(next(self.counter))

    def prep(self, A):
        if not self.refined:
            return erase_type(A)
        return normalise_top(A, self.sig.ops)

    def resolve(self, A):
        while isinstance(A, TMeta) and A in self.subst:
            A = self.subst[A]
        return A

    def zonk(self, A, default=EMPTY):
        A = self.resolve(A)
        if isinstance(A, TMeta):
            return default
        if isinstance(A, Arrow):
            return Arrow(self.zonk(A.dom, default), A.eff, self.zonk(A.cod, default))
        if isinstance(A, Prod):
            return Prod(self.zonk(A.left, default), self.zonk(A.right, default))
        if isinstance(A, Sum):
            return Sum(self.zonk(A.left, default), self.zonk(A.right, default))
        return A

    def occurs(self, m, A):
        A = self.resolve(A)
        if A == m:
            return True
        if isinstance(A, Arrow):
            return self.occurs(m, A.dom) or self.occurs(m, A.cod)
        if isinstance(A, (Prod, Sum)):
            return self.occurs(m, A.left) or self.occurs(m, A.right)
        return False

    def unify(self, A, B, M: Term):
        A, B = self.resolve(A), self.resolve(B)
        if A == B:
            return
        if isinstance(A, TMeta) or isinstance(B, TMeta):
            m, other = (A, B) if isinstance(A, TMeta) else (B, A)
            if self.occurs(m, other):
                self.mismatch(A, B, M)
            self.subst[m] = other
            return
        if type(A) is not type(B):
            self.mismatch(A, B, M)
        if isinstance(A, Arrow):
            if A.eff != B.eff:
                self.mismatch(A, B, M)
            self.unify(A.dom, B.dom, M)
            self.unify(A.cod, B.cod, M)
        elif isinstance(A, (Prod, Sum)):
            self.unify(A.left, B.left, M)
            self.unify(A.right, B.right, M)
        else:
            self.mismatch(A, B, M)

    def mismatch(self, A, B, M):
        raise TypeMismatch(
            f"type {print_type(self.zonk(A))} does not match {print_type(self.zonk(B))} in {print_term(M)}"
        )

    def go(self, ctx: dict, M: Term) -> Typed:
        if isinstance(M, Const):
            if M.name not in self.sig.constants:
                raise UnknownName(f"undeclared constant {M.name!r}")
            return Typed(M, self.prep(self.sig.constants[M.name]), PURE)
        if isinstance(M, Var):
            if M.name not in ctx:
                raise UnboundVariable(f"unbound variable {M.name!r}")
            return Typed(M, ctx[M.name], PURE)
        if isinstance(M, UnitVal):
            return Typed(M, UNIT, PURE)
        if isinstance(M, OpApp):
            if M.op not in self.sig.operations:
                raise UnknownOperation(f"undeclared operation {M.op!r}")
            arg_t, res_t = self.sig.operations[M.op]
            k = self.go(ctx, M.arg)
            self.unify(k.type, arg_t, M)
            return Typed(M, res_t, k.eff | {M.op}, (k,))
        if isinstance(M, Pair):
            a, b = self.go(ctx, M.fst), self.go(ctx, M.snd)
            return Typed(M, Prod(a.type, b.type), a.eff | b.eff, (a, b))
        if isinstance(M, (Fst, Snd)):
            k = self.go(ctx, M.arg)
            t = self.resolve(k.type)
            if isinstance(t, TMeta):
                t = Prod(self.fresh(), self.fresh())
                self.unify(k.type, t, M)
            if not isinstance(t, Prod):
                raise TypeMismatch(f"{print_term(M.arg)} has type {print_type(self.zonk(t))}, expected a product")
            return Typed(M, t.left if isinstance(M, Fst) else t.right, k.eff, (k,))
        if isinstance(M, Absurd):
            k = self.go(ctx, M.arg)
            self.unify(k.type, EMPTY, M)
            return Typed(M, self.fresh(), k.eff, (k,))
        if isinstance(M, Inl):
            k = self.go(ctx, M.arg)
            return Typed(M, Sum(k.type, self.fresh()), k.eff, (k,))
        if isinstance(M, Inr):
            k = self.go(ctx, M.arg)
            return Typed(M, Sum(self.fresh(), k.type), k.eff, (k,))
        if isinstance(M, Case):
            s = self.go(ctx, M.scrut)
            t = self.resolve(s.type)
            if isinstance(t, TMeta):
                t = Sum(self.fresh(), self.fresh())
                self.unify(s.type, t, M)
            if not isinstance(t, Sum):
                raise TypeMismatch(f"case scrutinee {print_term(M.scrut)} has type {print_type(self.zonk(t))}")
            left = self.go({**ctx, M.lvar: t.left}, M.lbody)
            right = self.go({**ctx, M.rvar: t.right}, M.rbody)
            self.unify(left.type, right.type, M)
            return Typed(M, left.type, s.eff | left.eff | right.eff, (s, left, right))
        if isinstance(M, Lam):
            A = self.prep(M.ty)
            body = self.go({**ctx, M.var: A}, M.body)
            latent = body.eff if self.refined else TOP
            return Typed(M, Arrow(A, latent, body.type), PURE, (body,))
        if isinstance(M, App):
            f, a = self.go(ctx, M.fn), self.go(ctx, M.arg)
            ft = self.resolve(f.type)
            if isinstance(ft, TMeta):
                raise TypeMismatch(f"cannot determine the function type of {print_term(M.fn)}; add an ascription")
            if not isinstance(ft, Arrow):
                raise TypeMismatch(f"{print_term(M.fn)} has type {print_type(self.zonk(ft))}, not a function type")
            self.unify(ft.dom, a.type, M)
            latent = ft.eff if ft.eff is not TOP else PURE
            return Typed(M, ft.cod, f.eff | a.eff | latent, (f, a))
        if isinstance(M, Let):
            b = self.go(ctx, M.bound)
            body = self.go({**ctx, M.var: b.type}, M.body)
            return Typed(M, body.type, b.eff | body.eff, (b, body))
        if isinstance(M, Ascribe):
            k = self.go(ctx, M.term)
            A = self.prep(M.ty)
            self.unify(k.type, A, M)
            if not self.refined:
                return Typed(M, A, k.eff, (k,))
            if not k.eff <= M.eff:
                raise EffectExceeded(k.eff, M.eff)
            return Typed(M, A, M.eff, (k,))
        if isinstance(M, Meta):
            raise TypeMismatch(f"schema metavariable ?{M.name} cannot be typed")
        raise TypeError(f"not a term: {M!r}")

    def finish(self, t: Typed) -> Typed:
        return Typed(t.term, self.zonk(t.type), t.eff, tuple(self.finish(k) for k in t.kids))


def _run(sig, ctx, M, refined, expected=None) -> Typed:
    inf = _Inferer(sig, refined)
    env = {x: inf.prep(A) for x, A in as_ctx(ctx)}
    t = inf.go(env, M)
    if expected is not None:
        inf.unify(t.type, inf.prep(expected), M)
    return inf.finish(t)


def annotate(sig: Signature, ctx, M: Term, refined: bool = True, expected: TypeExpr | None = None) -> Typed:
    return _run(sig, ctx, M, refined, expected)


def infer(sig: Signature, ctx, M: Term) -> tuple:
    """Principal (type, effect) of M under ctx."""
    t = _run(sig, ctx, M, True)
    return t.type, t.eff


def check(sig: Signature, ctx, M: Term, A: TypeExpr, eps: Iterable[str]) -> Judgment:
    eps = frozenset(eps)
    t = _run(sig, ctx, M, True, expected=A)
    if not t.eff <= eps:
        raise EffectExceeded(t.eff, eps)
    return Judgment(as_ctx(ctx), M, t.type, eps)


def judge(sig: Signature, ctx, M: Term) -> Judgment:
    """The principal judgment of M."""
    t = _run(sig, ctx, M, True)
    return Judgment(as_ctx(ctx), M, t.type, t.eff)


def infer_unrefined(sig: Signature, ctx, M: Term) -> TypeExpr:
    return _run(sig, ctx, M, False).type


def erase_judgment(j: Judgment) -> Judgment:
    return Judgment(tuple((x, erase_type(A)) for x, A in j.ctx), j.term, erase_type(j.type), None)


def derivable_unrefined(sig: Signature, j: Judgment) -> bool:
    try:
        t = _run(sig, j.ctx, j.term, False, expected=j.type)
    except (TypeMismatch, UnboundVariable, UnknownName, UnknownOperation):
        return False
    return erase_type(t.type) == erase_type(j.type)
