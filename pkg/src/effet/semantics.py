"""Denotational interpreters into the base monad and into the graded family.

Both interpreters evaluate a type-annotated term under an environment of
elements and return an element of T[[A]].  The refined one reads arrow
types as Kleisli maps into T_eps, ranges lambda parameters over refined
carriers and can verify that every intermediate result lies in the graded
carrier of its principal effect.  Sequencing is left to right everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .config import ModelConfig
from .errors import IncompatibleConstant, TypeMismatch
from .finset import (
    INL, STAR, FinFn, FinSetObj, apply, coproduct, exponential, initial, product, show, terminal,
)
from .grading import inclusion
from .syntax import (
    TOP, Absurd, App, Arrow, Ascribe, Base, Case, Const, Empty, Fst, Inl, Inr, Lam, Let, OpApp, Pair, Prod,
    Snd, Sum, Term, TypeExpr, UnitT, UnitVal, Var, erase_type, is_ground, print_type,
)
from .typecheck import Judgment, Typed, annotate, as_ctx, erase_judgment, judge, normalise_top

REFINED, UNREFINED = "refined", "unrefined"


def ground_object(A: TypeExpr, base: dict) -> FinSetObj:
    if isinstance(A, Base):
        return base[A.name]
    if isinstance(A, UnitT):
        return terminal()
    if isinstance(A, Empty):
        return initial()
    if isinstance(A, Prod):
        return product(ground_object(A.left, base), ground_object(A.right, base))
    if isinstance(A, Sum):
        return coproduct(ground_object(A.left, base), ground_object(A.right, base))
    raise TypeError(f"{print_type(A)} is not ground")


def interp_type(cfg: ModelConfig, A: TypeExpr, mode: str = REFINED) -> FinSetObj:
    """[[A]]; refined arrows denote tables into T_eps, unrefined ones into T."""
    if isinstance(A, Arrow):
        dom = interp_type(cfg, A.dom, mode)
        cod = interp_type(cfg, A.cod, mode)
        if mode == REFINED:
            eps = cfg.ops if A.eff is TOP else A.eff
            return exponential(dom, cfg.family.carrier(eps, cod).subset)
        return exponential(dom, cfg.model.carrier(cod))
    if isinstance(A, Prod):
        return product(interp_type(cfg, A.left, mode), interp_type(cfg, A.right, mode))
    if isinstance(A, Sum):
        return coproduct(interp_type(cfg, A.left, mode), interp_type(cfg, A.right, mode))
    return ground_object(A, cfg.base)


def interp_constant_refined(cfg: ModelConfig, c: str):
    """Refined element of a constant, checked against the graded carrier of its arrow."""
    A = normalise_top(cfg.signature.constants[c], cfg.ops)
    value = cfg.constants[c]
    if is_ground(A):
        return value
    if not (isinstance(A, Arrow) and is_ground(A.dom) and is_ground(A.cod)):
        raise IncompatibleConstant(f"constant {c}: only ground and first-order constants are supported")
    carrier = cfg.family.carrier(A.eff, ground_object(A.cod, cfg.base))
    for a, v in value[1]:
        if v not in carrier:
            raise IncompatibleConstant(
                f"constant {c} at argument {show(a)} gives {show(v)}, which lies outside "
                f"T_{{{','.join(sorted(A.eff))}}}"
            )
    return value


class Interpreter:
    def __init__(self, cfg: ModelConfig, mode: str = UNREFINED, verify: bool = False):
        if mode not in (REFINED, UNREFINED):
            raise ValueError(f"mode must be {REFINED!r} or {UNREFINED!r}")
        self.cfg = cfg
        self.T = cfg.model
        self.mode = mode
        self.verify = verify and mode == REFINED
        self._objs: dict = {}
        self._consts: dict = {}

    def obj(self, A: TypeExpr) -> FinSetObj:
        o = self._objs.get(A)
        if o is None:
            o = self._objs[A] = interp_type(self.cfg, A, self.mode)
        return o

    def _o(self, A):
        # objects are only needed by models whose elements depend on them
        return self.obj(A) if self.T.needs_objects else None

    def const(self, c):
        v = self._consts.get(c)
        if v is None:
            if self.mode == REFINED:
                v = interp_constant_refined(self.cfg, c)
            else:
                v = self.cfg.constants[c]
            self._consts[c] = v
        return v

    def coerce(self, m, t: Typed, eps, A):
        if not self.verify or eps == t.eff:
            return m
        return inclusion(self.cfg.family, t.eff, eps, self.obj(A))(m)

    def run(self, t: Typed, env: dict):
        m = self._eval(t, env)
        if self.verify:
            carrier = self.cfg.family.carrier(t.eff, self.obj(t.type))
            if m not in carrier:
                raise AssertionError(f"refined value escapes T_{sorted(t.eff)} at {t.term}")
        return m

    def _lambda_table(self, t: Typed, env: dict):
        (body,) = t.kids
        A, x = t.type, t.term.var
        latent = _latent(A, self.cfg)
        return (5, tuple((a, self.coerce(self.run(body, {**env, x: a}), body, latent, A.cod))
                         for a in self.obj(A.dom).elems))

    def _eval(self, t: Typed, env: dict):
        T, M, A = self.T, t.term, t.type
        o = self._o
        if isinstance(M, Const):
            return T.unit(o(A), self.const(M.name))
        if isinstance(M, Var):
            return T.unit(o(A), env[M.name])
        if isinstance(M, UnitVal):
            return T.unit(o(A), STAR)
        if isinstance(M, OpApp):
            (k,) = t.kids
            return T.bind(o(k.type), o(A), self.run(k, env), lambda a: T.generic(M.op, a))
        if isinstance(M, Pair):
            a, b = t.kids
            m, n = self.run(a, env), self.run(b, env)
            return T.bind(o(a.type), o(A), m, lambda x: T.strength(o(a.type), o(b.type), x, n))
        if isinstance(M, (Fst, Snd, Inl, Inr)):
            (k,) = t.kids
            f = _STRUCT[type(M)]
            return T.fmap(o(k.type), o(A), f, self.run(k, env))
        if isinstance(M, Absurd):
            (k,) = t.kids
            return T.bind(o(k.type), o(A), self.run(k, env), _unreachable)
        if isinstance(M, Case):
            s, left, right = t.kids

            def branch(v):
                if v[0] == INL:
                    return self.coerce(self.run(left, {**env, M.lvar: v[1]}), left, t.eff, A)
                return self.coerce(self.run(right, {**env, M.rvar: v[1]}), right, t.eff, A)

            return T.bind(o(s.type), o(A), self.run(s, env), branch)
        if isinstance(M, Lam):
            return T.unit(o(A), self._lambda_table(t, env))
        if isinstance(M, (App, Let)):
            f, a = t.kids
            if isinstance(M, Let):
                bound, body, x = f, a, M.var
            elif isinstance(M.fn, Lam):
                bound, body, x = a, f.kids[0], M.fn.var
            elif isinstance(M.fn, (Const, Var)):
                # a value in function position: skip unit so T[[A -> B]] is never built
                g = self.const(M.fn.name) if isinstance(M.fn, Const) else env[M.fn.name]
                return T.bind(o(a.type), o(A), self.run(a, env),
                              lambda v: apply(g, v))
            else:
                fm, am = self.run(f, env), self.run(a, env)
                return T.bind(o(f.type), o(A), fm,
                              lambda g: T.bind(o(a.type), o(A), am, lambda v: apply(g, v)))
            if isinstance(bound.term, Lam):
                # a bound lambda is a value: pass its table straight to the body
                v = self._lambda_table(bound, env)
                return self.coerce(self.run(body, {**env, x: v}), body, t.eff, A)
            # beta-shortcut: (\x. body) N sequences N, then body, without tabulating the lambda
            return T.bind(o(bound.type), o(A), self.run(bound, env),
                          lambda v: self.coerce(self.run(body, {**env, x: v}), body, t.eff, A))
        if isinstance(M, Ascribe):
            (k,) = t.kids
            return self.coerce(self.run(k, env), k, t.eff, A)
        raise TypeError(f"cannot interpret {M!r}")


def _latent(A: Arrow, cfg):
    return cfg.ops if A.eff is TOP else A.eff


def _unreachable(_):
    raise AssertionError("the empty type has no elements")


_STRUCT: dict = {
    Fst: lambda p: p[1],
    Snd: lambda p: p[2],
    Inl: lambda x: (3, x),
    Inr: lambda x: (4, x),
}


@dataclass
class Denotation:
    judgment: Judgment
    dom: FinSetObj
    table: dict
    mode: str
    _cod: Callable = None

    def __call__(self, env_elem=STAR):
        return self.table[env_elem]

    @property
    def value(self):
        """The single value of a closed denotation."""
        return self.table[STAR]

    @property
    def fn(self) -> FinFn:
        return FinFn(self.dom, self._cod(), self.table, check=False)


def context_object(interp: Interpreter, ctx: tuple) -> FinSetObj:
    obj = terminal()
    for _, A in ctx:
        obj = product(obj, interp.obj(A))
    return obj


def _env_of(ctx: tuple, e) -> dict:
    env = {}
    for x, _ in reversed(ctx):
        env.setdefault(x, e[2])
        e = e[1]
    return env


def _denote(cfg, j: Judgment, mode, verify) -> Denotation:
    refined = mode == REFINED
    interp = Interpreter(cfg, mode, verify)
    t = annotate(cfg.signature, j.ctx, j.term, refined=refined, expected=j.type)
    if refined and not t.eff <= j.eff:
        raise TypeMismatch("judgment effect is smaller than the principal effect")
    dom = context_object(interp, j.ctx)
    eps = j.eff if refined else None
    table = {}
    for e in dom.elems:
        m = interp.run(t, _env_of(j.ctx, e))
        if refined:
            m = interp.coerce(m, t, eps, t.type)
        table[e] = m

    def cod():
        X = interp.obj(t.type)
        return cfg.family.carrier(eps, X).subset if refined else cfg.model.carrier(X)

    return Denotation(j, dom, table, mode, cod)


def interp_refined(cfg: ModelConfig, j: Judgment, verify: bool = False) -> Denotation:
    return _denote(cfg, j, REFINED, verify)


def interp_unrefined(cfg: ModelConfig, j: Judgment) -> Denotation:
    if j.eff is not None:
        j = erase_judgment(j)
    return _denote(cfg, j, UNREFINED, False)


def denote(cfg: ModelConfig, M: Term, mode: str = REFINED, ctx=(), eps=None, verify: bool = False) -> Denotation:
    j = judge(cfg.signature, as_ctx(ctx), M)
    if eps is not None:
        j = Judgment(j.ctx, M, j.type, frozenset(eps))
    if mode == REFINED:
        return interp_refined(cfg, j, verify)
    return interp_unrefined(cfg, j)


# ---------------------------------------------------------------- equivalence


@dataclass
class EquivResult:
    equal: bool
    mode: str
    witness: str | None = None

    def __bool__(self):
        return self.equal

    def __str__(self):
        return "EQUAL" if self.equal else "DIFFERENT"


def describe_difference(cfg: ModelConfig, m1, m2) -> str:
    """Locate where two elements of T X differ; for state-like models, a start state."""
    T = cfg.model
    name = T.name
    if name in ("state", "reader") and m1[0] == 5:
        for (s, v1), (_, v2) in zip(m1[1], m2[1]):
            if v1 != v2:
                return f"start state {show(s)}: {show(v1)} vs {show(v2)}"
    if name == "cont_state" and m1[0] == 5:
        for (k, v1), (_, v2) in zip(m1[1], m2[1]):
            if v1 != v2:
                for (s, a1), (_, a2) in zip(v1[1], v2[1]):
                    if a1 != a2:
                        return f"continuation {show(k)}, start state {show(s)}: {show(a1)} vs {show(a2)}"
    return f"{show(m1)} vs {show(m2)}"


def equiv(cfg: ModelConfig, M: Term, N: Term, mode: str = REFINED, eps=None, ctx=(), verify: bool = False):
    """Compare the denotations of M and N; mode may also be ``"both"``.

    The common effect defaults to the union of the principal effects.
    """
    if mode == "both":
        return {m: equiv(cfg, M, N, m, eps, ctx, verify) for m in (REFINED, UNREFINED)}
    sig = cfg.signature
    ctx = as_ctx(ctx)
    jm, jn = judge(sig, ctx, M), judge(sig, ctx, N)
    if mode == REFINED and jm.type != jn.type:
        raise TypeMismatch(f"terms have different types {print_type(jm.type)} and {print_type(jn.type)}")
    if mode == UNREFINED and erase_type(jm.type) != erase_type(jn.type):
        raise TypeMismatch("terms have different erased types")
    common = frozenset(eps) if eps is not None else jm.eff | jn.eff
    if mode == REFINED:
        dm = interp_refined(cfg, Judgment(ctx, M, jm.type, common), verify)
        dn = interp_refined(cfg, Judgment(ctx, N, jn.type, common), verify)
    else:
        dm = interp_unrefined(cfg, jm)
        dn = interp_unrefined(cfg, jn)
    for e in dm.dom.elems:
        if dm.table[e] != dn.table[e]:
            where = "" if e == STAR else f"environment {show(e)}, "
            return EquivResult(False, mode, where + describe_difference(cfg, dm.table[e], dn.table[e]))
    return EquivResult(True, mode)
