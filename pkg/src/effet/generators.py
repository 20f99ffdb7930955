"""Seeded random generation of closed ground-type terms and term pairs."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .syntax import (
    UNIT, App, Base, Case, Const, Fst, Inl, Inr, Lam, Let, OpApp, Pair, Prod, Snd, Sum, Term, UnitVal, Var,
    TypeExpr, is_ground,
)
from .typecheck import infer

INT, LOC = Base("int"), Base("Loc")
GROUND_TYPES = (INT, LOC, UNIT, Prod(INT, INT), Sum(INT, UNIT))


class TermGenerator:
    """Random closed terms over a configuration's signature.

    Only ground types are generated at the top; lambdas appear either
    applied on the spot or let-bound and then called, so arrow types never
    escape into results.
    """

    def __init__(self, cfg, seed: int = 0, max_depth: int = 3):
        self.cfg = cfg
        self.sig = cfg.signature
        self.rng = random.Random(seed)
        self.max_depth = max_depth
        self.counter = 0
        self.locs = sorted(n for n, A in self.sig.constants.items() if A == LOC)
        k = cfg.int_mod or 2
        self.ints = [str(i) for i in range(k)]
        self.arith = sorted(n for n, A in self.sig.constants.items() if not is_ground(A))

    def fresh(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def value(self, A: TypeExpr, env: list):
        choices = [Var(x) for x, B in env if B == A]
        if A == INT:
            choices += [Const(self.rng.choice(self.ints))]
        elif A == LOC:
            choices += [Const(self.rng.choice(self.locs))]
        elif A == UNIT:
            choices += [UnitVal()]
        elif isinstance(A, Prod):
            choices += [Pair(self.value(A.left, env), self.value(A.right, env))]
        elif isinstance(A, Sum):
            choices += [Inl(self.value(A.left, env)) if self.rng.random() < 0.5 else Inr(self.value(A.right, env))]
        return self.rng.choice(choices)

    def term(self, A: TypeExpr, depth: int | None = None, env: list | None = None) -> Term:
        env = env or []
        depth = self.max_depth if depth is None else depth
        r = self.rng
        if depth <= 0 or r.random() < 0.15:
            return self.value(A, env)
        d = depth - 1
        ops = self.sig.operations
        forms = ["let", "let", "seq", "beta"]
        if A == INT:
            forms += ["arith", "arith"]
            if "get" in ops:
                forms += ["get", "get"]
            forms += ["fst", "case"]
        if A == UNIT and "set" in ops:
            forms += ["set", "set", "set"]
        if isinstance(A, Prod):
            forms += ["pair", "pair"]
        if isinstance(A, Sum):
            forms += ["inl", "inr"]
        form = r.choice(forms)
        if form == "let":
            B = r.choice(GROUND_TYPES[:3])
            x = self.fresh()
            return Let(x, self.term(B, d, env), self.term(A, d, env + [(x, B)]))
        if form == "seq":
            return Let("_", self.term(UNIT, d, env), self.term(A, d, env))
        if form == "beta":
            x = self.fresh()
            B = r.choice(GROUND_TYPES[:3])
            fn = Lam(x, B, self.term(A, d, env + [(x, B)]))
            if r.random() < 0.5:
                return App(fn, self.term(B, d, env))
            f = self.fresh()
            call = App(Var(f), self.value(B, env))
            return Let(f, fn, Let("_", self.term(UNIT, d - 1, env), call) if r.random() < 0.3 else call)
        if form == "arith":
            return App(Const(r.choice(self.arith)), self.term(Prod(INT, INT), d, env))
        if form == "get":
            return OpApp("get", self.term(LOC, d, env))
        if form == "set":
            return OpApp("set", Pair(self.term(LOC, d, env), self.term(INT, d, env)))
        if form == "fst":
            return (Fst if r.random() < 0.5 else Snd)(self.term(Prod(INT, INT), d, env))
        if form == "case":
            x, y = self.fresh(), self.fresh()
            return Case(self.term(Sum(INT, UNIT), d, env), x, self.term(A, d, env + [(x, INT)]),
                        y, self.term(A, d, env + [(y, UNIT)]))
        if form == "pair":
            return Pair(self.term(A.left, d, env), self.term(A.right, d, env))
        if form == "inl":
            return Inl(self.term(A.left, d, env))
        return Inr(self.term(A.right, d, env))


@dataclass
class TermPair:
    left: Term
    right: Term
    type: TypeExpr
    eps: frozenset
    origin: str

    def as_tuple(self):
        return self.left, self.right, self.type, self.eps


def _perturb(gen: TermGenerator, M: Term, A: TypeExpr, how: str) -> Term:
    from .transforms import builtin_rules, instantiate, match, replace_at, subterms

    if how == "rewrite":
        sites = []
        for rule in builtin_rules():
            for path, _, N in subterms(gen.sig, M):
                b = match(rule.lhs, N)
                if b is not None:
                    sites.append((path, rule, b))
        if sites:
            path, rule, b = gen.rng.choice(sites)
            return replace_at(M, path, instantiate(rule.rhs, b))
    if how == "swap" and isinstance(M, Let):
        # hoist an inner let over the outer one when that is well scoped
        inner = M.body
        if isinstance(inner, Let) and M.var not in _fv(inner.bound) and inner.var != M.var:
            return Let(inner.var, inner.bound, Let(M.var, M.bound, inner.body))
    if how == "redo":
        return Let("_", UnitVal(), M)
    return gen.term(A)


def _fv(M):
    from .syntax import free_vars
    return free_vars(M)


def generate_pairs(cfg, n: int = 200, seed: int = 0, max_depth: int = 3) -> list:
    """n closed ground-type pairs with a common effect; a mix of equal and different ones."""
    gen = TermGenerator(cfg, seed, max_depth)
    out = []
    hows = ["rewrite", "rewrite", "swap", "redo", "fresh", "fresh"]
    while len(out) < n:
        A = gen.rng.choice(GROUND_TYPES)
        M = gen.term(A)
        how = gen.rng.choice(hows)
        N = _perturb(gen, M, A, how)
        try:
            tm, em = infer(gen.sig, (), M)
            tn, en = infer(gen.sig, (), N)
        except Exception:
            continue
        if tm != tn or not is_ground(tm):
            continue
        out.append(TermPair(M, N, tm, em | en, how))
    return out
