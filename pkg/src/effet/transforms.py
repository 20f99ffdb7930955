"""Effect-dependent rewrites and their semantic validation.

A rule is a pair of term schemas over ``?name`` metavariables plus a guard
on inferred effects.  Guards only decide where a rule is offered; whether
a rewrite is sound is always settled by comparing denotations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import EffetError
from .grading import check_commutative
from .syntax import (
    Case, Lam, Let, Meta, Sum, Term, Var, children, free_vars, fresh_name, is_ground, map_children,
    parse_term, print_effect, substitute,
)
from .typecheck import as_ctx, infer


@dataclass
class GuardInput:
    sig: object
    cfg: object
    ctx: tuple
    binding: dict

    def effect_of(self, M: Term) -> frozenset:
        return infer(self.sig, self.ctx, M)[1]

    def type_of(self, M: Term):
        return infer(self.sig, self.ctx, M)[0]


@dataclass
class RewriteRule:
    name: str
    lhs: Term
    rhs: Term
    guard: Callable[[GuardInput], bool] = field(repr=False, default=lambda g: True)
    description: str = ""

    def __post_init__(self):
        # a rule may drop a metavariable (DISCARD does) but never invent one
        if not metas(self.rhs) <= metas(self.lhs):
            raise ValueError(f"rule {self.name}: the right side uses metavariables the left side does not bind")


def metas(M: Term) -> frozenset:
    if isinstance(M, Meta):
        return frozenset({M.name})
    out = frozenset()
    for c in children(M):
        out |= metas(c)
    return out


# ---------------------------------------------------------------- matching


def match(pat: Term, M: Term, binding: dict | None = None, pvars: dict | None = None, bound: frozenset = frozenset()):
    """Extend ``binding`` so that pat instantiates to M, or return None.

    Pattern binders match any binder name; a metavariable may not capture
    a variable bound inside the pattern.
    """
    binding = dict(binding or {})
    pvars = dict(pvars or {})
    if isinstance(pat, Meta):
        if free_vars(M) & bound:
            return None
        if pat.name in binding:
            return binding if binding[pat.name] == M else None
        binding[pat.name] = M
        return binding
    if isinstance(pat, Var) and pat.name in pvars:
        return binding if isinstance(M, Var) and M.name == pvars[pat.name] else None
    if type(pat) is not type(M):
        return None
    if isinstance(pat, (Lam, Let)):
        if isinstance(pat, Lam) and pat.ty != M.ty:
            return None
        if isinstance(pat, Let):
            binding = match(pat.bound, M.bound, binding, pvars, bound)
            if binding is None:
                return None
        return match(pat.body, M.body, binding, {**pvars, pat.var: M.var}, bound | {M.var})
    if isinstance(pat, Case):
        binding = match(pat.scrut, M.scrut, binding, pvars, bound)
        if binding is None:
            return None
        binding = match(pat.lbody, M.lbody, binding, {**pvars, pat.lvar: M.lvar}, bound | {M.lvar})
        if binding is None:
            return None
        return match(pat.rbody, M.rbody, binding, {**pvars, pat.rvar: M.rvar}, bound | {M.rvar})
    pk, mk = children(pat), children(M)
    if not pk:
        return binding if pat == M else None
    if map_children(pat, lambda c: None) != map_children(M, lambda c: None):
        return None  # same constructor, different op name / variable / label
    for p, m in zip(pk, mk):
        binding = match(p, m, binding, pvars, bound)
        if binding is None:
            return None
    return binding


def instantiate(schema: Term, binding: dict) -> Term:
    """Fill metavariables, renaming schema binders away from the filled terms."""
    avoid = frozenset().union(*(free_vars(t) for t in binding.values())) if binding else frozenset()

    def go(S):
        if isinstance(S, Meta):
            return binding[S.name]
        if isinstance(S, (Lam, Let)) and S.var in avoid:
            new = fresh_name(S.var, avoid | free_vars(S.body))
            body = substitute(S.body, S.var, Var(new))
            S = Lam(new, S.ty, body) if isinstance(S, Lam) else Let(new, S.bound, body)
        return map_children(S, go)

    return go(schema)


# ---------------------------------------------------------------- sites


def _child_ctxs(sig, ctx: tuple, M: Term) -> list:
    """Typing context for each child of M."""
    if isinstance(M, Lam):
        return [ctx + ((M.var, M.ty),)]
    if isinstance(M, Let):
        A = infer(sig, ctx, M.bound)[0]
        return [ctx, ctx + ((M.var, A),)]
    if isinstance(M, Case):
        S = infer(sig, ctx, M.scrut)[0]
        if not isinstance(S, Sum):
            raise TypeError("case scrutinee is not a sum")
        return [ctx, ctx + ((M.lvar, S.left),), ctx + ((M.rvar, S.right),)]
    return [ctx] * len(children(M))


def subterms(sig, M: Term, ctx=()):
    """Yield (path, ctx, subterm) in pre-order."""
    stack = [((), as_ctx(ctx), M)]
    while stack:
        path, c, N = stack.pop()
        yield path, c, N
        kids = children(N)
        ctxs = _child_ctxs(sig, c, N)
        for i in reversed(range(len(kids))):
            stack.append((path + (i,), ctxs[i], kids[i]))


def replace_at(M: Term, path: tuple, new: Term) -> Term:
    if not path:
        return new
    head, rest = path[0], path[1:]
    counter = iter(range(len(children(M))))
    return map_children(M, lambda c: replace_at(c, rest, new) if next(counter) == head else c)


def subterm_at(M: Term, path: tuple) -> Term:
    for i in path:
        M = children(M)[i]
    return M


def apply_rule(rule: RewriteRule, M: Term, sig_or_cfg, ctx=()) -> list:
    """All (path, rewritten term) pairs whose guard holds; results keep M's type and effect bound."""
    cfg = sig_or_cfg if hasattr(sig_or_cfg, "signature") else None
    sig = cfg.signature if cfg is not None else sig_or_cfg
    ctx = as_ctx(ctx)
    A, eps = infer(sig, ctx, M)
    out = []
    for path, c, N in subterms(sig, M, ctx):
        binding = match(rule.lhs, N)
        if binding is None:
            continue
        try:
            if not rule.guard(GuardInput(sig, cfg, c, binding)):
                continue
        except EffetError:
            continue
        result = replace_at(M, path, instantiate(rule.rhs, binding))
        B, eps2 = infer(sig, ctx, result)
        if B != A or not eps2 <= eps:
            raise AssertionError(f"rule {rule.name} changed the type or effect at {path}")
        out.append((path, result))
    return out


# ---------------------------------------------------------------- built-in rules


def _cache_guard(g: GuardInput) -> bool:
    call = instantiate(parse_term("?F ()", allow_meta=True), g.binding)
    eps = g.effect_of(call)
    if not is_ground(g.type_of(call)):
        return False
    if g.effect_of(g.binding["P"]):
        return False
    return eps < g.sig.ops


def _discard_guard(g: GuardInput) -> bool:
    return not g.effect_of(g.binding["N"])


def _reorder_guard(g: GuardInput) -> bool:
    if g.cfg is None:
        return False
    from .semantics import ground_object

    M, N = g.binding["M"], g.binding["N"]
    A, B = g.type_of(M), g.type_of(N)
    if not (is_ground(A) and is_ground(B)):
        return False
    eps = g.effect_of(M) | g.effect_of(N)
    X, Y = ground_object(A, g.cfg.base), ground_object(B, g.cfg.base)
    return check_commutative(g.cfg.family, eps, X, Y).commutative


def builtin_rules() -> list:
    m = lambda s: parse_term(s, allow_meta=True)  # noqa: E731
    return [
        RewriteRule("CACHE", m("?P (?F (), ?F ())"), m("let y = ?F () in ?P (y, y)"), _cache_guard,
                    "evaluate a repeated call once when its effect is a proper subset of all operations"),
        RewriteRule("DISCARD", m("let _ = ?N in ?M"), m("?M"), _discard_guard,
                    "drop a pure computation whose result is unused"),
        RewriteRule("REORDER", m("(?M, ?N)"), m("let y = ?N in let x = ?M in (x, y)"), _reorder_guard,
                    "swap the evaluation order of a pair when the combined effect commutes"),
    ]


def rule_named(name: str) -> RewriteRule:
    for r in builtin_rules():
        if r.name == name.upper():
            return r
    raise KeyError(f"no rule named {name!r}")


# ---------------------------------------------------------------- validation


@dataclass
class ValidationReport:
    rule: str
    left: Term
    right: Term
    eps: frozenset
    refined: bool
    unrefined: bool | None
    witness: str | None = None

    @property
    def valid(self) -> bool:
        return self.refined

    @property
    def transfer_holds(self) -> bool | None:
        """Refined-equal iff unrefined-equal; None when the type is not ground."""
        return None if self.unrefined is None else self.refined == self.unrefined

    def line(self) -> str:
        verdict = "VALID" if self.valid else "INVALID"
        s = f"{self.rule or 'instance'} at {print_effect(self.eps)}: {verdict}"
        if self.unrefined is not None:
            s += f" (refined {'equal' if self.refined else 'different'}, unrefined {'equal' if self.unrefined else 'different'})"
        if self.witness:
            s += f"; witness {self.witness}"
        return s


def validate_instance(cfg, M: Term, N: Term, eps=None, rule: str = "") -> ValidationReport:
    from .semantics import REFINED, UNREFINED, equiv

    sig = cfg.signature
    A, em = infer(sig, (), M)
    _, en = infer(sig, (), N)
    eps = frozenset(eps) if eps is not None else em | en
    r = equiv(cfg, M, N, REFINED, eps=eps)
    u = equiv(cfg, M, N, UNREFINED) if is_ground(A) else None
    witness = r.witness or (u.witness if u is not None else None)
    return ValidationReport(rule, M, N, eps, r.equal, None if u is None else u.equal, witness)


# ---------------------------------------------------------------- the triple programs


TRIPLE_BODIES = {
    (): "3",
    ("get",): "mul (3, get loc)",
    ("set",): "let _ = set (lop, 1) in 3",
    ("get", "set"): "let _ = set (lop, add (1, get lop)) in mul (3, get loc)",
}


def triple_function(eps, counter: str = "lop") -> str:
    """Source of a unit -> int function with principal latent effect eps.

    At {get,set} it increments ``counter`` on every call, so caching two
    calls into one is observable.
    """
    body = TRIPLE_BODIES[tuple(sorted(eps))].replace("lop", counter)
    return f"\\(u:unit). {body}"


def triple_program(eps, counter: str = "lop") -> str:
    return (f"let triple = {triple_function(eps, counter)} in\n"
            f"let _ = set (loc, 1) in\n"
            f"set (loc, add (triple (), triple ()))")


def triple_redex(eps, counter: str = "lop") -> str:
    return f"let triple = {triple_function(eps, counter)} in add (triple (), triple ())"


def cache_instance(cfg, source: str):
    """Parse ``source`` and apply CACHE once at its first site."""
    M = parse_term(source, cfg.signature)
    sites = apply_rule(rule_named("CACHE"), M, cfg)
    if not sites:
        return M, None
    return M, sites[0][1]


def cache_instance_unguarded(cfg, source: str):
    """As :func:`cache_instance` but ignoring the guard, to test rewrites it would refuse."""
    rule = rule_named("CACHE")
    M = parse_term(source, cfg.signature)
    for path, _, N in subterms(cfg.signature, M):
        binding = match(rule.lhs, N)
        if binding is not None:
            return M, replace_at(M, path, instantiate(rule.rhs, binding))
    return M, None
