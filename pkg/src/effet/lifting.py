"""Binary relations between finite sets and the free lifting of (T_eps, T).

A relation R between X and Y lifts to the least set of pairs in
T_eps X x T Y that contains the unit pairs of R and is closed under
running each eps-operation on both sides with related continuations.
Relations are materialised as sorted pair sets, so order in a fibre is
plain inclusion.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .finset import FinSetObj, current_limits, guard_size, show
from .grading import GradedFamily, _continuations
from .errors import SaturationLimitExceeded


@dataclass(frozen=True)
class Rel:
    left: FinSetObj
    right: FinSetObj
    pairs: frozenset

    def __post_init__(self):
        for x, y in self.pairs:
            if x not in self.left or y not in self.right:
                raise ValueError(f"pair ({show(x)}, {show(y)}) is outside {self.left!r} x {self.right!r}")

    def __contains__(self, p):
        return p in self.pairs

    def __len__(self):
        return len(self.pairs)

    def __le__(self, other: "Rel"):
        return self.pairs <= other.pairs

    def sorted_pairs(self) -> list:
        return sorted(self.pairs)


def diagonal(X: FinSetObj) -> Rel:
    return Rel(X, X, frozenset((x, x) for x in X.elems))


def graph(f) -> Rel:
    """The relation {(x, f x)} of a FinFn."""
    return Rel(f.dom, f.cod, frozenset((x, f(x)) for x in f.dom.elems))


def _family(source) -> GradedFamily:
    if isinstance(source, GradedFamily):
        return source
    if hasattr(source, "family"):
        return source.family
    return GradedFamily(source)


@dataclass
class LiftedCarrier:
    eps: frozenset
    base: Rel
    pairs: frozenset
    rounds: int
    family: GradedFamily = field(repr=False, default=None)

    def __contains__(self, p):
        return p in self.pairs

    def __len__(self):
        return len(self.pairs)

    def as_rel(self) -> Rel:
        T = self.family.model
        return Rel(self.family.carrier(self.eps, self.base.left).subset, T.carrier(self.base.right), self.pairs)


def _unit_pairs(T, R: Rel):
    return {(T.unit(R.left, x), T.unit(R.right, y)) for x, y in R.pairs}


def _op_rule(T, op, R: Rel, conts):
    """Yield the pairs produced by running op against each tuple of related continuations."""
    B = T.ops[op][1]
    A = T.ops[op][0]
    keys = B.elems
    for ks in conts:
        k1 = dict(zip(keys, (p[0] for p in ks)))
        k2 = dict(zip(keys, (p[1] for p in ks)))
        for a in A.elems:
            gen = T.generic(op, a)
            yield (T.bind(B, R.left, gen, k1.__getitem__), T.bind(B, R.right, gen, k2.__getitem__))


def close(T, eps, R: Rel, start) -> tuple:
    """Least superset of ``start`` closed under the eps-operation rule; returns (pairs, rounds)."""
    bound = current_limits().max_saturation
    seen = set(start)
    delta = sorted(seen)
    old: list = []
    rounds = 0
    ops = sorted(eps)
    nullary_done = set()
    while delta:
        rounds += 1
        new = []
        for op in ops:
            B = T.ops[op][1]
            if len(B) == 0:
                if op in nullary_done:
                    continue
                nullary_done.add(op)
                conts = [()]
            else:
                guard_size(len(old + delta) ** len(B), f"related continuations for {op}")
                conts = _continuations(B, old, delta)
            for p in _op_rule(T, op, R, conts):
                if p not in seen:
                    seen.add(p)
                    new.append(p)
                    if len(seen) > bound:
                        raise SaturationLimitExceeded(f"lifted relation exceeds {bound} pairs")
        old = old + delta
        delta = new
    return frozenset(seen), rounds


def free_lift(source, eps, R: Rel) -> LiftedCarrier:
    """The free lifting of R at eps; ``source`` is a config, a family or a model."""
    fam = _family(source)
    T = fam.model
    eps = frozenset(eps)
    pairs, rounds = close(T, eps, R, _unit_pairs(T, R))
    return LiftedCarrier(eps, R, pairs, rounds, fam)


def closure_violations(T, eps, R: Rel, Q) -> list:
    """Reasons why Q fails the unit rule or the operation rule (empty when closed)."""
    Q = frozenset(Q)
    bad = [("unit", p) for p in sorted(_unit_pairs(T, R)) if p not in Q]
    qs = sorted(Q)
    for op in sorted(eps):
        B = T.ops[op][1]
        conts = itertools.product(qs, repeat=len(B))
        bad.extend((op, p) for p in _op_rule(T, op, R, conts) if p not in Q)
        if bad:
            break
    return bad


def check_lift_closed(L: LiftedCarrier) -> list:
    return closure_violations(L.family.model, L.eps, L.base, L.pairs)


@dataclass
class InitialityReport:
    method: str
    candidates: int
    closed: int
    ok: bool
    witness: object = None


def check_initiality(L: LiftedCarrier, exhaustive_limit: int = 12, samples: int = 200, seed: int = 0) -> InitialityReport:
    """Every closed Q in T_eps X x T Y contains the free lifting.

    Exhaustive over all subsets when the ambient product is small; otherwise
    each pair is removed in turn (the rest must then fail to be closed) and
    closures of random seeds are checked to contain the lifting.
    """
    T = L.family.model
    left = L.family.carrier(L.eps, L.base.left).subset
    right = T.carrier(L.base.right)
    ambient = [(a, b) for a in left.elems for b in right.elems]
    if len(ambient) <= exhaustive_limit:
        closed = 0
        for mask in range(1 << len(ambient)):
            Q = frozenset(p for i, p in enumerate(ambient) if mask >> i & 1)
            if closure_violations(T, L.eps, L.base, Q):
                continue
            closed += 1
            if not L.pairs <= Q:
                return InitialityReport("exhaustive", 1 << len(ambient), closed, False, Q)
        return InitialityReport("exhaustive", 1 << len(ambient), closed, True)
    for p in sorted(L.pairs):
        if not closure_violations(T, L.eps, L.base, L.pairs - {p}):
            return InitialityReport("remove-one", len(L.pairs), 1, False, p)
    rng = random.Random(seed)
    for _ in range(samples):
        extra = rng.sample(ambient, min(len(ambient), rng.randint(0, 4)))
        Q, _ = close(T, L.eps, L.base, _unit_pairs(T, L.base) | set(extra))
        if not L.pairs <= Q:
            return InitialityReport("sampled", samples, samples, False, Q)
    return InitialityReport("remove-one+sampled", len(L.pairs) + samples, samples, True)


# ---------------------------------------------------------------- mono lemma


@dataclass
class LemmaReport:
    eps: frozenset
    size: int
    pairs: int
    carrier: int
    ok: bool
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        eps = "{" + ",".join(sorted(self.eps)) + "}"
        return f"{status}  eps={eps:<10} |X|={self.size}  related pairs={self.pairs}  |T_eps X|={self.carrier}"


def verify_mono_lemma(source, eps, X: FinSetObj) -> LemmaReport:
    """Pairs related by the lifted diagonal are exactly the graph of the mono."""
    fam = _family(source)
    eps = frozenset(eps)
    L = free_lift(fam, eps, diagonal(X))
    C = fam.carrier(eps, X)
    mono = C.embed  # element-level, so T X itself is never built
    failures = [f"({show(f1)}, {show(f2)}) is related but f2 != mono(f1)" for f1, f2 in sorted(L.pairs)
                if f1 not in C or f2 != mono(f1)]
    covered = {f1 for f1, _ in L.pairs}
    failures += [f"{show(m)} has no related partner" for m in C.subset.elems if m not in covered]
    return LemmaReport(eps, len(X), len(L.pairs), len(C), not failures, failures)


# ---------------------------------------------------------------- completeness


@dataclass
class CompletenessEntry:
    left: str
    right: str
    eps: frozenset
    refined: bool
    unrefined: bool
    witness: str | None = None

    @property
    def ok(self) -> bool:
        return self.refined == self.unrefined

    @property
    def reason(self) -> str:
        if not self.ok:
            return "biconditional fails"
        if self.refined:
            return "equal: mono is injective and commutes with both denotations"
        return "different: the related denotations factor through the mono"


@dataclass
class CompletenessReport:
    entries: list

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def equal_count(self) -> int:
        return sum(e.refined for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if not e.ok]


def verify_completeness(cfg, corpus) -> CompletenessReport:
    """Check refined-equal iff unrefined-equal for closed ground pairs.

    Corpus items are (M, N, eps) or (M, N, G, eps); G is only documentation.
    """
    from .semantics import REFINED, UNREFINED, equiv
    from .syntax import print_term

    entries = []
    for item in corpus:
        M, N = item[0], item[1]
        eps = item[-1]
        r = equiv(cfg, M, N, REFINED, eps=eps)
        u = equiv(cfg, M, N, UNREFINED)
        entries.append(CompletenessEntry(print_term(M), print_term(N), frozenset(eps), r.equal, u.equal,
                                         r.witness or u.witness))
    return CompletenessReport(entries)
