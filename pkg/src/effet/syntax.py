"""Abstract syntax, parser and printer for the computational lambda calculus.

Concrete grammar (ASCII):

    types  T ::= b | unit | 0 | T * T | T + T | T -{op,...}-> T | T -> T | (T)
    terms  M ::= c | op M | x | () | (M, N) | fst M | snd M | absurd M
               | inl M | inr M | case M of {inl x -> N1 | inr y -> N2}
               | \\(x:T). M | M N | let x = N in M | (M : T ! {op,...})

``--`` starts a comment that runs to the end of the line.  An arrow written
``->`` carries the erased annotation TOP.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import ParseError, UnknownName

# ---------------------------------------------------------------- types


class _Top:
    """Erased effect annotation."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()
Effect = Union[frozenset, _Top]
PURE: frozenset = frozenset()


def effect(*ops: str) -> frozenset:
    return frozenset(ops)


@dataclass(frozen=True)
class Base:
    name: str


@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Prod:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class Sum:
    left: "TypeExpr"
    right: "TypeExpr"


@dataclass(frozen=True)
class Arrow:
    dom: "TypeExpr"
    eff: Effect
    cod: "TypeExpr"


TypeExpr = Union[Base, UnitT, Empty, Prod, Sum, Arrow]
UNIT = UnitT()
EMPTY = Empty()


def is_ground(A: TypeExpr) -> bool:
    if isinstance(A, Arrow):
        return False
    if isinstance(A, (Prod, Sum)):
        return is_ground(A.left) and is_ground(A.right)
    return True


def erase_type(A: TypeExpr) -> TypeExpr:
    if isinstance(A, Arrow):
        return Arrow(erase_type(A.dom), TOP, erase_type(A.cod))
    if isinstance(A, Prod):
        return Prod(erase_type(A.left), erase_type(A.right))
    if isinstance(A, Sum):
        return Sum(erase_type(A.left), erase_type(A.right))
    return A


def base_types_of(A: TypeExpr) -> set:
    if isinstance(A, Base):
        return {A.name}
    if isinstance(A, (Prod, Sum)):
        return base_types_of(A.left) | base_types_of(A.right)
    if isinstance(A, Arrow):
        return base_types_of(A.dom) | base_types_of(A.cod)
    return set()


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class OpApp:
    op: str
    arg: "Term"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class UnitVal:
    pass


@dataclass(frozen=True)
class Pair:
    fst: "Term"
    snd: "Term"


@dataclass(frozen=True)
class Fst:
    arg: "Term"


@dataclass(frozen=True)
class Snd:
    arg: "Term"


@dataclass(frozen=True)
class Absurd:
    arg: "Term"


@dataclass(frozen=True)
class Inl:
    arg: "Term"


@dataclass(frozen=True)
class Inr:
    arg: "Term"


@dataclass(frozen=True)
class Case:
    scrut: "Term"
    lvar: str
    lbody: "Term"
    rvar: str
    rbody: "Term"


@dataclass(frozen=True)
class Lam:
    var: str
    ty: TypeExpr
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Let:
    var: str
    bound: "Term"
    body: "Term"


@dataclass(frozen=True)
class Ascribe:
    term: "Term"
    ty: TypeExpr
    eff: frozenset


@dataclass(frozen=True)
class Meta:
    """Schema metavariable, only used by rewrite-rule patterns."""

    name: str


Term = Union[Const, OpApp, Var, UnitVal, Pair, Fst, Snd, Absurd, Inl, Inr, Case, Lam, App, Let, Ascribe, Meta]

_UNARY = {Fst: "fst", Snd: "snd", Absurd: "absurd", Inl: "inl", Inr: "inr"}
_UNARY_BY_KW = {kw: cls for cls, kw in _UNARY.items()}
KEYWORDS = frozenset({"let", "in", "case", "of", "unit"}) | set(_UNARY_BY_KW)


def children(M: Term) -> tuple:
    if isinstance(M, (OpApp, Fst, Snd, Absurd, Inl, Inr)):
        return (M.arg,)
    if isinstance(M, Pair):
        return (M.fst, M.snd)
    if isinstance(M, Case):
        return (M.scrut, M.lbody, M.rbody)
    if isinstance(M, Lam):
        return (M.body,)
    if isinstance(M, App):
        return (M.fn, M.arg)
    if isinstance(M, Let):
        return (M.bound, M.body)
    if isinstance(M, Ascribe):
        return (M.term,)
    return ()


def free_vars(M: Term) -> frozenset:
    if isinstance(M, Var):
        return frozenset({M.name})
    if isinstance(M, Lam):
        return free_vars(M.body) - {M.var}
    if isinstance(M, Let):
        return free_vars(M.bound) | (free_vars(M.body) - {M.var})
    if isinstance(M, Case):
        return free_vars(M.scrut) | (free_vars(M.lbody) - {M.lvar}) | (free_vars(M.rbody) - {M.rvar})
    out = frozenset()
    for c in children(M):
        out |= free_vars(c)
    return out


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def substitute(M: Term, x: str, N: Term) -> Term:
    """Capture-avoiding M[N/x]."""
    fv = free_vars(N)

    def under(var, body):
        # returns (var', body') with var renamed away from fv(N) if needed
        if var == x:
            return var, body, False
        if var in fv:
            new = fresh_name(var, fv | free_vars(body) | {x})
            body = substitute(body, var, Var(new))
            var = new
        return var, body, True

    if isinstance(M, Var):
        return N if M.name == x else M
    if isinstance(M, Lam):
        v, b, go = under(M.var, M.body)
        return Lam(v, M.ty, substitute(b, x, N) if go else b)
    if isinstance(M, Let):
        bound = substitute(M.bound, x, N)
        v, b, go = under(M.var, M.body)
        return Let(v, bound, substitute(b, x, N) if go else b)
    if isinstance(M, Case):
        scrut = substitute(M.scrut, x, N)
        lv, lb, lgo = under(M.lvar, M.lbody)
        rv, rb, rgo = under(M.rvar, M.rbody)
        return Case(scrut, lv, substitute(lb, x, N) if lgo else lb, rv, substitute(rb, x, N) if rgo else rb)
    return map_children(M, lambda c: substitute(c, x, N))


def map_children(M: Term, f) -> Term:
    if isinstance(M, OpApp):
        return OpApp(M.op, f(M.arg))
    if isinstance(M, tuple(_UNARY)):
        return type(M)(f(M.arg))
    if isinstance(M, Pair):
        return Pair(f(M.fst), f(M.snd))
    if isinstance(M, Case):
        return Case(f(M.scrut), M.lvar, f(M.lbody), M.rvar, f(M.rbody))
    if isinstance(M, Lam):
        return Lam(M.var, M.ty, f(M.body))
    if isinstance(M, App):
        return App(f(M.fn), f(M.arg))
    if isinstance(M, Let):
        return Let(M.var, f(M.bound), f(M.body))
    if isinstance(M, Ascribe):
        return Ascribe(f(M.term), M.ty, M.eff)
    return M


# ---------------------------------------------------------------- signature


@dataclass(frozen=True)
class Signature:
    base_types: frozenset = frozenset()
    operations: Mapping[str, tuple] = field(default_factory=dict)
    constants: Mapping[str, TypeExpr] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "base_types", frozenset(self.base_types))
        for op, (arg, res) in self.operations.items():
            if not (is_ground(arg) and is_ground(res)):
                raise ValueError(f"operation {op} must have ground argument and result types")
            undeclared = (base_types_of(arg) | base_types_of(res)) - self.base_types
            if undeclared:
                raise UnknownName(f"operation {op} mentions undeclared base types {sorted(undeclared)}")
        for c, A in self.constants.items():
            undeclared = base_types_of(A) - self.base_types
            if undeclared:
                raise UnknownName(f"constant {c} mentions undeclared base types {sorted(undeclared)}")

    @property
    def ops(self) -> frozenset:
        return frozenset(self.operations)

    def __hash__(self):
        return hash((self.base_types, tuple(sorted(self.operations.items(), key=lambda kv: kv[0])),
                     tuple(sorted(self.constants.items(), key=lambda kv: kv[0]))))


# ---------------------------------------------------------------- printer


def print_effect(eps: Effect) -> str:
    if eps is TOP:
        return "TOP"
    return "{" + ",".join(sorted(eps)) + "}"


def print_type(A: TypeExpr, level: int = 0) -> str:
    if isinstance(A, Base):
        return A.name
    if isinstance(A, UnitT):
        return "unit"
    if isinstance(A, Empty):
        return "0"
    if isinstance(A, Arrow):
        arrow = "->" if A.eff is TOP else f"-{print_effect(A.eff)}->"
        s = f"{print_type(A.dom, 1)} {arrow} {print_type(A.cod, 0)}"
        return f"({s})" if level > 0 else s
    if isinstance(A, Sum):
        s = f"{print_type(A.left, 1)} + {print_type(A.right, 2)}"
        return f"({s})" if level > 1 else s
    if isinstance(A, Prod):
        s = f"{print_type(A.left, 2)} * {print_type(A.right, 3)}"
        return f"({s})" if level > 2 else s
    raise TypeError(f"not a type: {A!r}")


# precedence levels: 0 binder forms, 1 application, 2 prefix forms, 3 atoms


def print_term(M: Term, level: int = 0) -> str:
    if isinstance(M, (Var, Const)):
        return M.name
    if isinstance(M, Meta):
        return f"?{M.name}"
    if isinstance(M, UnitVal):
        return "()"
    if isinstance(M, Pair):
        return f"({print_term(M.fst)}, {print_term(M.snd)})"
    if isinstance(M, Ascribe):
        return f"({print_term(M.term)} : {print_type(M.ty)} ! {print_effect(M.eff)})"
    if isinstance(M, OpApp):
        s = f"{M.op} {print_term(M.arg, 2)}"
        return f"({s})" if level > 2 else s
    if isinstance(M, tuple(_UNARY)):
        s = f"{_UNARY[type(M)]} {print_term(M.arg, 2)}"
        return f"({s})" if level > 2 else s
    if isinstance(M, App):
        s = f"{print_term(M.fn, 1)} {print_term(M.arg, 3)}"
        return f"({s})" if level > 1 else s
    if isinstance(M, Lam):
        s = f"\\({M.var}:{print_type(M.ty)}). {print_term(M.body)}"
    elif isinstance(M, Let):
        s = f"let {M.var} = {print_term(M.bound)} in {print_term(M.body)}"
    elif isinstance(M, Case):
        s = (f"case {print_term(M.scrut)} of {{inl {M.lvar} -> {print_term(M.lbody)}"
             f" | inr {M.rvar} -> {print_term(M.rbody)}}}")
    else:
        raise TypeError(f"not a term: {M!r}")
    return f"({s})" if level > 0 else s


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<sym>-\{|->|\\|\(|\)|\{|\}|:|\.|,|\||\*|\+|=|!|\?)
  | (?P<ident>[A-Za-z0-9_']+)
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    toks, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("sym", "ident"):
            toks.append(_Tok(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text, sig, free_vars, allow_meta=False):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.free = None if free_vars is None else frozenset(free_vars)
        self.allow_meta = allow_meta

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def at(self, text):
        return self.tok.text == text and self.tok.kind != "eof"

    def expect(self, text):
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        self.i += 1

    def ident(self):
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"expected an identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    # types
    def type_(self):
        left = self.sum_type()
        if self.at("->"):
            self.i += 1
            return Arrow(left, TOP, self.type_())
        if self.at("-{"):
            self.i += 1
            eps = self.effect_body()
            self.expect("->")
            return Arrow(left, eps, self.type_())
        return left

    def sum_type(self):
        t = self.prod_type()
        while self.at("+"):
            self.i += 1
            t = Sum(t, self.prod_type())
        return t

    def prod_type(self):
        t = self.atom_type()
        while self.at("*"):
            self.i += 1
            t = Prod(t, self.atom_type())
        return t

    def atom_type(self):
        t = self.tok
        if self.at("("):
            self.i += 1
            A = self.type_()
            self.expect(")")
            return A
        if t.kind == "ident":
            self.i += 1
            if t.text == "unit":
                return UNIT
            if t.text == "0":
                return EMPTY
            if t.text in KEYWORDS:
                self.error(f"keyword {t.text!r} is not a type", t)
            if self.sig is not None and t.text not in self.sig.base_types:
                raise UnknownName(f"undeclared base type {t.text!r} at line {t.line}, column {t.col}")
            return Base(t.text)
        self.error(f"expected a type, found {t.text or 'end of input'!r}")

    def effect_body(self):
        # after '{' or '-{': ident list then '}'
        ops = []
        if not self.at("}"):
            ops.append(self.effect_op())
            while self.at(","):
                self.i += 1
                ops.append(self.effect_op())
        self.expect("}")
        return frozenset(ops)

    def effect_op(self):
        t = self.tok
        name = self.ident()
        if self.sig is not None and name not in self.sig.operations:
            raise UnknownName(f"undeclared operation {name!r} at line {t.line}, column {t.col}")
        return name

    # terms
    def term(self, scope):
        t = self.tok
        if self.at("\\"):
            self.i += 1
            self.expect("(")
            x = self.ident()
            self.expect(":")
            A = self.type_()
            self.expect(")")
            self.expect(".")
            return Lam(x, A, self.term(scope | {x}))
        if t.kind == "ident" and t.text == "let":
            self.i += 1
            x = self.ident()
            self.expect("=")
            N = self.term(scope)
            self.expect("in")
            return Let(x, N, self.term(scope | {x}))
        if t.kind == "ident" and t.text == "case":
            self.i += 1
            M = self.term(scope)
            self.expect("of")
            self.expect("{")
            self.expect("inl")
            x = self.ident()
            self.expect("->")
            N1 = self.term(scope | {x})
            self.expect("|")
            self.expect("inr")
            y = self.ident()
            self.expect("->")
            N2 = self.term(scope | {y})
            self.expect("}")
            return Case(M, x, N1, y, N2)
        return self.app(scope)

    def app(self, scope):
        M = self.prefix(scope)
        while self.starts_atom(scope):
            M = App(M, self.atom(scope))
        return M

    def starts_atom(self, scope):
        t = self.tok
        if t.kind == "sym":
            return t.text == "(" or (t.text == "?" and self.allow_meta)
        if t.kind != "ident" or t.text in KEYWORDS:
            return False
        return not self.is_op(t.text, scope)

    def is_op(self, name, scope):
        return name not in scope and self.sig is not None and name in self.sig.operations

    def prefix(self, scope):
        t = self.tok
        if t.kind == "ident" and t.text in _UNARY_BY_KW:
            self.i += 1
            return _UNARY_BY_KW[t.text](self.prefix(scope))
        if t.kind == "ident" and self.is_op(t.text, scope):
            self.i += 1
            return OpApp(t.text, self.prefix(scope))
        return self.atom(scope)

    def atom(self, scope):
        t = self.tok
        if self.at("?") and self.allow_meta:
            self.i += 1
            return Meta(self.ident())
        if self.at("("):
            self.i += 1
            if self.at(")"):
                self.i += 1
                return UnitVal()
            M = self.term(scope)
            if self.at(","):
                self.i += 1
                N = self.term(scope)
                self.expect(")")
                return Pair(M, N)
            if self.at(":"):
                self.i += 1
                A = self.type_()
                self.expect("!")
                self.expect("{")
                eps = self.effect_body()
                self.expect(")")
                return Ascribe(M, A, eps)
            self.expect(")")
            return M
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            name = t.text
            if name in scope:
                return Var(name)
            if self.sig is not None and name in self.sig.constants:
                return Const(name)
            if self.free is None or name in self.free:
                return Var(name)
            raise UnknownName(f"undeclared name {name!r} at line {t.line}, column {t.col}")
        self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def done(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after end of term")


def parse_term(text: str, sig: Signature | None = None, free_vars: Iterable[str] | None = None,
               allow_meta: bool = False) -> Term:
    """Parse one term.

    Names bound by an enclosing binder are variables; otherwise declared
    operations and constants win.  Remaining names are free variables when
    ``free_vars`` is None, else they must be listed in it (UnknownName).
    """
    p = _Parser(text, sig, free_vars, allow_meta)
    M = p.term(frozenset())
    p.done()
    return M


def parse_type(text: str, sig: Signature | None = None) -> TypeExpr:
    p = _Parser(text, sig, None)
    A = p.type_()
    p.done()
    return A


def parse_effect(text: str, sig: Signature | None = None) -> frozenset:
    p = _Parser(text, sig, None)
    p.expect("{")
    eps = p.effect_body()
    p.done()
    return eps


def split_terms(text: str) -> list:
    """Split a source file into chunks separated by lines consisting of ``===``."""
    chunks, cur = [], []
    for line in text.splitlines():
        if line.strip() == "===":
            chunks.append("\n".join(cur))
            cur = []
        else:
            cur.append(line)
    chunks.append("\n".join(cur))
    return [c for c in chunks if _tokenize(c)[0].kind != "eof"]
