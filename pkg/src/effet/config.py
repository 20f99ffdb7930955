"""Model configurations: signature, monad, base-type and constant interpretations."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .finset import FinSetObj, atom, product, tabulate
from .grading import GradedFamily
from .monads import (
    MonadModel, cont_state_monad, identity_monad, overwriting_writer, reader_monad, state_monad,
)
from .syntax import Arrow, Base, Signature, TypeExpr, parse_type

MONADS = ("identity", "state", "reader", "writer", "cont_state")
MONAD_OPS = {
    "identity": (),
    "state": ("get", "set"),
    "reader": ("get",),
    "writer": ("set",),
    "cont_state": ("get", "set"),
}
ARITH = {
    "add": lambda a, b, k: (a + b) % k,
    "mul": lambda a, b, k: (a * b) % k,
    "sub": lambda a, b, k: (a - b) % k,
}


@dataclass
class ModelConfig:
    signature: Signature
    model: MonadModel
    base: dict
    constants: dict  # name -> element of the unrefined denotation of its type
    int_mod: int | None = None
    name: str = ""
    family: GradedFamily = field(init=False, repr=False)

    def __post_init__(self):
        self.family = GradedFamily(self.model)

    @property
    def ops(self) -> frozenset:
        return self.signature.ops


def int_object(k: int) -> FinSetObj:
    return FinSetObj((atom(i) for i in range(k)), canonical=False)


def int_value(e) -> int:
    return int(e[1])


def _ground_obj(A: TypeExpr, base: dict):
    from .semantics import ground_object
    return ground_object(A, base)


def build_config(monad: str = "state", loc=("l1",), int_mod: int = 2, r_size: int = 2,
                 operations: dict | None = None, constants: dict | None = None, name: str = "") -> ModelConfig:
    """A configuration over base types Loc and int = Z_k.

    ``constants`` maps extra names to ``{"type": ..., "builtin": ...}``; location
    names and the integer literals 0..max(k,10)-1 (read mod k) are always declared, as are the
    pure arithmetic builtins add/mul/sub.
    """
    if monad not in MONADS:
        raise ConfigError(f"unknown monad {monad!r}; expected one of {', '.join(MONADS)}")
    if int_mod < 1 or not loc:
        raise ConfigError("need at least one location and int_mod >= 1")
    base_types = {"Loc", "int"}
    proto = Signature(frozenset(base_types))
    if operations is None:
        operations = {"get": ("Loc", "int"), "set": ("Loc * int", "unit")}
        operations = {op: operations[op] for op in MONAD_OPS[monad]}
    ops = {op: (parse_type(a, proto), parse_type(b, proto)) for op, (a, b) in operations.items()}
    missing = set(ops) - set(MONAD_OPS[monad])
    if missing:
        raise ConfigError(f"the {monad} model has no generic effect for {sorted(missing)}")

    locs = FinSetObj(atom(l) for l in loc)
    ints = int_object(int_mod)
    base = {"Loc": locs, "int": ints}
    if monad == "state":
        model = state_monad(locs, ints)
    elif monad == "reader":
        model = reader_monad(locs, ints)
    elif monad == "writer":
        model = overwriting_writer(locs, ints)
    elif monad == "cont_state":
        if r_size < 1:
            raise ConfigError("r_size must be positive")
        model = cont_state_monad(FinSetObj(atom(f"r{i}") for i in range(r_size)), locs, ints)
    else:
        model = identity_monad()
    for op, (A, B) in ops.items():
        want = model.ops[op]
        if (_ground_obj(A, base), _ground_obj(B, base)) != want:
            raise ConfigError(f"declared type of {op} does not match the {monad} model's generic effect")

    const_types: dict = {}
    const_vals: dict = {}
    for l in locs.elems:
        const_types[l[1]] = Base("Loc")
        const_vals[l[1]] = l
    for n in range(max(int_mod, 10)):
        # decimal literals wrap around mod k
        const_types[str(n)] = Base("int")
        const_vals[str(n)] = atom(n % int_mod)
    spec = {name_: {"type": "int * int -{}-> int", "builtin": name_} for name_ in ARITH}
    spec.update(constants or {})
    for cname, entry in spec.items():
        A = parse_type(entry["type"], proto)
        builtin = entry.get("builtin")
        if builtin not in ARITH:
            raise ConfigError(f"constant {cname}: unknown builtin {builtin!r}")
        if not (isinstance(A, Arrow) and A.dom == parse_type("int * int") and A.cod == Base("int")):
            raise ConfigError(f"constant {cname}: builtin {builtin} needs type int * int -{{}}-> int")
        op = ARITH[builtin]
        dom = product(ints, ints)
        cod = ints
        const_types[cname] = A
        const_vals[cname] = tabulate(
            dom, lambda p, op=op: model.unit(cod, atom(op(int(p[1][1]), int(p[2][1]), int_mod)))
        )
    sig = Signature(frozenset(base_types), ops, const_types)
    return ModelConfig(sig, model, base, const_vals, int_mod, name or monad)


def load_config(source) -> ModelConfig:
    """Load a JSON model configuration from a path, JSON text or dict."""
    if isinstance(source, dict):
        doc = source
        name = doc.get("name", "")
    else:
        p = Path(source)
        try:
            text = p.read_text() if p.exists() else str(source)
            doc = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read model configuration {source}: {exc}") from exc
        name = doc.get("name", p.stem if p.exists() else "")
    if not isinstance(doc, dict) or "monad" not in doc:
        raise ConfigError("model configuration needs a 'monad' field")
    params = doc.get("params", {})
    sig = doc.get("signature", {})
    ops = sig.get("operations")
    if ops is not None:
        ops = {k: tuple(v) for k, v in ops.items()}
    try:
        return build_config(
            monad=doc["monad"],
            loc=tuple(params.get("loc", ["l1"])),
            int_mod=int(params.get("int_mod", 2)),
            r_size=int(params.get("r_size", 2)),
            operations=ops,
            constants=sig.get("constants") or doc.get("constants"),
            name=name,
        )
    except ConfigError:
        raise
    except Exception as exc:  # malformed types etc.
        raise ConfigError(f"invalid model configuration: {exc}") from exc
