"""The ``effet`` command line.

Every command takes an optional model file first (``*.cfg`` or ``*.json``);
otherwise ``--model``, then a ``-- model: NAME`` header in the input file,
then the packaged ``state.cfg`` are tried in turn.  Exit codes: 0 all checks
pass, 1 a semantic check failed, 2 usage or configuration error, 3 a size
or saturation limit was hit.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from importlib import resources
from pathlib import Path

from .config import ModelConfig, load_config
from .errors import ConfigError, EffetError, SizeLimitExceeded
from .finset import limits, show, sized
from .syntax import parse_term, print_effect, print_term, print_type, split_terms
from .typecheck import judge

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3
EFFECTS = [(), ("get",), ("set",), ("get", "set")]
_MODEL_HEADER = re.compile(r"^--\s*model:\s*(\S+)", re.M)


class UsageError(Exception):
    pass


def corpus_path(name: str) -> Path:
    return Path(str(resources.files("effet") / "corpus" / name))


def resolve_file(name: str) -> Path:
    """A path as given, or failing that the packaged corpus file of the same basename."""
    p = Path(name)
    if p.exists():
        return p
    q = corpus_path(p.name)
    if q.exists():
        return q
    raise UsageError(f"no such file: {name}")


def _is_model(name: str) -> bool:
    return name.endswith((".cfg", ".json"))


class Run:
    """Resolved inputs of one invocation plus an output buffer."""

    def __init__(self, args):
        self.args = args
        self.records: list = []
        self.lines: list = []
        pos = list(args.inputs)
        model = args.model
        if pos and _is_model(pos[0]):
            model = pos.pop(0)
        self.inputs = pos
        self.model_name = model
        self._cfg = None

    def cfg(self, text: str | None = None) -> ModelConfig:
        if self._cfg is None:
            name = self.model_name
            if name is None and text is not None:
                m = _MODEL_HEADER.search(text)
                name = m.group(1) if m else None
            self._cfg = load_config(resolve_file(name or "state.cfg"))
        return self._cfg

    def emit(self, line: str, **record):
        self.lines.append(line)
        self.records.append({"line": line, **record} if record else {"line": line})

    def flush(self, out):
        if self.args.format == "json":
            json.dump(self.records, out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            for line in self.lines:
                out.write(line + "\n")


def _read_terms(run: Run, need: int | None = None):
    if not run.inputs and not run.args.term:
        raise UsageError("expected an input file or --term")
    if run.args.term:
        texts = list(run.args.term)
        cfg = run.cfg()
    else:
        path = resolve_file(run.inputs[0])
        text = path.read_text()
        cfg = run.cfg(text)
        texts = split_terms(text)
    terms = [parse_term(t, cfg.signature) for t in texts]
    if need is not None and len(terms) != need:
        raise UsageError(f"expected {need} terms, found {len(terms)}")
    return cfg, terms


def _eps_name(eps) -> str:
    return print_effect(frozenset(eps))


# ---------------------------------------------------------------- commands


def cmd_check(run: Run) -> int:
    cfg, terms = _read_terms(run)
    for M in terms:
        j = judge(cfg.signature, (), M)
        run.emit(str(j), term=print_term(M), type=print_type(j.type), effect=sorted(j.eff))
    return EXIT_OK


def cmd_eval(run: Run) -> int:
    from .semantics import REFINED, denote

    cfg, terms = _read_terms(run)
    mode = run.args.mode if run.args.mode != "both" else REFINED
    for M in terms:
        d = denote(cfg, M, mode)
        run.emit(f"{print_term(M)}  =>  {show(d.value)}", term=print_term(M), mode=mode, value=show(d.value))
    return EXIT_OK


def cmd_equiv(run: Run) -> int:
    from .semantics import equiv

    cfg, terms = _read_terms(run, need=2)
    M, N = terms
    eps = frozenset(run.args.eps.split(",")) - {""} if run.args.eps is not None else None
    mode = run.args.mode
    results = equiv(cfg, M, N, mode, eps=eps)
    if not isinstance(results, dict):
        results = {mode: results}
    run.emit(" / ".join(str(r) for r in results.values()),
             **{m: r.equal for m, r in results.items()})
    for m, r in results.items():
        if r.witness:
            run.emit(f"  {m} witness: {r.witness}", mode=m, witness=r.witness)
    return EXIT_OK if all(results.values()) else EXIT_FAIL


def cmd_grade(run: Run) -> int:
    cfg = run.cfg()
    sizes = [int(s) for s in run.args.objects.split(",")]
    ops = sorted(cfg.ops)
    effects = [e for e in EFFECTS if set(e) <= set(ops)]
    head = f"{'eps':<12}" + "".join(f"{'|X|=' + str(n):>10}" for n in sizes)
    run.emit(head)
    for eps in effects:
        counts = [len(cfg.family.carrier(eps, sized(n))) for n in sizes]
        row = f"{_eps_name(eps):<12}" + "".join(f"{c:>10}" for c in counts)
        run.emit(row, eps=list(eps), sizes=sizes, counts=counts, compact="/".join(map(str, counts)))
    return EXIT_OK


def cmd_laws(run: Run) -> int:
    from .monads import check_monad_laws

    cfg = run.cfg()
    objects = [sized(n) for n in range(1, run.args.max_object + 1)]
    report = check_monad_laws(cfg.model, objects, budget=run.args.budget, seed=run.args.seed)
    ok = report.ok
    for line in report.lines():
        run.emit(line)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_lift_verify(run: Run) -> int:
    from .lifting import check_initiality, check_lift_closed, diagonal, free_lift, verify_mono_lemma

    cfg = run.cfg()
    ok = True
    effects = [e for e in EFFECTS if set(e) <= set(cfg.ops)]
    for eps in effects:
        for n in range(1, run.args.max_object + 1):
            rep = verify_mono_lemma(cfg, eps, sized(n))
            L = free_lift(cfg, eps, diagonal(sized(n)))
            closed = not check_lift_closed(L)
            init = check_initiality(L, seed=run.args.seed) if cfg.model.name != "cont_state" else None
            good = rep.ok and closed and (init is None or init.ok)
            ok &= good
            extra = f"  closed={'yes' if closed else 'NO'}"
            if init is not None:
                extra += f"  initial={'yes' if init.ok else 'NO'} ({init.method})"
            run.emit(rep.line() + extra, eps=sorted(eps), size=n, pairs=rep.pairs, ok=good)
            for f in rep.failures:
                run.emit(f"    {f}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_validate(run: Run) -> int:
    from .transforms import (
        builtin_rules, instantiate, match, replace_at, rule_named, subterms, validate_instance,
    )

    cfg, terms = _read_terms(run)
    rules = builtin_rules() if run.args.rule in (None, "all") else [rule_named(run.args.rule)]
    ok = True
    for M in terms:
        for rule in rules:
            if run.args.unguarded:
                sites = []
                for path, _, N in subterms(cfg.signature, M):
                    b = match(rule.lhs, N)
                    if b is not None:
                        sites.append((path, replace_at(M, path, instantiate(rule.rhs, b))))
            else:
                from .transforms import apply_rule
                sites = apply_rule(rule, M, cfg)
            for path, N in sites:
                rep = validate_instance(cfg, M, N, rule=rule.name)
                ok &= rep.valid
                run.emit(f"{rep.line()}  [site {'.'.join(map(str, path)) or 'root'}]",
                         rule=rule.name, site=list(path), valid=rep.valid, refined=rep.refined,
                         unrefined=rep.unrefined, witness=rep.witness, rewritten=print_term(N))
    if not run.lines:
        run.emit("no rewrite sites")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "check": cmd_check,
    "eval": cmd_eval,
    "equiv": cmd_equiv,
    "grade": cmd_grade,
    "laws": cmd_laws,
    "lift-verify": cmd_lift_verify,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model configuration file")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-carrier", type=int, default=None)
    common.add_argument("--max-saturation", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    p = argparse.ArgumentParser(prog="effet", description="Graded-monad semantics workbench.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, parents=[common])
        s.add_argument("inputs", nargs="*", help="[MODEL] FILE")
        if name in ("eval", "equiv", "check", "validate"):
            s.add_argument("--term", action="append", help="term text instead of a file (repeatable)")
        if name in ("eval", "equiv"):
            s.add_argument("--mode", choices=("refined", "unrefined", "both"), default="both")
        if name == "equiv":
            s.add_argument("--eps", help="common effect for the refined comparison, e.g. get,set")
        if name == "grade":
            s.add_argument("--objects", default="1,2", help="comma-separated sizes of X")
        if name in ("laws", "lift-verify"):
            s.add_argument("--max-object", type=int, default=2)
        if name == "laws":
            s.add_argument("--budget", type=int, default=400)
        if name == "validate":
            s.add_argument("--rule", help="CACHE, DISCARD, REORDER or all")
            s.add_argument("--unguarded", action="store_true", help="validate every match, ignoring guards")
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    for flag in ("max_carrier", "max_saturation"):
        v = getattr(args, flag)
        if v is not None and v <= 0:
            print(f"effet: --{flag.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_USAGE
    changes = {k: v for k, v in (("max_carrier", args.max_carrier), ("max_saturation", args.max_saturation))
               if v is not None}
    run = Run(args)
    try:
        with limits(**changes):
            code = COMMANDS[args.command](run)
    except SizeLimitExceeded as exc:
        print(f"effet: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, ConfigError, OSError) as exc:
        print(f"effet: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EffetError as exc:
        print(f"effet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    run.flush(out)
    return code


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
