"""Acceptance criteria 1-9, one PASS/FAIL line each.

Run under pytest (the lines are repeated in the terminal summary) or
directly with ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest

from effet import build_config, load_config
from effet.cli import corpus_path
from effet.finset import atoms, sized
from effet.generators import generate_pairs
from effet.grading import (
    check_carrier_iso, check_commutative, check_graded_laws, free_term_correspondence, free_term_image,
    image_fixpoint, state_to_writer,
)
from effet.lifting import verify_completeness, verify_mono_lemma
from effet.monads import (
    check_monad_laws, check_monoid_laws, is_idempotent, overwriting_monoid, overwriting_writer,
)
from effet.syntax import parse_term, split_terms
from effet.transforms import (
    apply_rule, cache_instance, cache_instance_unguarded, instantiate, match, rule_named, triple_program,
    validate_instance,
)
from effet.typecheck import infer
from effet.config import int_object

EFFECTS = [frozenset(), frozenset({"get"}), frozenset({"set"}), frozenset({"get", "set"})]
RESULTS: dict = {}


def _name(eps) -> str:
    return "{" + ",".join(sorted(eps)) + "}"


def report(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
    RESULTS[number] = line
    print(line)


def expected_state_sizes(n: int) -> dict:
    return {frozenset(): n, frozenset({"get"}): n * n, frozenset({"set"}): 3 * n,
            frozenset({"get", "set"}): (2 * n) ** 2}


@pytest.fixture(scope="module")
def state_cfg():
    return load_config(corpus_path("state.cfg"))


@pytest.fixture(scope="module")
def cont_cfg():
    return load_config(corpus_path("cont_state.cfg"))


def test_criterion_1_state_factorisation(state_cfg):
    T = state_cfg.model
    bad = []
    for n in (1, 2, 3):
        X = sized(n)
        for eps, want in expected_state_sizes(n).items():
            got = len(image_fixpoint(T, eps, X))
            if got != want:
                bad.append(f"|T_{_name(eps)} X|={got} at |X|={n}, expected {want}")
    writer = overwriting_writer(T.loc, T.values)
    for n in (1, 2, 3):
        X = sized(n)
        C1 = image_fixpoint(T, {"set"}, X)
        C2 = image_fixpoint(writer, {"set"}, X)
        phi = {m: state_to_writer(T, m) for m in C1.subset.elems}
        iso = check_carrier_iso(T, C1, writer, C2, phi)
        if not iso.ok:
            bad.append(f"writer iso fails at |X|={n}: {iso}")
    report(1, not bad, "state carriers |X|, |X|^2, 3|X|, (2|X|)^2 for |X|<=3; T_{set} iso writer"
           + ("" if not bad else " -- " + "; ".join(bad)))
    assert not bad


def test_criterion_2_overwriting_monoid():
    bad = []
    cases = 0
    for nloc in (1, 2):
        for k in (1, 2, 3):
            M = overwriting_monoid(atoms(*[f"l{i}" for i in range(nloc)]), int_object(k))
            cases += 1
            fails = check_monoid_laws(M)
            if fails:
                bad.append(f"|Loc|={nloc} k={k}: {fails[0]}")
            if is_idempotent(M) is not None:
                bad.append(f"|Loc|={nloc} k={k}: not idempotent")
    report(2, not bad, f"unit, associativity, idempotence exhaustive on {cases} monoids"
           + ("" if not bad else " -- " + "; ".join(bad)))
    assert not bad


def test_criterion_3_oracle(state_cfg):
    T = state_cfg.model
    bad = []
    for n in (0, 1, 2):
        X = sized(n)
        for eps in EFFECTS:
            img, depth = free_term_image(T, eps, X)
            if img != frozenset(image_fixpoint(T, eps, X).subset.elems):
                bad.append(f"{_name(eps)} |X|={n}")
    report(3, not bad, "free-term image equals fixpoint carrier for all eps, |X|<=2"
           + ("" if not bad else " -- " + "; ".join(bad)))
    assert not bad


def test_criterion_4_cont_state(state_cfg, cont_cfg):
    S, K = state_cfg.model, cont_cfg.model
    bad = []
    for n in (1, 2):
        X = sized(n)
        for eps, want in expected_state_sizes(n).items():
            CK = image_fixpoint(K, eps, X)
            CS = image_fixpoint(S, eps, X)
            if len(CK) != want:
                bad.append(f"|T_{_name(eps)} X|={len(CK)} at |X|={n}, expected {want}")
                continue
            phi = free_term_correspondence(K, S, eps, X)
            iso = check_carrier_iso(K, CK, S, CS, phi)
            if not iso.ok:
                bad.append(f"bind iso fails at {_name(eps)} |X|={n}: {iso}")
    report(4, not bad, "cont_state carriers match state sizes and graded binds are isomorphic, |X|<=2"
           + ("" if not bad else " -- " + "; ".join(bad)))
    assert not bad


def test_criterion_5_law_suites():
    objects = [sized(n) for n in (1, 2, 3)]
    bad = []
    models = skipped = 0
    for monad in ("identity", "state", "reader", "writer", "cont_state"):
        cfg = build_config(monad, loc=("loc",), int_mod=2)
        models += 1
        reports = [check_monad_laws(cfg.model, objects)]
        reports += [check_graded_laws(cfg.family, eps, objects) for eps in EFFECTS if eps <= cfg.ops]
        for rep in reports:
            bad += [line for line in rep.lines() if line.startswith("FAIL")]
            skipped += sum(r.skipped for r in rep.results)
    report(5, not bad, f"monad, strength, graded and bind/mult coincidence laws for {models} models, |X|<=3"
           f" ({skipped} oversized object combinations skipped)"
           + ("" if not bad else " -- " + "; ".join(bad[:3])))
    assert not bad


def test_criterion_6_mono_lemma(state_cfg, cont_cfg):
    bad = []
    for cfg in (state_cfg, cont_cfg):
        for eps in EFFECTS:
            for n in (0, 1, 2):
                rep = verify_mono_lemma(cfg, eps, sized(n))
                if not rep.ok:
                    bad.append(f"{cfg.name} {rep.line()}")
    report(6, not bad, "lifted diagonal is the graph of the mono on state and cont_state, |X|<=2"
           + ("" if not bad else " -- " + "; ".join(bad)))
    assert not bad


def hand_written_pairs(cfg) -> list:
    pairs = [tuple(parse_term(t, cfg.signature) for t in split_terms(corpus_path("caching_set.lam").read_text()))]
    pairs.append(cache_instance(cfg, triple_program({"get"}, counter="loc")))
    extra = [
        ("let x = get loc in let y = get loc in (x, y)", "let x = get loc in (x, x)"),
        ("let _ = set (loc, 1) in set (loc, 0)", "set (loc, 0)"),
        ("let _ = set (loc, 1) in get loc", "let _ = set (loc, 1) in 1"),
        ("let _ = add (1, 1) in get loc", "get loc"),
        ("(get loc, set (loc, 1))", "let y = set (loc, 1) in let x = get loc in (x, y)"),
    ]
    pairs += [(parse_term(a, cfg.signature), parse_term(b, cfg.signature)) for a, b in extra]
    return [(M, N, infer(cfg.signature, (), M)[1] | infer(cfg.signature, (), N)[1]) for M, N in pairs]


def test_criterion_7_completeness(state_cfg):
    corpus = [p.as_tuple() for p in generate_pairs(state_cfg, n=200, seed=0)]
    corpus += hand_written_pairs(state_cfg)
    rep = verify_completeness(state_cfg, corpus)
    fails = rep.failures()
    report(7, rep.ok and len(corpus) >= 200,
           f"refined-equal iff unrefined-equal on {len(corpus)} pairs ({rep.equal_count} equal)"
           + ("" if not fails else f" -- {len(fails)} failures, first {fails[0]}"))
    assert rep.ok and len(corpus) >= 200


def test_criterion_8_transformations(state_cfg):
    bad, notes = [], []
    cfg2 = load_config(corpus_path("state2.cfg"))
    for eps in EFFECTS:
        src = triple_program(eps)
        M, N = cache_instance(cfg2, src)
        if eps == frozenset({"get", "set"}):
            if N is not None:
                bad.append("CACHE guard accepted {get,set}")
            M, N = cache_instance_unguarded(cfg2, src)
            rep = validate_instance(cfg2, M, N, rule="CACHE")
            if rep.valid or not rep.witness:
                bad.append("CACHE not refuted at {get,set}")
            else:
                notes.append(f"witness {rep.witness}")
                print(f"  CACHE at {{get,set}}: {rep.line()}")
        else:
            rep = validate_instance(cfg2, M, N, rule="CACHE") if N is not None else None
            if rep is None or not rep.valid:
                bad.append(f"CACHE not valid at {_name(eps)}")

    reorder = {
        frozenset(): "(1, 0)",
        frozenset({"get"}): "(get loc, get loc)",
        frozenset({"set"}): "(set (loc, 0), set (loc, 1))",
        frozenset({"get", "set"}): "(get loc, set (loc, 1))",
    }
    rule = rule_named("REORDER")
    for eps, src in reorder.items():
        M = parse_term(src, state_cfg.signature)
        N = instantiate(rule.rhs, match(rule.lhs, M))
        valid = validate_instance(state_cfg, M, N, rule="REORDER").valid
        X = sized(2)
        commutes = check_commutative(state_cfg.family, eps, X, X).commutative
        guarded = any(path == () for path, _ in apply_rule(rule, M, state_cfg))
        if valid != commutes or guarded != commutes:
            bad.append(f"REORDER at {_name(eps)}: valid={valid} commutative={commutes} offered={guarded}")

    discard = parse_term("let _ = add (1, 1) in get loc", state_cfg.signature)
    sites = apply_rule(rule_named("DISCARD"), discard, state_cfg)
    if not sites or not all(validate_instance(state_cfg, discard, N).valid for _, N in sites):
        bad.append("DISCARD not valid for a pure N")
    impure = parse_term("let _ = set (loc, 1) in get loc", state_cfg.signature)
    if apply_rule(rule_named("DISCARD"), impure, state_cfg):
        bad.append("DISCARD offered for an effectful N")
    report(8, not bad, "CACHE valid at {},{get},{set} and refuted at {get,set}; REORDER iff commutative; DISCARD"
           + (f" ({notes[0]})" if notes else "") + ("" if not bad else " -- " + "; ".join(bad)))
    assert not bad


def test_criterion_9_property_suite():
    suite = Path(__file__).with_name("test_properties.py")
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(suite)],
                          capture_output=True, text=True)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr.strip()
    report(9, proc.returncode == 0, f"standalone property suite: {tail}")
    assert proc.returncode == 0, proc.stdout[-2000:]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
