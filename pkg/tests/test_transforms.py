import pytest

from effet import build_config, load_config
from effet.cli import corpus_path
from effet.syntax import Meta, parse_term, parse_type, print_term
from effet.transforms import (
    RewriteRule, apply_rule, cache_instance, cache_instance_unguarded, instantiate, match, rule_named,
    triple_program, validate_instance,
)

STATE = build_config("state", loc=("loc",), int_mod=2)
STATE2 = load_config(corpus_path("state2.cfg"))
EFFECTS = [frozenset(), frozenset({"get"}), frozenset({"set"}), frozenset({"get", "set"})]


def term(cfg, text):
    return parse_term(text, cfg.signature)


def test_rules_may_not_invent_metavariables():
    with pytest.raises(ValueError):
        RewriteRule("BAD", Meta("M"), Meta("N"))


def test_match_binds_metavariables_and_binders():
    rule = rule_named("DISCARD")
    assert match(rule.lhs, term(STATE, "let z = 1 in get loc")) is not None
    assert match(rule.lhs, term(STATE, "let z = 1 in z")) is None  # ?M would capture z
    b = match(rule.lhs, term(STATE, "let _ = 1 in get loc"))
    assert print_term(b["N"]) == "1" and print_term(b["M"]) == "get loc"


def test_metavariable_may_not_capture():
    lhs = parse_term("\\(x:int). ?M", allow_meta=True)
    assert match(lhs, term(STATE, "\\(y:int). y")) is None
    assert match(lhs, term(STATE, "\\(y:int). 1")) is not None


def test_instantiate_renames_binders_away():
    rhs = parse_term("let y = ?F () in ?P (y, y)", allow_meta=True)
    out = instantiate(rhs, {"F": parse_term("y"), "P": parse_term("add")})
    assert "let y =" not in print_term(out)


def test_discard_site():
    M = term(STATE, "let _ = () in 3")
    assert [print_term(N) for _, N in apply_rule(rule_named("DISCARD"), M, STATE)] == ["3"]


def test_no_sites():
    assert apply_rule(rule_named("CACHE"), parse_term("x"), STATE.signature, ctx={"x": parse_type("int")}) == []
    assert apply_rule(rule_named("DISCARD"), term(STATE, "get loc"), STATE) == []


def test_cache_rewrites_the_triple_program():
    M, N = cache_instance(STATE, triple_program({"get"}, counter="loc"))
    assert "let y = triple () in add (y, y)" in print_term(N)


@pytest.mark.parametrize("eps", EFFECTS[:3])
def test_cache_is_valid_below_everything(eps):
    M, N = cache_instance(STATE2, triple_program(eps))
    assert N is not None
    rep = validate_instance(STATE2, M, N, rule="CACHE")
    assert rep.valid and rep.transfer_holds


def test_cache_is_refused_and_invalid_at_get_set():
    src = triple_program({"get", "set"})
    assert cache_instance(STATE2, src)[1] is None
    M, N = cache_instance_unguarded(STATE2, src)
    rep = validate_instance(STATE2, M, N, rule="CACHE")
    assert not rep.valid and rep.transfer_holds
    assert "start state" in rep.witness
    assert "INVALID" in rep.line()


@pytest.mark.parametrize("src, valid", [
    ("(get loc, get loc)", True),
    ("(1, get loc)", True),
    ("(get loc, set (loc, 1))", False),
])
def test_reorder(src, valid):
    rule = rule_named("REORDER")
    M = term(STATE, src)
    N = instantiate(rule.rhs, match(rule.lhs, M))
    rep = validate_instance(STATE, M, N, rule="REORDER")
    assert rep.valid == valid
    if not valid:
        assert rep.witness
    offered = any(path == () for path, _ in apply_rule(rule, M, STATE))
    assert offered == valid


def test_reorder_needs_a_model():
    M = term(STATE, "(get loc, get loc)")
    assert not any(path == () for path, _ in apply_rule(rule_named("REORDER"), M, STATE.signature))


def test_rewrites_keep_type_and_bound_effect():
    for src in ("let _ = add (1, 1) in get loc", "(get loc, get loc)",
                "let f = \\(u:unit). get loc in add (f (), f ())"):
        M = term(STATE, src)
        for rule in ("CACHE", "DISCARD", "REORDER"):
            for _, N in apply_rule(rule_named(rule), M, STATE):
                assert validate_instance(STATE, M, N).valid
