import pytest

from effet import build_config
from effet.finset import FinFn, sized
from effet.lifting import (
    Rel, check_initiality, check_lift_closed, closure_violations, diagonal, free_lift, graph, verify_completeness,
    verify_mono_lemma,
)
from effet.syntax import parse_term

STATE = build_config("state", loc=("loc",), int_mod=2)
CONT = build_config("cont_state", loc=("loc",), int_mod=2)
EFFECTS = [frozenset(), frozenset({"get"}), frozenset({"set"}), frozenset({"get", "set"})]


def test_relation_rejects_foreign_pairs():
    X = sized(1)
    with pytest.raises(ValueError):
        Rel(X, X, frozenset({(X.elems[0], sized(2).elems[1])}))


def test_graph_of_a_function():
    X, Y = sized(2), sized(1)
    f = FinFn(X, Y, {x: Y.elems[0] for x in X.elems})
    assert len(graph(f)) == 2


@pytest.mark.parametrize("cfg", [STATE, CONT], ids=["state", "cont_state"])
@pytest.mark.parametrize("eps, pairs", [({"set"}, 6), ({"get", "set"}, 16)])
def test_mono_lemma_counts(cfg, eps, pairs):
    rep = verify_mono_lemma(cfg, eps, sized(2))
    assert rep.ok and rep.pairs == pairs


@pytest.mark.parametrize("eps", EFFECTS)
def test_free_lift_of_the_diagonal_is_closed_and_initial(eps):
    L = free_lift(STATE, eps, diagonal(sized(1)))
    assert not check_lift_closed(L)
    assert check_initiality(L).ok


def test_removing_a_pair_breaks_closure():
    L = free_lift(STATE, {"get", "set"}, diagonal(sized(1)))
    p = sorted(L.pairs)[-1]
    assert closure_violations(STATE.model, L.eps, L.base, L.pairs - {p})


def test_empty_relation_lifts_to_the_constant_computations():
    X = sized(1)
    L = free_lift(STATE, {"set"}, Rel(X, X, frozenset()))
    assert len(L) == 0


def test_lift_of_a_graph_relates_images():
    X, Y = sized(2), sized(1)
    f = FinFn(X, Y, {x: Y.elems[0] for x in X.elems})
    L = free_lift(STATE, {"get"}, graph(f))
    T = STATE.model
    for m1, m2 in L.pairs:
        assert T.fmap(X, Y, f, m1) == m2


def test_completeness_on_hand_written_pairs():
    sig = STATE.signature
    corpus = [
        (parse_term("get loc", sig), parse_term("get loc", sig), frozenset({"get"})),
        (parse_term("let f = \\(u:unit). let _ = set (loc, 1) in 1 in add (f (), f ())", sig),
         parse_term("let f = \\(u:unit). let _ = set (loc, 1) in 1 in let y = f () in add (y, y)", sig),
         frozenset({"set"})),
        (parse_term("let _ = set (loc, 0) in get loc", sig), parse_term("get loc", sig),
         frozenset({"get", "set"})),
    ]
    rep = verify_completeness(STATE, corpus)
    assert rep.ok
    assert [e.refined for e in rep.entries] == [True, True, False]
