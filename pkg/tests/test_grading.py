import pytest

from effet import build_config
from effet.errors import SaturationLimitExceeded
from effet.finset import STAR, atom, limits, pair, sized, update
from effet.grading import (
    Leaf, Node, check_commutative, check_graded_laws, commute_generics, count_free_terms, enumerate_free_terms,
    free_term_image, image_fixpoint, inclusion, interpret_free_term,
)

EFFECTS = [frozenset(), frozenset({"get"}), frozenset({"set"}), frozenset({"get", "set"})]


@pytest.fixture(scope="module")
def state():
    return build_config("state", loc=("loc",), int_mod=2)


@pytest.fixture(scope="module")
def cont():
    return build_config("cont_state", loc=("loc",), int_mod=2)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_state_carrier_sizes(state, n):
    sizes = [len(image_fixpoint(state.model, eps, sized(n))) for eps in EFFECTS]
    assert sizes == [n, n * n, 3 * n, (2 * n) ** 2]


def test_pure_carrier_is_the_units(state):
    X = sized(3)
    C = image_fixpoint(state.model, (), X)
    assert set(C.subset.elems) == {state.model.unit(X, x) for x in X.elems}


def test_reader_carrier_is_everything():
    cfg = build_config("reader", loc=("loc",), int_mod=2)
    X = sized(2)
    assert len(image_fixpoint(cfg.model, {"get"}, X)) == len(cfg.model.carrier(X))


def test_writer_carrier_is_everything():
    cfg = build_config("writer", loc=("loc",), int_mod=2)
    X = sized(2)
    assert len(image_fixpoint(cfg.model, {"set"}, X)) == len(cfg.model.carrier(X)) == 6


@pytest.mark.parametrize("n", [1, 2])
def test_cont_state_matches_state_sizes(state, cont, n):
    for eps in EFFECTS:
        assert len(image_fixpoint(cont.model, eps, sized(n))) == len(image_fixpoint(state.model, eps, sized(n)))


def test_saturation_limit(state):
    with limits(max_saturation=5):
        with pytest.raises(SaturationLimitExceeded):
            image_fixpoint(state.model, {"get", "set"}, sized(2))


def test_free_term_counts(state):
    T = state.model
    assert len(enumerate_free_terms(T, (), sized(2), 0)) == 2
    assert len(enumerate_free_terms(T, {"set"}, sized(1), 1)) == 3
    assert count_free_terms(T, {"set"}, sized(1), 1) == 3
    assert all(isinstance(t, Leaf) for t in enumerate_free_terms(T, (), sized(2), 3))


def test_interpret_leaf_and_set_node(state):
    T = state.model
    X = sized(1)
    x = X.elems[0]
    assert interpret_free_term(T, Leaf(x), X) == T.unit(X, x)
    l, one = atom("loc"), atom(1)
    t = Node("set", pair(l, one), ((STAR, Leaf(x)),))
    expected = T._tab(lambda s: pair(update(s, l, one), x))
    assert interpret_free_term(T, t, X) == expected


@pytest.mark.parametrize("which", ["state", "cont"])
def test_oracle_matches_fixpoint(state, cont, which):
    cfg = state if which == "state" else cont
    for n in (0, 1, 2) if which == "state" else (0, 1):
        for eps in EFFECTS:
            img, _ = free_term_image(cfg.model, eps, sized(n))
            assert img == frozenset(image_fixpoint(cfg.model, eps, sized(n)).subset.elems)


def test_inclusions_are_monotone(state):
    X = sized(2)
    for a in EFFECTS:
        for b in EFFECTS:
            if a <= b:
                f = inclusion(state.family, a, b, X)
                assert f.is_injective()
    with pytest.raises(ValueError):
        inclusion(state.family, {"get"}, {"set"}, X)


@pytest.mark.parametrize("eps, expected", [
    ((), True), (("get",), True), (("set",), False), (("get", "set"), False),
])
def test_commutativity(state, eps, expected):
    X = sized(2)
    fast = check_commutative(state.family, eps, X, X)
    full = check_commutative(state.family, eps, X, X, exhaustive=True)
    assert fast.commutative == full.commutative == expected
    if not expected:
        assert full.witness is not None


def test_commutativity_on_cont_state_agrees(cont):
    X = sized(1)
    for eps in EFFECTS:
        assert (check_commutative(cont.family, eps, X, X).commutative
                == check_commutative(cont.family, eps, X, X, exhaustive=True).commutative)


def test_writer_set_is_not_commutative():
    cfg = build_config("writer", loc=("loc",), int_mod=2)
    assert not commute_generics(cfg.model, {"set"}).commutative


@pytest.mark.parametrize("eps", EFFECTS)
def test_graded_laws(state, eps):
    report = check_graded_laws(state.family, eps, [sized(n) for n in (1, 2)])
    assert report.ok, report.lines()
