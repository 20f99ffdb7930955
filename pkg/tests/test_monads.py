import pytest

from effet import build_config
from effet.errors import MonoidLawViolation, SizeLimitExceeded
from effet.finset import TABLE, FinFn, FinSetObj, apply, atom, atoms, limits, pair, product, sized, terminal
from effet.config import int_object
from effet.monads import (
    Monoid, StateMonad, WriterMonad, algebraic_to_generic, check_monad_laws, check_monoid_laws,
    cont_state_monad, generic_to_algebraic, identity_monad, is_idempotent, overwriting_monoid, state_monad,
)

LOC = atoms("loc")
Z2 = int_object(2)
ONE = terminal()


@pytest.fixture(scope="module")
def state():
    return state_monad(LOC, Z2)


@pytest.fixture(scope="module")
def cont():
    return cont_state_monad(atoms("r0", "r1"), LOC, Z2)


def test_state_carrier_size(state):
    # (|S| |X|)^|S| with |S| = 2
    assert len(state.carrier(sized(2))) == 16
    assert len(state.carrier(sized(1))) == 4


def test_cont_state_carrier_size(cont):
    assert len(cont.carrier(ONE)) == 256


def test_cont_state_carrier_limit(cont):
    with limits(max_carrier=10_000):
        with pytest.raises(SizeLimitExceeded):
            cont.carrier(sized(2))


def test_overwriting_monoid_examples():
    M = overwriting_monoid(LOC, Z2)
    assert len(M.carrier) == 3
    assert not check_monoid_laws(M)
    assert is_idempotent(M) is None
    keep, w0, w1 = M.carrier.elems
    assert M.op(w0, w1) == w1 and M.op(w1, keep) == w1 and M.op(keep, w0) == w0


def test_overwriting_monoid_two_locations():
    M = overwriting_monoid(atoms("l", "m"), int_object(3))
    assert len(M.carrier) == 16
    assert not check_monoid_laws(M)


def test_bad_monoid_is_rejected():
    # truncated subtraction on {0, 1, 2} has no unit
    X = int_object(3)
    table = {pair(a, b): X.elems[max(X.index[a] - X.index[b], 0)] for a in X.elems for b in X.elems}
    M = Monoid(X, X.elems[0], FinFn(product(X, X), X, table))
    with pytest.raises(MonoidLawViolation):
        WriterMonad(M)


def _state_equations(T, X):
    """The four equations relating get and set at location loc, as pairs of elements of T X."""
    l = atom("loc")
    x = X.elems[0]
    V = Z2
    get = lambda k: T.bind(V, X, T.generic("get", l), k)  # noqa: E731
    set_ = lambda v, k: T.bind(ONE, X, T.generic("set", pair(l, v)), lambda _: k)  # noqa: E731
    ret = T.unit(X, x)
    eqs = []
    # get then set the value read = do nothing
    eqs.append((get(lambda v: set_(v, ret)), ret))
    for v in V.elems:
        # set then get reads the value set
        eqs.append((set_(v, get(lambda w: T.unit(X, w if w in X else x))), set_(v, T.unit(X, v if v in X else x))))
        for w in V.elems:
            # set twice = set the second
            eqs.append((set_(v, set_(w, ret)), set_(w, ret)))
    # get twice = get once
    eqs.append((get(lambda v: get(lambda w: T.unit(X, X.elems[(V.index[v] + V.index[w]) % len(X)]))),
                get(lambda v: T.unit(X, X.elems[(2 * V.index[v]) % len(X)]))))
    return eqs


@pytest.mark.parametrize("which", ["state", "cont_state"])
def test_state_equations(which, state, cont):
    T = state if which == "state" else cont
    X = FinSetObj(Z2.elems, canonical=True)
    for lhs, rhs in _state_equations(T, X):
        assert lhs == rhs


def test_get_and_set_do_not_commute(state):
    l = atom("loc")
    V = Z2
    read_then_write = state.bind(V, V, state.generic("get", l),
                                 lambda v: state.bind(ONE, V, state.generic("set", pair(l, atom(1))),
                                                      lambda _: state.unit(V, v)))
    write_then_read = state.bind(ONE, V, state.generic("set", pair(l, atom(1))),
                                 lambda _: state.bind(V, V, state.generic("get", l), lambda v: state.unit(V, v)))
    assert read_then_write != write_then_read


@pytest.mark.parametrize("op", ["get", "set"])
def test_generic_algebraic_roundtrip(state, op):
    B = state.ops[op][1]
    alpha = generic_to_algebraic(state, op, B)
    assert algebraic_to_generic(state, op, alpha) == state.generic_fn(op)


def test_algebraic_operation_is_natural(state):
    # alpha_Y . (Tf)^B = (Tf)^A . alpha_X for f : X -> Y
    X, Y = sized(1), sized(2)
    f = {X.elems[0]: Y.elems[1]}
    aX = generic_to_algebraic(state, "get", X)
    aY = generic_to_algebraic(state, "get", Y)
    Tf = lambda m: state.fmap(X, Y, f.__getitem__, m)  # noqa: E731
    post = lambda t: (TABLE, tuple((k, Tf(v)) for k, v in t[1]))  # noqa: E731
    for k in aX.dom.elems:
        assert aY(post(k)) == post(aX(k))


def test_identity_monad_with_a_degenerate_operation():
    X = sized(2)
    g = {atom("a"): X.elems[1]}
    T = identity_monad({"tick": (atoms("a"), X)}, {"tick": lambda a: g[a]})
    alpha = generic_to_algebraic(T, "tick", X)
    for k in alpha.dom.elems:
        assert apply(alpha(k), atom("a")) == apply(k, X.elems[1])


@pytest.mark.parametrize("monad", ["identity", "state", "reader", "writer"])
def test_law_suite_passes(monad):
    cfg = build_config(monad, loc=("loc",), int_mod=2)
    report = check_monad_laws(cfg.model, [sized(n) for n in (1, 2, 3)])
    assert report.ok, report.lines()


def test_cont_state_law_suite_marks_derived_mult(cont):
    report = check_monad_laws(cont, [sized(1)])
    assert report.ok
    assert any(line.startswith("N/A") for line in report.lines())


def test_cont_state_bind_matches_reference(cont):
    import random
    rng = random.Random(3)
    X, Y = sized(1), sized(2)
    for _ in range(30):
        m = cont.random_element(X, rng)
        ys = {x: cont.random_element(Y, rng) for x in X.elems}
        assert cont.bind(X, Y, m, ys.__getitem__) == cont._bind_by_lookup(X, Y, m, ys.__getitem__)


def test_corrupted_mult_is_detected(state):
    one = sized(1)
    bad_mm = state.carrier(state.carrier(one)).elems[5]

    class Corrupted(StateMonad):
        def mult(self, X, mm):
            r = super().mult(X, mm)
            if X == one and mm == bad_mm:
                return next(t for t in self.carrier(X).elems if t != r)
            return r

    report = check_monad_laws(Corrupted(LOC, Z2), [one])
    assert not report["mult associativity"].passed
    assert report["mult associativity"].witness
