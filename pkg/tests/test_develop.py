from __future__ import annotations

from collections import deque

from hypothesis import given

from conftest import closed_terms, contexts, open_terms
from lmt.develop import (
    EtaWrappedMu, EtaWrappedStable, OtherSuc, VarShape, classify_shape, complete_dev,
    dev_closes, is_eta_redex, par_reducts,
)
from lmt.kernel import (
    HOLE, NAT, App, AppCtx, Arrow, EtaFrame, SucCtx, Suc, Var, catch, free_vars,
    is_singular, lam, plug_eta, size, subterm_at, throw,
)
from lmt.reduction import RuleTag, reducts, successors

X, Y, Z = Var("x"), Var("y"), Var("z")
N2 = Arrow(NAT, NAT)
ID = lam("x", NAT, X)


def diagram1():
    return App(catch("a", N2, throw(X, "a", N2)), Y)


def diagram2():
    return catch("a", NAT, App(App(throw(X, "g", Arrow(NAT, N2), hint="b"), Y), Z))


def eta_chain():
    """S (mu a2.[a2] S (mu a1.[a1] S (mu a0.[d] x))): each outer mu is an eta-redex."""
    t = throw(X, "d", NAT, hint="a0")
    for name in ("a1", "a2"):
        t = catch(name, NAT, Suc(t))
    return Suc(t)


def test_classify_shape_examples():
    assert classify_shape(X) == VarShape(X)
    assert classify_shape(Suc(X)) == OtherSuc(Suc(X))
    shape = classify_shape(diagram1())
    assert isinstance(shape, EtaWrappedMu)
    assert shape.H == HOLE
    assert shape.E == AppCtx(HOLE, Y)
    assert catch("a", N2, throw(X, "a", N2)).body == shape.body


def test_classify_peels_the_longest_eta_chain():
    shape = classify_shape(eta_chain())
    assert isinstance(shape, EtaWrappedMu)
    depth, H = 0, shape.H
    while isinstance(H, EtaFrame):
        depth, H = depth + 1, H.inner
    assert depth == 2
    assert isinstance(classify_shape(catch("a", NAT, Suc(X))), EtaWrappedStable)


def test_par_reducts_examples():
    assert par_reducts(X) == {X}
    assert par_reducts(App(ID, Y)) == {App(ID, Y), Y}
    out = par_reducts(diagram1())
    assert catch("a", NAT, App(throw(App(X, Y), "a", N2), Y)) in out
    assert catch("a", NAT, App(X, Y)) in out


def test_complete_dev_examples():
    assert complete_dev(App(ID, Y)) == Y
    assert complete_dev(diagram1()) == catch("a", NAT, App(X, Y))
    assert complete_dev(diagram2()) == throw(X, "g", NAT)


def test_complete_dev_sees_through_eta_chains():
    e = eta_chain()
    # contracting the eta-redexes first would leave S (S (S (mu a0.[d] x)))
    assert complete_dev(e) == throw(X, "d", NAT)
    assert complete_dev(e) != Suc(Suc(Suc(throw(X, "d", NAT))))
    dev_closes(e)


def test_complete_dev_of_contexts():
    E = AppCtx(SucCtx(HOLE), App(ID, Y))
    assert complete_dev(E) == AppCtx(SucCtx(HOLE), Y)
    H = EtaFrame(SucCtx(HOLE), NAT, HOLE, "a")
    assert plug_eta(H, X) == Suc(catch("a", NAT, X))
    assert complete_dev(H) == SucCtx(HOLE)


def test_dev_closes_examples():
    r = dev_closes(App(ID, Y))
    assert r.development == Y and r.reducts_checked == 2
    assert dev_closes(diagram1()).development == catch("a", NAT, App(X, Y))


def _within(t, steps: int) -> set:
    seen, frontier = {t}, deque([(t, 0)])
    while frontier:
        u, d = frontier.popleft()
        if d == steps:
            continue
        for v in successors(u):
            if v not in seen:
                seen.add(v)
                frontier.append((v, d + 1))
    return seen


@given(closed_terms(max_nodes=10))
def test_sandwich(t):
    par = par_reducts(t)
    assert t in par
    assert {r.apply(t) for r in reducts(t)} <= par
    assert par <= _within(t, size(t))


@given(open_terms(max_nodes=12))
def test_free_variables_shrink(t):
    lams, mus = free_vars(t)
    for u in par_reducts(t):
        l2, m2 = free_vars(u)
        assert l2 <= lams and m2 <= mus


@given(open_terms(max_nodes=12))
def test_diamond(t):
    dev = complete_dev(t)
    for u in par_reducts(t):
        assert dev in par_reducts(u)


@given(contexts(depth=3))
def test_singular_contexts_stay_singular(ctx):
    E, _ = ctx
    if E == HOLE or not is_singular(E):
        return
    assert all(is_singular(E2) for E2 in par_reducts(E))


@given(closed_terms(max_nodes=14))
def test_eta_redexes_are_recognised(t):
    for r in reducts(t):
        if r.rule is RuleTag.MuEta:
            assert is_eta_redex(subterm_at(t, r.path))
