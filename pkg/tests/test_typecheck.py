from __future__ import annotations

import random

import pytest
from hypothesis import given

from conftest import OPEN, closed_terms, open_terms, seeds
from lmt.kernel import (
    HOLE, NAT, App, NRec, AppCtx, Arrow, Suc, SucCtx, Var, Zero, catch, cmd, lam, numeral,
    free_vars,
)
from lmt.subst import subst_lam, subst_struct
from lmt.testkit import GenConfig, gen_context, gen_typed
from lmt.typecheck import (
    EMPTY_ENV, ArgMismatch, LmtTypeError, NatExpected, PassivateMismatch, TypeEnv,
    UnboundLamVar, UnboundMuVar, check_command, infer_context, infer_term,
)

N2 = Arrow(NAT, NAT)


def test_infer_examples():
    assert infer_term(EMPTY_ENV, lam("x", NAT, Var("x"))) == N2
    assert infer_term(EMPTY_ENV, catch("a", NAT, Zero())) == NAT
    step = lam("x", NAT, lam("y", NAT, Suc(Var("y"))))
    assert infer_term(EMPTY_ENV, NRec(NAT, Zero(), step, numeral(2))) == NAT


def test_check_command_examples():
    check_command(TypeEnv({}, {"a": NAT}), cmd("a", Zero()))
    with pytest.raises(PassivateMismatch):
        check_command(TypeEnv({}, {"a": N2}), cmd("a", Zero()))
    with pytest.raises(UnboundMuVar):
        check_command(EMPTY_ENV, cmd("a", Zero()))


def test_infer_context_examples():
    assert infer_context(EMPTY_ENV, HOLE, N2) == N2
    assert infer_context(EMPTY_ENV, SucCtx(HOLE), NAT) == NAT
    assert infer_context(EMPTY_ENV, AppCtx(HOLE, Zero()), N2) == NAT


def test_errors_carry_a_path():
    with pytest.raises(NatExpected) as e:
        infer_term(EMPTY_ENV, lam("f", N2, Suc(Var("f"))))
    assert isinstance(e.value, LmtTypeError)
    assert e.value.path == (0, 0)
    with pytest.raises(ArgMismatch):
        infer_term(EMPTY_ENV, App(lam("x", NAT, Var("x")), lam("y", NAT, Var("y"))))
    with pytest.raises(UnboundLamVar):
        infer_term(EMPTY_ENV, Var("q"))


@given(closed_terms())
def test_generated_closed_terms_type_check(t):
    infer_term(EMPTY_ENV, t)


@given(open_terms())
def test_weakening(t):
    ty = infer_term(OPEN, t)
    bigger = TypeEnv({**OPEN.lam, "w": N2}, {**OPEN.mu, "z": NAT})
    assert infer_term(bigger, t) == ty


@given(open_terms())
def test_strengthening(t):
    # an unused mu-variable's entry does not matter
    ty = infer_term(OPEN, t)
    used = free_vars(t)[1]
    for name in set(OPEN.mu) - used:
        env = TypeEnv(OPEN.lam, {**OPEN.mu, name: Arrow(N2, NAT)})
        assert infer_term(env, t) == ty


@given(open_terms(), seeds)
def test_subst_lam_preserves_typing(t, seed):
    r = gen_typed(GenConfig(seed, 8, target_type=NAT))
    assert infer_term(OPEN, subst_lam(t, "x", r)) == infer_term(OPEN, t)


@given(open_terms(), seeds)
def test_subst_struct_preserves_typing(t, seed):
    # 'a : N; after [a] u |-> [c] E[u] the variable 'c has E's result type
    E, out = gen_context(random.Random(seed), NAT, 2)
    env = TypeEnv(OPEN.lam, {**OPEN.mu, "c": out})
    assert infer_term(env, subst_struct(t, "a", "c", E)) == infer_term(OPEN, t)
