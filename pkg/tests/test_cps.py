from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from conftest import OPEN, closed_terms, load_program, open_terms, seeds
from lmt.cps import (
    ArityMismatch, NonLambdaT, NotClosed, UnmappedMuVar, cont_name, cps_app, cps_env,
    cps_nrec_step, cps_term, cps_type, cps_type_tilde, lt_normalize, neg, represent,
    run_cps,
)
from lmt.kernel import (
    NAT, App, Arrow, Bound, Lam, NRec, Suc, Var, Zero, as_numeral, catch, cmd,
    free_vars, is_mu_free, numeral, throw,
)
from lmt.reduction import normal_form, successors
from lmt.testkit import GenConfig, gen_typed, random_type
from lmt.typecheck import EMPTY_ENV, TypeEnv, infer_term

N2 = Arrow(NAT, NAT)
ID = Lam(NAT, Bound(0), "x")


def test_cps_type_examples():
    # N* = not not N = (N -> B) -> B, with B = N
    assert cps_type(NAT) == Arrow(Arrow(NAT, NAT), NAT)
    assert cps_type_tilde(NAT) == NAT
    assert cps_type_tilde(N2) == Arrow(cps_type(NAT), cps_type(NAT))


def test_cps_app_typing():
    sigma, tau = NAT, N2
    env = TypeEnv({"t": cps_type(Arrow(sigma, tau)), "r": cps_type(sigma)})
    assert infer_term(env, cps_app(Var("t"), Var("r"), sigma, tau)) == cps_type(tau)


def test_continuation_names_are_not_source_identifiers():
    assert cont_name("a") == "k'a"
    assert cont_name("a") != cont_name("b")


def test_unmapped_mu_variable():
    with pytest.raises(UnmappedMuVar):
        cps_term(throw(Zero(), "a", NAT), TypeEnv({}, {"a": NAT}), conts={})


def test_lt_normalize_rejects_mu():
    with pytest.raises(NonLambdaT):
        lt_normalize(catch("a", NAT, Zero()))
    with pytest.raises(NonLambdaT):
        lt_normalize(cmd("a", Zero()))


def test_lt_normalize_unfolds_any_successor():
    f, y = Var("f"), Var("y")
    t = NRec(NAT, Zero(), f, Suc(y))
    assert lt_normalize(t) == App(App(f, y), NRec(NAT, Zero(), f, y))
    assert normal_form(t) == t


def test_represent_addition():
    add = load_program("f_product.lmt", "add")
    r = represent(add, 2)
    assert is_mu_free(r)
    assert infer_term(EMPTY_ENV, r) == Arrow(NAT, N2)
    assert as_numeral(lt_normalize(App(App(r, numeral(2)), numeral(3)))) == 5


def test_represent_product_program():
    F = load_program("f_product.lmt", "F")
    r = represent(F, 1)
    for n in range(4):
        direct = as_numeral(normal_form(App(F, numeral(n))))
        assert as_numeral(lt_normalize(App(r, numeral(n)))) == direct


def test_represent_errors():
    with pytest.raises(ArityMismatch):
        represent(numeral(1), 1)
    with pytest.raises(NotClosed):
        represent(Var("x"), 0)


def test_run_cps_examples():
    assert as_numeral(run_cps(load_program("restricted_suc.lmt"))) == 4
    assert as_numeral(run_cps(load_program("static_binding.lmt"))) == 0


@given(open_terms())
def test_translation_is_mu_free_and_typed(t):
    ty = infer_term(OPEN, t)
    c = cps_term(t, OPEN)
    assert is_mu_free(c)
    assert infer_term(cps_env(OPEN), c) == cps_type(ty)


@given(closed_terms(), st.sampled_from([NAT, N2]))
def test_answer_type_is_a_parameter(t, bottom):
    assert infer_term(EMPTY_ENV, cps_term(t, bottom=bottom)) == cps_type(infer_term(EMPTY_ENV, t), bottom)


@given(open_terms())
def test_eta_expanded_translation_steps_back(t):
    c = cps_term(t, OPEN)
    k_ty = neg(cps_type_tilde(infer_term(OPEN, t)))
    assert c in successors(Lam(k_ty, App(c, Bound(0)), "k"))


@given(closed_terms(target=NAT))
def test_translation_computes_the_same_numeral(t):
    assert as_numeral(run_cps(t)) == as_numeral(normal_form(t))


@given(seeds, st.integers(min_value=0, max_value=5))
def test_nrec_abstraction_law(seed, n):
    rng = random.Random(seed)
    rho = random_type(rng, 1)
    r = gen_typed(GenConfig(rng.getrandbits(32), 8, target_type=rho))
    s = gen_typed(GenConfig(rng.getrandbits(32), 8, target_type=Arrow(NAT, Arrow(rho, rho))))
    rec = NRec(cps_type(rho), cps_term(r), cps_nrec_step(cps_term(s), rho), numeral(n))
    wrapped = Lam(neg(cps_type_tilde(rho)), App(rec, Bound(0)), "k")
    assert lt_normalize(wrapped) == lt_normalize(rec)


def test_free_mu_variables_become_continuations():
    t = throw(Var("x"), "a", NAT)
    c = cps_term(t, TypeEnv({"x": NAT}, {"a": NAT}))
    assert "k'a" in free_vars(c)[0]
