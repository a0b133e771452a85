from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from conftest import OPEN, closed_terms, load_program, seeds
from lmt.kernel import (
    NAT, App, AppCtx, Arrow, Mu, NRec, Suc, SucCtx, HOLE, Var, Zero, as_numeral,
    catch, free_vars, lam, mu, cmd, numeral, plug, size, subexpressions, throw,
)
from lmt.reduction import successors
from lmt.testkit import (
    BudgetExceeded, GenConfig, catch_throw_instances, derive_seed, gen_typed,
    max_reduction_length, oracle_normal_forms, postpone_check,
)
from lmt.typecheck import EMPTY_ENV, infer_term


def test_smallest_closed_numeral_term_is_zero():
    assert gen_typed(GenConfig(seed=5, max_nodes=1, target_type=NAT)) == Zero()


@given(seeds)
def test_generation_is_deterministic(seed):
    cfg = GenConfig(seed, 30)
    assert gen_typed(cfg) == gen_typed(cfg)


@given(seeds)
def test_no_mu_without_budget(seed):
    t = gen_typed(GenConfig(seed, 30, mu_budget=0))
    assert not any(isinstance(x, Mu) for _, x in subexpressions(t))


@given(seeds, st.integers(min_value=3, max_value=40), st.booleans())
def test_generated_terms_are_sound_and_within_budget(seed, max_nodes, closed):
    env = EMPTY_ENV if closed else OPEN
    t = gen_typed(GenConfig(seed, max_nodes, closed_only=closed), env)
    infer_term(env, t)
    assert size(t) <= max_nodes
    if closed:
        assert free_vars(t) == (frozenset(), frozenset())


def test_generator_reaches_control_operators():
    kinds = set()
    for i in range(200):
        t = gen_typed(GenConfig(derive_seed(1, i), 30))
        kinds |= {type(x).__name__ for _, x in subexpressions(t)}
    assert {"Mu", "NRec", "Lam", "App", "Suc", "Command"} <= kinds


def test_oracle_examples():
    assert oracle_normal_forms(numeral(2)) == {numeral(2)}
    t = catch("a", NAT, Suc(throw(Zero(), "a", NAT, hint="b")))
    assert oracle_normal_forms(t) == {Zero()}
    c = load_program("restricted_suc.lmt")
    assert oracle_normal_forms(c) == {numeral(4)}
    assert oracle_normal_forms(c, suc_prime=True) == {numeral(4), numeral(2)}


def test_oracle_budget():
    F = load_program("f_product.lmt", "F")
    with pytest.raises(BudgetExceeded):
        oracle_normal_forms(App(F, numeral(2)), budget=5)


def test_max_reduction_length_examples():
    assert max_reduction_length(numeral(5)) == 0
    assert max_reduction_length(App(lam("x", NAT, Var("x")), Zero())) == 1
    # nrec 0 (\x y. S y) 2: each successor unfolds once and feeds two
    # arguments to the step (1 + 2 steps), the zero case takes one more
    # step, and no redex is ever erased or copied: 3 + 3 + 1.
    step = lam("x", NAT, lam("y", NAT, Suc(Var("y"))))
    assert max_reduction_length(NRec(NAT, Zero(), step, numeral(2))) == 7


def test_postponement_through_a_singular_context():
    # E[mu a.[a] mu b.c] with E singular
    c = cmd("d", Var("x"))
    t = plug(AppCtx(HOLE, Zero()), catch("a", Arrow(NAT, NAT), mu("b", Arrow(NAT, NAT), c)))
    r = postpone_check(t)
    assert r.pairs > 0 and r.ok == r.pairs and not r.violations
    t = plug(SucCtx(HOLE), catch("a", NAT, mu("b", NAT, cmd("b", Var("x")))))
    r = postpone_check(t)
    assert r.pairs > 0 and r.ok == r.pairs


def test_postponement_is_vacuous_without_b_redexes():
    r = postpone_check(App(lam("x", NAT, Var("x")), Zero()))
    assert r.pairs == 0 and not r.violations


@given(closed_terms(max_nodes=12, target=NAT))
def test_oracle_agrees_with_confluence(t):
    try:
        nfs = oracle_normal_forms(t, budget=2000)
    except BudgetExceeded:
        return
    assert len(nfs) == 1
    assert as_numeral(next(iter(nfs))) is not None


def test_catch_throw_instances_are_well_formed():
    insts = catch_throw_instances(seed=3, per_clause=10)
    assert sorted({i.clause for i in insts}) == list(range(1, 8))
    assert len(insts) == 70
    for inst in insts:
        if inst.one_step:
            assert inst.expected in successors(inst.source)
