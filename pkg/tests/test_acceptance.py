"""Acceptance criteria 1-9, one PASS/FAIL line each.

The lines are printed in the pytest terminal summary. Run this file on
its own with ``pytest tests/test_acceptance.py``.
"""

from __future__ import annotations

import time
from contextlib import contextmanager

from conftest import PROGRAMS, load_program
from lmt.develop import complete_dev, dev_closes
from lmt.kernel import NAT, App, Arrow, Var, catch, numeral, throw
from lmt.properties import (
    b_termination_report, catch_throw_suite, cps_semantics, cps_typing, develop_suite,
    normal_form_suite, postpone_suite, subject_reduction,
)
from lmt.reduction import RuleTag, join_search, normalize, reducts
from lmt.testkit import oracle_normal_forms, reachable

X, Y, Z = Var("x"), Var("y"), Var("z")
N2 = Arrow(NAT, NAT)


@contextmanager
def criterion(log, n: int, title: str):
    detail: dict = {}
    try:
        yield detail
    except BaseException:
        line = f"FAIL criterion {n}: {title} {detail}"
        log.append(line)
        print(line)
        raise
    line = f"PASS criterion {n}: {title} {detail}"
    log.append(line)
    print(line)


def _check(report, detail):
    detail["summary"] = report.summary()
    assert report.ok, report.violations[:3]


def test_1_product_program(acceptance_log, capsys):
    from lmt.cli import main
    with criterion(acceptance_log, 1, "F 2 normalizes to 0") as d:
        F = load_program("f_product.lmt", "F")
        start = time.perf_counter()
        nf, trace = normalize(App(F, numeral(2)))
        d["seconds"] = round(time.perf_counter() - start, 3)
        d["steps"] = len(trace)
        assert nf == numeral(0)
        assert len(trace) <= 2000 and d["seconds"] < 1.0
        code = main(["norm", str(PROGRAMS / "f_product.lmt")])
        assert code == 0 and capsys.readouterr().out.strip() == "0"


def test_2_restricted_suc(acceptance_log):
    with criterion(acceptance_log, 2, "restricted successor rule") as d:
        start = time.perf_counter()
        t = load_program("restricted_suc.lmt")
        nf, trace = normalize(t)
        chain = [r.rule for r in trace]
        assert nf == numeral(4)
        assert chain == [RuleTag.MuSuc, RuleTag.MuNat, RuleTag.MuI, RuleTag.MuEta]
        unsafe = oracle_normal_forms(t, suc_prime=True)
        assert unsafe == {numeral(4), numeral(2)}
        assert oracle_normal_forms(t) == {numeral(4)}
        d["chain"] = " ".join(map(str, chain))
        d["seconds"] = round(time.perf_counter() - start, 3)
        assert d["seconds"] < 1.0


def test_3_subject_reduction(acceptance_log):
    with criterion(acceptance_log, 3, "subject reduction") as d:
        r = subject_reduction(cases=500, size_=40)
        assert r.cases == 500
        _check(r, d)


def test_4_normal_forms(acceptance_log):
    with criterion(acceptance_log, 4, "closed N-terms reach one numeral") as d:
        r = normal_form_suite(cases=500, size_=40)
        assert r.cases == 500
        _check(r, d)


def test_5_complete_development(acceptance_log):
    with criterion(acceptance_log, 5, "complete development") as d:
        r = develop_suite(cases=300, size_=14)
        assert r.cases == 300 and r.seconds <= 60
        _check(r, d)
        # first diagram: both reducts join at mu a.[a] x y
        t1 = App(catch("a", N2, throw(X, "a", N2)), Y)
        joined = catch("a", NAT, App(X, Y))
        outs = [r.apply(t1) for r in reducts(t1)]
        assert complete_dev(t1) == joined
        assert join_search(outs[0], outs[1], 4) == joined
        dev_closes(t1)
        # second diagram: both reducts reach mu b.[g] x
        t2 = catch("a", NAT, App(App(throw(X, "g", Arrow(NAT, N2), hint="b"), Y), Z))
        joined2 = throw(X, "g", NAT)
        outs2 = [r.apply(t2) for r in reducts(t2)]
        assert complete_dev(t2) == joined2
        assert len(outs2) >= 2 and all(reachable(u, joined2, 100) for u in outs2)
        dev_closes(t2)
        d["diagrams"] = "both joins reproduced"


def test_6_cps(acceptance_log):
    with criterion(acceptance_log, 6, "CPS typing and semantics") as d:
        typing = cps_typing(cases=300)
        sem = cps_semantics(cases=200)
        assert typing.cases == 300 and sem.cases == 200
        d["typing"] = typing.summary()
        d["semantics"] = sem.summary()
        assert typing.ok and sem.ok


def test_7_postponement(acceptance_log):
    with criterion(acceptance_log, 7, "postponement") as d:
        r = postpone_suite(cases=300, budget=1000)
        d["exhausted"] = f"{r.skipped}/{r.cases}"
        assert r.cases == 300
        assert r.skipped < 0.05 * r.cases
        _check(r, d)


def test_9_catch_throw(acceptance_log):
    with criterion(acceptance_log, 9, "catch/throw laws") as d:
        r = catch_throw_suite(cases=50)
        assert r.details["per_clause"] == {c: 50 for c in range(1, 8)}
        _check(r, d)


def test_8_b_termination(acceptance_log):
    # runs after the suites above so the counter covers their steps
    with criterion(acceptance_log, 8, "B-steps shrink the term") as d:
        r = b_termination_report()
        d["checked"] = r.details
        assert r.cases > 0
