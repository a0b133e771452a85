"""Property drivers shared by the fuzz command and the test suites.

Each driver generates its own cases from a run seed (one derived seed
per case) and returns a ``Report``. Cases whose search budget runs out
are counted as skipped, never as passed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .cps import cps_env, cps_term, cps_type, run_cps
from .develop import PropertyViolation, dev_closes, par_reducts
from .kernel import NAT, Arrow, Mu, as_numeral, free_vars, is_mu_free, is_value
from .reduction import (
    StepBudgetExceeded, b_step_stats, check_catch_throw_laws, join_search,
    normal_form, reducts, LawViolation,
)
from .syntax import pretty
from .testkit import (
    GenConfig, catch_throw_instances, derive_seed, gen_typed, postpone_check,
)
from .typecheck import EMPTY_ENV, LmtTypeError, TypeEnv, infer_term


@dataclass
class Report:
    name: str
    cases: int = 0
    passed: int = 0
    skipped: int = 0
    violations: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        status = "ok" if self.ok else "FAILED"
        extra = "".join(f", {k}={v}" for k, v in self.details.items())
        return (f"{self.name}: {status} ({self.passed}/{self.cases} passed, "
                f"{self.skipped} skipped, {len(self.violations)} violations{extra}, "
                f"{self.seconds:.1f}s)")

    def to_json(self) -> dict:
        return {"property": self.name, "ok": self.ok, "cases": self.cases,
                "passed": self.passed, "skipped": self.skipped,
                "violations": self.violations[:20], "details": self.details,
                "seconds": round(self.seconds, 3)}


def _timed(fn):
    def run(*args, **kw):
        start = time.perf_counter()
        report = fn(*args, **kw)
        report.seconds = time.perf_counter() - start
        return report
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# Free variables used when a suite wants open terms.
OPEN_ENV = TypeEnv({"x": NAT, "f": Arrow(NAT, NAT)}, {"a": NAT, "b": Arrow(NAT, NAT)})


@_timed
def subject_reduction(cases: int = 500, seed: int = 0, size_: int = 40) -> Report:
    """Every one-step reduct keeps the type of a generated term."""
    rep = Report("subject-reduction")
    steps = 0
    for i in range(cases):
        closed = i % 2 == 0
        env = EMPTY_ENV if closed else OPEN_ENV
        t = gen_typed(GenConfig(derive_seed(seed, i), size_, closed_only=closed), env)
        ty = infer_term(env, t)
        rep.cases += 1
        bad = None
        for r in reducts(t):
            steps += 1
            try:
                ty2 = infer_term(env, r.apply(t))
            except LmtTypeError as e:
                bad = f"{pretty(t)} --{r.rule}@{list(r.path)}--> ill-typed: {e}"
                break
            if ty2 != ty:
                bad = f"{pretty(t)} --{r.rule}@{list(r.path)}--> type {ty2} instead of {ty}"
                break
        if bad:
            rep.violations.append(bad)
        else:
            rep.passed += 1
    rep.details["reducts_checked"] = steps
    return rep


STRATEGIES = ("lo", "rand:1", "rand:2", "rand:3")


def _nf_shape_ok(nf) -> bool:
    """A closed normal form is a value or ``mu a.[b] v`` with ``v`` a value."""
    if is_value(nf):
        return True
    return isinstance(nf, Mu) and is_value(nf.body.body)


@_timed
def normal_form_suite(cases: int = 500, seed: int = 0, size_: int = 40,
                      strategies=STRATEGIES) -> Report:
    """Closed terms of type N reach the same numeral under every strategy."""
    rep = Report("normal-form")
    shapes = 0
    for i in range(cases):
        case_seed = derive_seed(seed, i)
        t = gen_typed(GenConfig(case_seed, size_, target_type=NAT))
        rep.cases += 1
        try:
            results = []
            for s in strategies:
                if s.startswith("rand:"):
                    s = f"rand:{derive_seed(case_seed, int(s[5:]))}"
                results.append(normal_form(t, strategy=s))
        except StepBudgetExceeded:
            rep.violations.append(f"{pretty(t)}: no normal form within the step budget")
            continue
        nums = [as_numeral(r) for r in results]
        if None in nums or len(set(nums)) != 1:
            rep.violations.append(f"{pretty(t)}: normal forms {[pretty(r) for r in results]}")
            continue
        # normal forms of closed terms at any type have the value shape
        u = gen_typed(GenConfig(derive_seed(case_seed, 99), size_ // 2))
        nf = normal_form(u)
        if not _nf_shape_ok(nf):
            rep.violations.append(f"{pretty(u)}: normal form {pretty(nf)} is not value-shaped")
            continue
        shapes += 1
        rep.passed += 1
    rep.details["shape_checks"] = shapes
    return rep


@_timed
def confluence(cases: int = 100, seed: int = 0, size_: int = 20, budget: int = 6,
               max_states: int = 2000) -> Report:
    """Any two one-step reducts of a generated term have a common reduct."""
    rep = Report("confluence")
    pairs = joined_by_search = joined_by_nf = 0
    for i in range(cases):
        t = gen_typed(GenConfig(derive_seed(seed, i), size_))
        rep.cases += 1
        outs = list(dict.fromkeys(r.apply(t) for r in reducts(t)))[:6]
        bad = None
        for j, a in enumerate(outs):
            for b in outs[j + 1:]:
                pairs += 1
                if join_search(a, b, budget, max_states) is not None:
                    joined_by_search += 1
                    continue
                # the shared normal form is itself a common reduct
                if normal_form(a) == normal_form(b):
                    joined_by_nf += 1
                    continue
                bad = f"{pretty(t)}: {pretty(a)} and {pretty(b)} do not join"
                break
            if bad:
                break
        if bad:
            rep.violations.append(bad)
        else:
            rep.passed += 1
    rep.details.update(pairs=pairs, joined_by_search=joined_by_search,
                       joined_by_normal_form=joined_by_nf)
    return rep


@_timed
def develop_suite(cases: int = 300, seed: int = 0, size_: int = 14) -> Report:
    """Every parallel reduct parallel-reduces to the complete development."""
    rep = Report("develop")
    checked = 0
    for i in range(cases):
        t = gen_typed(GenConfig(derive_seed(seed, i), size_))
        rep.cases += 1
        try:
            checked += dev_closes(t).reducts_checked
        except PropertyViolation as e:
            rep.violations.append(f"{pretty(t)}: reduct {pretty(e.witness)} misses the development")
            continue
        singles = {r.apply(t) for r in reducts(t)}
        if not singles <= par_reducts(t):
            rep.violations.append(f"{pretty(t)}: a one-step reduct is not a parallel reduct")
            continue
        rep.passed += 1
    rep.details["parallel_reducts"] = checked
    return rep


@_timed
def postpone_suite(cases: int = 300, seed: int = 0, size_: int = 20, budget: int = 1000) -> Report:
    """B-then-A steps can be reordered to start with an A step."""
    rep = Report("postpone")
    pairs = exhausted_cases = 0
    for i in range(cases):
        t = gen_typed(GenConfig(derive_seed(seed, i), size_))
        rep.cases += 1
        r = postpone_check(t, budget)
        pairs += r.pairs
        if r.violations:
            t2, t3 = r.violations[0]
            rep.violations.append(f"{pretty(t)} ->B {pretty(t2)} ->A {pretty(t3)} cannot be advanced")
        elif r.exhausted:
            exhausted_cases += 1
            rep.skipped += 1
        else:
            rep.passed += 1
    rep.details.update(pairs=pairs, exhausted_cases=exhausted_cases)
    return rep


@_timed
def catch_throw_suite(cases: int = 50, seed: int = 0, size_: int = 8) -> Report:
    """The seven catch/throw laws on ``cases`` instances each."""
    rep = Report("catch-throw")
    instances = catch_throw_instances(seed, cases, size_)
    rep.cases = len(instances)
    try:
        counts = check_catch_throw_laws(instances)
    except LawViolation as e:
        rep.violations.append(f"law {e.clause}: {pretty(e.source)} does not reach {pretty(e.expected)}")
        return rep
    rep.passed = sum(counts.values())
    rep.details["per_clause"] = dict(sorted(counts.items()))
    return rep


@_timed
def cps_typing(cases: int = 300, seed: int = 0, size_: int = 40) -> Report:
    """Translated terms are mu-free and have the translated type."""
    rep = Report("cps-typing")
    for i in range(cases):
        closed = i % 2 == 0
        env = EMPTY_ENV if closed else OPEN_ENV
        t = gen_typed(GenConfig(derive_seed(seed, i), size_, closed_only=closed), env)
        rep.cases += 1
        used = free_vars(t)
        sub_env = TypeEnv({k: v for k, v in env.lam.items() if k in used[0]},
                          {k: v for k, v in env.mu.items() if k in used[1]})
        want = cps_type(infer_term(env, t))
        c = cps_term(t, sub_env)
        if not is_mu_free(c):
            rep.violations.append(f"{pretty(t)}: translation contains mu")
            continue
        try:
            got = infer_term(cps_env(sub_env), c)
        except LmtTypeError as e:
            rep.violations.append(f"{pretty(t)}: translation ill-typed: {e}")
            continue
        if got != want:
            rep.violations.append(f"{pretty(t)}: translation has type {pretty(got)}, want {pretty(want)}")
            continue
        rep.passed += 1
    return rep


@_timed
def cps_semantics(cases: int = 200, seed: int = 0, size_: int = 40) -> Report:
    """Closed N-terms and their translations compute the same numeral."""
    rep = Report("cps-semantics")
    for i in range(cases):
        t = gen_typed(GenConfig(derive_seed(seed, i), size_, target_type=NAT))
        rep.cases += 1
        direct = as_numeral(normal_form(t))
        via = as_numeral(run_cps(t))
        if direct is None or direct != via:
            rep.violations.append(f"{pretty(t)}: direct {direct}, via translation {via}")
            continue
        rep.passed += 1
    return rep


def b_termination_report() -> Report:
    """Counts of size-checked mu-eta/mu-i steps so far in this process."""
    rep = Report("b-termination")
    rep.cases = rep.passed = sum(b_step_stats.values())
    rep.details = {str(k): v for k, v in b_step_stats.items()}
    return rep


SUITES = {
    "confluence": confluence,
    "subject-reduction": subject_reduction,
    "normal-form": normal_form_suite,
    "develop": develop_suite,
    "postpone": postpone_suite,
    "catch-throw": catch_throw_suite,
    "cps-typing": cps_typing,
    "cps-semantics": cps_semantics,
}
