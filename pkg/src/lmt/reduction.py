"""One-step reduction, strategies, normalization and joinability search.

Rule order at a node is fixed and redexes are enumerated in pre-order
over paths, so traces are reproducible.
"""

from __future__ import annotations

import enum
import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from .kernel import (
    HOLE, NAT, App, AppCtx, Arrow, Command, EvalContext, Expr, Lam, Mu, NRec,
    NRecCtx, Suc, SucCtx, Term, Type, Zero, as_numeral, children, is_numeral,
    mu_index_free, replace_at, size,
)
from .subst import instantiate, mu_eliminate_binder, mu_replace_binder, unshift_mu


class RuleTag(enum.Enum):
    Beta = "beta"
    MuSuc = "mu-suc"
    MuR = "mu-R"
    MuEta = "mu-eta"
    MuI = "mu-i"
    NRecZero = "nrec-0"
    NRecSuc = "nrec-suc"
    MuNat = "mu-N"

    def __str__(self) -> str:
        return self.value


B_RULES = frozenset({RuleTag.MuEta, RuleTag.MuI})


def classify(rule: RuleTag) -> str:
    return "B" if rule in B_RULES else "A"


class StepBudgetExceeded(Exception):
    def __init__(self, steps: int, term):
        super().__init__(f"no normal form within {steps} steps")
        self.steps = steps
        self.term = term


class BTerminationViolation(AssertionError):
    pass


# Every mu-eta/mu-i contraction the engine performs is checked to shrink
# the redex; this counts how many were checked.
b_step_stats: Counter = Counter()


@dataclass(frozen=True)
class Redex:
    path: tuple
    rule: RuleTag
    result: Expr

    def apply(self, subject: Expr) -> Expr:
        return replace_at(subject, self.path, self.result)


def _frame_type(ctx: EvalContext, ty: Type) -> Type:
    """Annotation for the mu that absorbs a singular frame around type ``ty``."""
    match ctx:
        case AppCtx():
            return ty.cod if isinstance(ty, Arrow) else ty
        case SucCtx():
            return NAT
        case NRecCtx(annot):
            return annot
    return ty


def absorb(ctx: EvalContext, m: Mu) -> Mu:
    """``E[mu a. c] -> mu a. c[a := a E]`` for a singular ``E``."""
    return Mu(_frame_type(ctx, m.annot), mu_replace_binder(m.body, ctx), m.hint)


def _check_shrinks(rule, before, after):
    b_step_stats[rule] += 1
    if size(after) >= size(before):
        raise BTerminationViolation(
            f"{rule} step did not shrink: {size(before)} -> {size(after)}")


def root_step(x: Expr, suc_prime: bool = False) -> list[tuple[RuleTag, Expr]]:
    """All rule instances firing at the root of ``x``.

    With ``suc_prime`` the nrec successor rule fires on any ``S t`` rather
    than only on numerals; that variant is not confluent and exists only
    to reproduce the counterexample.
    """
    out: list[tuple[RuleTag, Expr]] = []
    match x:
        case App(Lam(_, body), arg):
            out.append((RuleTag.Beta, instantiate(body, arg)))
        case App(Mu() as m, arg):
            out.append((RuleTag.MuR, absorb(AppCtx(HOLE, arg), m)))
        case Suc(Mu() as m):
            out.append((RuleTag.MuSuc, absorb(SucCtx(HOLE), m)))
        case Mu(_, Command(0, body)) if not mu_index_free(body, 0):
            result = unshift_mu(body)
            _check_shrinks(RuleTag.MuEta, x, result)
            out.append((RuleTag.MuEta, result))
        case NRec(_, base, _, Zero()):
            out.append((RuleTag.NRecZero, base))
        case NRec(annot, base, step, Suc(pred)) if suc_prime or is_numeral(pred):
            out.append((RuleTag.NRecSuc, App(App(step, pred), NRec(annot, base, step, pred))))
        case NRec(annot, base, step, Mu() as m):
            out.append((RuleTag.MuNat, absorb(NRecCtx(annot, base, step, HOLE), m)))
        case Command(target, Mu(_, inner)):
            result = mu_eliminate_binder(inner, target, HOLE)
            _check_shrinks(RuleTag.MuI, x, result)
            out.append((RuleTag.MuI, result))
    return out


def iter_redexes(x: Expr, suc_prime: bool = False, path: tuple = ()) -> Iterator[Redex]:
    """Lazily enumerate every one-step reduct, pre-order over paths."""
    for rule, result in root_step(x, suc_prime):
        yield Redex(path, rule, result)
    for i, kid in enumerate(children(x)):
        yield from iter_redexes(kid, suc_prime, path + (i,))


def reducts(x: Expr, suc_prime: bool = False) -> list[Redex]:
    return list(iter_redexes(x, suc_prime))


def successors(x: Expr, suc_prime: bool = False, only: str | None = None) -> list[Expr]:
    """Distinct one-step reducts; ``only`` restricts to class ``"A"`` or ``"B"``."""
    seen = {}
    for r in iter_redexes(x, suc_prime):
        if only is None or classify(r.rule) == only:
            t = r.apply(x)
            seen.setdefault(t, t)
    return list(seen)


def is_normal(x: Expr, suc_prime: bool = False) -> bool:
    return next(iter_redexes(x, suc_prime), None) is None


# ---------------------------------------------------------------------------
# Strategies


def parse_strategy(text: str) -> tuple[str, int | None]:
    if text in ("lo", "leftmost-outermost"):
        return "lo", None
    if text.startswith("rand:"):
        return "rand", int(text[5:])
    raise ValueError(f"unknown strategy {text!r} (use 'lo' or 'rand:SEED')")


DEFAULT_MAX_STEPS = 100_000


def normalize(t: Expr, strategy: str = "lo", max_steps: int = DEFAULT_MAX_STEPS,
              suc_prime: bool = False, trace: bool = True) -> tuple[Expr, list[Redex]]:
    """Reduce until no redex remains.

    ``strategy`` is ``"lo"`` (leftmost-outermost) or ``"rand:SEED"``.
    Raises ``StepBudgetExceeded`` when ``max_steps`` contractions do not
    reach a normal form.
    """
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    kind, seed = parse_strategy(strategy)
    rng = random.Random(seed)
    steps: list[Redex] = []
    count = 0
    while True:
        if kind == "lo":
            redex = next(iter_redexes(t, suc_prime), None)
        else:
            options = reducts(t, suc_prime)
            redex = rng.choice(options) if options else None
        if redex is None:
            return t, steps
        if count >= max_steps:
            raise StepBudgetExceeded(max_steps, t)
        t = redex.apply(t)
        count += 1
        if trace:
            steps.append(redex)


def replay(t: Expr, trace: list[Redex]) -> Expr:
    for r in trace:
        t = r.apply(t)
    return t


def normal_form(t: Expr, **kw) -> Expr:
    return normalize(t, trace=False, **kw)[0]


def evaluate_numeral(t: Term, **kw) -> int | None:
    return as_numeral(normal_form(t, **kw))


# ---------------------------------------------------------------------------
# Joinability


def join_search(a: Expr, b: Expr, budget: int, max_states: int = 10_000,
                suc_prime: bool = False) -> Expr | None:
    """A common reduct of ``a`` and ``b`` within ``budget`` steps of each.

    Both sides are explored breadth-first, one level at a time. When
    several common reducts appear at once the smallest is returned.
    """
    seen_a, seen_b = {a: 0}, {b: 0}
    front_a, front_b = [a], [b]

    def meet():
        common = [t for t in seen_a if t in seen_b]
        return min(common, key=lambda t: (size(t), repr(t))) if common else None

    found = meet()
    for _ in range(budget):
        if found is not None:
            return found
        grew = False
        for seen, front in ((seen_a, front_a), (seen_b, front_b)):
            nxt = []
            for t in front:
                for s in successors(t, suc_prime):
                    if s not in seen and len(seen) < max_states:
                        seen[s] = 0
                        nxt.append(s)
                        grew = True
            front[:] = nxt
        found = meet()
        if not grew:
            break
    return found


# ---------------------------------------------------------------------------
# Catch/throw laws


class LawViolation(AssertionError):
    def __init__(self, clause: int, source, expected):
        super().__init__(f"catch/throw law {clause} fails")
        self.clause = clause
        self.source = source
        self.expected = expected


def check_catch_throw_laws(instances, budget: int = 10_000) -> Counter:
    """Verify each instance; returns the number checked per clause.

    Instances are ``LawInstance`` values. A one-step law must be witnessed
    by a single contraction, a multi-step law by any reduction sequence
    found within ``budget`` states.
    """
    checked: Counter = Counter()
    for inst in instances:
        if inst.one_step:
            ok = inst.expected in successors(inst.source)
        else:
            ok = _reaches(inst.source, inst.expected, budget)
        if not ok:
            raise LawViolation(inst.clause, inst.source, inst.expected)
        checked[inst.clause] += 1
    return checked


def _reaches(src, dst, budget: int) -> bool:
    seen = {src}
    frontier = [src]
    while frontier:
        if dst in frontier:
            return True
        nxt = []
        for u in frontier:
            for v in successors(u):
                if v not in seen and len(seen) < budget:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return False
