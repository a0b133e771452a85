"""Parallel reduction and complete developments.

``par_reducts`` enumerates every parallel reduct of an expression;
``complete_dev`` contracts all redexes at once, seeing through chains of
nested mu-eta redexes (eta-contexts). ``dev_closes`` checks that every
parallel reduct of a term parallel-reduces to its complete development,
which is the key step towards confluence.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .kernel import (
    HOLE, NAT, App, AppCtx, Arrow, Bound, Command, EtaContext, EtaFrame,
    EvalContext, Expr, Hole, Lam, Mu, NRec, NRecCtx, Suc, SucCtx, Term, Type,
    Var, Zero, as_numeral, compose, is_numeral, mu_index_free, plug,
    spine,
)
from .subst import instantiate, mu_eliminate_binder, mu_replace_binder, unshift_mu


# ---------------------------------------------------------------------------
# Term shapes


@dataclass(frozen=True)
class VarShape:
    term: Term


@dataclass(frozen=True)
class NumeralV:
    value: int


@dataclass(frozen=True)
class LamV:
    term: Lam


@dataclass(frozen=True)
class BetaRedex:
    lam: Lam
    arg: Term


@dataclass(frozen=True)
class NRecNumRedex:
    term: NRec


@dataclass(frozen=True)
class EtaWrappedStable:
    """``H[core]`` with ``H`` a non-empty eta-context and ``core`` headed by a value or variable."""
    H: EtaContext
    core: Term


@dataclass(frozen=True)
class EtaWrappedMu:
    """``H[E[mu b. body]]`` where the mu is not itself a mu-eta redex."""
    H: EtaContext
    E: EvalContext
    annot: Type
    body: Command
    hint: str = "b"


@dataclass(frozen=True)
class OtherApp:
    term: App


@dataclass(frozen=True)
class OtherNRec:
    term: NRec


@dataclass(frozen=True)
class OtherSuc:
    term: Suc


Shape = (VarShape | NumeralV | LamV | BetaRedex | NRecNumRedex | EtaWrappedStable
         | EtaWrappedMu | OtherApp | OtherNRec | OtherSuc)


def is_eta_redex(t: Term) -> bool:
    return (isinstance(t, Mu) and t.body.target == 0
            and not mu_index_free(t.body.body, 0))


def classify_shape(t: Term) -> Shape:
    """The unique shape of ``t``; eta-chains are peeled as far as possible."""
    match t:
        case Var() | Bound():
            return VarShape(t)
        case Lam():
            return LamV(t)
        case App(Lam() as f, arg):
            return BetaRedex(f, arg)
        case NRec(_, _, _, scrut) if is_numeral(scrut):
            return NRecNumRedex(t)
    n = as_numeral(t)
    if n is not None:
        return NumeralV(n)

    frames: list[tuple[EvalContext, Type, str]] = []
    cur = t
    while True:
        E, head = spine(cur)
        if is_eta_redex(head):
            frames.append((E, head.annot, head.hint))
            cur = unshift_mu(head.body.body)
            continue
        if isinstance(head, Mu):
            return EtaWrappedMu(_eta_context(frames), E, head.annot, head.body, head.hint)
        if frames:
            return EtaWrappedStable(_eta_context(frames), cur)
        break
    match t:
        case App():
            return OtherApp(t)
        case NRec():
            return OtherNRec(t)
        case Suc():
            return OtherSuc(t)
    raise TypeError(f"unclassifiable term {t!r}")


def _eta_context(frames) -> EtaContext:
    H: EtaContext = HOLE
    for E, annot, hint in reversed(frames):
        H = EtaFrame(E, annot, H, hint)
    return H


def context_type(ctx: EvalContext, hole: Type) -> Type:
    """Type of ``ctx[t]`` for ``t : hole``, read off the annotations alone."""
    match ctx:
        case Hole():
            return hole
        case AppCtx(inner, _):
            fty = context_type(inner, hole)
            return fty.cod if isinstance(fty, Arrow) else fty
        case SucCtx():
            return NAT
        case NRecCtx(annot):
            return annot
    raise TypeError(f"not a context: {ctx!r}")


# ---------------------------------------------------------------------------
# Complete development


def complete_dev(x):
    """The complete development of a term, command, context or eta-context."""
    match x:
        case Command():
            return _dev_command(x)
        case Hole():
            return x
        case AppCtx(inner, arg):
            return AppCtx(complete_dev(inner), _dev_term(arg))
        case SucCtx(inner):
            return SucCtx(complete_dev(inner))
        case NRecCtx(annot, base, step, inner):
            return NRecCtx(annot, _dev_term(base), _dev_term(step), complete_dev(inner))
        case EtaFrame():
            return _dev_eta(x)
    return _dev_term(x)


def _dev_eta(H: EtaContext) -> EvalContext:
    if isinstance(H, Hole):
        return HOLE
    return compose(complete_dev(H.outer), _dev_eta(H.inner))


@lru_cache(maxsize=50_000)
def _dev_term(t: Term) -> Term:
    shape = classify_shape(t)
    match shape:
        case VarShape(v):
            return v
        case NumeralV():
            return t
        case LamV(Lam(annot, body, hint)):
            return Lam(annot, _dev_term(body), hint)
        case BetaRedex(Lam(_, body), arg):
            return instantiate(_dev_term(body), _dev_term(arg))
        case NRecNumRedex(NRec(annot, base, step, scrut)):
            if isinstance(scrut, Zero):
                return _dev_term(base)
            pred = scrut.arg
            s = _dev_term(step)
            return App(App(s, pred), NRec(annot, _dev_term(base), s, pred))
        case EtaWrappedStable(H, core):
            return plug(_dev_eta(H), _dev_term(core))
        case EtaWrappedMu(H, E, annot, body, hint):
            ctx = compose(_dev_eta(H), complete_dev(E))
            return Mu(context_type(ctx, annot), mu_replace_binder(_dev_command(body), ctx), hint)
        case OtherApp(App(fn, arg)):
            return App(_dev_term(fn), _dev_term(arg))
        case OtherNRec(NRec(annot, base, step, scrut)):
            return NRec(annot, _dev_term(base), _dev_term(step), _dev_term(scrut))
        case OtherSuc(Suc(arg)):
            return Suc(_dev_term(arg))
    raise TypeError(f"unexpected shape {shape!r}")


def _dev_command(c: Command) -> Command:
    E, head = spine(c.body)
    if isinstance(head, Mu):
        return mu_eliminate_binder(_dev_command(head.body), c.target, complete_dev(E))
    return Command(c.target, _dev_term(c.body))


# ---------------------------------------------------------------------------
# Parallel reduction


def par_reducts(x) -> frozenset:
    """Every ``x'`` with ``x => x'``; always contains ``x`` itself."""
    if isinstance(x, Command):
        return _par_command(x)
    if isinstance(x, (Hole, AppCtx, SucCtx, NRecCtx)):
        return _par_context(x)
    return _par_term(x)


@lru_cache(maxsize=50_000)
def _par_term(t: Term) -> frozenset:
    out: set[Term] = set()
    match t:
        case Var() | Bound() | Zero():
            out.add(t)
        case Lam(annot, body, hint):
            out.update(Lam(annot, b, hint) for b in _par_term(body))
        case App(fn, arg):
            args = _par_term(arg)
            out.update(App(f, a) for f in _par_term(fn) for a in args)
            if isinstance(fn, Lam):
                out.update(instantiate(b, a) for b in _par_term(fn.body) for a in args)
        case Suc(arg):
            out.update(Suc(a) for a in _par_term(arg))
        case NRec(annot, base, step, scrut):
            bases, steps = _par_term(base), _par_term(step)
            out.update(NRec(annot, b, s, u)
                       for b in bases for s in steps for u in _par_term(scrut))
            if isinstance(scrut, Zero):
                out.update(bases)
            elif isinstance(scrut, Suc) and is_numeral(scrut.arg):
                n = scrut.arg
                out.update(App(App(s, n), NRec(annot, b, s, n)) for b in bases for s in steps)
    E, head = spine(t)
    if isinstance(head, Mu):
        # context-jumping rule; with an empty context this is plain compatibility
        cmds = _par_command(head.body)
        for E2 in _par_context(E):
            ty = context_type(E2, head.annot)
            out.update(Mu(ty, mu_replace_binder(c, E2), head.hint) for c in cmds)
    if is_eta_redex(t):
        out.update(unshift_mu(b) for b in _par_term(t.body.body))
    return frozenset(out)


@lru_cache(maxsize=50_000)
def _par_command(c: Command) -> frozenset:
    out = {Command(c.target, b) for b in _par_term(c.body)}
    E, head = spine(c.body)
    if isinstance(head, Mu):
        cmds = _par_command(head.body)
        out.update(mu_eliminate_binder(c2, c.target, E2)
                   for c2 in cmds for E2 in _par_context(E))
    return frozenset(out)


@lru_cache(maxsize=50_000)
def _par_context(E: EvalContext) -> frozenset:
    match E:
        case Hole():
            return frozenset({E})
        case AppCtx(inner, arg):
            return frozenset(AppCtx(i, a) for i in _par_context(inner) for a in _par_term(arg))
        case SucCtx(inner):
            return frozenset(SucCtx(i) for i in _par_context(inner))
        case NRecCtx(annot, base, step, inner):
            return frozenset(NRecCtx(annot, b, s, i) for b in _par_term(base)
                             for s in _par_term(step) for i in _par_context(inner))
    raise TypeError(f"not a context: {E!r}")


def clear_caches() -> None:
    for f in (_dev_term, _par_term, _par_command, _par_context):
        f.cache_clear()


# ---------------------------------------------------------------------------
# The closing property


class PropertyViolation(AssertionError):
    def __init__(self, message: str, subject=None, witness=None):
        super().__init__(message)
        self.subject = subject
        self.witness = witness


@dataclass(frozen=True)
class DevReport:
    subject: Expr
    development: Expr
    reducts_checked: int


def dev_closes(x: Expr) -> DevReport:
    """Check ``x' => dev(x)`` for every parallel reduct ``x'`` of ``x``."""
    dev = complete_dev(x)
    reducts = par_reducts(x)
    for r in sorted(reducts, key=repr):
        if dev not in par_reducts(r):
            raise PropertyViolation("parallel reduct does not reach the complete development",
                                    subject=x, witness=r)
    return DevReport(x, dev, len(reducts))


__all__ = [
    "VarShape", "NumeralV", "LamV", "BetaRedex", "NRecNumRedex", "EtaWrappedStable",
    "EtaWrappedMu", "OtherApp", "OtherNRec", "OtherSuc", "Shape", "classify_shape",
    "complete_dev", "par_reducts", "dev_closes", "DevReport", "PropertyViolation",
    "context_type", "is_eta_redex", "clear_caches",
]
