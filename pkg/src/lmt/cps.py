"""Continuation-passing translation into the mu-free fragment.

Types go through the negative translation ``rho* = ((rho~ -> B) -> B)``
with ``N~ = N`` and ``(s -> t)~ = s* -> t*``, where ``B`` is the answer
type (``N`` by default). A free mu-variable ``a`` becomes the lambda
variable ``k'a``; the apostrophe keeps these names apart from anything
the parser can produce.
"""

from __future__ import annotations

import itertools
from typing import Mapping

from .kernel import (
    HOLE, NAT, App, Arrow, Bound, Command, Lam, Mu, NRec, Suc, Term, Type, Var, Zero,
    close_lam, free_vars, is_mu_free,
)
from .reduction import DEFAULT_MAX_STEPS, normal_form
from .subst import instantiate, mu_eliminate_binder
from .typecheck import EMPTY_ENV, LmtTypeError, TypeEnv, infer_term


class UnmappedMuVar(Exception):
    pass


class NonLambdaT(Exception):
    pass


class ArityMismatch(Exception):
    pass


class NotClosed(Exception):
    pass


def neg(ty: Type, bottom: Type = NAT) -> Type:
    return Arrow(ty, bottom)


def cps_type_tilde(ty: Type, bottom: Type = NAT) -> Type:
    if isinstance(ty, Arrow):
        return Arrow(cps_type(ty.dom, bottom), cps_type(ty.cod, bottom))
    return NAT


def cps_type(ty: Type, bottom: Type = NAT) -> Type:
    return neg(neg(cps_type_tilde(ty, bottom), bottom), bottom)


def cont_name(alpha: str) -> str:
    """The reserved lambda-variable standing for free mu-variable ``alpha``."""
    return f"k'{alpha}"


_fresh_ids = itertools.count()


def _fresh(hint: str) -> str:
    return f"{hint}#{next(_fresh_ids)}"


def _lam(name: str, annot: Type, body: Term, hint: str) -> Lam:
    return Lam(annot, close_lam(body, name), hint)


def natneg(t: Term, bottom: Type = NAT) -> Term:
    """``\\k. k t``."""
    k = _fresh("k")
    return _lam(k, neg(NAT, bottom), App(Var(k), t), "k")


def cps_app(t: Term, r: Term, dom: Type, cod: Type, bottom: Type = NAT) -> Term:
    """``\\k. t (\\l. l r k)`` for ``t : (dom -> cod)*`` and ``r : dom*``.

    The argument types are needed only for the binder annotations.
    """
    k, l = _fresh("k"), _fresh("l")
    inner = _lam(l, cps_type_tilde(Arrow(dom, cod), bottom),
                 App(App(Var(l), r), Var(k)), "l")
    return _lam(k, neg(cps_type_tilde(cod, bottom), bottom), App(t, inner), "k")


def cps_nrec_step(step_star: Term, annot: Type, bottom: Type = NAT) -> Term:
    """``\\x:N. \\p. (s* @ natneg x) @ p``, the step of a translated ``nrec``."""
    x, p = _fresh("x"), _fresh("p")
    applied = cps_app(cps_app(step_star, natneg(Var(x), bottom), NAT, Arrow(annot, annot), bottom),
                      Var(p), annot, annot, bottom)
    return _lam(x, NAT, _lam(p, cps_type(annot, bottom), applied, "p"), "x")


class _Translator:
    def __init__(self, env: TypeEnv, conts: Mapping[str, str], bottom: Type):
        self.bottom = bottom
        self.lam_types: dict[str, Type] = dict(env.lam)
        self.mu_types: dict[str, Type] = dict(env.mu)
        self.conts: dict[str, str] = dict(conts)

    def negt(self, ty: Type) -> Type:
        return neg(cps_type_tilde(ty, self.bottom), self.bottom)

    def term(self, t: Term) -> tuple[Term, Type]:
        """Translation of ``t`` together with the source type of ``t``."""
        B = self.bottom
        match t:
            case Var(name):
                ty = self.lam_types.get(name)
                if ty is None:
                    raise LmtTypeError(f"free variable {name} has no type")
                k = _fresh("k")
                return _lam(k, self.negt(ty), App(t, Var(k)), "k"), ty
            case Lam(annot, body, hint):
                x = _fresh(hint or "x")
                self.lam_types[x] = annot
                body_star, cod = self.term(instantiate(body, Var(x)))
                ty = Arrow(annot, cod)
                k = _fresh("k")
                fn = _lam(x, cps_type(annot, B), body_star, hint or "x")
                return _lam(k, self.negt(ty), App(Var(k), fn), "k"), ty
            case App(fn, arg):
                fn_star, fty = self.term(fn)
                arg_star, _ = self.term(arg)
                if not isinstance(fty, Arrow):
                    raise LmtTypeError("application of a non-function")
                return cps_app(fn_star, arg_star, fty.dom, fty.cod, B), fty.cod
            case Zero():
                return natneg(t, B), NAT
            case Suc(arg):
                arg_star, _ = self.term(arg)
                k, l = _fresh("k"), _fresh("l")
                cont = _lam(l, NAT, App(Var(k), Suc(Var(l))), "l")
                return _lam(k, self.negt(NAT), App(arg_star, cont), "k"), NAT
            case NRec(annot, base, step, scrut):
                base_star, _ = self.term(base)
                step_star, _ = self.term(step)
                scrut_star, _ = self.term(scrut)
                step2 = cps_nrec_step(step_star, annot, B)
                k, l = _fresh("k"), _fresh("l")
                rec = App(NRec(cps_type(annot, B), base_star, step2, Var(l)), Var(k))
                body = App(scrut_star, _lam(l, NAT, rec, "l"))
                return _lam(k, self.negt(annot), body, "k"), annot
            case Mu(annot, body, hint):
                alpha = _fresh(hint or "a")
                k = _fresh("k")
                self.mu_types[alpha] = annot
                self.conts[alpha] = k
                c_star = self.command(mu_eliminate_binder(body, alpha, HOLE))
                return _lam(k, self.negt(annot), c_star, "k"), annot
            case Bound():
                raise LmtTypeError("dangling bound variable")
        raise TypeError(f"not a term: {t!r}")

    def command(self, c: Command) -> Term:
        if c.target not in self.conts:
            raise UnmappedMuVar(f"no continuation variable for '{c.target}")
        body_star, _ = self.term(c.body)
        return App(body_star, Var(self.conts[c.target]))


def default_conts(x) -> dict[str, str]:
    return {a: cont_name(a) for a in free_vars(x)[1]}


def cps_term(x, env: TypeEnv = EMPTY_ENV, conts: Mapping[str, str] | None = None,
             bottom: Type = NAT) -> Term:
    """The CPS translation of a term or command.

    ``env`` types the free variables of ``x``; ``conts`` maps its free
    mu-variables to continuation variables (defaults to ``k'a`` for
    ``'a``). A command translates to a term of type ``bottom``.
    """
    conts = default_conts(x) if conts is None else conts
    missing = free_vars(x)[1] - set(conts)
    if missing:
        raise UnmappedMuVar(f"no continuation variable for {sorted(missing)}")
    tr = _Translator(env, conts, bottom)
    if isinstance(x, Command):
        return tr.command(x)
    return tr.term(x)[0]


def cps_env(env: TypeEnv, conts: Mapping[str, str] | None = None,
            bottom: Type = NAT) -> TypeEnv:
    """Typing environment for translated terms: ``x : rho*`` and ``k_a : not rho~``."""
    conts = conts or {a: cont_name(a) for a in env.mu}
    lam = {x: cps_type(ty, bottom) for x, ty in env.lam.items()}
    for alpha, ty in env.mu.items():
        if alpha in conts:
            lam[conts[alpha]] = neg(cps_type_tilde(ty, bottom), bottom)
    return TypeEnv(lam, {})


def lt_normalize(t: Term, max_steps: int = DEFAULT_MAX_STEPS) -> Term:
    """Normal form in the mu-free fragment, with nrec unfolding on any successor."""
    if not is_mu_free(t):
        raise NonLambdaT("term contains a mu-abstraction or a command")
    return normal_form(t, max_steps=max_steps, suc_prime=True)


def represent(t: Term, arity: int) -> Term:
    """A mu-free term of type ``N^n -> N`` computing the same function as ``t``."""
    if free_vars(t) != (frozenset(), frozenset()):
        raise NotClosed("represent needs a closed term")
    ty = infer_term(EMPTY_ENV, t)
    for _ in range(arity):
        if not (isinstance(ty, Arrow) and ty.dom == NAT):
            raise ArityMismatch(f"term does not take {arity} numeric arguments")
        ty = ty.cod
    if ty != NAT:
        raise ArityMismatch(f"term of arity {arity} does not return N")
    names = [_fresh("x") for _ in range(arity)]
    body = cps_term(t)
    res_ty = infer_term(EMPTY_ENV, t)
    for x in names:
        body = cps_app(body, natneg(Var(x)), NAT, res_ty.cod)
        res_ty = res_ty.cod
    body = App(body, Lam(NAT, Bound(0), "x"))
    for x in reversed(names):
        body = _lam(x, NAT, body, "x")
    return body


def run_cps(t: Term, max_steps: int = DEFAULT_MAX_STEPS) -> Term:
    """Normal form of ``t* (\\x:N. x)`` for a closed term ``t : N``."""
    return lt_normalize(App(cps_term(t), Lam(NAT, Bound(0), "x")), max_steps)


__all__ = [
    "cps_type", "cps_type_tilde", "neg", "cps_app", "natneg", "cps_term", "cps_env",
    "cps_nrec_step", "represent", "lt_normalize", "run_cps", "cont_name", "UnmappedMuVar",
    "NonLambdaT", "ArityMismatch", "NotClosed",
]
