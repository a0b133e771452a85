"""Type inference for terms, commands and evaluation contexts.

Binders carry their types, so inference is syntax-directed and the type
of a well-typed term is unique. Errors carry the path (child indices)
of the offending subexpression.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .kernel import (
    NAT, App, AppCtx, Arrow, Bound, Command, EvalContext, Hole, Lam, Mu,
    NRec, NRecCtx, Suc, SucCtx, Type, Var, Zero,
)


class LmtTypeError(Exception):
    def __init__(self, message: str, path: tuple = ()):
        super().__init__(message)
        self.path = tuple(path)

    def __str__(self) -> str:
        where = "/".join(map(str, self.path)) or "root"
        return f"{type(self).__name__} at {where}: {self.args[0]}"


class UnboundLamVar(LmtTypeError): pass
class UnboundMuVar(LmtTypeError): pass
class ArrowExpected(LmtTypeError): pass
class ArgMismatch(LmtTypeError): pass
class NatExpected(LmtTypeError): pass
class AnnotMismatch(LmtTypeError): pass
class PassivateMismatch(LmtTypeError): pass
class HoleTypeMismatch(LmtTypeError): pass


@dataclass(frozen=True)
class TypeEnv:
    """Types of free lambda-variables (``lam``) and mu-variables (``mu``)."""
    lam: Mapping[str, Type] = field(default_factory=dict)
    mu: Mapping[str, Type] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lam", MappingProxyType(dict(self.lam)))
        object.__setattr__(self, "mu", MappingProxyType(dict(self.mu)))

    def with_lam(self, name: str, ty: Type) -> TypeEnv:
        return TypeEnv({**self.lam, name: ty}, self.mu)

    def with_mu(self, name: str, ty: Type) -> TypeEnv:
        return TypeEnv(self.lam, {**self.mu, name: ty})

    def __hash__(self):
        return hash((tuple(sorted(self.lam.items(), key=str)),
                     tuple(sorted(self.mu.items(), key=str))))

    def __eq__(self, other):
        return (isinstance(other, TypeEnv) and dict(self.lam) == dict(other.lam)
                and dict(self.mu) == dict(other.mu))


EMPTY_ENV = TypeEnv()


def _show(ty: Type) -> str:
    from .syntax import pretty_type
    return pretty_type(ty)


class _Checker:
    def __init__(self, env: TypeEnv, lams=(), mus=()):
        self.env = env
        # innermost binder last
        self.lams: list[Type] = list(lams)
        self.mus: list[Type] = list(mus)

    def term(self, t, path) -> Type:
        match t:
            case Var(name):
                if name not in self.env.lam:
                    raise UnboundLamVar(f"free variable {name} has no type", path)
                return self.env.lam[name]
            case Bound(i):
                if i >= len(self.lams):
                    raise UnboundLamVar(f"dangling index {i}", path)
                return self.lams[-1 - i]
            case Lam(annot, body):
                self.lams.append(annot)
                try:
                    return Arrow(annot, self.term(body, path + (0,)))
                finally:
                    self.lams.pop()
            case App(fn, arg):
                fty = self.term(fn, path + (0,))
                if not isinstance(fty, Arrow):
                    raise ArrowExpected(f"applying a term of type {_show(fty)}", path + (0,))
                aty = self.term(arg, path + (1,))
                if aty != fty.dom:
                    raise ArgMismatch(
                        f"argument has type {_show(aty)}, expected {_show(fty.dom)}", path + (1,))
                return fty.cod
            case Mu(annot, body):
                self.mus.append(annot)
                try:
                    self.command(body, path + (0,))
                finally:
                    self.mus.pop()
                return annot
            case Zero():
                return NAT
            case Suc(arg):
                self.expect_nat(arg, path + (0,))
                return NAT
            case NRec(annot, base, step, scrut):
                self.nrec_parts(annot, base, step, path)
                self.expect_nat(scrut, path + (2,))
                return annot
        raise LmtTypeError(f"not a term: {t!r}", path)

    def nrec_parts(self, annot, base, step, path):
        bty = self.term(base, path + (0,))
        if bty != annot:
            raise AnnotMismatch(
                f"nrec base has type {_show(bty)}, annotation says {_show(annot)}", path + (0,))
        want = Arrow(NAT, Arrow(annot, annot))
        sty = self.term(step, path + (1,))
        if sty != want:
            raise AnnotMismatch(
                f"nrec step has type {_show(sty)}, expected {_show(want)}", path + (1,))

    def expect_nat(self, t, path):
        ty = self.term(t, path)
        if ty != NAT:
            raise NatExpected(f"expected N, got {_show(ty)}", path)

    def command(self, c: Command, path) -> None:
        target = c.target
        if isinstance(target, int):
            if target >= len(self.mus):
                raise UnboundMuVar(f"dangling mu-index {target}", path)
            want = self.mus[-1 - target]
        else:
            if target not in self.env.mu:
                raise UnboundMuVar(f"free mu-variable '{target} has no type", path)
            want = self.env.mu[target]
        got = self.term(c.body, path + (0,))
        if got != want:
            raise PassivateMismatch(
                f"passing {_show(got)} to a continuation of type {_show(want)}", path)

    def context(self, ctx: EvalContext, hole: Type, path) -> Type:
        match ctx:
            case Hole():
                return hole
            case AppCtx(inner, arg):
                fty = self.context(inner, hole, path + (0,))
                if not isinstance(fty, Arrow):
                    raise ArrowExpected(f"applying a hole of type {_show(fty)}", path + (0,))
                aty = self.term(arg, path + (1,))
                if aty != fty.dom:
                    raise ArgMismatch(
                        f"argument has type {_show(aty)}, expected {_show(fty.dom)}", path + (1,))
                return fty.cod
            case SucCtx(inner):
                if self.context(inner, hole, path + (0,)) != NAT:
                    raise HoleTypeMismatch("suc frame around a non-N hole", path)
                return NAT
            case NRecCtx(annot, base, step, inner):
                self.nrec_parts(annot, base, step, path)
                if self.context(inner, hole, path + (2,)) != NAT:
                    raise HoleTypeMismatch("nrec scrutinee frame around a non-N hole", path)
                return annot
        raise LmtTypeError(f"not a context: {ctx!r}", path)


def infer_term(env: TypeEnv, t, lams=(), mus=()) -> Type:
    """The unique type of ``t`` in ``env``.

    ``lams``/``mus`` type any dangling indices, outermost binder first.
    """
    return _Checker(env, lams, mus).term(t, ())


def check_command(env: TypeEnv, c: Command, lams=(), mus=()) -> None:
    _Checker(env, lams, mus).command(c, ())


def infer_context(env: TypeEnv, ctx: EvalContext, hole: Type) -> Type:
    return _Checker(env).context(ctx, hole, ())


def type_of(env: TypeEnv, x) -> Type | None:
    """Type of a term, ``None`` for a well-typed command; raises otherwise."""
    if isinstance(x, Command):
        check_command(env, x)
        return None
    return infer_term(env, x)


def well_typed(env: TypeEnv, x) -> bool:
    try:
        type_of(env, x)
    except LmtTypeError:
        return False
    return True
