"""Capture-avoiding lambda-substitution and structural substitution.

Every function here works on terms, commands and evaluation contexts
alike and keeps the sort of its input. Capture avoidance comes from the
index representation: a substituted term is shifted as it moves under
binders, so nothing is ever renamed.
"""

from __future__ import annotations

from .kernel import (
    App, AppCtx, Bound, Command, EvalContext, Hole, HOLE, Lam, Mu, NRec,
    NRecCtx, Suc, SucCtx, Target, Term, Var, Zero, plug, shift, shift_target,
)


def _map(x, f_term, f_cmd, dl: int, dm: int):
    """Rebuild ``x`` applying the callbacks at leaves and commands.

    ``f_term(node, dl, dm)`` may return a replacement for a variable node
    or ``None`` to recurse; ``f_cmd(cmd, dl, dm, body)`` builds the new
    command given its already-mapped body.
    """
    def go(x, dl, dm):
        match x:
            case Var() | Bound():
                out = f_term(x, dl, dm)
                return x if out is None else out
            case Zero() | Hole():
                return x
            case Lam(annot, body, hint):
                return Lam(annot, go(body, dl + 1, dm), hint)
            case App(fn, arg):
                return App(go(fn, dl, dm), go(arg, dl, dm))
            case Mu(annot, body, hint):
                return Mu(annot, go(body, dl, dm + 1), hint)
            case Suc(arg):
                return Suc(go(arg, dl, dm))
            case NRec(annot, base, step, scrut):
                return NRec(annot, go(base, dl, dm), go(step, dl, dm), go(scrut, dl, dm))
            case Command(_, body):
                return f_cmd(x, dl, dm, go(body, dl, dm))
            case AppCtx(inner, arg):
                return AppCtx(go(inner, dl, dm), go(arg, dl, dm))
            case SucCtx(inner):
                return SucCtx(go(inner, dl, dm))
            case NRecCtx(annot, base, step, inner):
                return NRecCtx(annot, go(base, dl, dm), go(step, dl, dm), go(inner, dl, dm))
        raise TypeError(f"cannot substitute into {x!r}")
    return go(x, dl, dm)


def _keep_cmd(c, dl, dm, body):
    return Command(c.target, body)


def instantiate(body, r: Term):
    """Fill lambda-index 0 of ``body`` with ``r`` and drop that binder.

    This is the contractum of a beta-redex ``(Lam body) r``.
    """
    def leaf(x, dl, dm):
        if isinstance(x, Bound):
            if x.index == dl:
                return shift(r, dl=dl, dm=dm)
            if x.index > dl:
                return Bound(x.index - 1)
        return None
    return _map(body, leaf, _keep_cmd, 0, 0)


def subst_lam(x, name: str, r: Term):
    """``x[name := r]`` for a free lambda-variable ``name``."""
    def leaf(v, dl, dm):
        if isinstance(v, Var) and v.name == name:
            return shift(r, dl=dl, dm=dm)
        return None
    return _map(x, leaf, _keep_cmd, 0, 0)


def struct_subst(x, alpha: Target, beta: Target, ctx: EvalContext):
    """``x[alpha := beta ctx]``.

    Every command ``[alpha] q`` becomes ``[beta] ctx[q']`` with ``q'`` the
    recursive result. ``alpha`` and ``beta`` are either free names or
    indices counted from the top of ``x``; ``ctx`` lives at that level too
    and is shifted as it is carried under binders.
    """
    def command(c, dl, dm, body):
        t = c.target
        hit = t == alpha if isinstance(alpha, str) else t == alpha + dm
        if not hit:
            return Command(t, body)
        if isinstance(ctx, Hole):
            return Command(shift_target(beta, dm), body)
        return Command(shift_target(beta, dm), plug(shift(ctx, dl=dl, dm=dm), body))
    return _map(x, lambda v, dl, dm: None, command, 0, 0)


def subst_struct(x, alpha: str, beta: str, ctx: EvalContext):
    """Public form of structural substitution on free mu-names."""
    return struct_subst(x, alpha, beta, ctx)


def rename_mu(x, alpha: str, beta: str):
    """``x[alpha := beta []]``: redirect every ``[alpha]`` to ``[beta]``."""
    return struct_subst(x, alpha, beta, HOLE)


def unshift_mu(x):
    """Remove an unused mu-binder directly above ``x``."""
    return shift(x, dm=-1)


def mu_replace_binder(c: Command, ctx: EvalContext) -> Command:
    """Body of ``mu a. c[a := a ctx]`` given ``c`` under that binder.

    ``ctx`` is expressed outside the binder.
    """
    return struct_subst(c, 0, 0, shift(ctx, dm=1))


def mu_eliminate_binder(c: Command, target: Target, ctx: EvalContext) -> Command:
    """``c[b := target ctx]`` where ``b`` is the mu-binder directly above ``c``.

    The binder disappears; ``target`` and ``ctx`` are expressed at the
    level outside it.
    """
    inside = struct_subst(c, 0, shift_target(target, 1), shift(ctx, dm=1))
    return unshift_mu(inside)
