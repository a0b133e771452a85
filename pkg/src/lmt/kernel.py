"""Abstract syntax of the calculus and the index bookkeeping it needs.

Bound variables are de Bruijn indices, free variables are names. The
two sorts live in separate index spaces: a ``Bound`` index counts only
enclosing lambdas, a bound command target counts only enclosing mus.
Binders carry a ``hint`` used for printing; hints never take part in
equality, so ``==`` on terms is alpha-equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Nat:
    def __repr__(self) -> str:
        return "N"


@dataclass(frozen=True)
class Arrow:
    dom: Type
    cod: Type

    def __repr__(self) -> str:
        return f"({self.dom!r} -> {self.cod!r})"


Type = Union[Nat, Arrow]
NAT = Nat()


def arrows(*tys: Type) -> Type:
    """Right-nested arrow type: ``arrows(a, b, c)`` is ``a -> b -> c``."""
    result = tys[-1]
    for ty in reversed(tys[:-1]):
        result = Arrow(ty, result)
    return result


# ---------------------------------------------------------------------------
# Terms and commands


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    """Free lambda-variable."""
    name: str


@dataclass(frozen=True)
class Bound(Term):
    """Lambda-variable bound by the ``index``-th enclosing ``Lam``."""
    index: int


@dataclass(frozen=True)
class Lam(Term):
    annot: Type
    body: Term
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Mu(Term):
    annot: Type
    body: Command
    hint: str = field(default="a", compare=False)


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Suc(Term):
    arg: Term


@dataclass(frozen=True)
class NRec(Term):
    annot: Type
    base: Term
    step: Term
    scrutinee: Term


# A command target is either a bound index (counting enclosing ``Mu``s)
# or the name of a free mu-variable.
Target = Union[int, str]


@dataclass(frozen=True)
class Command:
    target: Target
    body: Term


ZERO = Zero()
Expr = Union[Term, Command]


# ---------------------------------------------------------------------------
# Evaluation contexts and eta-contexts


class EvalContext:
    __slots__ = ()


@dataclass(frozen=True)
class Hole(EvalContext):
    pass


@dataclass(frozen=True)
class AppCtx(EvalContext):
    inner: EvalContext
    arg: Term


@dataclass(frozen=True)
class SucCtx(EvalContext):
    inner: EvalContext


@dataclass(frozen=True)
class NRecCtx(EvalContext):
    annot: Type
    base: Term
    step: Term
    inner: EvalContext


HOLE = Hole()


@dataclass(frozen=True)
class EtaFrame:
    """``outer[mu a:annot. [a] inner]`` where ``a`` is unused by ``inner``.

    ``inner`` is stored at the level of ``outer``: it cannot mention the
    frame's own binder, so the side condition holds by construction and
    plugging shifts it under the binder.
    """
    outer: EvalContext
    annot: Type
    inner: EtaContext
    hint: str = field(default="a", compare=False)


EtaContext = Union[Hole, EtaFrame]


def is_singular(ctx: EvalContext) -> bool:
    return not isinstance(ctx, Hole) and isinstance(ctx.inner, Hole)


def plug(ctx: EvalContext, t: Term) -> Term:
    match ctx:
        case Hole():
            return t
        case AppCtx(inner, arg):
            return App(plug(inner, t), arg)
        case SucCtx(inner):
            return Suc(plug(inner, t))
        case NRecCtx(annot, base, step, inner):
            return NRec(annot, base, step, plug(inner, t))
    raise TypeError(f"not a context: {ctx!r}")


def compose(outer: EvalContext, inner: EvalContext) -> EvalContext:
    """The context whose plugging is ``plug(outer, plug(inner, .))``."""
    match outer:
        case Hole():
            return inner
        case AppCtx(e, arg):
            return AppCtx(compose(e, inner), arg)
        case SucCtx(e):
            return SucCtx(compose(e, inner))
        case NRecCtx(annot, base, step, e):
            return NRecCtx(annot, base, step, compose(e, inner))
    raise TypeError(f"not a context: {outer!r}")


def plug_eta(ctx: EtaContext, t: Term) -> Term:
    match ctx:
        case Hole():
            return t
        case EtaFrame(outer, annot, inner, hint):
            body = shift(plug_eta(inner, t), dm=1)
            return plug(outer, Mu(annot, Command(0, body), hint))
    raise TypeError(f"not an eta-context: {ctx!r}")


def spine(t: Term) -> tuple[EvalContext, Term]:
    """Split ``t`` as ``E[head]`` with ``head`` not an evaluation frame.

    The head is a variable, ``Zero``, a ``Lam`` or a ``Mu``.
    """
    frames = []
    while True:
        match t:
            case App(fn, arg):
                frames.append(("app", arg))
                t = fn
            case Suc(arg):
                frames.append(("suc", None))
                t = arg
            case NRec(annot, base, step, scrut):
                frames.append(("nrec", (annot, base, step)))
                t = scrut
            case _:
                break
    ctx: EvalContext = HOLE
    for kind, data in reversed(frames):
        if kind == "app":
            ctx = AppCtx(ctx, data)
        elif kind == "suc":
            ctx = SucCtx(ctx)
        else:
            ctx = NRecCtx(*data, ctx)
    return ctx, t


# ---------------------------------------------------------------------------
# Numerals and values


def numeral(n: int) -> Term:
    t: Term = ZERO
    for _ in range(n):
        t = Suc(t)
    return t


def as_numeral(t: Term) -> int | None:
    n = 0
    while isinstance(t, Suc):
        t = t.arg
        n += 1
    return n if isinstance(t, Zero) else None


def is_numeral(t: Term) -> bool:
    return as_numeral(t) is not None


def is_value(t: Term) -> bool:
    while isinstance(t, Suc):
        t = t.arg
    return isinstance(t, (Zero, Lam))


# ---------------------------------------------------------------------------
# Traversal helpers


def children(x) -> tuple:
    match x:
        case Lam(_, body):
            return (body,)
        case App(fn, arg):
            return (fn, arg)
        case Mu(_, body):
            return (body,)
        case Suc(arg):
            return (arg,)
        case NRec(_, base, step, scrut):
            return (base, step, scrut)
        case Command(_, body):
            return (body,)
    return ()


def with_children(x, kids: tuple):
    match x:
        case Lam(annot, _, hint):
            return Lam(annot, kids[0], hint)
        case App():
            return App(kids[0], kids[1])
        case Mu(annot, _, hint):
            return Mu(annot, kids[0], hint)
        case Suc():
            return Suc(kids[0])
        case NRec(annot):
            return NRec(annot, kids[0], kids[1], kids[2])
        case Command(target):
            return Command(target, kids[0])
    return x


def subterm_at(x, path) -> Expr:
    for i in path:
        x = children(x)[i]
    return x


def replace_at(x, path, new) -> Expr:
    if not path:
        return new
    kids = list(children(x))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(x, tuple(kids))


def size(x) -> int:
    """Number of term and command nodes."""
    total = 0
    stack = [x]
    while stack:
        node = stack.pop()
        total += 1
        stack.extend(children(node))
    return total


def subexpressions(x, path=()) -> Iterator[tuple[tuple, Expr]]:
    """Pre-order walk yielding ``(path, node)``."""
    yield path, x
    for i, kid in enumerate(children(x)):
        yield from subexpressions(kid, path + (i,))


def is_mu_free(x) -> bool:
    return not any(isinstance(n, (Mu, Command)) for _, n in subexpressions(x))


# ---------------------------------------------------------------------------
# Free variables


def free_vars(x) -> tuple[frozenset[str], frozenset[str]]:
    """``(FV, FCV)``: names of free lambda- and mu-variables."""
    lam: set[str] = set()
    mu: set[str] = set()
    stack = [x]
    while stack:
        node = stack.pop()
        match node:
            case Var(name):
                lam.add(name)
            case Command(target, _) if isinstance(target, str):
                mu.add(target)
        stack.extend(_all_children(node))
    return frozenset(lam), frozenset(mu)


def _all_children(x) -> tuple:
    match x:
        case AppCtx(inner, arg):
            return (inner, arg)
        case SucCtx(inner):
            return (inner,)
        case NRecCtx(_, base, step, inner):
            return (base, step, inner)
        case EtaFrame(outer, _, inner):
            return (outer, inner)
    return children(x)


def mu_index_free(x, index: int = 0) -> bool:
    """Whether bound mu-index ``index`` (relative to ``x``) occurs in ``x``."""
    match x:
        case Command(target, body):
            return target == index or mu_index_free(body, index)
        case Mu(_, body):
            return mu_index_free(body, index + 1)
        case EtaFrame(outer, _, inner):
            return mu_index_free(outer, index) or mu_index_free(inner, index)
    return any(mu_index_free(k, index) for k in _all_children(x))


def lam_index_free(x, index: int = 0) -> bool:
    match x:
        case Bound(i):
            return i == index
        case Lam(_, body):
            return lam_index_free(body, index + 1)
    return any(lam_index_free(k, index) for k in _all_children(x))


def is_locally_closed(x) -> bool:
    return _max_dangling(x, 0, 0) == (False, False)


def _max_dangling(x, dl, dm):
    lam = mu = False
    match x:
        case Bound(i):
            return i >= dl, False
        case Command(target, body):
            mu = isinstance(target, int) and target >= dm
            l2, m2 = _max_dangling(body, dl, dm)
            return l2, mu or m2
        case Lam(_, body):
            return _max_dangling(body, dl + 1, dm)
        case Mu(_, body):
            return _max_dangling(body, dl, dm + 1)
    for k in _all_children(x):
        l2, m2 = _max_dangling(k, dl, dm)
        lam, mu = lam or l2, mu or m2
    return lam, mu


# ---------------------------------------------------------------------------
# Shifting


def shift(x, dl: int = 0, dm: int = 0, cl: int = 0, cm: int = 0):
    """Add ``dl``/``dm`` to dangling lambda/mu indices at or above the cutoffs."""
    if dl == 0 and dm == 0:
        return x
    match x:
        case Bound(i):
            return Bound(i + dl) if i >= cl else x
        case Var() | Zero():
            return x
        case Lam(annot, body, hint):
            return Lam(annot, shift(body, dl, dm, cl + 1, cm), hint)
        case App(fn, arg):
            return App(shift(fn, dl, dm, cl, cm), shift(arg, dl, dm, cl, cm))
        case Mu(annot, body, hint):
            return Mu(annot, shift(body, dl, dm, cl, cm + 1), hint)
        case Suc(arg):
            return Suc(shift(arg, dl, dm, cl, cm))
        case NRec(annot, base, step, scrut):
            return NRec(annot, shift(base, dl, dm, cl, cm),
                        shift(step, dl, dm, cl, cm), shift(scrut, dl, dm, cl, cm))
        case Command(target, body):
            if isinstance(target, int) and target >= cm:
                target += dm
            return Command(target, shift(body, dl, dm, cl, cm))
        case Hole():
            return x
        case AppCtx(inner, arg):
            return AppCtx(shift(inner, dl, dm, cl, cm), shift(arg, dl, dm, cl, cm))
        case SucCtx(inner):
            return SucCtx(shift(inner, dl, dm, cl, cm))
        case NRecCtx(annot, base, step, inner):
            return NRecCtx(annot, shift(base, dl, dm, cl, cm),
                           shift(step, dl, dm, cl, cm), shift(inner, dl, dm, cl, cm))
    raise TypeError(f"cannot shift {x!r}")


def shift_target(target: Target, dm: int) -> Target:
    return target + dm if isinstance(target, int) else target


# ---------------------------------------------------------------------------
# Named construction: build with free names, then bind them.


def close_lam(x, name: str, depth: int = 0):
    """Turn free ``Var(name)`` into the index of a new binder above ``x``."""
    match x:
        case Var(n):
            return Bound(depth) if n == name else x
        case Bound(i):
            return Bound(i + 1) if i >= depth else x
        case Lam(annot, body, hint):
            return Lam(annot, close_lam(body, name, depth + 1), hint)
        case Hole() | Zero():
            return x
    return _rebuild(x, lambda k: close_lam(k, name, depth))


def close_mu(x, name: str, depth: int = 0):
    """Turn free mu-name ``name`` into the index of a new binder above ``x``."""
    match x:
        case Command(target, body):
            if target == name:
                target = depth
            elif isinstance(target, int) and target >= depth:
                target += 1
            return Command(target, close_mu(body, name, depth))
        case Mu(annot, body, hint):
            return Mu(annot, close_mu(body, name, depth + 1), hint)
        case Var() | Bound() | Zero() | Hole():
            return x
    return _rebuild(x, lambda k: close_mu(k, name, depth))


def _rebuild(x, f):
    match x:
        case AppCtx(inner, arg):
            return AppCtx(f(inner), f(arg))
        case SucCtx(inner):
            return SucCtx(f(inner))
        case NRecCtx(annot, base, step, inner):
            return NRecCtx(annot, f(base), f(step), f(inner))
    return with_children(x, tuple(f(k) for k in children(x)))


def lam(name: str, annot: Type, body: Term) -> Lam:
    return Lam(annot, close_lam(body, name), name)


def mu(name: str, annot: Type, body: Command) -> Mu:
    return Mu(annot, close_mu(body, name), name)


def cmd(target: str, body: Term) -> Command:
    return Command(target, body)


def catch(name: str, annot: Type, body: Term) -> Mu:
    """``catch_a t``, i.e. ``mu a. [a] t``."""
    return mu(name, annot, Command(name, body))


def throw(body: Term, target: str, annot: Type, hint: str = "g") -> Mu:
    """``throw t b``: a mu whose binder is unused, passing ``t`` to ``b``."""
    return Mu(annot, shift(Command(target, body), dm=1), hint)


def apps(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def alpha_eq(a, b) -> bool:
    """Alpha-equivalence; binder hints never take part in equality."""
    return a == b
