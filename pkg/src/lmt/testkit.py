"""Random well-typed terms and brute-force oracles for the property suites."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .kernel import (
    HOLE, NAT, App, AppCtx, Arrow, Bound, Command, EvalContext, Lam, Mu, NRec,
    NRecCtx, Suc, SucCtx, Term, Type, Var, Zero, catch, compose, numeral, plug,
    size, throw,
)
from .reduction import successors
from .subst import subst_struct
from .typecheck import EMPTY_ENV, TypeEnv


class GenerationFailed(Exception):
    pass


class BudgetExceeded(Exception):
    pass


# ---------------------------------------------------------------------------
# Generator


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_nodes: int = 40
    arrow_depth: int = 2
    mu_budget: int = 3
    closed_only: bool = True
    target_type: Type | None = None

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be at least 1")


def random_type(rng: random.Random, depth: int) -> Type:
    if depth <= 0 or rng.random() < 0.55:
        return NAT
    return Arrow(random_type(rng, depth - 1), random_type(rng, depth - 1))


def _type_depth(ty: Type) -> int:
    if isinstance(ty, Arrow):
        return 1 + max(_type_depth(ty.dom), _type_depth(ty.cod))
    return 0


class _Gen:
    def __init__(self, cfg: GenConfig, env: TypeEnv, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.free_lam = [] if cfg.closed_only else sorted(env.lam.items())
        self.free_mu = [] if cfg.closed_only else sorted(env.mu.items())
        self.mus_left = cfg.mu_budget

    def minsize(self, ty: Type, lams: tuple) -> int:
        if self.var_choices(ty, lams):
            return 1
        if isinstance(ty, Arrow):
            return 1 + self.minsize(ty.cod, lams + (ty.dom,))
        return 1

    def var_choices(self, ty, lams) -> list[Term]:
        out: list[Term] = [Bound(i) for i, t in enumerate(reversed(lams)) if t == ty]
        out += [Var(name) for name, t in self.free_lam if t == ty]
        return out

    def minimal(self, ty, lams) -> Term:
        vs = self.var_choices(ty, lams)
        if vs:
            return self.rng.choice(vs)
        if isinstance(ty, Arrow):
            return Lam(ty.dom, self.minimal(ty.cod, lams + (ty.dom,)), self.lam_hint(lams))
        return Zero()

    def lam_hint(self, lams) -> str:
        return "xyzuvw"[len(lams) % 6]

    def arg_type(self, ty) -> Type:
        depth = max(0, self.cfg.arrow_depth - 1)
        return random_type(self.rng, depth)

    def gen(self, ty: Type, budget: int, lams: tuple, mus: tuple) -> Term:
        """A term of type ``ty`` with at most ``budget`` nodes."""
        rng = self.rng
        low = self.minsize(ty, lams)
        if budget <= low or rng.random() < 0.04:
            return self.minimal(ty, lams)
        options: list[tuple[float, str]] = []
        if self.var_choices(ty, lams):
            options.append((1.0, "var"))
        if ty == NAT:
            options += [(1.0, "num"), (1.5, "suc")]
        if isinstance(ty, Arrow):
            options.append((3.0, "lam"))
        if budget >= 3:
            options.append((2.0, "app"))
            options.append((2.0, "beta"))
        if budget >= 4 and _type_depth(ty) < self.cfg.arrow_depth + 1:
            options.append((2.0, "nrec"))
        if self.mus_left > 0 and budget >= 3:
            options.append((2.0, "catch"))
            if mus or self.free_mu:
                options.append((2.0, "throw"))
            if budget >= 4:
                options.append((1.5, "frame"))
            if budget >= 9 and self.mus_left >= 3:
                options.append((3.0, "eta"))
            if budget >= 9 and self.mus_left >= 3:
                options.append((1.0, "jump"))
        kind = _weighted(rng, options)
        match kind:
            case "var":
                return rng.choice(self.var_choices(ty, lams))
            case "num":
                n = rng.randint(0, min(3, budget - 1))
                return numeral(n)
            case "suc":
                return Suc(self.gen(NAT, budget - 1, lams, mus))
            case "lam":
                if 1 + self.minsize(ty.cod, lams + (ty.dom,)) > budget:
                    return self.minimal(ty, lams)
                body = self.gen(ty.cod, budget - 1, lams + (ty.dom,), mus)
                return Lam(ty.dom, body, self.lam_hint(lams))
            case "app":
                for _ in range(4):
                    sigma = self.arg_type(ty)
                    fn_ty = Arrow(sigma, ty)
                    need_fn, need_arg = self.minsize(fn_ty, lams), self.minsize(sigma, lams)
                    if 1 + need_fn + need_arg <= budget:
                        break
                else:
                    return self.minimal(ty, lams)
                fn_budget = rng.randint(need_fn, budget - 1 - need_arg)
                fn = self.gen(fn_ty, fn_budget, lams, mus)
                arg = self.gen(sigma, budget - 1 - size(fn), lams, mus)
                return App(fn, arg)
            case "beta":
                sigma = self.arg_type(ty)
                need_body = self.minsize(ty, lams + (sigma,))
                need_arg = self.minsize(sigma, lams)
                if 2 + need_body + need_arg > budget:
                    return self.minimal(ty, lams)
                body_budget = rng.randint(need_body, budget - 2 - need_arg)
                body = self.gen(ty, body_budget, lams + (sigma,), mus)
                arg = self.gen(sigma, budget - 2 - size(body), lams, mus)
                return App(Lam(sigma, body, self.lam_hint(lams)), arg)
            case "nrec":
                step_ty = Arrow(NAT, Arrow(ty, ty))
                need_base, need_step = self.minsize(ty, lams), self.minsize(step_ty, lams)
                if 2 + need_base + need_step > budget:
                    return self.minimal(ty, lams)
                rest = budget - 1
                base = self.gen(ty, rng.randint(need_base, max(need_base, (rest - need_step - 1) // 2)),
                                lams, mus)
                rest -= size(base)
                step = self.gen(step_ty, rng.randint(need_step, rest - 1), lams, mus)
                rest -= size(step)
                if rng.random() < 0.4:
                    scrut = numeral(rng.randint(0, min(3, rest - 1)))
                else:
                    scrut = self.gen(NAT, rest, lams, mus)
                return NRec(ty, base, step, scrut)
            case "catch" | "throw":
                return self.mu_term(kind, ty, budget, lams, mus)
            case "frame":
                return self.frame(ty, budget, lams, mus)
            case "eta":
                # F1[mu a.[a] F0[mu b. c]]: the shape complete development must see through
                return self.frame(ty, budget, lams, mus, kind="eta")
            case "jump":
                # catch d (F1[mu a.[a] F0[mu g.[d] t]]): the throw escapes an eta-redex
                self.mus_left -= 1
                return Mu(ty, Command(0, self.frame(ty, budget - 2, lams, mus + (ty,), kind="eta")), "d")
        raise AssertionError(kind)

    def eta_term(self, ty: Type, budget: int, lams: tuple, mus: tuple) -> Term:
        """``mu a.[a] F[mu g. c]`` with ``a`` unused: an eta-redex around a jumping mu."""
        if budget < 6 + self.minsize(ty, lams) or self.mus_left < 2:
            return self.minimal(ty, lams)
        self.mus_left -= 1
        kind = "selfjump" if self.rng.random() < 0.7 else None
        return Mu(ty, Command(0, self.frame(ty, budget - 2, lams, mus + (ty,), skip=1, kind=kind)), "a")

    def frame(self, ty: Type, budget: int, lams: tuple, mus: tuple, skip: int = 0,
              kind: str | None = None) -> Term:
        """A singular frame around a mu, i.e. a mu-R/mu-suc/mu-N redex."""
        rng = self.rng
        if budget < 3 + self.minsize(ty, lams):
            return self.minimal(ty, lams)
        shapes = ["app"] + (["suc", "nrec"] if ty == NAT else [])
        shape = rng.choice(shapes)
        if kind is not None and ty == NAT:
            # the cheapest frame leaves room for the nested control operators
            shape = "suc" if rng.random() < 0.7 else shape
        if kind is None:
            can_throw = len(mus) > skip or self.free_mu
            kind = "throw" if can_throw and (skip or rng.random() < 0.5) else "catch"
            if budget >= 8 and self.mus_left >= 2 and rng.random() < 0.35:
                kind = "eta"
        if shape == "suc":
            return Suc(self.mu_term(kind, NAT, budget - 1, lams, mus, skip))
        if shape == "app":
            sigma = NAT if kind is not None else self.arg_type(ty)
            need_arg = self.minsize(sigma, lams)
            if 3 + self.minsize(Arrow(sigma, ty), lams) + need_arg > budget:
                return self.minimal(ty, lams)
            fn = self.mu_term(kind, Arrow(sigma, ty), budget - 1 - need_arg, lams, mus, skip)
            return App(fn, self.gen(sigma, budget - 1 - size(fn), lams, mus))
        step_ty = Arrow(NAT, Arrow(ty, ty))
        need = self.minsize(ty, lams) + self.minsize(step_ty, lams)
        if 4 + need > budget:
            return self.minimal(ty, lams)
        base = self.minimal(ty, lams)
        need_step = self.minsize(step_ty, lams)
        scrut = self.mu_term(kind, NAT, budget - 1 - size(base) - need_step, lams, mus, skip)
        step = self.gen(step_ty, budget - 1 - size(base) - size(scrut), lams, mus)
        return NRec(ty, base, step, scrut)

    def mu_term(self, kind: str, ty: Type, budget: int, lams: tuple, mus: tuple,
                skip: int = 0) -> Term:
        """A catch (``[a]`` on its own binder) or a throw to an outer mu-variable.

        A throw never targets the ``skip`` innermost mu-variables of ``mus``.
        """
        if kind == "eta":
            return self.eta_term(ty, budget, lams, mus)
        if kind == "selfjump" and budget >= 5 + self.minsize(ty, lams) and self.mus_left >= 2:
            # catch b (F[throw t b]): a mu that is not an eta-redex
            self.mus_left -= 1
            return Mu(ty, Command(0, self.frame(ty, budget - 2, lams, mus + (ty,), kind="innermost")), "b")
        if kind == "innermost" and mus and budget >= 2 + self.minsize(mus[-1], lams):
            self.mus_left -= 1
            return Mu(ty, Command(1, self.gen(mus[-1], budget - 2, lams, mus + (ty,))), "g")
        if budget < 2 + self.minsize(ty, lams) or self.mus_left <= 0:
            return self.minimal(ty, lams)
        self.mus_left -= 1
        if kind == "catch":
            body = self.gen(ty, budget - 2, lams, mus + (ty,))
            return Mu(ty, Command(0, body), "a")
        targets = [(i + 1, t) for i, t in enumerate(reversed(mus)) if i >= skip]
        targets += list(self.free_mu)
        if not targets:
            body = self.gen(ty, budget - 2, lams, mus + (ty,))
            return Mu(ty, Command(0, body), "a")
        target, rho = self.rng.choice(targets)
        if self.minsize(rho, lams) > budget - 2:
            body = self.gen(ty, budget - 2, lams, mus + (ty,))
            return Mu(ty, Command(0, body), "a")
        body = self.gen(rho, budget - 2, lams, mus + (ty,))
        return Mu(ty, Command(target, body), "g")


def _weighted(rng: random.Random, options):
    total = sum(w for w, _ in options)
    x = rng.random() * total
    for w, kind in options:
        x -= w
        if x < 0:
            return kind
    return options[-1][1]


def gen_typed(cfg: GenConfig, env: TypeEnv = EMPTY_ENV) -> Term:
    """A random term typable in ``env``, deterministic in ``cfg.seed``.

    Binders use indices throughout; free variables come from ``env``
    unless ``cfg.closed_only`` is set.
    """
    rng = random.Random(cfg.seed)
    g = _Gen(cfg, env, rng)
    ty = cfg.target_type if cfg.target_type is not None else random_type(rng, cfg.arrow_depth)
    if g.minsize(ty, ()) > cfg.max_nodes:
        raise GenerationFailed(f"no term of the requested type fits in {cfg.max_nodes} nodes")
    budget = rng.randint(max(1, 3 * cfg.max_nodes // 4), cfg.max_nodes)
    return g.gen(ty, budget, (), ())


def derive_seed(seed: int, index: int) -> int:
    """Independent per-case seed derived from a run seed."""
    return random.Random(f"{seed}:{index}").getrandbits(64)


def gen_context(rng: random.Random, hole: Type, depth: int, max_nodes: int = 6,
                env: TypeEnv = EMPTY_ENV) -> tuple[EvalContext, Type]:
    """A random evaluation context accepting ``hole``; returns it with its result type."""
    ctx: EvalContext = HOLE
    ty = hole
    for _ in range(depth):
        choices = []
        if isinstance(ty, Arrow):
            choices.append("app")
        if ty == NAT:
            choices += ["suc", "nrec"]
        if not choices:
            break
        kind = rng.choice(choices)
        seed = rng.getrandbits(64)
        closed = not (env.lam or env.mu)
        if kind == "app":
            arg = gen_typed(GenConfig(seed, max_nodes, 1, 1, closed, ty.dom), env)
            ctx, ty = _wrap(ctx, lambda h: AppCtx(h, arg)), ty.cod
        elif kind == "suc":
            ctx = _wrap(ctx, SucCtx)
        else:
            rho = random_type(rng, 1)
            base = gen_typed(GenConfig(seed, max_nodes, 1, 1, closed, rho), env)
            step = gen_typed(GenConfig(seed + 1, max_nodes, 1, 1, closed,
                                       Arrow(NAT, Arrow(rho, rho))), env)
            ctx, ty = _wrap(ctx, lambda h: NRecCtx(rho, base, step, h)), rho
    return ctx, ty


def _wrap(ctx: EvalContext, frame) -> EvalContext:
    """Put a new outermost frame around ``ctx``."""
    return compose(frame(HOLE), ctx)


# ---------------------------------------------------------------------------
# Oracles


def oracle_normal_forms(t, budget: int = 10_000, suc_prime: bool = False) -> set:
    """Every normal form reachable from ``t``, by exhaustive search."""
    seen = {t}
    queue = deque([t])
    normals = set()
    while queue:
        u = queue.popleft()
        succ = successors(u, suc_prime)
        if not succ:
            normals.add(u)
        for v in succ:
            if v not in seen:
                if len(seen) >= budget:
                    raise BudgetExceeded(f"more than {budget} reducts")
                seen.add(v)
                queue.append(v)
    return normals


def max_reduction_length(t, budget: int = 10_000) -> int:
    """Length of the longest sequence of class-A steps starting at ``t``."""
    memo: dict = {}

    def longest(u) -> int:
        if u in memo:
            return memo[u]
        if len(memo) >= budget:
            raise BudgetExceeded(f"more than {budget} states")
        memo[u] = 0
        best = 0
        for v in successors(u, only="A"):
            best = max(best, 1 + longest(v))
        memo[u] = best
        return best

    return longest(t)


def reachable(src, dst, budget: int = 1000) -> bool | None:
    """Whether ``src`` reduces to ``dst``; ``None`` if the search ran out."""
    seen = {src}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            return True
        for v in successors(u):
            if v not in seen:
                if len(seen) >= budget:
                    return None
                seen.add(v)
                queue.append(v)
    return False


@dataclass
class PostponeReport:
    pairs: int = 0
    ok: int = 0
    exhausted: int = 0
    violations: list = field(default_factory=list)


def postpone_check(t1, budget: int = 1000) -> PostponeReport:
    """Check that each ``t1 ->B t2 ->A t3`` has ``t1 ->A t4 ->> t3`` for some ``t4``."""
    report = PostponeReport()
    advanced = successors(t1, only="A")
    for t2 in successors(t1, only="B"):
        for t3 in successors(t2, only="A"):
            report.pairs += 1
            found = _multi_reach(advanced, t3, budget)
            if found is True:
                report.ok += 1
            elif found is None:
                report.exhausted += 1
            else:
                report.violations.append((t2, t3))
    return report


def _multi_reach(sources, dst, budget) -> bool | None:
    seen = set(sources)
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        if u == dst:
            return True
        for v in successors(u):
            if v not in seen:
                if len(seen) >= budget:
                    return None
                seen.add(v)
                queue.append(v)
    return False


# ---------------------------------------------------------------------------
# Catch/throw instances


@dataclass(frozen=True)
class LawInstance:
    clause: int
    source: Term
    expected: Term
    one_step: bool


def catch_throw_instances(seed: int, per_clause: int = 50, max_nodes: int = 8) -> list[LawInstance]:
    """Instances of the seven catch/throw laws, built in named form.

    ``'a``/``'b`` are the law's mu-variables; bodies may mention them
    freely and are typed accordingly. Contexts never mention them.
    """
    rng = random.Random(seed)
    out = []
    for clause in range(1, 8):
        for _ in range(per_clause):
            out.append(_instance(clause, rng, max_nodes))
    return out


def _body(rng, ty, mu_env: dict, max_nodes) -> Term:
    env = TypeEnv({}, mu_env)
    cfg = GenConfig(rng.getrandbits(64), max_nodes, 1, 2, False, ty)
    return gen_typed(cfg, env)


def _instance(clause: int, rng: random.Random, max_nodes: int) -> LawInstance:
    rho = random_type(rng, 1)
    sigma = random_type(rng, 1)
    match clause:
        case 1:
            t = _body(rng, rho, {"a": rho}, max_nodes)
            E, out_ty = gen_context(rng, rho, rng.randint(1, 2))
            src = plug(E, catch("a", rho, t))
            dst = catch("a", out_ty, plug(E, subst_struct(t, "a", "a", E)))
            return LawInstance(1, src, dst, False)
        case 2:
            t = _body(rng, sigma, {"a": sigma}, max_nodes)
            E, out_ty = gen_context(rng, rho, rng.randint(1, 2))
            src = plug(E, throw(t, "a", rho))
            return LawInstance(2, src, throw(t, "a", out_ty), False)
        case 3:
            t = _body(rng, rho, {"a": rho, "b": rho}, max_nodes)
            src = catch("a", rho, catch("b", rho, t))
            dst = catch("a", rho, subst_struct(t, "b", "a", HOLE))
            return LawInstance(3, src, dst, True)
        case 4:
            t = _body(rng, sigma, {"b": sigma}, max_nodes)
            src = throw(throw(t, "b", rho), "a", rho)
            return LawInstance(4, src, throw(t, "b", rho), True)
        case 5:
            t = _body(rng, rho, {"a": rho, "b": rho}, max_nodes)
            src = throw(catch("b", rho, t), "a", sigma)
            dst = throw(subst_struct(t, "b", "a", HOLE), "a", sigma)
            return LawInstance(5, src, dst, True)
        case 6:
            t = _body(rng, rho, {"a": rho}, max_nodes)
            src = catch("a", rho, throw(t, "a", rho))
            return LawInstance(6, src, catch("a", rho, t), True)
        case 7:
            t = _body(rng, rho, {"b": rho}, max_nodes)
            return LawInstance(7, catch("a", rho, t), t, True)
    raise ValueError(clause)


__all__ = [
    "GenConfig", "GenerationFailed", "BudgetExceeded", "gen_typed", "random_type",
    "derive_seed", "gen_context", "oracle_normal_forms", "max_reduction_length",
    "reachable", "postpone_check", "PostponeReport", "LawInstance",
    "catch_throw_instances",
]
