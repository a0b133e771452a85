"""Command-line interface: ``lmt check|norm|dev|cps|fuzz|join``.

Exit status is 0 on success, 1 for a type error or a failed property,
2 for parse, file and usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cps import NonLambdaT, cps_env, cps_term, cps_type, lt_normalize
from .develop import classify_shape, complete_dev
from .kernel import NAT, App, Bound, Command, Lam, as_numeral, free_vars
from .properties import SUITES, b_termination_report
from .reduction import (
    DEFAULT_MAX_STEPS, StepBudgetExceeded, join_search, normalize, parse_strategy,
)
from .syntax import ParseError, elaborate, main_decl, parse_program, parse_type, pretty
from .testkit import BudgetExceeded, oracle_normal_forms
from .typecheck import LmtTypeError, TypeEnv

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Out:
    """Collects human-readable lines or one JSON document."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.doc: dict = {}

    def line(self, text: str = "") -> None:
        if not self.as_json:
            print(text)

    def set(self, **kw) -> None:
        self.doc.update(kw)

    def finish(self, code: int) -> int:
        if self.as_json:
            self.doc.setdefault("exit_code", code)
            print(json.dumps(self.doc, indent=2))
        return code


def _load(path: str):
    """Main declaration of a file, elaborated, with its type and environment."""
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e
    decls = parse_program(source)
    d = main_decl(decls)
    body, ty, env = elaborate(d.body)
    return d.name, body, ty, env, decls


def _show_env(env: TypeEnv) -> dict:
    out = {x: pretty(t) for x, t in sorted(env.lam.items())}
    out.update({"'" + a: pretty(t) for a, t in sorted(env.mu.items())})
    return out


def cmd_check(args, out: _Out) -> int:
    with open(args.file, encoding="utf-8") as fh:
        decls = parse_program(fh.read())
    results = []
    for d in decls:
        _, ty, env = elaborate(d.body)
        shown = "command" if ty is None else pretty(ty)
        free = _show_env(env)
        results.append({"name": d.name, "type": shown, "free": free})
        suffix = "" if not free else "   [" + ", ".join(f"{k} : {v}" for k, v in free.items()) + "]"
        out.line(f"{d.name} : {shown}{suffix}")
    out.set(ok=True, declarations=results)
    return EXIT_OK


def cmd_norm(args, out: _Out) -> int:
    name, t, ty, env, _ = _load(args.file)
    try:
        parse_strategy(args.strategy)
    except ValueError as e:
        raise UsageError(str(e)) from e
    if args.oracle:
        try:
            nfs = oracle_normal_forms(t, args.max_steps, suc_prime=args.unsafe_suc_prime)
        except BudgetExceeded as e:
            out.line(f"oracle: {e}")
            out.set(ok=False, error=str(e))
            return EXIT_FAIL
        shown = sorted(pretty(n) for n in nfs)
        for s in shown:
            out.line(s)
        out.set(ok=True, declaration=name, normal_forms=shown)
        return EXIT_OK
    try:
        nf, trace = normalize(t, args.strategy, args.max_steps, args.unsafe_suc_prime)
    except StepBudgetExceeded as e:
        out.line(f"no normal form within {e.steps} steps")
        out.set(ok=False, error=str(e))
        return EXIT_FAIL
    steps = []
    cur = t
    for i, r in enumerate(trace, 1):
        cur = r.apply(cur)
        where = "/".join(map(str, r.path)) or "root"
        steps.append({"rule": str(r.rule), "path": list(r.path), "term": pretty(cur)})
        if args.trace:
            out.line(f"{i:>4}  {str(r.rule):<8} at {where:<12} {pretty(cur)}")
    out.line(pretty(nf))
    out.set(ok=True, declaration=name, normal_form=pretty(nf), numeral=as_numeral(nf)
            if not isinstance(nf, Command) else None, steps=len(trace))
    if args.trace:
        out.set(trace=steps)
    return EXIT_OK


def cmd_dev(args, out: _Out) -> int:
    name, t, ty, env, _ = _load(args.file)
    dev = complete_dev(t)
    shape = type(classify_shape(t)).__name__ if not isinstance(t, Command) else "command"
    out.line(pretty(dev))
    out.set(ok=True, declaration=name, shape=shape, development=pretty(dev))
    return EXIT_OK


def cmd_cps(args, out: _Out) -> int:
    name, t, ty, env, _ = _load(args.file)
    try:
        bottom = parse_type(args.bottom)
    except ParseError as e:
        raise UsageError(f"--bottom: {e}") from e
    translated = cps_term(t, env, bottom=bottom)
    out.line(pretty(translated))
    out.set(declaration=name, translation=pretty(translated))
    code = EXIT_OK
    if args.check_type:
        got = cps_term_type(translated, env, bottom)
        want = None if ty is None else cps_type(ty, bottom)
        expected = pretty(bottom) if want is None else pretty(want)
        ok = got == (bottom if want is None else want)
        out.line(f"type: {pretty(got)}  (expected {expected}) {'ok' if ok else 'MISMATCH'}")
        out.set(type=pretty(got), expected_type=expected, type_ok=ok)
        code = EXIT_OK if ok else EXIT_FAIL
    if args.run:
        if ty != NAT or bottom != NAT or free_vars(t) != (frozenset(), frozenset()):
            raise UsageError("--run needs a closed term of type N and --bottom=N")
        try:
            value = lt_normalize(App(translated, Lam(NAT, Bound(0), "x")))
        except (NonLambdaT, StepBudgetExceeded) as e:
            out.line(f"run failed: {e}")
            out.set(ok=False, error=str(e))
            return EXIT_FAIL
        out.line(f"value: {pretty(value)}")
        out.set(value=as_numeral(value))
    out.set(ok=code == EXIT_OK)
    return code


def cps_term_type(translated, env: TypeEnv, bottom):
    from .typecheck import infer_term
    return infer_term(cps_env(env, bottom=bottom), translated)


def cmd_fuzz(args, out: _Out) -> int:
    suite = SUITES[args.suite]
    kw = {"cases": args.cases, "seed": args.seed}
    if args.size is not None:
        kw["size_"] = args.size
    report = suite(**kw)
    out.line(report.summary())
    for v in report.violations[:10]:
        out.line(f"  violation: {v}")
    b = b_termination_report()
    out.line(f"size-checked mu-eta/mu-i steps: {b.cases}")
    out.set(report=report.to_json(), b_steps_checked=b.cases, ok=report.ok)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_join(args, out: _Out) -> int:
    _, a, _, _, _ = _load(args.file1)
    _, b, _, _, _ = _load(args.file2)
    common = join_search(a, b, args.budget)
    if common is None:
        out.line(f"no common reduct within {args.budget} steps")
        out.set(ok=False, joined=False)
        return EXIT_FAIL
    out.line(pretty(common))
    out.set(ok=True, joined=True, common_reduct=pretty(common))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    json_flag = argparse.ArgumentParser(add_help=False)
    json_flag.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                           help="print one JSON document instead of text")
    p = argparse.ArgumentParser(prog="lmt", parents=[json_flag],
                                description="Lambda-mu calculus with primitive recursion.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[json_flag], help="type-check every declaration")
    s.add_argument("file")
    s.set_defaults(handler=cmd_check)

    s = sub.add_parser("norm", parents=[json_flag], help="normalize the main declaration")
    s.add_argument("file")
    s.add_argument("--trace", action="store_true", help="print every step")
    s.add_argument("--strategy", default="lo", help="lo or rand:SEED")
    s.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    s.add_argument("--unsafe-suc-prime", action="store_true",
                   help="let nrec unfold on any successor (not confluent)")
    s.add_argument("--oracle", action="store_true",
                   help="list every reachable normal form (exhaustive search)")
    s.set_defaults(handler=cmd_norm)

    s = sub.add_parser("dev", parents=[json_flag], help="complete development of the main declaration")
    s.add_argument("file")
    s.set_defaults(handler=cmd_dev)

    s = sub.add_parser("cps", parents=[json_flag], help="CPS-translate the main declaration")
    s.add_argument("file")
    s.add_argument("--bottom", default="N", help="answer type (default N)")
    s.add_argument("--check-type", action="store_true")
    s.add_argument("--run", action="store_true", help="evaluate the translation applied to the identity")
    s.set_defaults(handler=cmd_cps)

    s = sub.add_parser("fuzz", parents=[json_flag], help="run a property suite on generated terms")
    s.add_argument("suite", choices=sorted(SUITES))
    s.add_argument("--cases", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--size", type=int, default=None, help="maximum node count")
    s.set_defaults(handler=cmd_fuzz)

    s = sub.add_parser("join", parents=[json_flag], help="search for a common reduct")
    s.add_argument("file1")
    s.add_argument("file2")
    s.add_argument("--budget", type=int, default=10)
    s.set_defaults(handler=cmd_join)
    return p


def main(argv: list[str] | None = None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Out(getattr(args, "json", False))
    if args.command == "norm" and args.max_steps <= 0:
        parser.error("--max-steps must be positive")
    try:
        return out.finish(args.handler(args, out))
    except (ParseError, UsageError) as e:
        return _fail(out, EXIT_USAGE, f"error: {e}")
    except OSError as e:
        return _fail(out, EXIT_USAGE, f"error: {e}")
    except LmtTypeError as e:
        return _fail(out, EXIT_FAIL, f"type error: {e}")


def _fail(out: _Out, code: int, message: str) -> int:
    if out.as_json:
        out.doc = {"ok": False, "error": message, "exit_code": code}
        return out.finish(code)
    print(message, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
