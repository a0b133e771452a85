"""Concrete syntax: parser, annotation elaboration and pretty-printer.

    def two = S (S 0);
    def add = \\n:N. \\m:N. nrec{N}(m; \\x:N. \\y:N. S y; n);
    def main = catch 'a add two (throw 1 'a);

Lambda-variables are plain identifiers, mu-variables carry a leading
apostrophe. ``catch`` and ``throw`` leave their mu annotation implicit;
it is recovered by unification once the whole declaration is parsed.
A name bound by an earlier ``def`` is replaced by its body, textually:
free variables of the body are captured by binders at the use site.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .kernel import (
    NAT, App, Arrow, Bound, Command, Lam, Mu, Nat, NRec, Suc, Term, Type, Var,
    Zero, as_numeral, cmd, free_vars, lam, mu, mu_index_free, numeral, throw,
    catch,
)
from .typecheck import (
    ArgMismatch, ArrowExpected, AnnotMismatch, LmtTypeError, NatExpected,
    PassivateMismatch, TypeEnv, infer_term,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class DuplicateDefinition(ParseError):
    pass


KEYWORDS = {"def", "mu", "catch", "throw", "nrec", "S", "N"}
IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

_TOKEN = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<arrow>->)
  | (?P<num>\d+)
  | (?P<mident>'[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[\\λ:.;=(){}\[\]])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            if text == "λ":
                text = "\\"
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        for i, ch in enumerate(text):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Type metavariables used while elaborating catch/throw annotations


_meta_ids = itertools.count()


@dataclass(frozen=True)
class Meta:
    id: int


def fresh_meta() -> Meta:
    return Meta(next(_meta_ids))


@dataclass(frozen=True)
class Decl:
    name: str
    body: Term | Command


class _Parser:
    def __init__(self, source: str, defs: dict | None = None):
        self.tokens = tokenize(source)
        self.pos = 0
        self.defs: dict[str, Term | Command] = dict(defs or {})
        self.lam_scope: list[str] = []
        self.throw_names = itertools.count()

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        return ParseError(f"{message}, found {found!r}", tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("sym", "kw", "arrow"):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            raise self.error(f"expected {text!r}")
        return tok

    def ident(self) -> str:
        tok = self.tok
        if tok.kind != "ident":
            raise self.error("expected an identifier")
        self.pos += 1
        return tok.text

    def mident(self) -> str:
        tok = self.tok
        if tok.kind != "mident":
            raise self.error("expected a mu-variable like 'a")
        self.pos += 1
        return tok.text[1:]

    # -- declarations --------------------------------------------------------

    def file(self) -> list[Decl]:
        decls = []
        while self.tok.kind != "eof":
            start = self.expect("def")
            name = self.ident()
            if name in self.defs:
                raise DuplicateDefinition(f"{name} is already defined", start.line, start.col)
            self.expect("=")
            body = self.command() if self.tok.text == "[" else self.term()
            self.expect(";")
            self.defs[name] = body
            decls.append(Decl(name, body))
        return decls

    # -- types ---------------------------------------------------------------

    def type(self) -> Type:
        left = self.atype()
        if self.accept("->"):
            return Arrow(left, self.type())
        return left

    def atype(self) -> Type:
        if self.accept("N"):
            return NAT
        if self.accept("("):
            ty = self.type()
            self.expect(")")
            return ty
        raise self.error("expected a type")

    # -- terms ---------------------------------------------------------------

    def term(self) -> Term:
        if self.accept("\\"):
            name = self.ident()
            self.expect(":")
            ty = self.type()
            self.expect(".")
            self.lam_scope.append(name)
            try:
                body = self.term()
            finally:
                self.lam_scope.pop()
            return lam(name, ty, body)
        if self.accept("mu"):
            name = self.mident()
            self.expect(":")
            ty = self.type()
            self.expect(".")
            return mu(name, ty, self.command())
        if self.accept("catch"):
            name = self.mident()
            return catch(name, fresh_meta(), self.aterm())
        if self.accept("throw"):
            body = self.aterm()
            target = self.mident()
            return throw(body, target, fresh_meta())
        return self.app_chain()

    def command(self) -> Command:
        self.expect("[")
        target = self.mident()
        self.expect("]")
        return cmd(target, self.term())

    def app_chain(self) -> Term:
        if self.accept("S"):
            head = Suc(self.aterm())
        elif self.accept("nrec"):
            self.expect("{")
            ty = self.type()
            self.expect("}")
            self.expect("(")
            base = self.term()
            self.expect(";")
            step = self.term()
            self.expect(";")
            scrut = self.term()
            self.expect(")")
            head = NRec(ty, base, step, scrut)
        else:
            head = self.aterm()
        while self.starts_aterm():
            head = App(head, self.aterm())
        return head

    def starts_aterm(self) -> bool:
        tok = self.tok
        return tok.kind in ("ident", "num") or (tok.kind == "sym" and tok.text == "(")

    def aterm(self) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.pos += 1
            return numeral(int(tok.text))
        if tok.kind == "ident":
            self.pos += 1
            name = tok.text
            if name not in self.lam_scope and name in self.defs:
                body = self.defs[name]
                if isinstance(body, Command):
                    raise self.error(f"{name} is a command, not a term", tok)
                return _refresh_metas(body)
            return Var(name)
        if self.accept("("):
            t = self.term()
            self.expect(")")
            return t
        raise self.error("expected a term")


def _refresh_metas(t):
    """Copy of ``t`` with fresh metavariables, so inlined copies stay independent."""
    table: dict[Meta, Meta] = {}

    def ty(a):
        if isinstance(a, Meta):
            return table.setdefault(a, fresh_meta())
        return a

    def go(x):
        match x:
            case Lam(annot, body, hint):
                return Lam(ty(annot), go(body), hint)
            case Mu(annot, body, hint):
                return Mu(ty(annot), go(body), hint)
            case NRec(annot, base, step, scrut):
                return NRec(annot, go(base), go(step), go(scrut))
            case App(fn, arg):
                return App(go(fn), go(arg))
            case Suc(arg):
                return Suc(go(arg))
            case Command(target, body):
                return Command(target, go(body))
        return x
    return go(t)


# ---------------------------------------------------------------------------
# Elaboration


class _Unifier:
    def __init__(self):
        self.solution: dict[Meta, object] = {}

    def walk(self, ty):
        while isinstance(ty, Meta) and ty in self.solution:
            ty = self.solution[ty]
        return ty

    def resolve(self, ty) -> Type:
        ty = self.walk(ty)
        if isinstance(ty, Meta):
            return NAT
        if isinstance(ty, Arrow):
            return Arrow(self.resolve(ty.dom), self.resolve(ty.cod))
        return ty

    def occurs(self, m, ty) -> bool:
        ty = self.walk(ty)
        if ty == m:
            return True
        return isinstance(ty, Arrow) and (self.occurs(m, ty.dom) or self.occurs(m, ty.cod))

    def unify(self, a, b) -> bool:
        a, b = self.walk(a), self.walk(b)
        if a == b:
            return True
        if isinstance(a, Meta):
            if self.occurs(a, b):
                return False
            self.solution[a] = b
            return True
        if isinstance(b, Meta):
            return self.unify(b, a)
        if isinstance(a, Arrow) and isinstance(b, Arrow):
            return self.unify(a.dom, b.dom) and self.unify(a.cod, b.cod)
        return False


class _Elaborator:
    def __init__(self, env: TypeEnv):
        self.u = _Unifier()
        self.free_lam: dict[str, object] = dict(env.lam)
        self.free_mu: dict[str, object] = dict(env.mu)

    def show(self, ty) -> str:
        return pretty_type(self.u.resolve(ty))

    def need(self, got, want, exc, what, path):
        if not self.u.unify(got, want):
            raise exc(f"{what} has type {self.show(got)}, expected {self.show(want)}", path)

    def term(self, t, lams, mus, path):
        match t:
            case Var(name):
                return self.free_lam.setdefault(name, fresh_meta())
            case Bound(i):
                return lams[-1 - i]
            case Lam(annot, body):
                return Arrow(annot, self.term(body, lams + [annot], mus, path + (0,)))
            case App(fn, arg):
                fty = self.term(fn, lams, mus, path + (0,))
                aty = self.term(arg, lams, mus, path + (1,))
                res = fresh_meta()
                fw = self.u.walk(fty)
                if not isinstance(fw, (Arrow, Meta)):
                    raise ArrowExpected(f"applying a term of type {self.show(fty)}", path + (0,))
                if isinstance(fw, Arrow):
                    self.need(aty, fw.dom, ArgMismatch, "argument", path + (1,))
                    return fw.cod
                self.u.unify(fw, Arrow(aty, res))
                return res
            case Mu(annot, body):
                self.command(body, lams, mus + [annot], path + (0,))
                return annot
            case Zero():
                return NAT
            case Suc(arg):
                self.need(self.term(arg, lams, mus, path + (0,)), NAT, NatExpected,
                          "suc argument", path + (0,))
                return NAT
            case NRec(annot, base, step, scrut):
                self.need(self.term(base, lams, mus, path + (0,)), annot, AnnotMismatch,
                          "nrec base", path + (0,))
                self.need(self.term(step, lams, mus, path + (1,)),
                          Arrow(NAT, Arrow(annot, annot)), AnnotMismatch, "nrec step", path + (1,))
                self.need(self.term(scrut, lams, mus, path + (2,)), NAT, NatExpected,
                          "nrec scrutinee", path + (2,))
                return annot
        raise LmtTypeError(f"not a term: {t!r}", path)

    def command(self, c, lams, mus, path):
        if isinstance(c.target, int):
            want = mus[-1 - c.target]
        else:
            want = self.free_mu.setdefault(c.target, fresh_meta())
        got = self.term(c.body, lams, mus, path + (0,))
        if not self.u.unify(got, want):
            raise PassivateMismatch(
                f"passing {self.show(got)} to a continuation of type {self.show(want)}", path)

    def resolve(self, x):
        r = self.u.resolve
        match x:
            case Lam(annot, body, hint):
                return Lam(r(annot), self.resolve(body), hint)
            case Mu(annot, body, hint):
                return Mu(r(annot), self.resolve(body), hint)
            case NRec(annot, base, step, scrut):
                return NRec(r(annot), self.resolve(base), self.resolve(step), self.resolve(scrut))
            case App(fn, arg):
                return App(self.resolve(fn), self.resolve(arg))
            case Suc(arg):
                return Suc(self.resolve(arg))
            case Command(target, body):
                return Command(target, self.resolve(body))
        return x


def elaborate(x, env: TypeEnv | None = None):
    """Fill implicit annotations of ``x``; returns ``(x, type, env)``.

    ``env`` supplies types for free variables; types of any other free
    variables are inferred and returned in the environment. Unconstrained
    annotations default to ``N``. The type is ``None`` for a command.
    """
    env = env or TypeEnv()
    el = _Elaborator(env)
    if isinstance(x, Command):
        el.command(x, [], [], ())
        ty = None
    else:
        ty = el.term(x, [], [], ())
    full = el.resolve(x)
    inferred = TypeEnv({k: el.u.resolve(v) for k, v in el.free_lam.items()},
                       {k: el.u.resolve(v) for k, v in el.free_mu.items()})
    if ty is not None:
        ty = infer_term(inferred, full)
    return full, ty, inferred


def parse_program(source: str) -> list[Decl]:
    """Declarations with sugar removed; catch/throw annotations still open."""
    return _Parser(source).file()


def parse(source: str) -> list[Decl]:
    """Parse and elaborate every declaration of a file."""
    return [Decl(d.name, elaborate(d.body)[0]) for d in parse_program(source)]


def main_decl(decls: list[Decl]) -> Decl:
    for d in decls:
        if d.name == "main":
            return d
    if not decls:
        raise ParseError("no declarations", 1, 1)
    return decls[-1]


def parse_term(text: str, env: TypeEnv | None = None) -> Term:
    """Parse and elaborate a single term (no ``def`` wrapper)."""
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "eof":
        raise p.error("expected end of input")
    return elaborate(t, env)[0]


def parse_command(text: str, env: TypeEnv | None = None) -> Command:
    p = _Parser(text)
    c = p.command()
    if p.tok.kind != "eof":
        raise p.error("expected end of input")
    return elaborate(c, env)[0]


def parse_type(text: str) -> Type:
    p = _Parser(text)
    ty = p.type()
    if p.tok.kind != "eof":
        raise p.error("expected end of input")
    return ty


# ---------------------------------------------------------------------------
# Pretty-printing


def pretty_type(ty) -> str:
    if isinstance(ty, Arrow):
        dom = pretty_type(ty.dom)
        if isinstance(ty.dom, Arrow):
            dom = f"({dom})"
        return f"{dom} -> {pretty_type(ty.cod)}"
    if isinstance(ty, Meta):
        return f"?{ty.id}"
    return "N"


def _clean_hint(hint: str, default: str) -> str:
    base = re.sub(r"[^A-Za-z0-9_]", "", hint or "")
    if not base or not IDENT.match(base) or base in KEYWORDS:
        base = default
    return base


def _fresh(hint: str, default: str, used: set[str]) -> str:
    base = _clean_hint(hint, default)
    if base not in used:
        return base
    for i in itertools.count(1):
        cand = f"{base}{i}"
        if cand not in used:
            return cand


class _Printer:
    # precedence levels: 0 binder-level term, 1 application chain, 2 atom
    def __init__(self, x):
        fv, fcv = free_vars(x)
        self.used_lam = set(fv)
        self.used_mu = set(fcv)
        self.lams: list[str] = []
        self.mus: list[str] = []

    def wrap(self, text: str, level: int, need: int) -> str:
        return f"({text})" if level < need else text

    def bind_lam(self, hint):
        name = _fresh(hint, "x", self.used_lam | set(self.lams))
        self.lams.append(name)
        return name

    def bind_mu(self, hint):
        name = _fresh(hint, "a", self.used_mu | set(self.mus))
        self.mus.append(name)
        return name

    def target(self, target) -> str:
        if isinstance(target, int):
            if target < len(self.mus):
                return "'" + self.mus[-1 - target]
            return f"'?{target}"
        return "'" + target

    def term(self, t, need: int) -> str:
        n = as_numeral(t)
        if n is not None:
            return str(n)
        match t:
            case Var(name):
                return name
            case Bound(i):
                return self.lams[-1 - i] if i < len(self.lams) else f"?{i}"
            case Lam(annot, body, hint):
                name = self.bind_lam(hint)
                try:
                    text = f"\\{name}:{pretty_type(annot)}. {self.term(body, 0)}"
                finally:
                    self.lams.pop()
                return self.wrap(text, 0, need)
            case App(fn, arg):
                return self.wrap(f"{self.term(fn, 1)} {self.term(arg, 2)}", 1, need)
            case Suc(arg):
                return self.wrap(f"S {self.term(arg, 2)}", 1, need)
            case NRec(annot, base, step, scrut):
                text = (f"nrec{{{pretty_type(annot)}}}({self.term(base, 0)}; "
                        f"{self.term(step, 0)}; {self.term(scrut, 0)})")
                return self.wrap(text, 1, need)
            case Mu(annot, Command(target, body), hint):
                return self.wrap(self.mu(annot, target, body, hint), 0, need)
        raise TypeError(f"cannot print {t!r}")

    def mu(self, annot, target, body, hint) -> str:
        name = self.bind_mu(hint)
        try:
            if annot == NAT and target == 0:
                return f"catch '{name} {self.term(body, 2)}"
            elif annot == NAT and not mu_index_free(Command(target, body), 0):
                return f"throw {self.term(body, 2)} {self.target(target)}"
            return f"mu '{name}:{pretty_type(annot)}. {self.command(Command(target, body))}"
        finally:
            self.mus.pop()

    def command(self, c: Command) -> str:
        return f"[{self.target(c.target)}] {self.term(c.body, 0)}"


def pretty(x) -> str:
    """Concrete syntax for a term, command or type."""
    if isinstance(x, (Nat, Arrow, Meta)):
        return pretty_type(x)
    p = _Printer(x)
    if isinstance(x, Command):
        return p.command(x)
    return p.term(x, 0)
