from __future__ import annotations

import pytest
from hypothesis import given

from conftest import OPEN, closed_terms, open_terms
from lmt.kernel import (
    NAT, Arrow, Command, Mu, Var, Zero, alpha_eq, catch, cmd, lam, mu, numeral, throw,
)
from lmt.syntax import (
    DuplicateDefinition, ParseError, parse, parse_command, parse_program, parse_term,
    parse_type, pretty,
)
from lmt.typecheck import TypeEnv, infer_term


def test_parse_examples():
    assert parse_term("\\x:N. x") == lam("x", NAT, Var("x"))
    t = parse_term("catch 'a (throw 0 'a)")
    assert t == Mu(NAT, Command(0, Mu(NAT, Command(1, Zero()), "g")), "a")
    assert t == catch("a", NAT, throw(Zero(), "a", NAT))
    assert parse_term("3") == numeral(3)


def test_pretty_examples():
    assert pretty(numeral(4)) == "4"
    assert pretty(catch("a", NAT, Zero())) == "catch 'a 0"
    assert pretty(Arrow(NAT, Arrow(NAT, NAT))) == "N -> N -> N"
    assert pretty(Arrow(Arrow(NAT, NAT), NAT)) == "(N -> N) -> N"


def test_explicit_mu_and_commands():
    t = parse_term("mu 'k:N -> N. ['k] \\x:N. x")
    assert t == mu("k", Arrow(NAT, NAT), cmd("k", lam("x", NAT, Var("x"))))
    assert parse_command("['a] 0", TypeEnv({}, {"a": NAT})) == cmd("a", Zero())
    assert parse_type("(N -> N) -> N") == Arrow(Arrow(NAT, NAT), NAT)


def test_definitions_are_inlined():
    decls = parse("-- comment\ndef two = S 1;\ndef main = S two; -- trailing\n")
    assert [d.name for d in decls] == ["two", "main"]
    assert decls[1].body == numeral(3)


def test_parse_errors_have_positions():
    with pytest.raises(ParseError) as e:
        parse_program("def main =\n  (0;")
    assert (e.value.line, e.value.col) == (2, 5)
    with pytest.raises(ParseError):
        parse_term("catch 'a nrec{N}(0; 0; 0)")
    with pytest.raises(DuplicateDefinition):
        parse_program("def a = 0; def a = 1;")


@given(closed_terms())
def test_roundtrip_closed(t):
    assert alpha_eq(parse_term(pretty(t)), t)


@given(open_terms())
def test_roundtrip_open(t):
    assert alpha_eq(parse_term(pretty(t), OPEN), t)


@given(open_terms())
def test_roundtrip_commands(t):
    env = OPEN.with_mu("c", infer_term(OPEN, t))
    c = Command("c", t)
    assert alpha_eq(parse_command(pretty(c), env), c)
