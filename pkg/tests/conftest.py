from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from lmt.kernel import NAT, Arrow
from lmt.syntax import main_decl, parse
from lmt.testkit import GenConfig, gen_context, gen_typed
from lmt.typecheck import EMPTY_ENV, TypeEnv

sys.setrecursionlimit(max(sys.getrecursionlimit(), 100_000))

settings.register_profile("lmt", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lmt")

# Free variables for open generated terms.
OPEN = TypeEnv({"x": NAT, "f": Arrow(NAT, NAT)}, {"a": NAT, "b": Arrow(NAT, NAT)})

seeds = st.integers(min_value=0, max_value=2**32)


@st.composite
def closed_terms(draw, max_nodes: int = 20, target=None):
    return gen_typed(GenConfig(draw(seeds), max_nodes, target_type=target))


@st.composite
def open_terms(draw, max_nodes: int = 20, target=None):
    return gen_typed(GenConfig(draw(seeds), max_nodes, closed_only=False, target_type=target), OPEN)


@st.composite
def contexts(draw, hole=NAT, depth: int = 3, env=EMPTY_ENV):
    rng = random.Random(draw(seeds))
    return gen_context(rng, hole, rng.randint(0, depth), env=env)


ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda ln: int(ln.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


def load_program(name: str, entry: str | None = None):
    """Elaborated main (or ``entry``) declaration of a bundled program."""
    decls = parse((PROGRAMS / name).read_text(encoding="utf-8"))
    if entry is None:
        return main_decl(decls).body
    return next(d.body for d in decls if d.name == entry)
