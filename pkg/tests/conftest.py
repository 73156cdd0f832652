import random

import pytest

from ckl.formula import (
    AgentSet, And, Bot, C, E, Iff, Implies, K, Not, Or, Top, Var,
)

AGENTS2 = AgentSet([1, 2])

BINARY_NODES = (And, Or, Implies, Iff)


def random_formula(rng: random.Random, depth: int, names=("p", "q", "r"),
                   agents=AGENTS2, sugar=True):
    """Random formula of depth at most ``depth``."""
    if depth == 0 or rng.random() < 0.2:
        roll = rng.random()
        if roll < 0.08:
            return Top()
        if roll < 0.16:
            return Bot()
        return Var(rng.choice(names))
    kinds = ["not", "and", "k", "c"] + (["e", "or", "imp", "iff"] if sugar else [])
    kind = rng.choice(kinds)
    sub = lambda: random_formula(rng, depth - 1, names, agents, sugar)
    if kind == "not":
        return Not(sub())
    if kind == "k":
        return K(rng.choice(agents), sub())
    if kind == "c":
        return C(sub())
    if kind == "e":
        return E(sub())
    node = {"and": And, "or": Or, "imp": Implies, "iff": Iff}[kind]
    return node(sub(), sub())


@pytest.fixture
def agents2():
    return AGENTS2


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        detail = dict(report.user_properties).get("detail", "")
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail in _acceptance:
        line = f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
