import random

import pytest
from hypothesis import given, settings, strategies as st

from ckl.formula import (
    AgentSet, And, Bot, C, E, FormulaError, Iff, Implies, K, Not, Or, Top, Var,
    depth, e_power, expand, expand_e, is_core, parse, substitute, to_text,
    variables,
)

from conftest import AGENTS2, random_formula

p, q, r = Var("p"), Var("q"), Var("r")


class TestAgentSet:
    def test_sorted(self):
        assert tuple(AgentSet([3, 1, 2])) == (1, 2, 3)

    @pytest.mark.parametrize("bad", [[], [1, 1], [0]])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            AgentSet(bad)


class TestParse:
    def test_c_implies(self):
        assert parse("C p -> p", AGENTS2) == Implies(C(p), p)

    def test_negated_conjunction_round_trips(self):
        f = parse("~(p & q)")
        assert f == Not(And(p, q))
        assert parse(to_text(f)) == f

    def test_missing_agent_index(self):
        with pytest.raises(FormulaError) as exc:
            parse("K p", AGENTS2)
        assert exc.value.position == 0

    def test_unknown_agent(self):
        with pytest.raises(FormulaError, match="unknown agent 3"):
            parse("K3 p", AGENTS2)

    @pytest.mark.parametrize("text", ["p &", "(p", "p q", "p -> -> q", "P", "", "p ^ q"])
    def test_syntax_errors(self, text):
        with pytest.raises(FormulaError):
            parse(text)

    def test_error_position(self):
        with pytest.raises(FormulaError) as exc:
            parse("p & (q | )")
        assert exc.value.position == 9

    def test_constants_and_names(self):
        assert parse("top & bot") == And(Top(), Bot())
        assert parse("topx") == Var("topx")
        assert parse("x_1") == Var("x_1")

    def test_precedence(self):
        assert parse("~p & q | r -> p <-> q") == Iff(
            Implies(Or(And(Not(p), q), r), p), q)

    def test_implication_right_associative(self):
        assert parse("p -> q -> r") == Implies(p, Implies(q, r))

    def test_and_left_associative(self):
        assert parse("p & q & r") == And(And(p, q), r)

    def test_modal_prefixes(self):
        assert parse("K1 E C ~p", AGENTS2) == K(1, E(C(Not(p))))
        assert parse("K12p") == K(12, p)


class TestPrint:
    @pytest.mark.parametrize("f,text", [
        (Implies(Implies(p, q), r), "(p -> q) -> r"),
        (Implies(p, Implies(q, r)), "p -> q -> r"),
        (And(p, And(q, r)), "p & (q & r)"),
        (Not(And(p, q)), "~(p & q)"),
        (K(1, Or(p, q)), "K1 (p | q)"),
        (C(E(p)), "C E p"),
        (Not(Not(p)), "~~p"),
    ])
    def test_minimal_parentheses(self, f, text):
        assert to_text(f) == text
        assert parse(text) == f

    def test_round_trip_random_depth8(self):
        rng = random.Random(7)
        for _ in range(500):
            f = random_formula(rng, 8)
            assert parse(to_text(f), AGENTS2) == f


_leaf = st.one_of(st.sampled_from(["p", "q", "r1"]).map(Var), st.just(Top()), st.just(Bot()))


def _extend(children):
    return st.one_of(
        children.map(Not), children.map(C), children.map(E),
        st.tuples(st.sampled_from([1, 2]), children).map(lambda t: K(*t)),
        *[st.tuples(children, children).map(lambda t, n=n: n(*t)) for n in (And, Or, Implies, Iff)],
    )


formulas = st.recursive(_leaf, _extend, max_leaves=24)


@given(formulas)
@settings(max_examples=300)
def test_round_trip_property(f):
    assert parse(to_text(f), AGENTS2) == f


@given(formulas)
@settings(max_examples=200)
def test_expand_idempotent_and_core(f):
    g = expand(f, AGENTS2)
    assert is_core(g)
    assert expand(g, AGENTS2) == g


class TestExpand:
    def test_e_two_agents(self):
        assert expand(E(p), AGENTS2) == And(K(1, p), K(2, p))

    def test_e_single_agent(self):
        assert expand(E(p), AgentSet([1])) == K(1, p)

    def test_or_de_morgan(self):
        assert expand(Or(p, q), AGENTS2) == Not(And(Not(p), Not(q)))

    def test_implies_via_or(self):
        assert expand(Implies(p, q), AGENTS2) == Not(And(Not(Not(p)), Not(q)))

    def test_core_fixpoint(self):
        f = And(K(1, Not(p)), C(Top()))
        assert expand(f, AGENTS2) == f

    def test_expand_e_keeps_sugar(self):
        assert expand_e(Implies(E(p), q), AGENTS2) == Implies(And(K(1, p), K(2, p)), q)


class TestEPower:
    def test_zero(self):
        assert e_power(p, 0) == p

    def test_single_agent(self):
        assert expand(e_power(p, 2), AgentSet([1])) == K(1, K(1, p))

    def test_two_agents(self):
        assert expand(e_power(p, 1), AGENTS2) == And(K(1, p), K(2, p))

    @pytest.mark.parametrize("m,n", [(0, 0), (1, 2), (3, 0), (2, 5)])
    def test_additive(self, m, n):
        assert e_power(p, m + n) == e_power(e_power(p, n), m)

    def test_negative(self):
        with pytest.raises(ValueError):
            e_power(p, -1)


def test_substitute_simultaneous():
    f = And(p, K(1, q))
    assert substitute(f, {"p": q, "q": p}) == And(q, K(1, p))


def test_variables_order_and_depth():
    f = parse("K1 (q & p) -> q")
    assert variables(f) == ["q", "p"]
    assert depth(f) == 3
