import itertools
import json
import random

import numpy as np
import pytest

from ckl.formula import AgentSet, C, Var, e_power, parse
from ckl.kripke import (
    CapExceeded, Frame, KripkeModel, closure_diff, dumps, enumerate_frames,
    evaluate, frame_count, is_ckl_frame, loads, random_ckl_frame, rtc,
    valid_in_frame,
)

from conftest import AGENTS2, random_formula

A1 = AgentSet([1])


def reach(rel, w):
    """Worlds reachable from w in zero or more steps (BFS on pair lists)."""
    seen, todo = {w}, [w]
    while todo:
        u = todo.pop()
        for v in range(len(rel)):
            if rel[u][v] and v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def common_knowledge_oracle(frame, truth):
    """Worlds all of whose R_E-reachable worlds satisfy ``truth``."""
    r_e = frame.r_e.tolist()
    return {w for w in range(frame.world_count) if reach(r_e, w) <= truth}


class TestRtc:
    def test_single_world(self):
        assert rtc(np.zeros((1, 1), bool)).tolist() == [[True]]

    def test_two_step_path(self):
        rel = np.zeros((3, 3), bool)
        rel[0, 1] = rel[1, 2] = True
        got = {(int(u), int(v)) for u, v in zip(*np.nonzero(rtc(rel)))}
        assert got == {(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)}

    def test_against_bfs_and_idempotent(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            n = int(rng.integers(1, 7))
            rel = rng.random((n, n)) < 0.25
            closed = rtc(rel)
            want = [[v in reach(rel.tolist(), u) for v in range(n)] for u in range(n)]
            assert closed.tolist() == want
            assert np.array_equal(rtc(closed), closed)


class TestIsCklFrame:
    def test_single_world_reflexive(self):
        assert is_ckl_frame(Frame.from_pairs(1, {1: [], 2: []}, [(0, 0)]))

    def test_single_world_empty_rc(self):
        f = Frame.from_pairs(1, {1: [], 2: []}, [])
        assert not is_ckl_frame(f)
        assert closure_diff(f) == {"missing": [[0, 0]], "extra": []}

    def test_rc_equal_to_non_reflexive_union(self):
        f = Frame.from_pairs(2, {1: [(0, 1)], 2: [(1, 0)]}, [(0, 1), (1, 0)])
        assert not is_ckl_frame(f)

    def test_ckl_constructor(self):
        f = Frame.ckl(3, {1: [[0, 1, 0], [0, 0, 0], [0, 0, 0]], 2: np.eye(3, k=1, dtype=bool)})
        assert is_ckl_frame(f)


class TestEvaluate:
    def chain(self):
        return Frame.ckl(2, {1: [[0, 1], [0, 0]]})

    def test_top_is_everything(self):
        m = KripkeModel(self.chain(), {"p": {1}})
        assert evaluate(m, parse("top")) == {0, 1}

    def test_vacuous_box(self):
        m = KripkeModel(self.chain())
        assert 1 in evaluate(m, parse("K1 bot"))
        assert 0 not in evaluate(m, parse("K1 bot"))

    def test_chain_common_knowledge(self):
        frame = self.chain()
        m = KripkeModel(frame, {"p": {1}})
        want = common_knowledge_oracle(frame, {1})
        assert want == {1}
        assert evaluate(m, parse("C p")) == want

    def test_unvalued_is_empty(self):
        m = KripkeModel(self.chain())
        assert evaluate(m, parse("q")) == frozenset()

    def test_unknown_agent(self):
        with pytest.raises(ValueError):
            evaluate(KripkeModel(self.chain()), parse("K2 p"))

    def test_c_matches_reachability_oracle(self):
        rng = np.random.default_rng(11)
        prng = random.Random(11)
        for _ in range(200):
            n = int(rng.integers(1, 6))
            frame = random_ckl_frame(rng, n, AGENTS2)
            val = {x: {w for w in range(n) if prng.random() < 0.5} for x in "pqr"}
            m = KripkeModel(frame, val)
            phi = random_formula(prng, 3)
            truth = set(evaluate(m, phi))
            assert set(evaluate(m, C(phi))) == common_knowledge_oracle(frame, truth)

    def test_c_is_bounded_e_intersection(self):
        rng = np.random.default_rng(5)
        prng = random.Random(5)
        for _ in range(200):
            n = int(rng.integers(1, 6))
            frame = random_ckl_frame(rng, n, AGENTS2)
            m = KripkeModel(frame, {"p": {w for w in range(n) if prng.random() < 0.6}})
            phi = random_formula(prng, 3)
            bounded = set(range(n))
            for k in range(n):
                bounded &= evaluate(m, e_power(phi, k))
            assert evaluate(m, C(phi)) == bounded


class TestValidity:
    def test_k_schema_everywhere(self):
        phi = parse("K1 (p -> q) -> (K1 p -> K1 q)", AGENTS2)
        for f in enumerate_frames(1, AGENTS2):
            assert valid_in_frame(f, phi)
        for f in enumerate_frames(2, AGENTS2, samples=200, seed=1):
            assert valid_in_frame(f, phi)

    def test_ckl_frames_validate_c2(self):
        phi = parse("C p -> E C p", AGENTS2)
        ckl = [f for f in enumerate_frames(2, AGENTS2) if is_ckl_frame(f)]
        assert len(ckl) == 256
        assert all(valid_in_frame(f, phi) for f in ckl)

    def test_strict_subrelation_refutes_a_schema(self):
        schemas = [parse(s, AGENTS2) for s in ("C p -> p", "C p -> E C p", "C (p -> E p) -> (p -> C p)")]
        found = None
        for f in enumerate_frames(2, AGENTS2):
            closure = rtc(f.r_e)
            strict = np.all(f.r_c <= closure) and not np.array_equal(f.r_c, closure)
            if strict and not all(valid_in_frame(f, s) for s in schemas):
                found = f
                break
        assert found is not None

    def test_cap(self):
        f = Frame.ckl(3, {1: np.zeros((3, 3)), 2: np.zeros((3, 3))})
        phi = parse(" & ".join(f"p{i}" for i in range(7)))
        with pytest.raises(CapExceeded):
            valid_in_frame(f, phi)


class TestEnumerate:
    def test_counts(self):
        assert sum(1 for _ in enumerate_frames(1, AGENTS2)) == 8
        assert frame_count(2, AGENTS2) == 4096
        frames = list(enumerate_frames(2, AGENTS2))
        assert len(frames) == 4096
        assert len(set(frames)) == 4096

    def test_sampled_deterministic(self):
        a = list(enumerate_frames(3, AGENTS2, samples=10_000, seed=42))
        b = list(enumerate_frames(3, AGENTS2, samples=10_000, seed=42))
        assert len(a) == 10_000
        assert a == b
        c = list(enumerate_frames(3, AGENTS2, samples=50, seed=43))
        assert c != a[:50]

    def test_exhaustive_cap(self):
        with pytest.raises(CapExceeded):
            next(enumerate_frames(3, AGENTS2))


class TestJson:
    def test_round_trip(self):
        text = ('{"worlds": 3, "agents": [1, 2], "r_k": {"1": [[0, 1]], "2": [[1, 2], [2, 2]]}, '
                '"r_c": [[0, 0], [0, 1], [0, 2], [1, 1], [1, 2], [2, 2]], "valuation": {"p": [0, 2]}}')
        m = loads(text)
        assert dumps(m) == text
        assert loads(dumps(m)) == m
        assert is_ckl_frame(m.frame)

    def test_frame_without_valuation(self):
        m = loads('{"worlds": 1, "agents": [1], "r_k": {"1": []}, "r_c": [[0, 0]]}')
        assert m.valuation == {}

    @pytest.mark.parametrize("data", [
        {"worlds": 1, "agents": [1], "r_k": {"1": [[0, 1]]}, "r_c": []},
        {"worlds": 1, "agents": [1], "r_k": {"2": []}, "r_c": []},
        {"worlds": 1, "agents": [1], "r_k": {"1": []}},
        {"worlds": 1, "agents": [1], "r_k": {"1": []}, "r_c": [], "valuation": {"p": [3]}},
    ])
    def test_malformed(self, data):
        with pytest.raises(ValueError):
            loads(json.dumps(data))
