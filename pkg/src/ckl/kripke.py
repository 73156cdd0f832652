"""Finite Kripke frames and models for common knowledge logic.

Relations are square boolean numpy arrays indexed by dense world numbers
``0..n-1``.  A frame carries one relation per agent plus a separate
relation for C; it is a CKL-frame when the C relation is the reflexive
transitive closure of the union of the agent relations.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .formula import (
    AgentSet, And, Bot, C, Formula, K, Not, Top, Var, check_agents, expand,
    variables,
)

# Valuation enumeration refuses beyond 2**MAX_VALUATION_BITS valuations.
MAX_VALUATION_BITS = 20
# The complex-algebra cross-check in valid_in_frame runs only up to this.
CROSS_CHECK_BITS = 16
MAX_EXHAUSTIVE_BITS = 20


class CapExceeded(ValueError):
    pass


def _as_relation(rel, n: int) -> np.ndarray:
    arr = np.array(rel, dtype=bool)
    if arr.shape != (n, n):
        raise ValueError(f"relation must have shape {(n, n)}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


def relation_from_pairs(pairs: Iterable, n: int) -> np.ndarray:
    rel = np.zeros((n, n), dtype=bool)
    for pair in pairs:
        u, v = (int(w) for w in pair)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"pair {(u, v)} out of range for {n} worlds")
        rel[u, v] = True
    return rel


def relation_pairs(rel: np.ndarray) -> list[list[int]]:
    return [[int(u), int(v)] for u, v in zip(*np.nonzero(rel))]


def rtc(rel) -> np.ndarray:
    """Reflexive transitive closure (Warshall)."""
    r = np.array(rel, dtype=bool)
    n = r.shape[0]
    if r.shape != (n, n):
        raise ValueError("relation must be square")
    r |= np.eye(n, dtype=bool)
    for k in range(n):
        r |= np.outer(r[:, k], r[k, :])
    return r


@dataclass(frozen=True, eq=False)
class Frame:
    world_count: int
    agents: AgentSet
    r_k: Mapping[int, np.ndarray]
    r_c: np.ndarray

    def __post_init__(self):
        n = self.world_count
        if n < 1:
            raise ValueError("a frame needs at least one world")
        agents = AgentSet(self.agents)
        if set(self.r_k) != set(agents):
            raise ValueError(f"relations given for {sorted(self.r_k)}, agents are {list(agents)}")
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "r_k", {a: _as_relation(self.r_k[a], n) for a in agents})
        object.__setattr__(self, "r_c", _as_relation(self.r_c, n))

    @classmethod
    def from_pairs(cls, world_count: int, r_k: Mapping[int, Iterable], r_c: Iterable) -> "Frame":
        return cls(
            world_count,
            AgentSet(r_k),
            {int(a): relation_from_pairs(p, world_count) for a, p in r_k.items()},
            relation_from_pairs(r_c, world_count),
        )

    @classmethod
    def ckl(cls, world_count: int, r_k: Mapping[int, object]) -> "Frame":
        """Frame whose C relation is the closure of the given agent matrices."""
        rels = {int(a): np.array(r, dtype=bool) for a, r in r_k.items()}
        union = np.zeros((world_count, world_count), dtype=bool)
        for r in rels.values():
            union |= r
        return cls(world_count, AgentSet(rels), rels, rtc(union))

    @property
    def r_e(self) -> np.ndarray:
        union = np.zeros((self.world_count,) * 2, dtype=bool)
        for r in self.r_k.values():
            union |= r
        return union

    def relation(self, op) -> np.ndarray:
        """``op`` is an agent index or the string ``"C"``."""
        return self.r_c if op == "C" else self.r_k[op]

    def key(self) -> tuple:
        return (self.world_count, tuple(self.agents),
                tuple(self.r_k[a].tobytes() for a in self.agents), self.r_c.tobytes())

    def __eq__(self, other):
        return isinstance(other, Frame) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        rk = {a: relation_pairs(r) for a, r in self.r_k.items()}
        return f"Frame({self.world_count}, r_k={rk}, r_c={relation_pairs(self.r_c)})"


def is_ckl_frame(frame: Frame) -> bool:
    return bool(np.array_equal(frame.r_c, rtc(frame.r_e)))


def closure_diff(frame: Frame) -> dict:
    """Pairs by which ``r_c`` differs from the closure of ``R_E``."""
    closure = rtc(frame.r_e)
    return {
        "missing": relation_pairs(closure & ~frame.r_c),
        "extra": relation_pairs(frame.r_c & ~closure),
    }


@dataclass(frozen=True, eq=False)
class KripkeModel:
    frame: Frame
    valuation: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        val = {}
        for name, worlds in self.valuation.items():
            ws = frozenset(int(w) for w in worlds)
            if any(not 0 <= w < self.frame.world_count for w in ws):
                raise ValueError(f"valuation of {name!r} names worlds outside the frame")
            val[name] = ws
        object.__setattr__(self, "valuation", val)

    def __eq__(self, other):
        return (isinstance(other, KripkeModel) and self.frame == other.frame
                and self.valuation == other.valuation)

    __hash__ = None


# --------------------------------------------------------------------------
# evaluation

def _box(rel: np.ndarray, s: np.ndarray) -> np.ndarray:
    # w is in the box iff no successor of w lies outside s
    return ~(rel & ~s[None, :]).any(axis=1)


def _eval(frame: Frame, f: Formula, val: Mapping[str, np.ndarray]) -> np.ndarray:
    n = frame.world_count
    if isinstance(f, Var):
        return val.get(f.name, np.zeros(n, dtype=bool))
    if isinstance(f, Top):
        return np.ones(n, dtype=bool)
    if isinstance(f, Bot):
        return np.zeros(n, dtype=bool)
    if isinstance(f, Not):
        return ~_eval(frame, f.sub, val)
    if isinstance(f, And):
        return _eval(frame, f.left, val) & _eval(frame, f.right, val)
    if isinstance(f, K):
        return _box(frame.r_k[f.agent], _eval(frame, f.sub, val))
    if isinstance(f, C):
        return _box(frame.r_c, _eval(frame, f.sub, val))
    raise TypeError(f"unexpected node {f!r}")


def _vector(worlds, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=bool)
    v[list(worlds)] = True
    return v


def evaluate(model: KripkeModel, f: Formula) -> frozenset:
    """Set of worlds where ``f`` holds.  Unvalued variables denote the empty set."""
    frame = model.frame
    check_agents(f, frame.agents)
    val = {p: _vector(ws, frame.world_count) for p, ws in model.valuation.items()}
    return frozenset(int(w) for w in np.flatnonzero(_eval(frame, expand(f, frame.agents), val)))


def valuations(names: list[str], n: int) -> Iterator[dict[str, np.ndarray]]:
    """Every assignment of a world-set to each name."""
    subsets = [np.array([(m >> w) & 1 for w in range(n)], dtype=bool) for m in range(1 << n)]
    for combo in itertools.product(subsets, repeat=len(names)):
        yield dict(zip(names, combo))


def valid_in_frame(frame: Frame, phi: Formula, *, cross_check: bool = True) -> bool:
    """True iff ``phi`` holds at every world under every valuation.

    Valuations are enumerated exhaustively.  When the search is small the
    verdict is also recomputed on the complex algebra and the two must agree.
    """
    check_agents(phi, frame.agents)
    names = variables(phi)
    bits = len(names) * frame.world_count
    if bits > MAX_VALUATION_BITS:
        raise CapExceeded(f"{len(names)} variables over {frame.world_count} worlds exceeds the cap")
    core = expand(phi, frame.agents)
    result = all(_eval(frame, core, val).all() for val in valuations(names, frame.world_count))
    if cross_check and bits <= CROSS_CHECK_BITS:
        from .algebra import complex_algebra, valid_in_algebra
        algebraic = valid_in_algebra(complex_algebra(frame), phi)
        if algebraic != result:
            raise AssertionError(f"frame and complex algebra disagree on {phi!r} in {frame!r}")
    return result


# --------------------------------------------------------------------------
# enumeration

def frame_from_bits(bits: int, world_count: int, agents: AgentSet) -> Frame:
    """Decode a frame index: relations K_a1, ..., K_an, C, each row-major."""
    n2 = world_count * world_count
    rels = []
    for r in range(len(agents) + 1):
        chunk = (bits >> (r * n2)) & ((1 << n2) - 1)
        rels.append(np.array([(chunk >> b) & 1 for b in range(n2)], dtype=bool).reshape(world_count, world_count))
    return Frame(world_count, agents, dict(zip(agents, rels[:-1])), rels[-1])


def frame_count(world_count: int, agents: AgentSet) -> int:
    return 1 << (world_count * world_count * (len(agents) + 1))


def enumerate_frames(world_count: int, agents: AgentSet, *, samples: int | None = None,
                     seed: int | None = None) -> Iterator[Frame]:
    """All frames on ``world_count`` worlds, or ``samples`` seeded uniform draws.

    In sampled mode every relation bit is an independent fair coin.
    """
    agents = AgentSet(agents)
    nbits = world_count * world_count * (len(agents) + 1)
    if samples is None:
        if nbits > MAX_EXHAUSTIVE_BITS:
            raise CapExceeded(f"{2 ** nbits} frames is too many to enumerate; pass samples=")
        for bits in range(1 << nbits):
            yield frame_from_bits(bits, world_count, agents)
        return
    rng = np.random.default_rng(seed)
    shape = (len(agents) + 1, world_count, world_count)
    for _ in range(samples):
        rels = rng.integers(0, 2, size=shape).astype(bool)
        yield Frame(world_count, agents, dict(zip(agents, rels[:-1])), rels[-1])


def random_ckl_frame(rng: np.random.Generator, world_count: int, agents: AgentSet,
                     density: float = 0.3) -> Frame:
    rels = rng.random((len(agents), world_count, world_count)) < density
    return Frame.ckl(world_count, dict(zip(AgentSet(agents), rels)))


# --------------------------------------------------------------------------
# JSON

def model_to_dict(model: KripkeModel | Frame) -> dict:
    if isinstance(model, Frame):
        frame, valuation = model, None
    else:
        frame, valuation = model.frame, model.valuation
    out = {
        "worlds": frame.world_count,
        "agents": list(frame.agents),
        "r_k": {str(a): relation_pairs(frame.r_k[a]) for a in frame.agents},
        "r_c": relation_pairs(frame.r_c),
    }
    if valuation is not None:
        out["valuation"] = {p: sorted(ws) for p, ws in sorted(valuation.items())}
    return out


def model_from_dict(data: Mapping) -> KripkeModel:
    try:
        n = int(data["worlds"])
        agents = AgentSet(data["agents"])
        r_k = {int(a): pairs for a, pairs in data["r_k"].items()}
        if set(r_k) != set(agents):
            raise ValueError(f"r_k keys {sorted(r_k)} do not match agents {list(agents)}")
        frame = Frame.from_pairs(n, r_k, data["r_c"])
        return KripkeModel(frame, data.get("valuation", {}))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model: {exc!r}") from exc


def dumps(model: KripkeModel | Frame) -> str:
    return json.dumps(model_to_dict(model))


def loads(text: str) -> KripkeModel:
    return model_from_dict(json.loads(text))


def load(path) -> KripkeModel:
    with open(path) as fh:
        return loads(fh.read())
