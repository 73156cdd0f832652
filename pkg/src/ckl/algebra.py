"""Finite modal algebras presented by relations on atoms.

Every finite Boolean algebra with normal operators is the complex algebra
of a finite frame, so an algebra here is ``atoms`` plus one relation per
operator.  Elements are ints used as bitsets over the atoms.  Operator ids
are agent indices for the K boxes and the string ``"C"`` for common
knowledge.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Mapping

import numpy as np

from .formula import (
    AgentSet, And, Bot, C, Formula, K, Not, Top, Var, check_agents, expand,
    variables,
)
from .kripke import CapExceeded, Frame

MAX_ATOMS = 20
MAX_VALUATION_BITS = 20


def _successor_masks(rel) -> tuple[int, ...]:
    rel = np.asarray(rel, dtype=bool)
    return tuple(int(sum(1 << int(v) for v in np.flatnonzero(row))) for row in rel)


@dataclass(frozen=True, eq=False)
class FiniteModalAlgebra:
    atoms: int
    agents: AgentSet
    op_k: Mapping[int, tuple[int, ...]]
    op_c: tuple[int, ...]

    def __post_init__(self):
        if self.atoms < 1:
            raise ValueError("an algebra needs at least one atom")
        object.__setattr__(self, "agents", AgentSet(self.agents))
        full = self.full
        for masks in [self.op_c, *self.op_k.values()]:
            if len(masks) != self.atoms or any(m & ~full for m in masks):
                raise ValueError("operator relation does not fit the atoms")

    @classmethod
    def from_relations(cls, atoms: int, r_k: Mapping[int, object], r_c) -> "FiniteModalAlgebra":
        """Build from boolean matrices; row ``w`` lists the successors of atom ``w``."""
        return cls(atoms, AgentSet(r_k), {int(a): _successor_masks(r) for a, r in r_k.items()},
                   _successor_masks(r_c))

    @property
    def full(self) -> int:
        return (1 << self.atoms) - 1

    @property
    def size(self) -> int:
        return 1 << self.atoms

    def relation(self, op) -> tuple[int, ...]:
        return self.op_c if op == "C" else self.op_k[op]

    @property
    def operators(self) -> list:
        return [*self.agents, "C"]

    def table(self, op) -> np.ndarray:
        """``box(op, x)`` for every element ``x``, indexed by ``x``."""
        return self._tables[op]

    @cached_property
    def _tables(self) -> dict:
        if self.atoms > MAX_ATOMS:
            raise CapExceeded(f"{self.atoms} atoms exceeds the {MAX_ATOMS}-atom sweep cap")
        xs = np.arange(self.size, dtype=np.int64)
        tables = {}
        for op in self.operators:
            out = np.zeros(self.size, dtype=np.int64)
            for w, succ in enumerate(self.relation(op)):
                out |= ((succ & ~xs) == 0).astype(np.int64) << w
            tables[op] = out
        tables["E"] = reduce(np.bitwise_and, (tables[a] for a in self.agents))
        return tables

    @cached_property
    def _ckl_check(self) -> "AxiomCheck":
        return _check_ckl(self)


def complex_algebra(frame: Frame) -> FiniteModalAlgebra:
    return FiniteModalAlgebra.from_relations(frame.world_count, frame.r_k, frame.r_c)


def elements(a: FiniteModalAlgebra) -> range:
    return range(a.size)


def atoms_of(x: int) -> list[int]:
    return [w for w in range(x.bit_length()) if x >> w & 1]


def leq(x: int, y: int) -> bool:
    return x & ~y == 0


def implies(a: FiniteModalAlgebra, x: int, y: int) -> int:
    """``x -> y`` on elements, i.e. the join of the complement of x with y."""
    return (~x | y) & a.full


def box(a: FiniteModalAlgebra, op, x: int) -> int:
    """Atoms all of whose ``op``-successors lie in ``x``."""
    out = 0
    for w, succ in enumerate(a.relation(op)):
        if succ & ~x == 0:
            out |= 1 << w
    return out


def e_of(a: FiniteModalAlgebra, x: int) -> int:
    return reduce(lambda acc, i: acc & box(a, i, x), a.agents, a.full)


@dataclass(frozen=True)
class EIterates:
    """Orbit ``x, Ex, E^2 x, ...``; after ``prefix`` it re-enters at ``cycle_start``."""

    prefix: tuple[int, ...]
    cycle_start: int
    cycle_len: int

    @property
    def distinct(self) -> frozenset:
        return frozenset(self.prefix)

    @property
    def cycle(self) -> tuple[int, ...]:
        return self.prefix[self.cycle_start:]

    def nth(self, n: int) -> int:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.prefix[self.cycle_start + (n - self.cycle_start) % self.cycle_len]

    def meet(self, full: int) -> int:
        return reduce(lambda acc, y: acc & y, self.prefix, full)


def e_iterates(a: FiniteModalAlgebra, x: int) -> EIterates:
    seen = {}
    prefix = []
    cur = x
    while cur not in seen:
        seen[cur] = len(prefix)
        prefix.append(cur)
        cur = e_of(a, cur)
    start = seen[cur]
    return EIterates(tuple(prefix), start, len(prefix) - start)


def orbit_meets(a: FiniteModalAlgebra) -> np.ndarray:
    """Meet of ``{E^n x}`` for every element ``x`` at once.

    E is a function on a finite set, so its graph is a forest of trees
    hanging off cycles: the meet for a cycle element is the meet of the
    cycle, and every tree element is its own value met with its successor's.
    """
    step = a.table("E").tolist()
    result = [-1] * a.size
    on_path = [-1] * a.size
    for start in range(a.size):
        if result[start] >= 0:
            continue
        path = []
        cur = start
        while result[cur] < 0 and on_path[cur] < 0:
            on_path[cur] = len(path)
            path.append(cur)
            cur = step[cur]
        if result[cur] < 0:
            cycle = path[on_path[cur]:]
            m = reduce(lambda acc, y: acc & y, cycle, a.full)
            for y in cycle:
                result[y] = m
            path = path[:on_path[cur]]
        for y in reversed(path):
            result[y] = y & result[step[y]]
        for y in path:
            on_path[y] = -1
    return np.array(result, dtype=np.int64)


# --------------------------------------------------------------------------
# axiom checks

@dataclass(frozen=True)
class AxiomCheck:
    """Outcome of an axiom sweep; falsy with ``(axiom, witness)`` on failure."""

    ok: bool
    axiom: str | None = None
    witness: int | None = None

    def __bool__(self):
        return self.ok


def _first_failure(checks) -> AxiomCheck:
    for name, bad in checks:
        idx = np.flatnonzero(bad)
        if idx.size:
            return AxiomCheck(False, name, int(idx[0]))
    return AxiomCheck(True)


def is_mh_algebra(a: FiniteModalAlgebra) -> AxiomCheck:
    """Sweep all elements for ``Cx<=x``, ``Cx<=ECx`` and ``C(x->Ex) <= x->Cx``.

    Axiom ids are ``"mh1"``, ``"mh2"``, ``"mh3"`` in that order.
    """
    full = a.full
    xs = np.arange(a.size, dtype=np.int64)
    c, e = a.table("C"), a.table("E")
    cx = c[xs]

    def mh3():
        lhs = c[(~xs | e[xs]) & full]
        return lhs & ~((~xs | cx) & full) != 0

    return _first_failure([
        ("mh1", cx & ~xs != 0),
        ("mh2", cx & ~e[cx] != 0),
        ("mh3", mh3()),
    ])


def _check_ckl(a: FiniteModalAlgebra) -> AxiomCheck:
    xs = np.arange(a.size, dtype=np.int64)
    c, e = a.table("C"), a.table("E")
    cx = c[xs]
    return _first_failure([
        ("ckl1", cx & ~e[cx] != 0),
        ("ckl2", cx != orbit_meets(a)),
    ])


def is_ckl_algebra(a: FiniteModalAlgebra) -> AxiomCheck:
    """Sweep all elements for ``Cx<=ECx`` (``"ckl1"``) and ``Cx = meet E^n x`` (``"ckl2"``)."""
    return a._ckl_check


def omega_rule_oracle(a: FiniteModalAlgebra, gamma: int, phi: int) -> bool:
    """Whether ``gamma <= E^n phi`` for every n.

    On a CKL-algebra a positive answer must give ``gamma <= C phi``; that is
    asserted here.
    """
    orbit = e_iterates(a, phi)
    result = all(leq(gamma, y) for y in orbit.distinct)
    if result and is_ckl_algebra(a) and not leq(gamma, box(a, "C", phi)):
        raise AssertionError(f"omega rule conclusion fails for gamma={gamma}, phi={phi}")
    return result


# --------------------------------------------------------------------------
# formulas in algebras

def value(a: FiniteModalAlgebra, f: Formula, valuation: Mapping[str, int]) -> int:
    """Element denoted by ``f``; unvalued variables denote 0."""
    return _value(a, expand(f, a.agents), valuation)


def _value(a, f, val):
    if isinstance(f, Var):
        return val.get(f.name, 0)
    if isinstance(f, Top):
        return a.full
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Not):
        return ~_value(a, f.sub, val) & a.full
    if isinstance(f, And):
        return _value(a, f.left, val) & _value(a, f.right, val)
    if isinstance(f, K):
        return box(a, f.agent, _value(a, f.sub, val))
    if isinstance(f, C):
        return box(a, "C", _value(a, f.sub, val))
    raise TypeError(f"unexpected node {f!r}")


def _value_all(a, f, val):
    # val maps names to arrays over all valuations; tables do the boxes
    if isinstance(f, Var):
        return val[f.name]
    if isinstance(f, Top):
        return np.int64(a.full)
    if isinstance(f, Bot):
        return np.int64(0)
    if isinstance(f, Not):
        return ~_value_all(a, f.sub, val) & a.full
    if isinstance(f, And):
        return _value_all(a, f.left, val) & _value_all(a, f.right, val)
    if isinstance(f, K):
        return a.table(f.agent)[_value_all(a, f.sub, val)]
    if isinstance(f, C):
        return a.table("C")[_value_all(a, f.sub, val)]
    raise TypeError(f"unexpected node {f!r}")


def valid_in_algebra(a: FiniteModalAlgebra, f: Formula) -> bool:
    """True iff ``f`` denotes 1 under every valuation (all evaluated in one vector pass)."""
    check_agents(f, a.agents)
    names = variables(f)
    if len(names) * a.atoms > MAX_VALUATION_BITS:
        raise CapExceeded(f"{len(names)} variables over {a.atoms} atoms exceeds the cap")
    grids = np.meshgrid(*[np.arange(a.size, dtype=np.int64)] * len(names), indexing="ij")
    val = {p: g.ravel() for p, g in zip(names, grids)}
    out = _value_all(a, expand(f, a.agents), val)
    return bool(np.all(out == a.full))
