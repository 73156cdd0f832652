"""The algebra of finite and cofinite subsets of the naturals.

Elements are exact: a finite element is stored by the (finite) set of
positions where it is 1, a cofinite one by the set of positions where it
is 0.  Supports are kept as int bitmasks.

With ``N`` agents the operators are

* ``K_n x = 0`` for finite ``x`` and ``K_n 1 = 1``;
* for cofinite ``x != 1`` with ``k = k(x)``: clear the even positions
  ``< k``, or ``<= k`` when ``n = k (mod N)``; odd positions are kept;
* ``C x = 1`` if ``x = 1``, otherwise 0.

This is a modal algebra satisfying the three induction-style axioms, but
``{E^n a}`` for ``a = C{0}`` has no greatest lower bound, so C cannot be the
meet of the E-iterates.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator


def _mask(positions: Iterable[int]) -> int:
    return reduce(lambda m, i: m | (1 << i), positions, 0)


def _positions(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def _evens_upto(limit: int) -> int:
    """Mask of the even positions ``0, 2, ..., <= limit``."""
    return _mask(range(0, limit + 1, 2)) if limit >= 0 else 0


@dataclass(frozen=True)
class SElem:
    cofinite: bool
    mask: int

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError("support must be a finite set of naturals")

    @property
    def kind(self) -> str:
        return "cofinite" if self.cofinite else "finite"

    @property
    def support(self) -> frozenset:
        return frozenset(_positions(self.mask))

    def __call__(self, i: int) -> int:
        """Value at position ``i``."""
        bit = self.mask >> i & 1
        return 1 - bit if self.cofinite else bit

    def __and__(self, other: "SElem") -> "SElem":
        if self.cofinite and other.cofinite:
            return SElem(True, self.mask | other.mask)
        if self.cofinite:
            return SElem(False, other.mask & ~self.mask)
        if other.cofinite:
            return SElem(False, self.mask & ~other.mask)
        return SElem(False, self.mask & other.mask)

    def __invert__(self) -> "SElem":
        return SElem(not self.cofinite, self.mask)

    def __or__(self, other: "SElem") -> "SElem":
        return ~(~self & ~other)

    def __le__(self, other: "SElem") -> bool:
        return (self & ~other) == ZERO

    def __lt__(self, other: "SElem") -> bool:
        return self <= other and self != other

    def implies(self, other: "SElem") -> "SElem":
        return ~self | other

    def __str__(self):
        body = ",".join(map(str, _positions(self.mask)))
        return f"{'C' if self.cofinite else 'F'}{{{body}}}"

    def __repr__(self):
        return str(self)


def fin(*ones: int) -> SElem:
    """Finite element, 1 exactly at ``ones``."""
    return SElem(False, _mask(ones))


def cof(*zeros: int) -> SElem:
    """Cofinite element, 0 exactly at ``zeros``."""
    return SElem(True, _mask(zeros))


ZERO = SElem(False, 0)
ONE = SElem(True, 0)
# the element that is 0 exactly at position 0
A = SElem(True, 1)


def parse_elem(text: str) -> SElem:
    """Inverse of ``str``: ``F{1,3}`` or ``C{0,2}``."""
    text = text.strip()
    if len(text) < 3 or text[0] not in "FC" or text[1] != "{" or text[-1] != "}":
        raise ValueError(f"not an element: {text!r}")
    body = text[2:-1].strip()
    positions = [int(t) for t in body.split(",")] if body else []
    if any(p < 0 for p in positions):
        raise ValueError(f"negative position in {text!r}")
    return SElem(text[0] == "C", _mask(positions))


def k_of(x: SElem) -> int:
    """Least even ``i`` such that ``x`` is 1 at every even position ``>= i``."""
    if not x.cofinite or x == ONE:
        raise ValueError(f"k is defined only for cofinite elements other than 1, got {x}")
    even_zeros = x.mask & _evens_upto(x.mask.bit_length())
    return even_zeros.bit_length() + 1 if even_zeros else 0


@dataclass(frozen=True)
class SAlgebra:
    n_agents: int

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("need at least one agent")

    @property
    def agents(self) -> range:
        return range(1, self.n_agents + 1)

    def box_k(self, n: int, x: SElem) -> SElem:
        if n not in self.agents:
            raise ValueError(f"agent {n} not in 1..{self.n_agents}")
        if not x.cofinite:
            return ZERO
        if x == ONE:
            return ONE
        k = k_of(x)
        limit = k if n % self.n_agents == k % self.n_agents else k - 1
        return SElem(True, x.mask | _evens_upto(limit))

    def e_of(self, x: SElem) -> SElem:
        return reduce(SElem.__and__, (self.box_k(n, x) for n in self.agents), ONE)

    def box_c(self, x: SElem) -> SElem:
        return ONE if x == ONE else ZERO

    def box(self, op, x: SElem) -> SElem:
        return self.box_c(x) if op == "C" else self.box_k(op, x)

    @property
    def operators(self) -> list:
        return [*self.agents, "C"]

    def e_power(self, x: SElem, n: int) -> SElem:
        for _ in range(n):
            x = self.e_of(x)
        return x


def e_closed_form(x: SElem) -> SElem:
    """E for cofinite ``x != 1``: clear every even position ``<= k(x)``."""
    return SElem(True, x.mask | _evens_upto(k_of(x)))


def e_power_of_a(n: int) -> SElem:
    """``E^n a`` in closed form: zero exactly at ``0, 2, ..., 2n``."""
    return SElem(True, _evens_upto(2 * n))


# --------------------------------------------------------------------------
# refuting a greatest lower bound for {E^n a}

@dataclass(frozen=True)
class NotLowerBound:
    """``candidate`` is not below ``E^n a``."""

    n: int

    def to_dict(self):
        return {"verdict": "not_lower_bound", "n": self.n}


@dataclass(frozen=True)
class StrictlyBetter:
    """``better`` is a lower bound strictly above ``candidate``."""

    better: SElem

    def to_dict(self):
        return {"verdict": "strictly_better", "better": str(self.better)}


def _odd_mask_upto(limit: int) -> int:
    return _mask(range(1, limit + 1, 2))


def no_glb_witness(alg: SAlgebra, candidate: SElem) -> NotLowerBound | StrictlyBetter:
    """Show ``candidate`` is not a greatest lower bound of ``{E^n a}``.

    The lower bounds are exactly the finite elements that vanish on the even
    positions.  Anything else is above some ``E^n a`` at an even position;
    a genuine lower bound can be improved by switching on its least unused
    odd position.  Each verdict is re-checked with the algebra's own E.
    """
    if candidate.cofinite:
        first_even_one = next(i for i in range(0, candidate.mask.bit_length() + 2, 2) if candidate(i))
    else:
        evens = candidate.mask & ~_odd_mask_upto(candidate.mask.bit_length())
        first_even_one = _positions(evens)[0] if evens else None

    if first_even_one is not None:
        n = first_even_one // 2
        if candidate <= alg.e_power(A, n):
            raise AssertionError(f"{candidate} unexpectedly below E^{n} a")
        return NotLowerBound(n)

    i = 1
    while candidate(i):
        i += 2
    better = candidate | fin(i)
    bound = max(better.mask.bit_length(), 1)
    # a finite element below E^n a for n covering its support is below all of them
    if not better <= alg.e_power(A, bound) or not candidate < better:
        raise AssertionError(f"{better} is not a better lower bound than {candidate}")
    return StrictlyBetter(better)


# --------------------------------------------------------------------------
# the exhaustive invariant suite

def family(bits: int) -> Iterator[SElem]:
    """All elements with support inside ``{0..bits-1}``, finite then cofinite."""
    for cof in (False, True):
        for m in range(1 << bits):
            yield SElem(cof, m)


def truncate(x: SElem, width: int) -> list[int]:
    return [x(i) for i in range(width)]


@dataclass
class SuiteResult:
    name: str
    checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self):
        return {"check": self.name, "ok": self.ok, "checked": self.checked,
                "failures": self.failures[:10]}


def _record(failures, limit, item):
    if len(failures) < limit:
        failures.append(item)


def check_unary_laws(alg: SAlgebra, bits: int, max_failures: int = 10) -> SuiteResult:
    """``box 1 = 1`` for every operator, MH axioms, and the extra structure of K_n.

    The K4-style law ``K_n x <= K_n K_n x`` is reported separately by
    :func:`check_k4`.
    """
    failures = []
    count = 0
    for op in alg.operators:
        if alg.box(op, ONE) != ONE:
            _record(failures, max_failures, {"law": "box1", "op": op})
    for x in family(bits):
        count += 1
        cx = alg.box_c(x)
        ex = alg.e_of(x)
        if not cx <= x:
            _record(failures, max_failures, {"law": "mh1", "x": str(x)})
        if not cx <= alg.e_of(cx):
            _record(failures, max_failures, {"law": "mh2", "x": str(x)})
        if not alg.box_c(x.implies(ex)) <= x.implies(cx):
            _record(failures, max_failures, {"law": "mh3", "x": str(x)})
        for n in alg.agents:
            if not alg.box_k(n, x) <= x:
                _record(failures, max_failures, {"law": "T", "agent": n, "x": str(x)})
        if x.cofinite and x != ONE and ex != e_closed_form(x):
            _record(failures, max_failures, {"law": "e_closed_form", "x": str(x)})
    for n in alg.agents:
        if alg.box_k(n, ZERO) != ZERO:
            _record(failures, max_failures, {"law": "D", "agent": n})
    return SuiteResult(f"unary_laws[N={alg.n_agents}]", count, failures)


def check_k4(alg: SAlgebra, bits: int, max_failures: int = 10) -> SuiteResult:
    failures = []
    count = 0
    for x in family(bits):
        for n in alg.agents:
            count += 1
            kx = alg.box_k(n, x)
            if not kx <= alg.box_k(n, kx):
                _record(failures, max_failures, {"law": "K4", "agent": n, "x": str(x)})
    return SuiteResult(f"k4[N={alg.n_agents}]", count, failures)


def _pair_failures(alg, tables, x, y, failures, max_failures):
    z = x & y
    for op in alg.operators:
        t = tables[op]
        bz = t[z] if z in t else alg.box(op, z)
        if bz != t[x] & t[y]:
            _record(failures, max_failures, {"law": "multiplicative", "op": op, "x": str(x), "y": str(y)})


def check_multiplicative(alg: SAlgebra, bits: int, *, samples: int | None = None,
                         seed: int = 0, max_failures: int = 10) -> SuiteResult:
    """``box(x & y) = box x & box y`` for every operator.

    All pairs from the ``bits``-family, or ``samples`` seeded random pairs.
    """
    elems = list(family(bits))
    tables = {op: {x: alg.box(op, x) for x in elems} for op in alg.operators}
    failures = []
    if samples is None:
        pairs = ((x, y) for x in elems for y in elems)
        count = len(elems) ** 2
    else:
        rng = random.Random(seed)
        pairs = ((rng.choice(elems), rng.choice(elems)) for _ in range(samples))
        count = samples
    for x, y in pairs:
        _pair_failures(alg, tables, x, y, failures, max_failures)
    kind = "all" if samples is None else f"{samples} sampled"
    return SuiteResult(f"multiplicative[N={alg.n_agents}, bits={bits}, {kind} pairs]", count, failures)


def check_boolean_ops(bits: int, width: int = 64, samples: int = 2000, seed: int = 0) -> SuiteResult:
    """Meet, join, complement and order against truncated bit vectors."""
    elems = list(family(bits))
    rng = random.Random(seed)
    failures = []
    for _ in range(samples):
        x, y = rng.choice(elems), rng.choice(elems)
        tx, ty = truncate(x, width), truncate(y, width)
        if truncate(x & y, width) != [a & b for a, b in zip(tx, ty)]:
            failures.append({"op": "meet", "x": str(x), "y": str(y)})
        if truncate(x | y, width) != [a | b for a, b in zip(tx, ty)]:
            failures.append({"op": "join", "x": str(x), "y": str(y)})
        if truncate(~x, width) != [1 - a for a in tx]:
            failures.append({"op": "complement", "x": str(x)})
        if (x <= y) != all(a <= b for a, b in zip(tx, ty)):
            failures.append({"op": "leq", "x": str(x), "y": str(y)})
    return SuiteResult("boolean_ops", samples, failures[:10])


def check_e_powers(alg: SAlgebra, upto: int = 32) -> SuiteResult:
    failures = []
    x = A
    ks = []
    for n in range(upto + 1):
        if x != e_power_of_a(n):
            failures.append({"n": n, "got": str(x), "want": str(e_power_of_a(n))})
        ks.append(k_of(x))
        x = alg.e_of(x)
    if any(b <= a for a, b in zip(ks, ks[1:])):
        failures.append({"k_sequence": ks})
    return SuiteResult(f"e_powers[N={alg.n_agents}, n<={upto}]", upto + 1, failures)


def check_no_glb(alg: SAlgebra, bits: int, max_failures: int = 10) -> SuiteResult:
    """Every element of the family gets a verdict; lower bounds are exactly finite odd sets."""
    failures = []
    count = 0
    odd_only = _odd_mask_upto(bits)
    for cand in family(bits):
        count += 1
        verdict = no_glb_witness(alg, cand)
        is_lower = not cand.cofinite and cand.mask & ~odd_only == 0
        if is_lower != isinstance(verdict, StrictlyBetter):
            _record(failures, max_failures, {"candidate": str(cand), "verdict": verdict.to_dict()})
    return SuiteResult(f"no_glb[N={alg.n_agents}, bits={bits}]", count, failures)


def run_suite(bound: int = 12, agent_counts=(1, 2, 3), *, pair_bits: int = 8,
              samples: int = 100_000, seed: int = 0, e_upto: int = 32) -> list[SuiteResult]:
    """The full battery of checks on supports within ``{0..bound-1}``."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    pair_bits = min(pair_bits, bound)
    results = [check_boolean_ops(bound, seed=seed)]
    for N in agent_counts:
        alg = SAlgebra(N)
        results.append(check_unary_laws(alg, bound))
        if N >= 3:
            # with two agents K_2 always takes the <= branch and K4 fails
            results.append(check_k4(alg, bound))
        results.append(check_multiplicative(alg, pair_bits))
        if bound > pair_bits:
            results.append(check_multiplicative(alg, bound, samples=samples, seed=seed + N))
        results.append(check_e_powers(alg, e_upto))
        results.append(check_no_glb(alg, bound))
    return results


def figure_rows(alg: SAlgebra, x: SElem, columns: int) -> list[tuple[str, list[int]]]:
    """Values at even positions ``0, 2, ..`` for x, each K_n x and E x."""
    evens = range(0, 2 * columns, 2)
    rows = [("x", [x(i) for i in evens])]
    for n in alg.agents:
        kx = alg.box_k(n, x)
        rows.append((f"K{n} x", [kx(i) for i in evens]))
    ex = alg.e_of(x)
    rows.append(("E x", [ex(i) for i in evens]))
    return rows


def e_power_rows(alg: SAlgebra, upto: int, columns: int) -> list[tuple[str, list[int]]]:
    rows = []
    x = A
    for n in range(upto + 1):
        rows.append((f"E^{n} a", [x(i) for i in range(columns)]))
        x = alg.e_of(x)
    return rows


def format_table(header: list, rows: list[tuple[str, list[int]]]) -> str:
    label_w = max(len(r[0]) for r in rows + [("i", [])])
    cell_w = max(len(str(h)) for h in header)
    lines = [f"{'i':<{label_w}} | " + " ".join(f"{h:>{cell_w}}" for h in header)]
    lines.append("-" * len(lines[0]))
    for label, vals in rows:
        lines.append(f"{label:<{label_w}} | " + " ".join(f"{v:>{cell_w}}" for v in vals))
    return "\n".join(lines)


def verdict_json(candidate: SElem, verdict) -> str:
    return json.dumps({"candidate": str(candidate), **verdict.to_dict()})
