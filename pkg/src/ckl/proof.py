"""Checker for Hilbert-style derivations in the common knowledge system.

Axioms: all tautologies; the K schema for every primitive box (K_i and C);
``C p -> p``; ``C p -> E C p``; ``C(p -> E p) -> (p -> C p)``.  Rules: modus
ponens, uniform substitution, necessitation for K_i and C.  E is an
abbreviation, never a primitive box.  Formulas are compared after
eliminating E and with no other normalisation.

Script format, one step per line::

    <n>. <formula> ; <justification>

with justification one of ``taut``, ``axK K1``, ``axK C``, ``axC1``,
``axC2``, ``axC3``, ``mp <i> <j>`` (line j is ``line i -> this``),
``subst <i> p:=<formula>, ...``, ``nec K1 <i>``, ``nec C <i>``.  Blank
lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Union

from .formula import (
    AgentSet, And, Bot, C, E, Formula, FormulaError, Iff, Implies, K, Not,
    Or, Top, Var, children, expand_e, is_variable_name, parse, substitute,
    to_text,
)
from .kripke import CapExceeded

MAX_TAUTOLOGY_ATOMS = 20


# --------------------------------------------------------------------------
# justifications

@dataclass(frozen=True)
class Taut:
    def __str__(self):
        return "taut"


@dataclass(frozen=True)
class AxK:
    op: object  # agent index or "C"

    def __str__(self):
        return f"axK {_op_text(self.op)}"


@dataclass(frozen=True)
class AxC1:
    def __str__(self):
        return "axC1"


@dataclass(frozen=True)
class AxC2:
    def __str__(self):
        return "axC2"


@dataclass(frozen=True)
class AxC3:
    def __str__(self):
        return "axC3"


@dataclass(frozen=True)
class MP:
    minor: int
    major: int

    def __str__(self):
        return f"mp {self.minor} {self.major}"


@dataclass(frozen=True)
class Subst:
    line: int
    mapping: tuple  # sorted (name, formula) pairs

    def __str__(self):
        body = ", ".join(f"{p}:={to_text(f)}" for p, f in self.mapping)
        return f"subst {self.line} {body}"


@dataclass(frozen=True)
class Nec:
    op: object
    line: int

    def __str__(self):
        return f"nec {_op_text(self.op)} {self.line}"


Justification = Union[Taut, AxK, AxC1, AxC2, AxC3, MP, Subst, Nec]


def _op_text(op) -> str:
    return "C" if op == "C" else f"K{op}"


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    justification: Justification


@dataclass(frozen=True)
class Proof:
    agents: AgentSet
    lines: tuple[ProofLine, ...] = field(default=())

    def to_script(self) -> str:
        return "".join(f"{i}. {to_text(ln.formula)} ; {ln.justification}\n"
                       for i, ln in enumerate(self.lines, 1))


@dataclass(frozen=True)
class Accepted:
    conclusion: Formula | None

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Rejected:
    line: int
    reason: str

    def __bool__(self):
        return False


class ProofSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


# --------------------------------------------------------------------------
# tautologies

def _box_op(f: Formula):
    if isinstance(f, K):
        return f.agent
    if isinstance(f, C):
        return "C"
    return None


def _truth(f: Formula, atoms: dict, rows: int):
    full = (1 << rows) - 1
    if isinstance(f, (K, C, Var)):
        return atoms[f]
    if isinstance(f, Top):
        return full
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Not):
        return ~_truth(f.sub, atoms, rows) & full
    a = _truth(f.left, atoms, rows)
    b = _truth(f.right, atoms, rows)
    if isinstance(f, And):
        return a & b
    if isinstance(f, Or):
        return a | b
    if isinstance(f, Implies):
        return (~a | b) & full
    if isinstance(f, Iff):
        return ~(a ^ b) & full
    raise TypeError(f"unexpected node {f!r}")


def propositional_atoms(f: Formula) -> list[Formula]:
    """Variables and maximal K/C subformulas, in order of first occurrence."""
    seen = {}
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Var, K, C)):
            seen.setdefault(g, None)
        else:
            stack.extend(reversed(children(g)))
    return list(seen)


def _column(j: int, n: int) -> int:
    # truth-table column for atom j: row r has the atom true iff bit j of r is set
    block = ((1 << (1 << j)) - 1) << (1 << j)
    period = 1 << (j + 1)
    col = 0
    for start in range(0, 1 << n, period):
        col |= block << start
    return col


def is_tautology(f: Formula, agents: AgentSet) -> bool:
    """Propositional tautology after abstracting modal subformulas to atoms.

    E is eliminated first, then each maximal K_i/C subformula becomes an
    atom (syntactically equal subformulas share one atom).  All 2^n rows are
    evaluated at once as bits of an int.
    """
    g = expand_e(f, agents)
    atoms = propositional_atoms(g)
    n = len(atoms)
    if n > MAX_TAUTOLOGY_ATOMS:
        raise CapExceeded(f"{n} atoms after abstraction exceeds {MAX_TAUTOLOGY_ATOMS}")
    rows = 1 << n
    cols = {a: _column(j, n) for j, a in enumerate(atoms)}
    return _truth(g, cols, rows) == (1 << rows) - 1


# --------------------------------------------------------------------------
# axiom schemas

AXIOMS = ("K", "C1", "C2", "C3")


def match_axiom(f: Formula, which: str, agents: AgentSet, op=None) -> bool:
    """Whether ``f`` instantiates schema ``which`` (``"K"``, ``"C1"``, ``"C2"``, ``"C3"``).

    For ``"K"`` the box may be any K_i or C, or exactly ``op`` if given.
    """
    g = expand_e(f, agents)
    if not isinstance(g, Implies):
        return False
    lhs, rhs = g.left, g.right
    if which == "K":
        box = _box_op(lhs)
        if box is None or (op is not None and box != op):
            return False
        if not (isinstance(lhs.sub, Implies) and isinstance(rhs, Implies)):
            return False
        a, b = lhs.sub.left, lhs.sub.right
        return (_box_op(rhs.left) == box and _box_op(rhs.right) == box
                and rhs.left.sub == a and rhs.right.sub == b)
    if not isinstance(lhs, C):
        return False
    if which == "C1":
        return rhs == lhs.sub
    if which == "C2":
        return rhs == expand_e(E(lhs), agents)
    if which == "C3":
        inner = lhs.sub
        if not (isinstance(inner, Implies) and isinstance(rhs, Implies)):
            return False
        a = inner.left
        return (inner.right == expand_e(E(a), agents)
                and rhs.left == a and rhs.right == C(a))
    raise ValueError(f"unknown axiom {which!r}")


# --------------------------------------------------------------------------
# checking

def _same(f: Formula, g: Formula, agents: AgentSet) -> bool:
    return expand_e(f, agents) == expand_e(g, agents)


def _wrap(op, f: Formula) -> Formula:
    return C(f) if op == "C" else K(op, f)


def _check_line(proof: Proof, n: int) -> str | None:
    """Reason line ``n`` (1-based) is not justified, or None."""
    agents = proof.agents
    line = proof.lines[n - 1]
    f, just = line.formula, line.justification

    def earlier(i):
        if not 1 <= i < n:
            raise _BadReference(f"line {i} is not an earlier line")
        return proof.lines[i - 1].formula

    try:
        if isinstance(just, Taut):
            return None if is_tautology(f, agents) else "not a tautology"
        if isinstance(just, AxK):
            if just.op != "C" and just.op not in agents:
                return f"unknown operator {_op_text(just.op)}"
            return None if match_axiom(f, "K", agents, just.op) else f"not an instance of the K schema for {_op_text(just.op)}"
        for cls, name in ((AxC1, "C1"), (AxC2, "C2"), (AxC3, "C3")):
            if isinstance(just, cls):
                return None if match_axiom(f, name, agents) else f"not an instance of axiom {name}"
        if isinstance(just, MP):
            minor, major = earlier(just.minor), earlier(just.major)
            if _same(major, Implies(minor, f), agents):
                return None
            return f"line {just.major} is not 'line {just.minor} -> this line'"
        if isinstance(just, Subst):
            src = earlier(just.line)
            if _same(substitute(src, dict(just.mapping)), f, agents):
                return None
            return f"not a substitution instance of line {just.line}"
        if isinstance(just, Nec):
            if just.op != "C" and just.op not in agents:
                return f"unknown operator {_op_text(just.op)}"
            if _same(_wrap(just.op, earlier(just.line)), f, agents):
                return None
            return f"not {_op_text(just.op)} applied to line {just.line}"
    except _BadReference as exc:
        return str(exc)
    except CapExceeded as exc:
        return str(exc)
    return f"unknown justification {just!r}"


class _BadReference(Exception):
    pass


def check_proof(proof: Proof) -> Accepted | Rejected:
    if not proof.lines:
        return Rejected(0, "no lines")
    for n in range(1, len(proof.lines) + 1):
        reason = _check_line(proof, n)
        if reason is not None:
            return Rejected(n, reason)
    return Accepted(proof.lines[-1].formula)


# --------------------------------------------------------------------------
# scripts

_LINE = re.compile(r"^\s*(\d+)\s*\.\s*(.*?)\s*;\s*(.*?)\s*$")
_OP = re.compile(r"^(?:K(\d+)|C)$")


def _parse_op(tok: str, lineno: int):
    m = _OP.match(tok)
    if not m:
        raise ProofSyntaxError(lineno, f"expected an operator (K<n> or C), got {tok!r}")
    return int(m.group(1)) if m.group(1) else "C"


def _parse_index(tok: str, lineno: int) -> int:
    if not tok.isdigit():
        raise ProofSyntaxError(lineno, f"expected a line number, got {tok!r}")
    return int(tok)


def parse_justification(text: str, agents: AgentSet, lineno: int = 0) -> Justification:
    parts = text.split()
    if not parts:
        raise ProofSyntaxError(lineno, "missing justification")
    head, args = parts[0], parts[1:]

    def arity(k):
        if len(args) != k:
            raise ProofSyntaxError(lineno, f"{head} takes {k} argument(s)")

    if head == "taut":
        arity(0)
        return Taut()
    if head in ("axC1", "axC2", "axC3"):
        arity(0)
        return {"axC1": AxC1, "axC2": AxC2, "axC3": AxC3}[head]()
    if head == "axK":
        arity(1)
        return AxK(_parse_op(args[0], lineno))
    if head == "mp":
        arity(2)
        return MP(_parse_index(args[0], lineno), _parse_index(args[1], lineno))
    if head == "nec":
        arity(2)
        return Nec(_parse_op(args[0], lineno), _parse_index(args[1], lineno))
    if head == "subst":
        if not args:
            raise ProofSyntaxError(lineno, "subst needs a line number")
        src = _parse_index(args[0], lineno)
        body = text.split(None, 2)[2] if len(parts) > 2 else ""
        mapping = {}
        for item in filter(None, (s.strip() for s in body.split(","))):
            name, sep, ftext = item.partition(":=")
            name = name.strip()
            if not sep or not is_variable_name(name):
                raise ProofSyntaxError(lineno, f"bad substitution {item!r}")
            if name in mapping:
                raise ProofSyntaxError(lineno, f"variable {name} substituted twice")
            try:
                mapping[name] = parse(ftext, agents)
            except FormulaError as exc:
                raise ProofSyntaxError(lineno, str(exc)) from exc
        if not mapping:
            raise ProofSyntaxError(lineno, "empty substitution")
        return Subst(src, tuple(sorted(mapping.items(), key=lambda kv: kv[0])))
    raise ProofSyntaxError(lineno, f"unknown justification {head!r}")


def parse_proof(text: str, agents: AgentSet) -> Proof:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        m = _LINE.match(stripped)
        if not m:
            raise ProofSyntaxError(lineno, "expected '<n>. <formula> ; <justification>'")
        num = int(m.group(1))
        if num != len(lines) + 1:
            raise ProofSyntaxError(lineno, f"step numbered {num}, expected {len(lines) + 1}")
        try:
            f = parse(m.group(2), agents)
        except FormulaError as exc:
            raise ProofSyntaxError(lineno, str(exc)) from exc
        lines.append(ProofLine(f, parse_justification(m.group(3), agents, lineno)))
    return Proof(AgentSet(agents), tuple(lines))


def check_script(text: str, agents: AgentSet) -> Accepted | Rejected:
    """Parse and check; syntax errors become rejections at the offending step."""
    try:
        proof = parse_proof(text, agents)
    except ProofSyntaxError as exc:
        return Rejected(exc.line, f"syntax: {exc}")
    return check_proof(proof)


# --------------------------------------------------------------------------
# bundled fixture proofs (two agents)

FIXTURE_AGENTS = AgentSet([1, 2])


def fixture_names() -> list[str]:
    root = resources.files("ckl") / "proofs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".prf"))


def fixture_text(name: str) -> str:
    return (resources.files("ckl") / "proofs" / name).read_text()
