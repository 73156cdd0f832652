"""Formulas of common knowledge logic: AST, parser, printer, abbreviations.

Core connectives are Var, Top, Bot, And, Not, K (agent knowledge) and C
(common knowledge).  Or, Implies, Iff and E (everyone knows) are kept as AST
nodes so that printed output and proof scripts read naturally; semantic code
calls :func:`expand` (or :func:`expand_e`) before evaluating.

Concrete ASCII grammar::

    var      [a-z][a-z0-9_]*          (except ``top`` / ``bot``)
    unary    ~f   K<digits> f   E f   C f
    binary   f & g   f | g   f -> g   f <-> g

Binding strength, tightest first: unary, ``&``, ``|``, ``->``, ``<->``.
``->`` associates to the right, the others to the left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union


class FormulaError(ValueError):
    """Raised for malformed formula text or out-of-range agents."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class AgentSet(tuple):
    """Ascending tuple of distinct positive agent indices."""

    def __new__(cls, agents: Iterable[int]):
        agents = [int(a) for a in agents]
        if not agents:
            raise ValueError("agent set must be nonempty")
        if len(set(agents)) != len(agents):
            raise ValueError(f"duplicate agents in {agents}")
        if any(a < 1 for a in agents):
            raise ValueError("agent indices must be positive")
        return super().__new__(cls, sorted(agents))

    @classmethod
    def of_size(cls, n: int) -> "AgentSet":
        return cls(range(1, n + 1))

    def __repr__(self):
        return f"AgentSet({list(self)})"


# --------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class K:
    agent: int
    sub: "Formula"


@dataclass(frozen=True)
class C:
    sub: "Formula"


@dataclass(frozen=True)
class E:
    sub: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Top, Bot, Not, And, K, C, E, Or, Implies, Iff]

TOP = Top()
BOT = Bot()

UNARY = (Not, K, C, E)
BINARY = (And, Or, Implies, Iff)
CORE = (Var, Top, Bot, Not, And, K, C)


def children(f: Formula) -> tuple:
    if isinstance(f, UNARY):
        return (f.sub,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, ``f`` first."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def variables(f: Formula) -> list[str]:
    """Variable names of ``f`` in order of first occurrence."""
    seen = {}
    for g in subformulas(f):
        if isinstance(g, Var):
            seen.setdefault(g.name, None)
    return list(seen)


def agents_used(f: Formula) -> set[int]:
    return {g.agent for g in subformulas(f) if isinstance(g, K)}


def depth(f: Formula) -> int:
    kids = children(f)
    return 1 + max(map(depth, kids)) if kids else 0


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def is_core(f: Formula) -> bool:
    return all(isinstance(g, CORE) for g in subformulas(f))


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is top."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _rebuild(f: Formula, kids: list) -> Formula:
    if isinstance(f, K):
        return K(f.agent, kids[0])
    if isinstance(f, UNARY):
        return type(f)(kids[0])
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    return f


def check_agents(f: Formula, agents: AgentSet) -> None:
    unknown = agents_used(f) - set(agents)
    if unknown:
        raise FormulaError(f"unknown agent(s) {sorted(unknown)}; agents are {list(agents)}")


# --------------------------------------------------------------------------
# abbreviations

def expand(f: Formula, agents: AgentSet) -> Formula:
    """Rewrite ``f`` into the core connectives.

    ``E g`` becomes ``K_1 g & ... & K_n g``; ``g | h`` becomes
    ``~(~g & ~h)``; ``g -> h`` is ``~g | h``; ``g <-> h`` is
    ``(g -> h) & (h -> g)``.
    """
    if isinstance(f, (Var, Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(expand(f.sub, agents))
    if isinstance(f, And):
        return And(expand(f.left, agents), expand(f.right, agents))
    if isinstance(f, K):
        return K(f.agent, expand(f.sub, agents))
    if isinstance(f, C):
        return C(expand(f.sub, agents))
    if isinstance(f, E):
        g = expand(f.sub, agents)
        return conj(K(i, g) for i in agents)
    if isinstance(f, Or):
        return Not(And(Not(expand(f.left, agents)), Not(expand(f.right, agents))))
    if isinstance(f, Implies):
        return expand(Or(Not(f.left), f.right), agents)
    if isinstance(f, Iff):
        return expand(And(Implies(f.left, f.right), Implies(f.right, f.left)), agents)
    raise TypeError(f"not a formula: {f!r}")


def expand_e(f: Formula, agents: AgentSet) -> Formula:
    """Eliminate only E, leaving the other connectives untouched."""
    if isinstance(f, E):
        g = expand_e(f.sub, agents)
        return conj(K(i, g) for i in agents)
    kids = children(f)
    if not kids:
        return f
    return _rebuild(f, [expand_e(k, agents) for k in kids])


def e_power(f: Formula, n: int) -> Formula:
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    for _ in range(n):
        f = E(f)
    return f


def substitute(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Simultaneous uniform substitution of variables."""
    if isinstance(f, Var):
        return mapping.get(f.name, f)
    kids = children(f)
    if not kids:
        return f
    return _rebuild(f, [substitute(k, mapping) for k in kids])


# --------------------------------------------------------------------------
# printing

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYMBOL = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_UNARY_PREC = 5


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), _UNARY_PREC)


def to_text(f: Formula) -> str:
    """Canonical text with minimal parentheses; ``parse`` inverts it."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, UNARY):
        inner = to_text(f.sub)
        if _prec(f.sub) < _UNARY_PREC:
            inner = f"({inner})"
        if isinstance(f, Not):
            return "~" + inner
        head = f"K{f.agent}" if isinstance(f, K) else type(f).__name__
        return f"{head} {inner}"
    p = _prec(f)
    left, right = to_text(f.left), to_text(f.right)
    right_assoc = isinstance(f, Implies)
    if _prec(f.left) < p or (right_assoc and _prec(f.left) == p):
        left = f"({left})"
    if _prec(f.right) < p or (not right_assoc and _prec(f.right) == p):
        right = f"({right})"
    return f"{left} {_SYMBOL[type(f)]} {right}"


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<var>[a-z][a-z0-9_]*)|(?P<k>K\d+)|(?P<kbad>K)|(?P<op><->|->|[~&|()EC]))"
)
_KEYWORDS = {"top", "bot"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = len(text) - len(text[pos:].lstrip())
            raise FormulaError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        value = m.group(kind)
        if kind == "kbad":
            raise FormulaError("K must be followed by an agent index", start)
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, agents: AgentSet | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.agents = agents

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise FormulaError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Formula:
        f = self.iff()
        kind, val, pos = self.peek()
        if kind != "end":
            raise FormulaError(f"unexpected {val!r}", pos)
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.peek()[1] == "<->":
            self.take()
            f = Iff(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Implies(f, self.implies())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, val, pos = self.take()
        if val == "~":
            return Not(self.unary())
        if kind == "k":
            agent = int(val[1:])
            if self.agents is not None and agent not in self.agents:
                raise FormulaError(f"unknown agent {agent}; agents are {list(self.agents)}", pos)
            return K(agent, self.unary())
        if val == "E":
            return E(self.unary())
        if val == "C":
            return C(self.unary())
        if val == "(":
            f = self.iff()
            self.expect(")")
            return f
        if kind == "var":
            if val == "top":
                return TOP
            if val == "bot":
                return BOT
            return Var(val)
        raise FormulaError(f"unexpected {val or 'end of input'!r}", pos)


def parse(text: str, agents: AgentSet | None = None) -> Formula:
    """Parse ``text``; agent indices are checked against ``agents`` if given."""
    return _Parser(text, agents).parse()


def is_variable_name(name: str) -> bool:
    return re.fullmatch(r"[a-z][a-z0-9_]*", name) is not None and name not in _KEYWORDS
