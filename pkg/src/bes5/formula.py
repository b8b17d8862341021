"""Formula AST for multi-agent modal logic, with parser and printer.

Concrete syntax::

    formula := imp
    imp     := unary ("->" imp)?
    unary   := "~" unary | "[" ident "]" unary | "K{" ident "}" unary
             | "bot" | ident | "(" formula ")"

``~f`` is sugar for ``f -> bot``; there is no negation node.  The printer
writes implications into ``bot`` back as ``~``, so ``~~p`` is the canonical
form of ``(p -> bot) -> bot``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

IDENT = re.compile(r"[a-z][a-z0-9_]*")
AGENT = re.compile(r"[a-z0-9_]+")


class FormulaSyntaxError(ValueError):
    """Raised on malformed formula text; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass(frozen=True, order=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Know:
    agent: str
    body: "Formula"

    def __str__(self) -> str:
        return print_formula(self)


Formula = Union[Atom, Bottom, Implies, Know]

BOT = Bottom()


def neg(f: Formula) -> Formula:
    return Implies(f, BOT)


def is_neg(f: Formula) -> bool:
    return isinstance(f, Implies) and isinstance(f.right, Bottom)


# -- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<kopen>K\{)
  | (?P<lbrack>\[)
  | (?P<rbrack>\])
  | (?P<rbrace>\})
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<tilde>~)
  | (?P<word>[a-z0-9_]+)
    """,
    re.VERBOSE,
)


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            line, col = _position(text, pos)
            raise FormulaSyntaxError(f"unknown token {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def error(self, message: str, offset: int | None = None) -> FormulaSyntaxError:
        if offset is None:
            offset = self.peek()[2]
        return FormulaSyntaxError(message, *_position(self.text, offset))

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            found = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise self.error(f"expected {kind}, found {found}")
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.unary()
        if self.peek()[0] == "arrow":
            self.i += 1
            return Implies(left, self.formula())
        return left

    def agent(self, closer: str) -> str:
        kind, value, offset = self.expect("word")
        if not AGENT.fullmatch(value) or value == "bot":
            raise self.error(f"bad agent name {value!r}", offset)
        self.expect(closer)
        return value

    def unary(self) -> Formula:
        kind, value, offset = self.peek()
        if kind == "tilde":
            self.i += 1
            return neg(self.unary())
        if kind == "lbrack":
            self.i += 1
            agent = self.agent("rbrack")
            return Know(agent, self.unary())
        if kind == "kopen":
            self.i += 1
            agent = self.agent("rbrace")
            return Know(agent, self.unary())
        if kind == "lparen":
            self.i += 1
            inner = self.formula()
            self.expect("rparen")
            return inner
        if kind == "word":
            self.i += 1
            if value == "bot":
                return BOT
            if not IDENT.fullmatch(value):
                raise self.error(f"bad atom name {value!r}", offset)
            return Atom(value)
        if kind == "eof":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {value!r}")


def parse_formula(text: str) -> Formula:
    """Parse ``text`` into a formula; ``->`` associates to the right."""
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "eof":
        raise p.error(f"unexpected token {p.peek()[1]!r}")
    return f


def _print(f: Formula, arrow_ok: bool) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bottom):
        return "bot"
    if isinstance(f, Know):
        return f"[{f.agent}]" + _print(f.body, False)
    if is_neg(f):
        return "~" + _print(f.left, False)
    s = f"{_print(f.left, False)} -> {_print(f.right, True)}"
    return s if arrow_ok else f"({s})"


def print_formula(f: Formula) -> str:
    """Render with minimal parentheses; negations print as ``~``."""
    return _print(f, True)


def dump_ast(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"Atom({f.name})"
    if isinstance(f, Bottom):
        return "Bottom"
    if isinstance(f, Know):
        return f"Know({f.agent}, {dump_ast(f.body)})"
    return f"Implies({dump_ast(f.left)}, {dump_ast(f.right)})"


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Implies):
        return (f.left, f.right)
    if isinstance(f, Know):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> list[Formula]:
    """Post-order list of distinct subformulas, children before parents."""
    seen: set[Formula] = set()
    out: list[Formula] = []

    def walk(g: Formula) -> None:
        if g in seen:
            return
        for c in children(g):
            walk(c)
        seen.add(g)
        out.append(g)

    walk(f)
    return out


def node_count(f: Formula) -> int:
    return 1 + sum(node_count(c) for c in children(f))


def depth(f: Formula) -> int:
    return 1 + max((depth(c) for c in children(f)), default=0)


def atoms_of(f: Formula) -> frozenset[Atom]:
    return frozenset(g for g in subformulas(f) if isinstance(g, Atom))


def agents_of(f: Formula) -> frozenset[str]:
    return frozenset(g.agent for g in subformulas(f) if isinstance(g, Know))


def fresh_atoms(n: int, avoid: Iterable[Atom]) -> list[Atom]:
    """``n`` distinct atoms named ``q0, q1, ...`` skipping anything in ``avoid``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    taken = {a.name if isinstance(a, Atom) else str(a) for a in avoid}
    out: list[Atom] = []
    i = 0
    while len(out) < n:
        name = f"q{i}"
        if name not in taken:
            out.append(Atom(name))
        i += 1
    return out


def iter_nodes(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from iter_nodes(c)
