"""Textual grammar front end.

File format (UTF-8): one rule per line, ``name <- expression``.
Expression syntax: ``.`` any token, ``'c'`` / ``"literal"`` literal
tokens, ``[a-z]`` range, juxtaposition for sequence, ``/`` prioritized
choice (lowest precedence), postfix ``* + ?``, prefix ``! &``,
parentheses, ``ε`` or ``()`` for the empty expression, ``@N`` for a
nonterminal by index, ``#`` line comments.  An optional
``%order n1 > n2 > ...`` line overrides the default (reverse
declaration) nonterminal order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .expr import (AndP, Any, Empty, ExtendedExpr, Expr, Grammar, Literal,
                   NonTerminal, NotP, Optional_, Plus, Prior, Range, Rule,
                   Seq, Star, Terminal, desugar)


class GrammarError(ValueError):
    """Syntax or resolution error in grammar text, with position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

_UNESCAPE = {"n": 0x0A, "t": 0x09, "r": 0x0D, "\\": 0x5C, "'": 0x27,
             '"': 0x22, "]": 0x5D, "-": 0x2D}


class _ExprScanner:
    """Recursive-descent reader for one expression."""

    def __init__(self, text: str, line: int, col0: int,
                 names: Mapping[str, int] | None):
        self.text = text
        self.pos = 0
        self.line = line
        self.col0 = col0
        self.names = names
        self.used: list[tuple[str, int, int]] = []  # (name, line, col) refs

    def error(self, msg: str) -> GrammarError:
        return GrammarError(msg, self.line, self.col0 + self.pos)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self):
        while self.peek() in (" ", "\t"):
            self.pos += 1
        if self.peek() == "#":
            self.pos = len(self.text)

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def expect(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> ExtendedExpr:
        e = self.choice()
        if not self.at_end():
            raise self.error(f"unexpected {self.peek()!r}")
        return e

    def choice(self) -> ExtendedExpr:
        parts = [self.sequence()]
        while True:
            self.skip_ws()
            if self.peek() != "/":
                break
            self.pos += 1
            parts.append(self.sequence())
        e = parts[-1]
        for p in reversed(parts[:-1]):
            e = Prior(p, e)
        return e

    def sequence(self) -> ExtendedExpr:
        parts = [self.prefixed()]
        while not self.at_end() and self.peek() not in "/)":
            parts.append(self.prefixed())
        e = parts[-1]
        for p in reversed(parts[:-1]):
            e = Seq(p, e)
        return e

    def prefixed(self) -> ExtendedExpr:
        self.skip_ws()
        if self.peek() == "!":
            self.pos += 1
            return NotP(self.prefixed())
        if self.peek() == "&":
            self.pos += 1
            return AndP(self.prefixed())
        return self.suffixed()

    def suffixed(self) -> ExtendedExpr:
        e = self.primary()
        while True:
            ch = self.peek()
            if ch == "*":
                e = Star(e)
            elif ch == "+":
                e = Plus(e)
            elif ch == "?":
                e = Optional_(e)
            else:
                return e
            self.pos += 1

    def char(self, closing: str) -> int:
        """One token inside quotes or a character class."""
        ch = self.peek()
        if ch == "":
            raise self.error("unterminated token")
        self.pos += 1
        if ch != "\\":
            return ord(ch)
        esc = self.peek()
        self.pos += 1
        if esc == "x":
            hexpart = self.text[self.pos:self.pos + 2]
            if len(hexpart) < 2 or not all(c in "0123456789abcdefABCDEF" for c in hexpart):
                raise self.error("bad \\x escape")
            self.pos += 2
            return int(hexpart, 16)
        if esc in _UNESCAPE:
            return _UNESCAPE[esc]
        raise self.error(f"unknown escape \\{esc}")

    def primary(self) -> ExtendedExpr:
        self.skip_ws()
        ch = self.peek()
        if ch == "":
            raise self.error("expected an expression")
        if ch == ".":
            self.pos += 1
            return Any()
        if ch == "ε":
            self.pos += 1
            return Empty()
        if ch == "(":
            self.pos += 1
            self.skip_ws()
            if self.peek() == ")":
                self.pos += 1
                return Empty()
            e = self.choice()
            self.skip_ws()
            self.expect(")")
            return e
        if ch == "'":
            self.pos += 1
            tok = self.char("'")
            self.expect("'")
            return Terminal(tok)
        if ch == '"':
            self.pos += 1
            toks = []
            while self.peek() != '"':
                toks.append(self.char('"'))
            self.pos += 1
            if not toks:
                raise self.error("empty literal")
            return Literal(tuple(toks))
        if ch == "[":
            self.pos += 1
            lo = self.char("]")
            self.expect("-")
            hi = self.char("]")
            self.expect("]")
            if lo > hi:
                raise self.error("range lower bound exceeds upper bound")
            return Range(lo, hi)
        if ch == "@":
            self.pos += 1
            m = re.match(r"\d+", self.text[self.pos:])
            if not m:
                raise self.error("expected index after @")
            self.pos += len(m.group())
            return NonTerminal(int(m.group()))
        m = _NAME_RE.match(self.text, self.pos)
        if m:
            name = m.group()
            col = self.col0 + self.pos
            self.pos = m.end()
            if self.names is None:
                raise self.error(f"nonterminal names not allowed here: {name}")
            self.used.append((name, self.line, col))
            # Placeholder id; resolved by the caller after all rules are read.
            return _NameRef(name, self.line, col)
        raise self.error(f"unexpected {ch!r}")


@dataclass(frozen=True)
class _NameRef:
    name: str
    line: int
    col: int


def _resolve(e, ids: Mapping[str, int]):
    if isinstance(e, _NameRef):
        if e.name not in ids:
            raise GrammarError(f"undeclared nonterminal {e.name!r}", e.line, e.col)
        return NonTerminal(ids[e.name])
    if isinstance(e, (Seq, Prior)):
        return type(e)(_resolve(e.left, ids), _resolve(e.right, ids))
    if isinstance(e, (Star, NotP, Plus, Optional_, AndP)):
        return type(e)(_resolve(e.inner, ids))
    return e


def parse_expr_text(source: str, names: Mapping[str, int] | None = None) -> Expr:
    """Read a single core expression (used for trace deserialization)."""
    scanner = _ExprScanner(source, 1, 1, names)
    raw = scanner.parse()
    return desugar(_resolve(raw, dict(names or {})))


def parse_grammar_text(source: str) -> Grammar:
    """Read a grammar file: rules, optional %order, name resolution."""
    raw_rules: list[tuple[str, object, int]] = []  # (name, unresolved body, line)
    order_names: list[str] | None = None
    order_line = 0

    for lineno, line in enumerate(source.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.lstrip().startswith("%order"):
            if order_names is not None:
                raise GrammarError("duplicate %order directive", lineno, 1)
            rest = line.split("#", 1)[0].lstrip()[len("%order"):]
            order_names = [n.strip() for n in rest.split(">")]
            if any(not _NAME_RE.fullmatch(n) for n in order_names):
                raise GrammarError("malformed %order directive", lineno, 1)
            order_line = lineno
            continue
        if "<-" not in line:
            raise GrammarError("expected 'name <- expression'", lineno,
                               len(line) - len(line.lstrip()) + 1)
        head, body_text = line.split("<-", 1)
        name = head.strip()
        if not _NAME_RE.fullmatch(name):
            raise GrammarError(f"bad rule name {name!r}", lineno, 1)
        if any(name == r[0] for r in raw_rules):
            raise GrammarError(f"duplicate rule name {name!r}", lineno, 1)
        scanner = _ExprScanner(body_text, lineno, len(head) + 3, {})
        raw_rules.append((name, scanner.parse(), lineno))

    if not raw_rules:
        raise GrammarError("no rules", 1, 1)

    ids = {name: i for i, (name, _, _) in enumerate(raw_rules)}
    rules = tuple(Rule(name, desugar(_resolve(body, ids)))
                  for name, body, _ in raw_rules)

    n1 = len(rules)
    if order_names is None:
        rank = tuple(n1 - 1 - i for i in range(n1))
    else:
        if sorted(order_names) != sorted(ids):
            raise GrammarError("%order must list every declared rule exactly once",
                               order_line, 1)
        rank_list = [0] * n1
        for pos, name in enumerate(order_names):
            rank_list[ids[name]] = n1 - 1 - pos
        rank = tuple(rank_list)

    return Grammar(rules, start=0, rank=rank)
