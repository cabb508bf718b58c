"""PEG expression algebra, grammar container, and desugaring.

Tokens are bytes (0-255).  Nonterminals are indices into the grammar's
rule table.  Expressions are immutable trees over eight core
constructors; the extended constructors (range, literal, plus,
optional, and-predicate) exist only in the front end and are desugared
to the core before analysis or parsing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence, Union


# --- core constructors ---------------------------------------------------

@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Any:
    pass


@dataclass(frozen=True)
class Terminal:
    token: int

    def __post_init__(self):
        if not 0 <= self.token <= 255:
            raise ValueError(f"token out of byte range: {self.token}")


@dataclass(frozen=True)
class NonTerminal:
    id: int


@dataclass(frozen=True)
class Seq:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Prior:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Star:
    inner: "Expr"


@dataclass(frozen=True)
class NotP:
    inner: "Expr"


Expr = Union[Empty, Any, Terminal, NonTerminal, Seq, Prior, Star, NotP]


# --- extended (front-end only) constructors ------------------------------

@dataclass(frozen=True)
class Range:
    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi <= 255):
            raise ValueError(f"bad range: {self.lo}-{self.hi}")


@dataclass(frozen=True)
class Literal:
    tokens: tuple[int, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("empty literal")


@dataclass(frozen=True)
class Plus:
    inner: "ExtendedExpr"


@dataclass(frozen=True)
class Optional_:
    inner: "ExtendedExpr"


@dataclass(frozen=True)
class AndP:
    inner: "ExtendedExpr"


ExtendedExpr = Union[Expr, Range, Literal, Plus, Optional_, AndP,
                     "ExtSeq", "ExtPrior", "ExtStar", "ExtNotP"]

# Seq/Prior/Star/NotP over extended children reuse the same classes; the
# dataclasses are untyped at runtime so nesting extended nodes is fine.
ExtSeq = Seq
ExtPrior = Prior
ExtStar = Star
ExtNotP = NotP


def desugar(e: ExtendedExpr) -> Expr:
    """Lower extended constructors to the eight core ones."""
    if isinstance(e, (Empty, Any, Terminal, NonTerminal)):
        return e
    if isinstance(e, Seq):
        return Seq(desugar(e.left), desugar(e.right))
    if isinstance(e, Prior):
        return Prior(desugar(e.left), desugar(e.right))
    if isinstance(e, Star):
        return Star(desugar(e.inner))
    if isinstance(e, NotP):
        return NotP(desugar(e.inner))
    if isinstance(e, Range):
        # [a-z] -> 'a' / 'b' / ... / 'z', right-nested
        terms = [Terminal(t) for t in range(e.lo, e.hi + 1)]
        return reduce(lambda acc, t: Prior(t, acc), reversed(terms[:-1]), terms[-1])
    if isinstance(e, Literal):
        # "s" -> 'c1' ; 'c2' ; ... , right-nested
        terms = [Terminal(t) for t in e.tokens]
        return reduce(lambda acc, t: Seq(t, acc), reversed(terms[:-1]), terms[-1])
    if isinstance(e, Plus):
        inner = desugar(e.inner)
        return Seq(inner, Star(inner))
    if isinstance(e, Optional_):
        return Prior(desugar(e.inner), Empty())
    if isinstance(e, AndP):
        return NotP(NotP(desugar(e.inner)))
    raise TypeError(f"not a grammar expression: {e!r}")


def peg_measure(e: Expr) -> int:
    """Node count of a core expression (the parser's size measure)."""
    if isinstance(e, (Seq, Prior)):
        return 1 + peg_measure(e.left) + peg_measure(e.right)
    if isinstance(e, (Star, NotP)):
        return 1 + peg_measure(e.inner)
    return 1


def subexpressions(e: Expr):
    """Yield e and all its proper subexpressions, preorder."""
    yield e
    if isinstance(e, (Seq, Prior)):
        yield from subexpressions(e.left)
        yield from subexpressions(e.right)
    elif isinstance(e, (Star, NotP)):
        yield from subexpressions(e.inner)


# --- grammar -------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    name: str
    body: Expr


@dataclass(frozen=True)
class Grammar:
    """A rule table, a start symbol, and the strict nonterminal order.

    ``rank`` maps a nonterminal index to its position in the order:
    B is below A iff rank[B] < rank[A].  The default is reverse
    declaration order (first-declared rule is greatest).
    """

    rules: tuple[Rule, ...]
    start: int = 0
    rank: tuple[int, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.rules:
            raise ValueError("grammar has no rules")
        n1 = len(self.rules)
        if self.rank is None:
            object.__setattr__(self, "rank", tuple(n1 - 1 - i for i in range(n1)))
        if sorted(self.rank) != list(range(n1)):
            raise ValueError("rank is not a permutation of the rule indices")
        if not 0 <= self.start < n1:
            raise ValueError("start symbol out of range")
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise ValueError("duplicate rule names")
        for r in self.rules:
            for sub in subexpressions(r.body):
                if isinstance(sub, NonTerminal) and not 0 <= sub.id < n1:
                    raise ValueError(f"nonterminal index {sub.id} out of range in {r.name}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.rules)

    def body(self, a: int) -> Expr:
        return self.rules[a].body

    def with_rank(self, rank: Sequence[int]) -> "Grammar":
        return Grammar(self.rules, self.start, tuple(rank))


@dataclass(frozen=True)
class InputText:
    """Input byte sequence plus the parse bound b <= len(tokens)."""

    tokens: bytes
    bound: int = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.bound is None:
            object.__setattr__(self, "bound", len(self.tokens))
        if not 0 <= self.bound <= len(self.tokens):
            raise ValueError("bound exceeds token count")


# --- pretty printing -----------------------------------------------------

_PREC_PRIOR, _PREC_SEQ, _PREC_PREFIX, _PREC_POSTFIX, _PREC_PRIMARY = range(5)

_ESCAPES = {0x27: "\\'", 0x5C: "\\\\", 0x0A: "\\n", 0x09: "\\t", 0x0D: "\\r"}


def _token_text(t: int) -> str:
    if t in _ESCAPES:
        return _ESCAPES[t]
    if 0x20 <= t < 0x7F:
        return chr(t)
    return f"\\x{t:02x}"


def pretty_expr(e: Expr, names: Sequence[str] | None = None,
                min_prec: int = 0) -> str:
    """Serialize a core expression in the grammar file syntax.

    Nonterminals print as rule names when ``names`` is given, otherwise
    as ``@index`` (accepted back by the expression reader).
    """
    if isinstance(e, Empty):
        text, prec = "ε", _PREC_PRIMARY
    elif isinstance(e, Any):
        text, prec = ".", _PREC_PRIMARY
    elif isinstance(e, Terminal):
        text, prec = f"'{_token_text(e.token)}'", _PREC_PRIMARY
    elif isinstance(e, NonTerminal):
        text = names[e.id] if names is not None else f"@{e.id}"
        prec = _PREC_PRIMARY
    elif isinstance(e, Seq):
        text = (pretty_expr(e.left, names, _PREC_PREFIX) + " "
                + pretty_expr(e.right, names, _PREC_SEQ))
        prec = _PREC_SEQ
    elif isinstance(e, Prior):
        text = (pretty_expr(e.left, names, _PREC_SEQ) + " / "
                + pretty_expr(e.right, names, _PREC_PRIOR))
        prec = _PREC_PRIOR
    elif isinstance(e, Star):
        text, prec = pretty_expr(e.inner, names, _PREC_POSTFIX) + "*", _PREC_POSTFIX
    elif isinstance(e, NotP):
        text, prec = "!" + pretty_expr(e.inner, names, _PREC_PREFIX), _PREC_PREFIX
    else:
        raise TypeError(f"not a core expression: {e!r}")
    if prec < min_prec:
        return "(" + text + ")"
    return text


def pretty_print(g: Grammar) -> str:
    """Serialize a grammar deterministically in the file format.

    Emits an explicit %order directive so the round trip through
    ``parse_grammar_text`` reproduces the grammar exactly.
    """
    by_rank = sorted(range(len(g.rules)), key=lambda i: -g.rank[i])
    lines = ["%order " + " > ".join(g.rules[i].name for i in by_rank)]
    for r in g.rules:
        lines.append(f"{r.name} <- {pretty_expr(r.body, g.names)}")
    return "\n".join(lines) + "\n"
