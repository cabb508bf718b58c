"""Built-in arithmetic grammars and the rational-evaluator demo action.

Two grammars ship with the toolkit: the classic sum/product grammar
whose naive recursive-descent parse is exponential on nested products
(the packrat comparison demo), and a four-operator expression grammar
for the semantic demo.  The demo semantics evaluates to exact
rationals; division is exact, not truncating.
"""

from __future__ import annotations

from fractions import Fraction

from .expr import Grammar
from .reader import parse_grammar_text
from .trace import (AnyNode, FailNode, NotNode, SemanticNode, Skip,
                    TerminalNode, TraceTree, Outcome, outcome, tree_children)

# Exponential on ((..(d*d)*..)*d without memoization: parsing M at one
# position retries the whole product twice (once under "G '*' M", once
# under the fallback G).
SUM_PRODUCT_GRAMMAR_TEXT = """\
A <- M '+' A / M
M <- G '*' M / G
G <- '(' A ')' / int
int <- [0-9] [0-9]*
"""

ARITH_GRAMMAR_TEXT = """\
expr <- term '+' expr / term '-' expr / term
term <- factor '*' term / factor '/' term / factor
factor <- '(' expr ')' / number
number <- [0-9] [0-9]*
"""


def sum_product_grammar() -> Grammar:
    return parse_grammar_text(SUM_PRODUCT_GRAMMAR_TEXT)


def arith_grammar() -> Grammar:
    return parse_grammar_text(ARITH_GRAMMAR_TEXT)


def nested_product_input(depth: int) -> bytes:
    """Nested products like (((5*4)*3)*2)*1 (that shape at depth 4)."""
    if depth == 0:
        return b"5"
    text = f"5*{depth}"
    for m in range(depth - 1, 0, -1):
        text = f"({text})*{m}"
    return text.encode()


def _leaves(t: TraceTree) -> list[tuple[str, object]]:
    """Consumed tokens and semantic values in reading order.

    Failed branches, skips, and lookahead subtrees contribute nothing.
    """
    if isinstance(t, (Skip, FailNode, NotNode)):
        return []
    if isinstance(t, TerminalNode):
        return [("tok", t.expected)] if outcome(t) is Outcome.SUCCESS else []
    if isinstance(t, AnyNode):
        return [("tok", t.got)] if outcome(t) is Outcome.SUCCESS else []
    if isinstance(t, SemanticNode):
        return [("val", t.value)]
    out: list[tuple[str, object]] = []
    for child in tree_children(t):
        out.extend(_leaves(child))
    return out


def make_arith_action(g: Grammar):
    """Rational evaluator for the four-operator grammar."""
    names = g.names

    def action(nt: int, tree: TraceTree) -> object:
        leaves = _leaves(tree)
        vals = [v for kind, v in leaves if kind == "val"]
        toks = [v for kind, v in leaves if kind == "tok"]
        name = names[nt]
        if name == "number":
            return Fraction("".join(chr(t) for t in toks))
        if name == "factor":
            return vals[0]
        # expr / term: either a bare subvalue or "left op right".
        if len(vals) == 1:
            return vals[0]
        op = chr(toks[0])
        left, right = vals
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            return left / right
        raise ValueError(f"unexpected operator {op!r}")

    return action


def make_span_action(inp: bytes):
    """Action capturing the matched span text; used by property tests."""

    def action(nt: int, tree: TraceTree) -> object:
        return inp[tree.s:tree.e].decode("latin-1")

    return action
