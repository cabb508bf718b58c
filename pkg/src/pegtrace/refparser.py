"""Reference recursive-descent parser interpreter.

Structurally recursive over (grammar, expression, position), producing
the full trace tree.  Termination relies on grammar well-formedness,
which is validated once when the ParseContext is built; every
recursive call strictly decreases the lexicographic 4-tuple
(b - s_T, b - s, rank of current nonterminal, expression size).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .analysis import (PropertySet, expr_wellformed, grammar_wellformed,
                       node_props)
from .expr import (Any, Empty, Expr, Grammar, InputText, NonTerminal, NotP,
                   Prior, Seq, Star, Terminal, peg_measure)
from .trace import (AnyNode, EmptyNode, NonTerminalNode, NotNode, Outcome,
                    PriorNode, SeqNode, Skip, StarNode, TerminalNode,
                    TraceTree, outcome, tree_wellformed, true_to_grammar,
                    true_to_input)


class IllFormedGrammarError(ValueError):
    def __init__(self, report):
        reasons = ", ".join(f"{v.reason} in rule {v.rule}" for v in report.violations)
        super().__init__(f"grammar is not well-formed: {reasons}")
        self.report = report


@dataclass(frozen=True)
class ParseContext:
    """A well-formed grammar, its property fixpoint, and an input.

    The constructor rejects ill-formed grammars, so parsing itself is
    total and never checks well-formedness mid-parse.
    """

    grammar: Grammar
    input: InputText
    props: PropertySet = None  # type: ignore[assignment]

    def __post_init__(self):
        report = grammar_wellformed(self.grammar)
        if not report.verdict:
            raise IllFormedGrammarError(report)
        object.__setattr__(self, "props", report.properties)

    @property
    def b(self) -> int:
        return self.input.bound


@dataclass
class CallStats:
    """Nonterminal invocation counts per (rule index, position)."""

    counts: dict[tuple[int, int], int] = field(default_factory=dict)
    total: int = 0
    misses: int | None = None
    hits: int | None = None

    def record(self, a: int, s: int):
        self.counts[a, s] = self.counts.get((a, s), 0) + 1
        self.total += 1

    def calls_for(self, a: int) -> int:
        return sum(c for (rule, _), c in self.counts.items() if rule == a)

    def to_json(self, g: Grammar) -> dict:
        doc = {
            "counts": [
                {"rule": g.rules[a].name, "position": s, "calls": c}
                for (a, s), c in sorted(self.counts.items())
            ],
            "total": self.total,
        }
        if self.misses is not None:
            doc["misses"] = self.misses
            doc["hits"] = self.hits
        return doc

    def to_json_text(self, g: Grammar) -> str:
        return json.dumps(self.to_json(g), indent=2)


def _measure(ctx: ParseContext, a: int, e: Expr, s: int, s_t: int):
    return (ctx.b - s_t, ctx.b - s, ctx.grammar.rank[a], peg_measure(e))


def _check_contract(ctx: ParseContext, a: int, e: Expr, s: int,
                    s_t: int, t: TraceTree):
    assert t.s == s, "tree must start at the query position"
    assert not isinstance(t, Skip), "parser never returns a skip"
    if isinstance(e, Star):
        assert isinstance(t, StarNode), "a star expression yields a star tree"
    assert tree_wellformed(t), "parser output must be well-formed"
    assert true_to_grammar(t, e, ctx.grammar), "parser output must match the grammar"
    assert true_to_input(t, ctx.input), "parser output must match the input"
    got = outcome(t)
    assert got is not Outcome.UNDEFINED, "parser output must be meaningful"
    props = node_props(e, ctx.props)
    if got is Outcome.SUCCESS and t.e == s:
        assert props.can_empty, "empty success requires the can-empty property"
    if got is Outcome.SUCCESS and t.e > s:
        assert props.can_consume, "consuming success requires the can-consume property"
    if got is Outcome.FAILURE:
        assert props.can_fail, "failure requires the can-fail property"


def parse_expr(ctx: ParseContext, a: int, e: Expr, s: int, s_t: int,
               stats: CallStats | None = None,
               contract: bool = False) -> TraceTree:
    """Parse expression e (a subterm of rule a's body) at position s.

    s_t is the position where the current nonterminal's parse began.
    With contract=True, preconditions, the output contract, and the
    strict decrease of the termination measure are asserted on every
    call; this is the test-build mode and is never needed for parsing.
    """
    if contract:
        assert s_t <= s <= ctx.b
        assert expr_wellformed(e, a, s == s_t, ctx.props, ctx.grammar)
    return _parse(ctx, a, e, s, s_t, stats,
                  _measure(ctx, a, e, s, s_t) if contract else None)


def _descend(ctx, a, e, s, s_t, stats, caller):
    if caller is not None:
        mine = _measure(ctx, a, e, s, s_t)
        assert mine < caller, f"termination measure did not decrease: {mine} !< {caller}"
        caller = mine
    return _parse(ctx, a, e, s, s_t, stats, caller)


def _parse(ctx: ParseContext, a: int, e: Expr, s: int, s_t: int,
           stats, caller) -> TraceTree:
    inp, b = ctx.input.tokens, ctx.b

    if isinstance(e, Empty):
        t: TraceTree = EmptyNode(s, s)
    elif isinstance(e, Any):
        t = AnyNode(s, s + 1, inp[s]) if s < b else AnyNode(s, s, None)
    elif isinstance(e, Terminal):
        if s >= b:
            t = TerminalNode(s, s, e.token, None)
        elif inp[s] == e.token:
            t = TerminalNode(s, s + 1, e.token, inp[s])
        else:
            t = TerminalNode(s, s, e.token, inp[s])
    elif isinstance(e, NonTerminal):
        if stats is not None:
            stats.record(e.id, s)
        sub = _descend(ctx, e.id, ctx.grammar.body(e.id), s, s, stats, caller)
        t = NonTerminalNode(s, sub.e, e.id, sub)
    elif isinstance(e, Seq):
        t1 = _descend(ctx, a, e.left, s, s_t, stats, caller)
        if outcome(t1) is Outcome.FAILURE:
            t = SeqNode(s, t1.e, t1, Skip(t1.e, t1.e, e.right))
        else:
            t2 = _descend(ctx, a, e.right, t1.e, s_t, stats, caller)
            t = SeqNode(s, t2.e, t1, t2)
    elif isinstance(e, Prior):
        t1 = _descend(ctx, a, e.left, s, s_t, stats, caller)
        if outcome(t1) is Outcome.SUCCESS:
            t = PriorNode(s, t1.e, t1, Skip(s, s, e.right))
        else:
            t2 = _descend(ctx, a, e.right, s, s_t, stats, caller)
            t = PriorNode(s, t2.e, t1, t2)
    elif isinstance(e, Star):
        t0 = _descend(ctx, a, e.inner, s, s_t, stats, caller)
        if outcome(t0) is Outcome.FAILURE:
            t = StarNode(s, s, t0, Skip(s, s, e))
        else:
            ts = _descend(ctx, a, e, t0.e, s_t, stats, caller)
            t = StarNode(s, ts.e, t0, ts)
    elif isinstance(e, NotP):
        sub = _descend(ctx, a, e.inner, s, s_t, stats, caller)
        t = NotNode(s, s, sub)
    else:
        raise TypeError(f"not a core expression: {e!r}")

    if caller is not None:
        _check_contract(ctx, a, e, s, s_t, t)
    return t


def parse(ctx: ParseContext, stats: CallStats | None = None,
          contract: bool = False) -> TraceTree:
    """Parse the whole input from the start symbol at position 0."""
    start = ctx.grammar.start
    if stats is not None:
        stats.record(start, 0)
    sub = parse_expr(ctx, start, ctx.grammar.body(start), 0, 0, stats, contract)
    return NonTerminalNode(0, sub.e, start, sub)


def instrument(ctx: ParseContext) -> tuple[TraceTree, CallStats]:
    """Parse while counting nonterminal invocations per position."""
    stats = CallStats()
    tree = parse(ctx, stats=stats)
    return tree, stats
