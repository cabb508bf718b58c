"""Packrat parser: the reference parser plus per-(nonterminal, position)
memoization.

The memo table is a dense (n+1) x (b+1) array of write-once entries;
each stored tree equals what the reference parser would return for the
same nonterminal and position, so total nonterminal computations are
bounded by (n+1) x (b+1).
"""

from __future__ import annotations

from .expr import Any, Empty, Expr, NonTerminal, NotP, Prior, Seq, Star, Terminal
from .refparser import CallStats, ParseContext
from .trace import (AnyNode, EmptyNode, NonTerminalNode, NotNode, Outcome,
                    PriorNode, SeqNode, Skip, StarNode, TerminalNode,
                    TraceTree, outcome)


class MemoTable:
    """Dense per-(nonterminal, position) store of completed parses."""

    def __init__(self, rule_count: int, bound: int):
        self.entries: list[list[TraceTree | None]] = \
            [[None] * (bound + 1) for _ in range(rule_count)]

    def get(self, a: int, s: int) -> TraceTree | None:
        return self.entries[a][s]

    def put(self, a: int, s: int, t: TraceTree):
        assert self.entries[a][s] is None, "memo entries are write-once"
        self.entries[a][s] = t

    def known(self):
        for a, row in enumerate(self.entries):
            for s, t in enumerate(row):
                if t is not None:
                    yield a, s, t


def packrat_parse_expr(ctx: ParseContext, a: int, e: Expr, s: int, s_t: int,
                       memo: MemoTable,
                       stats: CallStats | None = None) -> tuple[TraceTree, MemoTable]:
    """Memoizing twin of the reference parse_expr.

    Returns the identical tree, extending the memo as new nonterminal
    results are computed.
    """
    inp, b = ctx.input.tokens, ctx.b

    if isinstance(e, Empty):
        return EmptyNode(s, s), memo
    if isinstance(e, Any):
        return (AnyNode(s, s + 1, inp[s]) if s < b else AnyNode(s, s, None)), memo
    if isinstance(e, Terminal):
        if s >= b:
            return TerminalNode(s, s, e.token, None), memo
        if inp[s] == e.token:
            return TerminalNode(s, s + 1, e.token, inp[s]), memo
        return TerminalNode(s, s, e.token, inp[s]), memo
    if isinstance(e, NonTerminal):
        cached = memo.get(e.id, s)
        if cached is not None:
            if stats is not None:
                stats.hits += 1
            return cached, memo
        if stats is not None:
            stats.misses += 1
            stats.record(e.id, s)
        sub, memo = packrat_parse_expr(ctx, e.id, ctx.grammar.body(e.id),
                                       s, s, memo, stats)
        t = NonTerminalNode(s, sub.e, e.id, sub)
        memo.put(e.id, s, t)
        return t, memo
    if isinstance(e, Seq):
        t1, memo = packrat_parse_expr(ctx, a, e.left, s, s_t, memo, stats)
        if outcome(t1) is Outcome.FAILURE:
            return SeqNode(s, t1.e, t1, Skip(t1.e, t1.e, e.right)), memo
        t2, memo = packrat_parse_expr(ctx, a, e.right, t1.e, s_t, memo, stats)
        return SeqNode(s, t2.e, t1, t2), memo
    if isinstance(e, Prior):
        t1, memo = packrat_parse_expr(ctx, a, e.left, s, s_t, memo, stats)
        if outcome(t1) is Outcome.SUCCESS:
            return PriorNode(s, t1.e, t1, Skip(s, s, e.right)), memo
        t2, memo = packrat_parse_expr(ctx, a, e.right, s, s_t, memo, stats)
        return PriorNode(s, t2.e, t1, t2), memo
    if isinstance(e, Star):
        t0, memo = packrat_parse_expr(ctx, a, e.inner, s, s_t, memo, stats)
        if outcome(t0) is Outcome.FAILURE:
            return StarNode(s, s, t0, Skip(s, s, e)), memo
        ts, memo = packrat_parse_expr(ctx, a, e, t0.e, s_t, memo, stats)
        return StarNode(s, ts.e, t0, ts), memo
    if isinstance(e, NotP):
        sub, memo = packrat_parse_expr(ctx, a, e.inner, s, s_t, memo, stats)
        return NotNode(s, s, sub), memo
    raise TypeError(f"not a core expression: {e!r}")


def packrat_parse(ctx: ParseContext) -> tuple[TraceTree, CallStats]:
    """Parse from the start symbol with memoization and hit/miss counts."""
    memo = MemoTable(len(ctx.grammar.rules), ctx.b)
    stats = CallStats(misses=0, hits=0)
    start = ctx.grammar.start
    stats.misses += 1
    stats.record(start, 0)
    sub, memo = packrat_parse_expr(ctx, start, ctx.grammar.body(start),
                                   0, 0, memo, stats)
    tree = NonTerminalNode(0, sub.e, start, sub)
    memo.put(start, 0, tree)
    return tree, stats
