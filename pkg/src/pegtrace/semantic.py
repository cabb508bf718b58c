"""Semantic-action layer: compacted trees and on-the-fly semantic parsing.

A semantic action maps a nonterminal's (already compacted) successful
subtree to a user value.  Compaction replaces every failing subtree by
a fail node and every successful nonterminal subtree by a semantic
node carrying the action's value.
"""

from __future__ import annotations

from typing import Callable

from .expr import Any, Empty, Expr, NonTerminal, NotP, Prior, Seq, Star, Terminal
from .packrat import MemoTable
from .refparser import ParseContext, parse
from .trace import (AnyNode, EmptyNode, FailNode, NonTerminalNode, NotNode,
                    Outcome, PriorNode, SemanticNode, SeqNode, Skip, StarNode,
                    TerminalNode, TraceTree, outcome, tree_children)

SemanticAction = Callable[[int, TraceTree], object]


def semantic_interp(action: SemanticAction, t: TraceTree) -> TraceTree:
    """Compact a fully computed trace tree, bottom-up."""
    if outcome(t) is Outcome.FAILURE:
        return FailNode(t.s, t.e)
    if isinstance(t, NonTerminalNode):
        sub = semantic_interp(action, t.sub)
        return SemanticNode(t.s, t.e, t.id, action(t.id, sub))
    if isinstance(t, SeqNode):
        return SeqNode(t.s, t.e, semantic_interp(action, t.first),
                       semantic_interp(action, t.second))
    if isinstance(t, PriorNode):
        return PriorNode(t.s, t.e, semantic_interp(action, t.first),
                         semantic_interp(action, t.second))
    if isinstance(t, StarNode):
        return StarNode(t.s, t.e, semantic_interp(action, t.head),
                        semantic_interp(action, t.tail))
    if isinstance(t, NotNode):
        return NotNode(t.s, t.e, semantic_interp(action, t.sub))
    return t


def _sem_parse(ctx: ParseContext, a: int, e: Expr, s: int, s_t: int,
               action: SemanticAction, memo: MemoTable) -> TraceTree:
    """Packrat descent that compacts as soon as an outcome is known."""
    inp, b = ctx.input.tokens, ctx.b

    if isinstance(e, Empty):
        return EmptyNode(s, s)
    if isinstance(e, Any):
        return AnyNode(s, s + 1, inp[s]) if s < b else FailNode(s, s)
    if isinstance(e, Terminal):
        if s < b and inp[s] == e.token:
            return TerminalNode(s, s + 1, e.token, inp[s])
        return FailNode(s, s)
    if isinstance(e, NonTerminal):
        cached = memo.get(e.id, s)
        if cached is not None:
            return cached
        sub = _sem_parse(ctx, e.id, ctx.grammar.body(e.id), s, s, action, memo)
        if outcome(sub) is Outcome.FAILURE:
            t: TraceTree = FailNode(s, sub.e)
        else:
            t = SemanticNode(s, sub.e, e.id, action(e.id, sub))
        memo.put(e.id, s, t)
        return t
    if isinstance(e, Seq):
        t1 = _sem_parse(ctx, a, e.left, s, s_t, action, memo)
        if outcome(t1) is Outcome.FAILURE:
            return FailNode(s, t1.e)
        t2 = _sem_parse(ctx, a, e.right, t1.e, s_t, action, memo)
        if outcome(t2) is Outcome.FAILURE:
            return FailNode(s, t2.e)
        return SeqNode(s, t2.e, t1, t2)
    if isinstance(e, Prior):
        t1 = _sem_parse(ctx, a, e.left, s, s_t, action, memo)
        if outcome(t1) is Outcome.SUCCESS:
            return PriorNode(s, t1.e, t1, Skip(s, s, e.right))
        t2 = _sem_parse(ctx, a, e.right, s, s_t, action, memo)
        if outcome(t2) is Outcome.FAILURE:
            return FailNode(s, t2.e)
        return PriorNode(s, t2.e, t1, t2)
    if isinstance(e, Star):
        t0 = _sem_parse(ctx, a, e.inner, s, s_t, action, memo)
        if outcome(t0) is Outcome.FAILURE:
            return StarNode(s, s, t0, Skip(s, s, e))
        ts = _sem_parse(ctx, a, e, t0.e, s_t, action, memo)
        return StarNode(s, ts.e, t0, ts)
    if isinstance(e, NotP):
        sub = _sem_parse(ctx, a, e.inner, s, s_t, action, memo)
        if outcome(sub) is Outcome.SUCCESS:
            return FailNode(s, s)
        return NotNode(s, s, sub)
    raise TypeError(f"not a core expression: {e!r}")


def semantic_parse(ctx: ParseContext, action: SemanticAction) -> TraceTree:
    """Parse and compact on the fly; equals compacting the reference tree."""
    memo = MemoTable(len(ctx.grammar.rules), ctx.b)
    start = ctx.grammar.start
    sub = _sem_parse(ctx, start, ctx.grammar.body(start), 0, 0, action, memo)
    if outcome(sub) is Outcome.FAILURE:
        return FailNode(0, sub.e)
    return SemanticNode(0, sub.e, start, action(start, sub))


def equivalent_compacted(compact: TraceTree, ctx: ParseContext,
                         action: SemanticAction) -> bool:
    """Check a compacted tree against a fresh reference parse.

    Fail nodes must align with failing reference subtrees of the same
    extent; semantic nodes must carry the action's value for the
    compacted reference subtree; everything else must match node for
    node.
    """
    reference = parse(ctx)
    return _equiv(compact, reference, action)


def _equiv(c: TraceTree, r: TraceTree, action: SemanticAction) -> bool:
    if isinstance(c, FailNode):
        return outcome(r) is Outcome.FAILURE and c.s == r.s and c.e == r.e
    if isinstance(c, SemanticNode):
        if not (isinstance(r, NonTerminalNode) and c.id == r.id
                and c.s == r.s and c.e == r.e
                and outcome(r) is Outcome.SUCCESS):
            return False
        return c.value == action(c.id, semantic_interp(action, r.sub))
    if type(c) is not type(r):
        return False
    if isinstance(c, Skip):
        return c == r
    if (c.s, c.e) != (r.s, r.e):
        return False
    if isinstance(c, (EmptyNode, AnyNode, TerminalNode)):
        return c == r
    if isinstance(c, NonTerminalNode) and c.id != r.id:
        return False
    return all(_equiv(cc, rc, action)
               for cc, rc in zip(tree_children(c), tree_children(r)))
