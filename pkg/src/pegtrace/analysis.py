"""Grammar property analysis and well-formedness checking.

Three per-nonterminal properties are computed by fixpoint iteration:
can the parse fail, succeed consuming nothing, succeed consuming at
least one token.  A false flag means *unknown*, not refuted.  The
properties then drive the two well-formedness checks: no star over a
nullable expression, and no use of a non-smaller nonterminal before
guaranteed consumption.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter

from .expr import (Any, Empty, Expr, Grammar, NonTerminal, NotP, Prior, Seq,
                   Star, Terminal)


@dataclass(frozen=True)
class PropTriple:
    can_fail: bool = False
    can_empty: bool = False
    can_consume: bool = False

    def leq(self, other: "PropTriple") -> bool:
        return ((not self.can_fail or other.can_fail)
                and (not self.can_empty or other.can_empty)
                and (not self.can_consume or other.can_consume))


PropertySet = tuple[PropTriple, ...]


def all_unknown(count: int) -> PropertySet:
    return tuple(PropTriple() for _ in range(count))


def prop_leq(p: PropertySet, q: PropertySet) -> bool:
    """Pointwise knowledge order: every known flag of p is known in q."""
    if len(p) != len(q):
        raise ValueError("property sets of different lengths")
    return all(a.leq(b) for a, b in zip(p, q))


def node_props(e: Expr, p: PropertySet) -> PropTriple:
    """Properties of an expression under current nonterminal knowledge."""
    if isinstance(e, Empty):
        return PropTriple(False, True, False)
    if isinstance(e, (Any, Terminal)):
        return PropTriple(True, False, True)
    if isinstance(e, NonTerminal):
        return p[e.id]
    if isinstance(e, Seq):
        a, b = node_props(e.left, p), node_props(e.right, p)
        return PropTriple(
            can_fail=a.can_fail or ((a.can_empty or a.can_consume) and b.can_fail),
            can_empty=a.can_empty and b.can_empty,
            can_consume=(a.can_consume and (b.can_empty or b.can_consume))
                        or (a.can_empty and b.can_consume),
        )
    if isinstance(e, Prior):
        a, b = node_props(e.left, p), node_props(e.right, p)
        return PropTriple(
            can_fail=a.can_fail and b.can_fail,
            can_empty=a.can_empty or (a.can_fail and b.can_empty),
            can_consume=a.can_consume or (a.can_fail and b.can_consume),
        )
    if isinstance(e, Star):
        a = node_props(e.inner, p)
        # A star never fails; it succeeds empty exactly when its body can fail.
        return PropTriple(False, a.can_fail, a.can_consume)
    if isinstance(e, NotP):
        a = node_props(e.inner, p)
        return PropTriple(a.can_empty or a.can_consume, a.can_fail, False)
    raise TypeError(f"not a core expression: {e!r}")


def extend_props(a: int, p: PropertySet, g: Grammar) -> PropertySet:
    """Recompute nonterminal a's entry from current knowledge."""
    updated = list(p)
    updated[a] = node_props(g.body(a), p)
    return tuple(updated)


def is_coherent(p: PropertySet, g: Grammar) -> bool:
    """No single recomputation may lose knowledge."""
    return all(prop_leq(p, extend_props(a, p, g)) for a in range(len(g.rules)))


def sweep(p: PropertySet, g: Grammar) -> PropertySet:
    """Recompute every nonterminal once, in index order, threading results."""
    assert is_coherent(p, g), "sweep requires a coherent property set"
    for a in range(len(g.rules)):
        p = extend_props(a, p, g)
    return p


def fixpoint_props(g: Grammar) -> PropertySet:
    """Iterate sweeps from all-unknown until stable.

    Each non-final sweep adds at least one known flag, so at most
    3*(n+1) productive sweeps happen before the confirming one.
    """
    p = all_unknown(len(g.rules))
    limit = 3 * len(g.rules) + 1
    for _ in range(limit):
        q = sweep(p, g)
        if q == p:
            return p
        p = q
    raise AssertionError("property iteration exceeded its bound")


# --- well-formedness -----------------------------------------------------

STAR_OF_NULLABLE = "star-of-nullable"
ORDER_VIOLATION = "order-violation"


@dataclass(frozen=True)
class Violation:
    rule: int
    path: tuple[str, ...]
    reason: str


@dataclass(frozen=True)
class WellformednessReport:
    verdict: bool
    properties: PropertySet
    violations: tuple[Violation, ...]

    def to_json(self, g: Grammar) -> dict:
        return {
            "verdict": self.verdict,
            "properties": [
                {"name": g.rules[i].name,
                 "can_fail": t.can_fail,
                 "can_empty": t.can_empty,
                 "can_consume": t.can_consume}
                for i, t in enumerate(self.properties)
            ],
            "violations": [
                {"rule": g.rules[v.rule].name,
                 "path": list(v.path),
                 "reason": v.reason}
                for v in self.violations
            ],
        }


def _check_expr(e: Expr, a: int, strict: bool, props: PropertySet, g: Grammar,
                path: tuple[str, ...], out: list[Violation]):
    if isinstance(e, (Empty, Any, Terminal)):
        return
    if isinstance(e, NonTerminal):
        if strict and not g.rank[e.id] < g.rank[a]:
            out.append(Violation(a, path, ORDER_VIOLATION))
        return
    if isinstance(e, Seq):
        _check_expr(e.left, a, strict, props, g, path + ("left",), out)
        right_strict = strict and node_props(e.left, props).can_empty
        _check_expr(e.right, a, right_strict, props, g, path + ("right",), out)
        return
    if isinstance(e, Prior):
        _check_expr(e.left, a, strict, props, g, path + ("left",), out)
        _check_expr(e.right, a, strict, props, g, path + ("right",), out)
        return
    if isinstance(e, Star):
        _check_expr(e.inner, a, strict, props, g, path + ("inner",), out)
        if node_props(e.inner, props).can_empty:
            out.append(Violation(a, path, STAR_OF_NULLABLE))
        return
    if isinstance(e, NotP):
        _check_expr(e.inner, a, strict, props, g, path + ("inner",), out)
        return
    raise TypeError(f"not a core expression: {e!r}")


def expr_wellformed(e: Expr, a: int, strict: bool, props: PropertySet,
                    g: Grammar) -> bool:
    out: list[Violation] = []
    _check_expr(e, a, strict, props, g, (), out)
    return not out


def grammar_wellformed(g: Grammar) -> WellformednessReport:
    props = fixpoint_props(g)
    out: list[Violation] = []
    for a in range(len(g.rules)):
        _check_expr(g.body(a), a, True, props, g, (), out)
    return WellformednessReport(not out, props, tuple(out))


def infer_order(g: Grammar) -> tuple[int, ...] | None:
    """Best-effort nonterminal order from the strict-use dependency graph.

    Collects an edge A -> B whenever B occurs in A's body at a position
    where the strictness flag would still be true, then topologically
    sorts.  Returns a rank permutation, or None if the graph is cyclic.
    """
    props = fixpoint_props(g)
    needs: dict[int, set[int]] = {a: set() for a in range(len(g.rules))}

    def visit(e: Expr, a: int, strict: bool):
        if isinstance(e, NonTerminal):
            if strict:
                needs[a].add(e.id)
        elif isinstance(e, Seq):
            visit(e.left, a, strict)
            visit(e.right, a, strict and node_props(e.left, props).can_empty)
        elif isinstance(e, Prior):
            visit(e.left, a, strict)
            visit(e.right, a, strict)
        elif isinstance(e, (Star, NotP)):
            visit(e.inner, a, strict)

    for a in range(len(g.rules)):
        visit(g.body(a), a, True)
    if any(a in needs[a] for a in needs):
        return None
    sorter = TopologicalSorter({a: needs[a] for a in needs})
    try:
        order = list(sorter.static_order())  # dependencies first (smallest)
    except CycleError:
        return None
    rank = [0] * len(g.rules)
    for pos, a in enumerate(order):
        rank[a] = pos
    return tuple(rank)


def report_json_text(report: WellformednessReport, g: Grammar) -> str:
    return json.dumps(report.to_json(g), indent=2)
