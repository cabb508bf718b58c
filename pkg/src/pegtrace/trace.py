"""Proof-of-parse trace trees.

A trace tree records the full computational path of a parse, failed
branches included.  Every node carries the start and end of the input
span it consumed.  Skip nodes mark grammar fragments the parser never
visited; semantic and fail nodes are the compacted forms produced by
the semantic layer.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .expr import Expr, Grammar, InputText, NonTerminal, NotP, Prior, Seq, \
    Star, Terminal, Any, Empty, pretty_expr
from .reader import parse_expr_text


class Outcome(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    UNDEFINED = "undefined"


def _check_span(s: int, e: int):
    if not 0 <= s <= e:
        raise ValueError(f"bad span: [{s}, {e})")


@dataclass(frozen=True)
class Skip:
    s: int
    e: int
    skipped: Expr

    def __post_init__(self):
        _check_span(self.s, self.e)


@dataclass(frozen=True)
class EmptyNode:
    s: int
    e: int

    def __post_init__(self):
        _check_span(self.s, self.e)


@dataclass(frozen=True)
class AnyNode:
    s: int
    e: int
    got: Optional[int] = None

    def __post_init__(self):
        _check_span(self.s, self.e)


@dataclass(frozen=True)
class TerminalNode:
    s: int
    e: int
    expected: int
    got: Optional[int] = None

    def __post_init__(self):
        _check_span(self.s, self.e)


@dataclass(frozen=True)
class NonTerminalNode:
    s: int
    e: int
    id: int
    sub: "TraceTree"

    def __post_init__(self):
        _check_span(self.s, self.e)
        if isinstance(self.sub, Skip):
            raise ValueError("nonterminal subtree may not be a skip")


@dataclass(frozen=True)
class SeqNode:
    s: int
    e: int
    first: "TraceTree"
    second: "TraceTree"

    def __post_init__(self):
        _check_span(self.s, self.e)
        if isinstance(self.first, Skip):
            raise ValueError("first subtree of seq may not be a skip")


@dataclass(frozen=True)
class PriorNode:
    s: int
    e: int
    first: "TraceTree"
    second: "TraceTree"

    def __post_init__(self):
        _check_span(self.s, self.e)
        if isinstance(self.first, Skip):
            raise ValueError("first subtree of prior may not be a skip")


@dataclass(frozen=True)
class StarNode:
    s: int
    e: int
    head: "TraceTree"
    tail: "TraceTree"

    def __post_init__(self):
        _check_span(self.s, self.e)
        if isinstance(self.head, Skip):
            raise ValueError("head subtree of star may not be a skip")
        if not isinstance(self.tail, (Skip, StarNode)):
            raise ValueError("star tail must be a star or a skip")


@dataclass(frozen=True)
class NotNode:
    s: int
    e: int
    sub: "TraceTree"

    def __post_init__(self):
        _check_span(self.s, self.e)
        if isinstance(self.sub, Skip):
            raise ValueError("not-predicate subtree may not be a skip")


@dataclass(frozen=True)
class SemanticNode:
    s: int
    e: int
    id: int
    value: object

    def __post_init__(self):
        _check_span(self.s, self.e)


@dataclass(frozen=True)
class FailNode:
    s: int
    e: int

    def __post_init__(self):
        _check_span(self.s, self.e)


TraceTree = Union[Skip, EmptyNode, AnyNode, TerminalNode, NonTerminalNode,
                  SeqNode, PriorNode, StarNode, NotNode, SemanticNode, FailNode]


def outcome(t: TraceTree) -> Outcome:
    """Success/failure/undefined classification of a trace tree."""
    if isinstance(t, Skip):
        return Outcome.UNDEFINED
    if isinstance(t, EmptyNode):
        return Outcome.SUCCESS if t.e == t.s else Outcome.UNDEFINED
    if isinstance(t, AnyNode):
        if t.e == t.s + 1:
            return Outcome.SUCCESS
        return Outcome.FAILURE if t.e == t.s else Outcome.UNDEFINED
    if isinstance(t, TerminalNode):
        if t.e == t.s + 1 and t.got == t.expected:
            return Outcome.SUCCESS
        return Outcome.FAILURE if t.e == t.s else Outcome.UNDEFINED
    if isinstance(t, NonTerminalNode):
        return outcome(t.sub)
    if isinstance(t, SeqNode):
        first = outcome(t.first)
        if first is Outcome.FAILURE:
            return Outcome.FAILURE
        if first is Outcome.SUCCESS:
            return outcome(t.second)
        return Outcome.UNDEFINED
    if isinstance(t, PriorNode):
        first = outcome(t.first)
        if first is Outcome.SUCCESS:
            return Outcome.SUCCESS
        if first is Outcome.FAILURE:
            return outcome(t.second)
        return Outcome.UNDEFINED
    if isinstance(t, StarNode):
        head = outcome(t.head)
        if head is Outcome.FAILURE:
            return Outcome.SUCCESS
        if head is Outcome.SUCCESS:
            return Outcome.SUCCESS if outcome(t.tail) is Outcome.SUCCESS \
                else Outcome.UNDEFINED
        return Outcome.UNDEFINED
    if isinstance(t, NotNode):
        sub = outcome(t.sub)
        if sub is Outcome.SUCCESS:
            return Outcome.FAILURE
        if sub is Outcome.FAILURE:
            return Outcome.SUCCESS
        return Outcome.UNDEFINED
    if isinstance(t, SemanticNode):
        return Outcome.SUCCESS
    if isinstance(t, FailNode):
        return Outcome.FAILURE
    raise TypeError(f"not a trace tree: {t!r}")


def tree_wellformed(t: TraceTree) -> bool:
    """Does the tree describe a real computational path?"""
    if isinstance(t, (Skip, SemanticNode, FailNode)):
        return True
    if isinstance(t, EmptyNode):
        return outcome(t) is not Outcome.UNDEFINED
    if isinstance(t, (AnyNode, TerminalNode)):
        if outcome(t) is Outcome.UNDEFINED:
            return False
        # A failed read may not pretend the expected token was present.
        if isinstance(t, TerminalNode) and outcome(t) is Outcome.FAILURE \
                and t.got == t.expected and t.got is not None:
            return False
        return True
    if isinstance(t, NonTerminalNode):
        return (tree_wellformed(t.sub)
                and t.s == t.sub.s and t.e == t.sub.e)
    if isinstance(t, SeqNode):
        if not (tree_wellformed(t.first) and t.s == t.first.s
                and t.first.e == t.second.s and t.second.e == t.e):
            return False
        first = outcome(t.first)
        if first is Outcome.FAILURE:
            return isinstance(t.second, Skip) and t.second.s == t.second.e
        if first is Outcome.SUCCESS:
            return not isinstance(t.second, Skip) and tree_wellformed(t.second)
        return False
    if isinstance(t, PriorNode):
        if not (tree_wellformed(t.first) and t.s == t.first.s
                and t.s == t.second.s):
            return False
        first = outcome(t.first)
        if first is Outcome.SUCCESS:
            return (isinstance(t.second, Skip) and t.second.s == t.second.e
                    and t.e == t.first.e)
        if first is Outcome.FAILURE:
            return (not isinstance(t.second, Skip) and tree_wellformed(t.second)
                    and t.e == t.second.e)
        return False
    if isinstance(t, StarNode):
        if not (tree_wellformed(t.head) and t.s == t.head.s):
            return False
        head = outcome(t.head)
        if head is Outcome.SUCCESS:
            return (isinstance(t.tail, StarNode) and tree_wellformed(t.tail)
                    and t.head.e == t.tail.s and t.e == t.tail.e)
        if head is Outcome.FAILURE:
            # The failed attempt is backtracked: the star consumes nothing.
            return (isinstance(t.tail, Skip) and t.tail.s == t.tail.e
                    and t.tail.s == t.s and t.e == t.s)
        return False
    if isinstance(t, NotNode):
        return (tree_wellformed(t.sub) and t.s == t.e and t.sub.s == t.s
                and outcome(t.sub) is not Outcome.UNDEFINED)
    raise TypeError(f"not a trace tree: {t!r}")


def true_to_grammar(t: TraceTree, e: Expr, g: Grammar) -> bool:
    """Can the grammar expression be rebuilt from the tree's skeleton?"""
    if isinstance(t, FailNode):
        # Compaction discards the shape; fidelity is covered by the
        # semantic-equivalence contract instead.
        return True
    if isinstance(t, Skip):
        return t.skipped == e
    if isinstance(t, EmptyNode):
        return isinstance(e, Empty)
    if isinstance(t, AnyNode):
        return isinstance(e, Any)
    if isinstance(t, TerminalNode):
        return isinstance(e, Terminal) and e.token == t.expected
    if isinstance(t, NonTerminalNode):
        return (isinstance(e, NonTerminal) and e.id == t.id
                and true_to_grammar(t.sub, g.body(t.id), g))
    if isinstance(t, SemanticNode):
        return isinstance(e, NonTerminal) and e.id == t.id
    if isinstance(t, SeqNode):
        return (isinstance(e, Seq)
                and true_to_grammar(t.first, e.left, g)
                and true_to_grammar(t.second, e.right, g))
    if isinstance(t, PriorNode):
        return (isinstance(e, Prior)
                and true_to_grammar(t.first, e.left, g)
                and true_to_grammar(t.second, e.right, g))
    if isinstance(t, StarNode):
        return (isinstance(e, Star)
                and true_to_grammar(t.head, e.inner, g)
                and true_to_grammar(t.tail, e, g))
    if isinstance(t, NotNode):
        return isinstance(e, NotP) and true_to_grammar(t.sub, e.inner, g)
    raise TypeError(f"not a trace tree: {t!r}")


def true_to_input(t: TraceTree, inp: InputText) -> bool:
    """Do the stored tokens match the input at their positions?

    A read leaf must store the input token when its position is inside
    the bound, and must store nothing when the input was exhausted;
    anything else would let a tree fake an end-of-input failure.
    """
    if isinstance(t, (AnyNode, TerminalNode)):
        if t.s < inp.bound:
            return t.got == inp.tokens[t.s]
        return t.got is None
    if isinstance(t, NonTerminalNode):
        return true_to_input(t.sub, inp)
    if isinstance(t, (SeqNode, PriorNode)):
        return true_to_input(t.first, inp) and true_to_input(t.second, inp)
    if isinstance(t, StarNode):
        return true_to_input(t.head, inp) and true_to_input(t.tail, inp)
    if isinstance(t, NotNode):
        return true_to_input(t.sub, inp)
    return True


def tree_children(t: TraceTree) -> tuple[TraceTree, ...]:
    if isinstance(t, NonTerminalNode):
        return (t.sub,)
    if isinstance(t, (SeqNode, PriorNode)):
        return (t.first, t.second)
    if isinstance(t, StarNode):
        return (t.head, t.tail)
    if isinstance(t, NotNode):
        return (t.sub,)
    return ()


# --- JSON serialization --------------------------------------------------

def tree_to_json(t: TraceTree, names=None,
                 value_serializer: Callable[[object], object] = None) -> dict:
    base = {"s": t.s, "e": t.e}
    if isinstance(t, Skip):
        return {"kind": "skip", **base, "skipped": pretty_expr(t.skipped)}
    if isinstance(t, EmptyNode):
        return {"kind": "empty", **base}
    if isinstance(t, AnyNode):
        return {"kind": "any", **base, "got": t.got}
    if isinstance(t, TerminalNode):
        return {"kind": "terminal", **base, "expected": t.expected, "got": t.got}
    if isinstance(t, (NonTerminalNode, SemanticNode)):
        doc = {"kind": "nonterminal" if isinstance(t, NonTerminalNode) else "semantic",
               **base, "id": t.id}
        if names is not None:
            doc["name"] = names[t.id]
        if isinstance(t, NonTerminalNode):
            doc["children"] = [tree_to_json(t.sub, names, value_serializer)]
        else:
            doc["value"] = value_serializer(t.value) if value_serializer else t.value
        return doc
    if isinstance(t, (SeqNode, PriorNode, StarNode)):
        kind = {"SeqNode": "seq", "PriorNode": "prior", "StarNode": "star"}[type(t).__name__]
        return {"kind": kind, **base,
                "children": [tree_to_json(c, names, value_serializer)
                             for c in tree_children(t)]}
    if isinstance(t, NotNode):
        return {"kind": "not", **base,
                "children": [tree_to_json(t.sub, names, value_serializer)]}
    if isinstance(t, FailNode):
        return {"kind": "fail", **base}
    raise TypeError(f"not a trace tree: {t!r}")


def serialize_tree(t: TraceTree, names=None, value_serializer=None) -> str:
    return json.dumps(tree_to_json(t, names, value_serializer), sort_keys=True)


class TreeFormatError(ValueError):
    pass


def tree_from_json(doc: dict) -> TraceTree:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise TreeFormatError(f"not a tree node: {doc!r}")
    kind = doc["kind"]
    try:
        s, e = doc["s"], doc["e"]
        if kind == "skip":
            return Skip(s, e, parse_expr_text(doc["skipped"]))
        if kind == "empty":
            return EmptyNode(s, e)
        if kind == "any":
            return AnyNode(s, e, doc.get("got"))
        if kind == "terminal":
            return TerminalNode(s, e, doc["expected"], doc.get("got"))
        if kind == "nonterminal":
            (sub,) = doc["children"]
            return NonTerminalNode(s, e, doc["id"], tree_from_json(sub))
        if kind in ("seq", "prior", "star"):
            first, second = (tree_from_json(c) for c in doc["children"])
            cls = {"seq": SeqNode, "prior": PriorNode, "star": StarNode}[kind]
            return cls(s, e, first, second)
        if kind == "not":
            (sub,) = doc["children"]
            return NotNode(s, e, tree_from_json(sub))
        if kind == "semantic":
            return SemanticNode(s, e, doc["id"], doc["value"])
        if kind == "fail":
            return FailNode(s, e)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TreeFormatError):
            raise
        raise TreeFormatError(f"malformed {kind!r} node: {exc}") from exc
    raise TreeFormatError(f"unknown node kind {kind!r}")


def deserialize_tree(text: str) -> TraceTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeFormatError(f"malformed JSON: {exc}") from exc
    return tree_from_json(doc)
