"""Shared randomized generators for grammars, inputs, and trace trees."""

from __future__ import annotations

import random

import pytest

from pegtrace import (Any, Empty, Grammar, InputText, NonTerminal, NotP,
                      ParseContext, Prior, Rule, Seq, Star, Terminal,
                      grammar_wellformed, infer_order)
from pegtrace.trace import (AnyNode, EmptyNode, FailNode, NonTerminalNode,
                            NotNode, PriorNode, SemanticNode, SeqNode, Skip,
                            StarNode, TerminalNode)

ALPHABET = (97, 98)  # {'a', 'b'}


def random_expr(rng: random.Random, n_rules: int, size: int):
    """A random core expression with at most `size` nodes."""
    if size <= 1:
        kind = rng.choice(["empty", "any", "terminal", "terminal", "nonterminal"])
        if kind == "empty":
            return Empty()
        if kind == "any":
            return Any()
        if kind == "terminal":
            return Terminal(rng.choice(ALPHABET))
        return NonTerminal(rng.randrange(n_rules))
    kind = rng.choice(["seq", "seq", "prior", "prior", "star", "not", "leaf", "leaf"])
    if kind == "leaf":
        return random_expr(rng, n_rules, 1)
    if kind in ("seq", "prior"):
        left_size = rng.randint(1, size - 2) if size > 2 else 1
        left = random_expr(rng, n_rules, left_size)
        right = random_expr(rng, n_rules, size - 1 - left_size)
        return (Seq if kind == "seq" else Prior)(left, right)
    inner = random_expr(rng, n_rules, size - 1)
    return Star(inner) if kind == "star" else NotP(inner)


def random_grammar(rng: random.Random, max_rules: int = 6, max_size: int = 25) -> Grammar:
    n_rules = rng.randint(1, max_rules)
    rules = tuple(
        Rule(f"r{i}", random_expr(rng, n_rules, rng.randint(1, max_size)))
        for i in range(n_rules)
    )
    return Grammar(rules)


def random_wellformed_grammars(seed: int, count: int, max_rules: int = 4,
                               max_size: int = 10) -> list[Grammar]:
    """Random grammars filtered (with order inference) to well-formed ones."""
    rng = random.Random(seed)
    found: list[Grammar] = []
    attempts = 0
    while len(found) < count and attempts < count * 500:
        attempts += 1
        g = random_grammar(rng, max_rules, max_size)
        if grammar_wellformed(g).verdict:
            found.append(g)
            continue
        order = infer_order(g)
        if order is not None:
            g = g.with_rank(order)
            if grammar_wellformed(g).verdict:
                found.append(g)
    assert len(found) == count, f"only {len(found)} well-formed grammars found"
    return found


def random_input(rng: random.Random, max_len: int = 8) -> InputText:
    data = bytes(rng.choice(ALPHABET) for _ in range(rng.randint(0, max_len)))
    bound = rng.randint(0, len(data)) if rng.random() < 0.3 else len(data)
    return InputText(data, bound)


def random_span(rng: random.Random, lo: int = 0, hi: int = 6) -> tuple[int, int]:
    s = rng.randint(lo, hi)
    e = rng.randint(s, hi)
    return s, e


def random_tracetree(rng: random.Random, depth: int = 4):
    """An arbitrary trace tree, mostly ill-formed; spans are random."""
    s, e = random_span(rng)
    kinds = ["skip", "empty", "any", "terminal", "semantic", "fail"]
    if depth > 0:
        kinds += ["nonterminal", "seq", "prior", "star", "not"] * 2
    kind = rng.choice(kinds)
    if kind == "skip":
        return Skip(s, e, random_expr(rng, 2, rng.randint(1, 4)))
    if kind == "empty":
        return EmptyNode(s, e)
    if kind == "any":
        return AnyNode(s, e, rng.choice([None, 97, 98]))
    if kind == "terminal":
        return TerminalNode(s, e, rng.choice(ALPHABET), rng.choice([None, 97, 98]))
    if kind == "semantic":
        return SemanticNode(s, e, rng.randrange(3), rng.randrange(10))
    if kind == "fail":
        return FailNode(s, e)

    def child(allow_skip=True):
        t = random_tracetree(rng, depth - 1)
        while not allow_skip and isinstance(t, Skip):
            t = random_tracetree(rng, depth - 1)
        return t

    if kind == "nonterminal":
        return NonTerminalNode(s, e, rng.randrange(3), child(allow_skip=False))
    if kind == "seq":
        return SeqNode(s, e, child(allow_skip=False), child())
    if kind == "prior":
        return PriorNode(s, e, child(allow_skip=False), child())
    if kind == "star":
        head = child(allow_skip=False)
        if rng.random() < 0.5:
            s2, e2 = random_span(rng)
            tail = Skip(s2, e2, Star(random_expr(rng, 2, 2)))
        else:
            tail = random_tracetree(rng, depth - 1)
            while not isinstance(tail, StarNode):
                h2 = child(allow_skip=False)
                s2, e2 = random_span(rng)
                tail = StarNode(s2, e2, h2, Skip(e2, e2, Star(random_expr(rng, 2, 2))))
        return StarNode(s, e, head, tail)
    return NotNode(s, e, child(allow_skip=False))


@pytest.fixture(scope="session")
def wf_corpus() -> list[tuple[ParseContext, random.Random]]:
    """Well-formed (grammar, input) contexts reused across parser tests."""
    rng = random.Random(20240817)
    grammars = random_wellformed_grammars(seed=7, count=60)
    corpus = []
    for g in grammars:
        for _ in range(5):
            corpus.append(ParseContext(g, random_input(rng)))
    return corpus
