"""Property inference, coherence, fixpoint, and well-formedness checks."""

import random

import pytest

from pegtrace import (Any, Empty, Grammar, NonTerminal, NotP, PropTriple,
                      Prior, Rule, Seq, Star, Terminal, all_unknown,
                      extend_props, fixpoint_props, grammar_wellformed,
                      infer_order, is_coherent, node_props,
                      parse_grammar_text, prop_leq, sweep)
from pegtrace.analysis import ORDER_VIOLATION, STAR_OF_NULLABLE

from conftest import random_grammar
from oracles import saturate_props


def triple(*flags):
    return PropTriple("fail" in flags, "empty" in flags, "consume" in flags)


class TestNodeProps:
    def test_leaves(self):
        p = all_unknown(1)
        assert node_props(Empty(), p) == triple("empty")
        assert node_props(Any(), p) == triple("fail", "consume")
        assert node_props(Terminal(97), p) == triple("fail", "consume")
        assert node_props(NonTerminal(0), p) == triple()

    def test_nonterminal_reads_current_knowledge(self):
        p = (triple("empty", "fail"),)
        assert node_props(NonTerminal(0), p) == triple("empty", "fail")

    def test_seq(self):
        p = all_unknown(1)
        a, b = Terminal(97), Terminal(98)
        assert node_props(Seq(a, b), p) == triple("fail", "consume")
        assert node_props(Seq(Empty(), Empty()), p) == triple("empty")
        # Unknown left blocks every flag of the pair.
        assert node_props(Seq(NonTerminal(0), b), p) == triple()

    def test_prior(self):
        p = all_unknown(1)
        assert node_props(Prior(Terminal(97), Empty()), p) == \
            triple("empty", "consume")
        assert node_props(Prior(Empty(), Terminal(97)), p) == triple("empty")
        assert node_props(Prior(Terminal(97), Terminal(98)), p) == \
            triple("fail", "consume")

    def test_star_never_fails(self):
        p = all_unknown(1)
        assert node_props(Star(Terminal(97)), p) == triple("empty", "consume")
        assert node_props(Star(NonTerminal(0)), p) == triple()

    def test_not_predicate_swaps_fail_and_success(self):
        p = all_unknown(1)
        assert node_props(NotP(Terminal(97)), p) == triple("fail", "empty")
        assert node_props(NotP(Empty()), p) == triple("fail")
        assert node_props(NotP(NotP(Terminal(97))), p) == triple("fail", "empty")


class TestOrderAndCoherence:
    def test_prop_leq_is_pointwise(self):
        assert prop_leq((triple(),), (triple("fail"),))
        assert not prop_leq((triple("fail"),), (triple("empty"),))
        with pytest.raises(ValueError):
            prop_leq((triple(),), (triple(), triple()))

    def test_extend_is_monotone_in_knowledge(self):
        rng = random.Random(11)
        for _ in range(200):
            g = random_grammar(rng, max_rules=4, max_size=8)
            p = all_unknown(len(g.rules))
            q = sweep(p, g)
            for a in range(len(g.rules)):
                assert prop_leq(extend_props(a, p, g), extend_props(a, q, g))

    def test_all_unknown_is_coherent(self):
        rng = random.Random(13)
        for _ in range(100):
            g = random_grammar(rng, max_rules=4, max_size=8)
            assert is_coherent(all_unknown(len(g.rules)), g)

    def test_sweep_preserves_coherence_and_grows(self):
        rng = random.Random(17)
        for _ in range(200):
            g = random_grammar(rng, max_rules=4, max_size=8)
            p = all_unknown(len(g.rules))
            for _ in range(3):
                q = sweep(p, g)
                assert prop_leq(p, q)
                assert is_coherent(q, g)
                p = q


class TestFixpoint:
    def test_matches_saturation_oracle(self):
        rng = random.Random(19)
        for _ in range(300):
            g = random_grammar(rng, max_rules=5, max_size=12)
            assert fixpoint_props(g) == saturate_props(g)

    def test_fixpoint_is_stable(self):
        rng = random.Random(23)
        for _ in range(100):
            g = random_grammar(rng, max_rules=4, max_size=10)
            p = fixpoint_props(g)
            assert sweep(p, g) == p

    def test_mutual_recursion_stays_unknown(self):
        g = parse_grammar_text("A <- B\nB <- A")
        assert fixpoint_props(g) == (triple(), triple())

    def test_negation_pair_example(self):
        # Mutually negated rules with a consuming base case.
        g = parse_grammar_text("A <- 'a'\nB <- !A / C\nC <- !B A")
        props = fixpoint_props(g)
        by_name = dict(zip(g.names, props))
        assert by_name["A"] == triple("fail", "consume")
        assert by_name["B"] == triple("empty", "fail", "consume")
        assert by_name["C"] == triple("fail", "consume")


class TestWellformedness:
    def test_star_of_empty_rejected(self):
        g = Grammar((Rule("A", Star(Empty())),))
        report = grammar_wellformed(g)
        assert not report.verdict
        assert len(report.violations) == 1
        assert report.violations[0].rule == 0
        assert report.violations[0].reason == STAR_OF_NULLABLE
        assert report.violations[0].path == ()

    def test_mutual_recursion_rejected_as_order_violation(self):
        g = parse_grammar_text("A <- B\nB <- A")
        report = grammar_wellformed(g)
        assert not report.verdict
        assert {v.reason for v in report.violations} == {ORDER_VIOLATION}

    def test_star_of_nullable_path(self):
        g = parse_grammar_text("A <- 'a' ('b' / ())*")
        report = grammar_wellformed(g)
        assert not report.verdict
        v = report.violations[0]
        assert v.reason == STAR_OF_NULLABLE
        assert v.path == ("right",)

    def test_consumption_lifts_strictness(self):
        # Self-reference is fine after guaranteed consumption.
        g = parse_grammar_text("A <- 'a' A / 'a'")
        assert grammar_wellformed(g).verdict

    def test_left_recursion_rejected(self):
        g = parse_grammar_text("A <- A 'a' / 'a'")
        report = grammar_wellformed(g)
        assert not report.verdict
        assert report.violations[0].reason == ORDER_VIOLATION
        assert report.violations[0].path == ("left", "left")

    def test_nullable_left_does_not_lift_strictness(self):
        g = parse_grammar_text("A <- 'a'? A")
        assert not grammar_wellformed(g).verdict

    def test_arithmetic_grammar_accepted(self):
        from pegtrace.arith import arith_grammar, sum_product_grammar
        assert grammar_wellformed(arith_grammar()).verdict
        assert grammar_wellformed(sum_product_grammar()).verdict

    def test_report_json_shape(self):
        g = parse_grammar_text("A <- B\nB <- 'b'")
        doc = grammar_wellformed(g).to_json(g)
        assert doc["verdict"] is True
        assert doc["violations"] == []
        assert doc["properties"][1] == {
            "name": "B", "can_fail": True, "can_empty": False,
            "can_consume": True}


class TestInferOrder:
    def test_resolves_forward_reference(self):
        # Default reverse-declaration order ranks A above B, so B's use
        # of A is an order violation until the order is inferred.
        bad = parse_grammar_text("A <- 'a'\nB <- A")
        assert not grammar_wellformed(bad).verdict
        order = infer_order(bad)
        assert order is not None
        assert grammar_wellformed(bad.with_rank(order)).verdict

    def test_cycle_gives_none(self):
        g = parse_grammar_text("A <- B\nB <- A")
        assert infer_order(g) is None

    def test_self_loop_gives_none(self):
        g = parse_grammar_text("A <- A")
        assert infer_order(g) is None
