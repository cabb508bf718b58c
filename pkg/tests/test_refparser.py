"""Reference parser: output contract, termination measure, step lemmas."""

import pytest

from pegtrace import (IllFormedGrammarError, InputText,
                      NonTerminal, NotP,
                      Outcome, ParseContext, Prior, Seq, Star, Skip,
                      instrument, outcome, parse, parse_expr,
                      parse_grammar_text, tree_wellformed, true_to_grammar,
                      true_to_input)
from pegtrace.trace import (NonTerminalNode, PriorNode, StarNode,
                            TerminalNode)


def ctx_for(grammar_text: str, data: bytes, bound=None) -> ParseContext:
    g = parse_grammar_text(grammar_text)
    return ParseContext(g, InputText(data, len(data) if bound is None else bound))


class TestParseContext:
    def test_rejects_ill_formed_grammar(self):
        g = parse_grammar_text("A <- A")
        with pytest.raises(IllFormedGrammarError) as err:
            ParseContext(g, InputText(b""))
        assert not err.value.report.verdict

    def test_exposes_property_fixpoint(self):
        ctx = ctx_for("A <- 'a'", b"a")
        assert ctx.props[0].can_fail and ctx.props[0].can_consume


class TestBasicParses:
    def test_terminal_success(self):
        t = parse(ctx_for("A <- 'a'", b"a"))
        assert t == NonTerminalNode(0, 1, 0, TerminalNode(0, 1, 97, 97))

    def test_terminal_mismatch_records_seen_token(self):
        t = parse(ctx_for("A <- 'a'", b"b"))
        assert t.sub == TerminalNode(0, 0, 97, 98)
        assert outcome(t) is Outcome.FAILURE

    def test_terminal_exhaustion_records_nothing(self):
        t = parse(ctx_for("A <- 'a'", b""))
        assert t.sub == TerminalNode(0, 0, 97, None)

    def test_bound_hides_the_rest(self):
        t = parse(ctx_for("A <- 'a'", b"ab", bound=0))
        assert t.sub == TerminalNode(0, 0, 97, None)

    def test_prior_keeps_failed_first_branch(self):
        t = parse(ctx_for("A <- 'a' / 'b'", b"b"))
        sub = t.sub
        assert isinstance(sub, PriorNode)
        assert outcome(sub.first) is Outcome.FAILURE
        assert outcome(sub.second) is Outcome.SUCCESS
        assert t.e == 1

    def test_prior_success_skips_second_branch(self):
        t = parse(ctx_for("A <- 'a' / 'b'", b"a"))
        assert isinstance(t.sub.second, Skip)

    def test_star_unrolls(self):
        t = parse(ctx_for("A <- 'a'*", b"aab"))
        assert t.e == 2
        inner = t.sub
        assert isinstance(inner, StarNode)
        assert isinstance(inner.tail, StarNode)
        assert outcome(inner.tail.tail.head) is Outcome.FAILURE

    def test_star_backtracks_failed_head(self):
        t = parse(ctx_for("A <- 'a'*", b"b"))
        assert t.e == 0
        assert outcome(t) is Outcome.SUCCESS

    def test_not_predicate_consumes_nothing(self):
        t = parse(ctx_for("A <- !'a' .", b"b"))
        assert outcome(t) is Outcome.SUCCESS and t.e == 1
        t = parse(ctx_for("A <- !'a' .", b"a"))
        assert outcome(t) is Outcome.FAILURE and t.e == 0

    def test_seq_failure_stops_at_failure_point(self):
        t = parse(ctx_for("A <- 'a' 'b' 'c'", b"abd"))
        assert outcome(t) is Outcome.FAILURE
        assert t.e == 2  # the failed 'c' read happened at position 2


class TestContract:
    def test_contract_holds_on_corpus(self, wf_corpus):
        for ctx in wf_corpus:
            t = parse(ctx, contract=True)
            assert t.s == 0
            assert tree_wellformed(t)
            assert true_to_grammar(t, NonTerminal(ctx.grammar.start), ctx.grammar)
            assert true_to_input(t, ctx.input)
            assert outcome(t) is not Outcome.UNDEFINED

    def test_contract_mode_equals_plain_mode(self, wf_corpus):
        for ctx in wf_corpus[:100]:
            assert parse(ctx, contract=True) == parse(ctx)


class TestStepLemmas:
    """Each composite expression parses exactly as its parts dictate."""

    def _subcases(self, ctx, cls, count=50):
        found = []
        for a, rule in enumerate(ctx.grammar.rules):
            def walk(e):
                if isinstance(e, cls):
                    found.append((a, e))
                if isinstance(e, (Seq, Prior)):
                    walk(e.left)
                    walk(e.right)
                elif isinstance(e, (Star, NotP)):
                    walk(e.inner)
            walk(rule.body)
        return found[:count]

    def _positions(self, ctx):
        return range(ctx.b + 1)

    def test_seq_lemma(self, wf_corpus):
        checked = 0
        for ctx in wf_corpus:
            for a, e in self._subcases(ctx, Seq):
                for s in self._positions(ctx):
                    s_t = s
                    t = parse_expr(ctx, a, e, s, s_t)
                    t1 = parse_expr(ctx, a, e.left, s, s_t)
                    assert t.first == t1
                    if outcome(t1) is Outcome.FAILURE:
                        assert outcome(t) is Outcome.FAILURE and t.e == t1.e
                    else:
                        t2 = parse_expr(ctx, a, e.right, t1.e, s_t)
                        assert t.second == t2 and t.e == t2.e
                        assert outcome(t) is outcome(t2)
                    checked += 1
        assert checked >= 1000

    def test_prior_lemma(self, wf_corpus):
        checked = 0
        for ctx in wf_corpus:
            for a, e in self._subcases(ctx, Prior):
                for s in self._positions(ctx):
                    s_t = s
                    t = parse_expr(ctx, a, e, s, s_t)
                    t1 = parse_expr(ctx, a, e.left, s, s_t)
                    assert t.first == t1
                    if outcome(t1) is Outcome.SUCCESS:
                        assert isinstance(t.second, Skip) and t.e == t1.e
                    else:
                        t2 = parse_expr(ctx, a, e.right, s, s_t)
                        assert t.second == t2 and t.e == t2.e
                    checked += 1
        assert checked >= 1000

    def test_star_lemma(self, wf_corpus):
        checked = 0
        for ctx in wf_corpus:
            for a, e in self._subcases(ctx, Star):
                for s in self._positions(ctx):
                    s_t = s
                    t = parse_expr(ctx, a, e, s, s_t)
                    assert outcome(t) is Outcome.SUCCESS
                    t0 = parse_expr(ctx, a, e.inner, s, s_t)
                    assert t.head == t0
                    if outcome(t0) is Outcome.FAILURE:
                        assert t.e == s
                    else:
                        assert t0.e > s  # well-formedness forbids empty bodies
                        assert t.tail == parse_expr(ctx, a, e, t0.e, s_t)
                    checked += 1
        assert checked >= 200

    def test_not_lemma(self, wf_corpus):
        checked = 0
        for ctx in wf_corpus:
            for a, e in self._subcases(ctx, NotP):
                for s in self._positions(ctx):
                    s_t = s
                    t = parse_expr(ctx, a, e, s, s_t)
                    sub = parse_expr(ctx, a, e.inner, s, s_t)
                    assert t.sub == sub and t.e == s
                    want = Outcome.FAILURE if outcome(sub) is Outcome.SUCCESS \
                        else Outcome.SUCCESS
                    assert outcome(t) is want
                    checked += 1
        assert checked >= 200


class TestInstrumentation:
    def test_counts_by_rule_and_position(self):
        tree, stats = instrument(ctx_for("A <- B B\nB <- 'a'", b"aa"))
        assert stats.counts[(0, 0)] == 1
        assert stats.counts[(1, 0)] == 1
        assert stats.counts[(1, 1)] == 1
        assert stats.total == 3
        assert stats.calls_for(1) == 2

    def test_stats_json(self):
        g = parse_grammar_text("A <- 'a'")
        ctx = ParseContext(g, InputText(b"a"))
        _, stats = instrument(ctx)
        doc = stats.to_json(g)
        assert doc == {"counts": [{"rule": "A", "position": 0, "calls": 1}],
                       "total": 1}
