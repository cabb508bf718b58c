"""PEG toolkit: grammar analysis, trace-producing parsers, semantic actions."""

from .analysis import (PropTriple, PropertySet, Violation,
                       WellformednessReport, all_unknown,
                       expr_wellformed, extend_props, fixpoint_props,
                       grammar_wellformed, infer_order, is_coherent,
                       node_props, prop_leq, sweep)
from .expr import (Any, Empty, Expr, Grammar, InputText, NonTerminal, NotP,
                   Prior, Rule, Seq, Star, Terminal, desugar, peg_measure,
                   pretty_expr, pretty_print)
from .packrat import MemoTable, packrat_parse, packrat_parse_expr
from .reader import GrammarError, parse_expr_text, parse_grammar_text
from .refparser import (CallStats, IllFormedGrammarError, ParseContext,
                        instrument, parse, parse_expr)
from .semantic import equivalent_compacted, semantic_interp, semantic_parse
from .trace import (AnyNode, EmptyNode, FailNode, NonTerminalNode, NotNode,
                    Outcome, PriorNode, SemanticNode, SeqNode, Skip, StarNode,
                    TerminalNode, TraceTree, deserialize_tree, outcome,
                    serialize_tree, tree_wellformed, true_to_grammar,
                    true_to_input)

__version__ = "0.1.0"
