"""Service layer: request/response models and the FastAPI application.

The CLI is a thin client over the same handler functions, so command
behavior and HTTP behavior cannot drift apart.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, model_validator

from . import arith
from .analysis import grammar_wellformed
from .expr import InputText
from .packrat import packrat_parse
from .reader import GrammarError, parse_grammar_text
from .refparser import (IllFormedGrammarError, ParseContext, instrument,
                        parse)
from .semantic import semantic_parse
from .trace import Outcome, outcome, tree_children, tree_to_json


class CheckRequest(BaseModel):
    grammar: str


class PropertyRow(BaseModel):
    name: str
    can_fail: bool
    can_empty: bool
    can_consume: bool


class ViolationRow(BaseModel):
    rule: str
    path: list[str]
    reason: str


class CheckResponse(BaseModel):
    verdict: bool
    properties: list[PropertyRow]
    violations: list[ViolationRow]


class InputPayload(BaseModel):
    grammar: str
    input_text: Optional[str] = None
    input_bytes: Optional[list[int]] = None
    bound: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _one_input(self):
        if (self.input_text is None) == (self.input_bytes is None):
            raise ValueError("provide exactly one of input_text and input_bytes")
        return self

    def data(self) -> bytes:
        if self.input_text is not None:
            return self.input_text.encode("latin-1")
        return bytes(self.input_bytes)


class ParseRequest(InputPayload):
    engine: Literal["reference", "packrat", "both"] = "reference"
    include_tree: bool = True


class ParseResponse(BaseModel):
    outcome: Literal["success", "failure"]
    consumed: int
    engines_agree: Optional[bool] = None
    tree: Optional[dict] = None


class StatsDoc(BaseModel):
    counts: list[dict]
    total: int
    misses: Optional[int] = None
    hits: Optional[int] = None


class CompareRequest(InputPayload):
    pass


class CompareResponse(BaseModel):
    equal: bool
    outcome: Literal["success", "failure"]
    reference: StatsDoc
    packrat: StatsDoc
    first_divergence: Optional[list[str]] = None


class DemoRequest(BaseModel):
    text: str


class DemoResponse(BaseModel):
    outcome: Literal["success", "failure"]
    consumed: int
    value: Optional[str] = None
    tree: dict


def _context(grammar_text: str, data: bytes, bound: int | None) -> ParseContext:
    g = parse_grammar_text(grammar_text)
    if bound is None:
        bound = len(data)
    if bound > len(data):
        raise GrammarError("bound exceeds input length", 0, 0)
    return ParseContext(g, InputText(data, bound))


def check_grammar(req: CheckRequest) -> CheckResponse:
    g = parse_grammar_text(req.grammar)
    report = grammar_wellformed(g)
    doc = report.to_json(g)
    return CheckResponse(**doc)


def parse_input(req: ParseRequest) -> ParseResponse:
    ctx = _context(req.grammar, req.data(), req.bound)
    names = ctx.grammar.names
    if req.engine == "reference":
        tree = parse(ctx)
        agree = None
    elif req.engine == "packrat":
        tree, _ = packrat_parse(ctx)
        agree = None
    else:
        tree = parse(ctx)
        packrat_tree, _ = packrat_parse(ctx)
        agree = tree == packrat_tree
    got = outcome(tree)
    return ParseResponse(
        outcome=got.value,
        consumed=tree.e,
        engines_agree=agree,
        tree=tree_to_json(tree, names) if req.include_tree else None,
    )


def _first_divergence(a, b, path):
    if type(a) is not type(b) or (a.s, a.e) != (b.s, b.e):
        return path
    ca, cb = tree_children(a), tree_children(b)
    if not ca and a != b:
        return path
    for i, (x, y) in enumerate(zip(ca, cb)):
        d = _first_divergence(x, y, path + [str(i)])
        if d is not None:
            return d
    return None


def compare_engines(req: CompareRequest) -> CompareResponse:
    ctx = _context(req.grammar, req.data(), req.bound)
    ref_tree, ref_stats = instrument(ctx)
    pk_tree, pk_stats = packrat_parse(ctx)
    equal = ref_tree == pk_tree
    return CompareResponse(
        equal=equal,
        outcome=outcome(ref_tree).value,
        reference=StatsDoc(**ref_stats.to_json(ctx.grammar)),
        packrat=StatsDoc(**pk_stats.to_json(ctx.grammar)),
        first_divergence=None if equal else _first_divergence(ref_tree, pk_tree, []),
    )


def demo_arith(req: DemoRequest) -> DemoResponse:
    g = arith.arith_grammar()
    ctx = ParseContext(g, InputText(req.text.encode("latin-1")))
    action = arith.make_arith_action(g)
    tree = semantic_parse(ctx, action)
    got = outcome(tree)
    value = str(tree.value) if got is Outcome.SUCCESS else None
    return DemoResponse(
        outcome=got.value,
        consumed=tree.e,
        value=value,
        tree=tree_to_json(tree, g.names, value_serializer=str),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="pegtrace", version="0.1.0")

    def guarded(fn, req):
        try:
            return fn(req)
        except GrammarError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except IllFormedGrammarError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/check", response_model=CheckResponse)
    def check(req: CheckRequest):
        return guarded(check_grammar, req)

    @app.post("/parse", response_model=ParseResponse)
    def do_parse(req: ParseRequest):
        return guarded(parse_input, req)

    @app.post("/compare", response_model=CompareResponse)
    def compare(req: CompareRequest):
        return guarded(compare_engines, req)

    @app.post("/demo/arith", response_model=DemoResponse)
    def demo(req: DemoRequest):
        return guarded(demo_arith, req)

    return app


app = create_app()
