from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causalwick.errors import ExprSyntaxError, SpecMismatch, UnknownLabel
from causalwick.expr import ExprAST, OpNode, bind, parse_expr, print_expr
from causalwick.fields import oscillator_spec, random_channel_spec


def test_vev_wrapper():
    ast = parse_expr("vev[ Q-(x1,2.0) Q+(x1,1.0) ]")
    assert ast.vev and len(ast.ops) == 2
    assert ast.ops[0] == OpNode("Q", "-", "x1", Decimal("2.0"))


def test_channel_product():
    ast = parse_expr("psi+(x1,1.0) tpsi-(x2,0.5)")
    assert not ast.vev and [op.kind for op in ast.ops] == ["psi", "tpsi"]


@pytest.mark.parametrize("text,column", [
    ("Q(x1,1.0)", 1),
    ("Q+(x1 1.0)", 7),
    ("Q+(x1,)", 7),
    ("vev[Q+(x1,1)", 13),
    ("Q+(x1,1)]", 9),
    ("", 1),
    ("Q+(x1,1) $", 10),
])
def test_syntax_errors(text, column):
    with pytest.raises(ExprSyntaxError) as e:
        parse_expr(text)
    assert e.value.column == column


def test_labels_checked_at_binding():
    ast = parse_expr("Q+(x9,1)")
    with pytest.raises(UnknownLabel):
        bind(ast, oscillator_spec())
    with pytest.raises(SpecMismatch):
        bind(parse_expr("psi+(x1,1)"), oscillator_spec())
    ops = bind(parse_expr("psi+(x1,1) tpsi-(x2,0.5)"), random_channel_spec(np.random.default_rng(0)))
    assert ops[1].t == 0.5


labels = st.from_regex(r"[a-z][a-z0-9_]{0,4}", fullmatch=True)
times = st.decimals(allow_nan=False, allow_infinity=False, places=4, min_value=-1000, max_value=1000)
nodes = st.builds(OpNode, st.sampled_from(["Q", "psi", "tpsi"]), st.sampled_from("+-"), labels, times)


@given(st.lists(nodes, min_size=1, max_size=6), st.booleans())
def test_print_parse_round_trip(ops, vev):
    ast = ExprAST(tuple(ops), vev)
    again = parse_expr(print_expr(ast))
    assert again == ast
    assert print_expr(again) == print_expr(ast)
