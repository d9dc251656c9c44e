"""Operator-product expressions.

Grammar::

    expr    := "vev[" product "]" | product
    product := op { op }
    op      := kind branch "(" xlabel "," number ")"
    kind    := "Q" | "psi" | "tpsi"
    branch  := "+" | "-"

Times are kept as ``Decimal`` so printing and reparsing is exact.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal

from .errors import ExprSyntaxError
from .fields import FieldOp

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<vev>vev\[)
  | (?P<close>\])
  | (?P<kind>tpsi|psi|Q)(?P<branch>[+-])?(?![A-Za-z0-9_])
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<comma>,)
  | (?P<number>[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<label>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class OpNode:
    kind: str
    branch: str
    x: str
    t: Decimal

    def to_field_op(self):
        return FieldOp(self.kind, self.x, float(self.t), self.branch)


@dataclass(frozen=True)
class ExprAST:
    ops: tuple
    vev: bool = False

    def field_ops(self):
        return tuple(op.to_field_op() for op in self.ops)


def _tokens(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos + 1)
        if m.lastgroup != "ws":
            out.append((m, pos + 1))
        pos = m.end()
    return out


def parse_expr(text) -> ExprAST:
    toks = _tokens(text)
    end = len(text) + 1
    i = 0

    def peek():
        return toks[i] if i < len(toks) else (None, end)

    def take(group, what):
        nonlocal i
        m, col = peek()
        if m is None or m.group(group) is None:
            found = "end of input" if m is None else repr(m.group(0))
            raise ExprSyntaxError(f"expected {what}, found {found}", col)
        i += 1
        return m

    vev = False
    if peek()[0] is not None and peek()[0].group("vev"):
        take("vev", "'vev['")
        vev = True
    ops = []
    while True:
        m, col = peek()
        if m is None or m.group("close") is not None:
            break
        if m.group("kind") is None:
            raise ExprSyntaxError(f"expected an operator, found {m.group(0)!r}", col)
        if m.group("branch") is None:
            raise ExprSyntaxError(f"operator {m.group('kind')!r} lacks a branch tag", col)
        take("kind", "operator")
        take("lpar", "'('")
        lm = peek()[0]
        if lm is not None and lm.group("kind") and lm.group("branch") is None:
            x = take("kind", "x label").group(0)      # a label spelled like a kind
        else:
            x = take("label", "x label").group(0)
        take("comma", "','")
        t = Decimal(take("number", "time").group(0))
        take("rpar", "')'")
        ops.append(OpNode(m.group("kind"), m.group("branch"), x, t))
    if not ops:
        raise ExprSyntaxError("empty product", peek()[1])
    if vev:
        take("close", "']'")
    m, col = peek()
    if m is not None:
        raise ExprSyntaxError(f"trailing input {m.group(0)!r}", col)
    return ExprAST(tuple(ops), vev)


def print_expr(ast: ExprAST) -> str:
    body = " ".join(f"{op.kind}{op.branch}({op.x},{op.t})" for op in ast.ops)
    return f"vev[ {body} ]" if ast.vev else body


def bind(ast: ExprAST, spec):
    """Field operators checked against ``spec`` (unknown labels raise here)."""
    ops = ast.field_ops()
    for op in ops:
        spec.check_op(op)
    return ops
