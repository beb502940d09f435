"""Representation recipes.

Grammar::

    recipe := IDENT | "dual" "(" recipe ")" | "sym" "(" recipe "," INT ")"
            | "tensor" "(" recipe "," recipe ")"
    IDENT  := "natural" | "adjoint" | "trivial"
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .lie_core import MatrixLieAlgebra
from .rep_core import (
    Representation,
    adjoint_rep,
    dual_rep,
    natural_rep,
    sym_power_rep,
    tensor_rep,
    trivial_rep,
)

ATOMS = {"natural": natural_rep, "adjoint": adjoint_rep, "trivial": trivial_rep}
_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_]\w*)|(?P<int>\d+)|(?P<punct>[(),]))")


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.op
        return f"{self.op}({','.join(str(a) for a in self.args)})"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        i = 0
        while i < len(text):
            if text[i:].strip() == "":
                break
            m = _TOKEN.match(text, i)
            if not m:
                raise ParseError(f"unexpected character {text[i]!r}", i)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            i = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def expect(self, kind, value=None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = repr(value) if value else kind
            got = repr(tok[1]) if tok[0] != "end" else "end of input"
            raise ParseError(f"expected {want}, found {got}", tok[2])
        self.i += 1
        return tok

    def recipe(self) -> Node:
        kind, name, pos = self.expect("name")
        if name in ATOMS:
            return Node(name)
        if name == "dual":
            self.expect("punct", "(")
            inner = self.recipe()
            self.expect("punct", ")")
            return Node("dual", (inner,))
        if name == "sym":
            self.expect("punct", "(")
            inner = self.recipe()
            self.expect("punct", ",")
            _, power, ppos = self.expect("int")
            if int(power) < 1:
                raise ParseError("symmetric power must be >= 1", ppos)
            self.expect("punct", ")")
            return Node("sym", (inner, int(power)))
        if name == "tensor":
            self.expect("punct", "(")
            left = self.recipe()
            self.expect("punct", ",")
            right = self.recipe()
            self.expect("punct", ")")
            return Node("tensor", (left, right))
        raise ParseError(f"unknown representation {name!r}", pos)


def parse_recipe(text: str) -> Node:
    if not isinstance(text, str):
        raise ParseError("recipe must be a string", 0)
    parser = _Parser(text)
    node = parser.recipe()
    parser.expect("end")
    return node


def _build(algebra: MatrixLieAlgebra, node: Node) -> Representation:
    if node.op in ATOMS:
        return ATOMS[node.op](algebra)
    if node.op == "dual":
        return dual_rep(_build(algebra, node.args[0]))
    if node.op == "sym":
        return sym_power_rep(_build(algebra, node.args[0]), node.args[1])
    return tensor_rep(_build(algebra, node.args[0]), _build(algebra, node.args[1]))


def build_rep(algebra: MatrixLieAlgebra, recipe: str) -> Representation:
    return _build(algebra, parse_recipe(recipe))
