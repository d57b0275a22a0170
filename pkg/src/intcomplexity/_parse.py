"""Tokenizer and recursive-descent parser for ``+``/``*`` arithmetic text.

Produces a small n-ary AST of tuples:
``("num", int)``, ``("var", name)``, ``("add", [..])``, ``("mul", [..])``.
Juxtaposition (``(1+1)(1+1)``, ``2x1``) means multiplication.
"""

from __future__ import annotations

import re

from intcomplexity.errors import ContractError

_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d*)|([+*·()]))")


def tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ContractError(f"unexpected character {text[pos:pos + 1]!r} at {pos}")
        num, var, op = m.groups()
        if num is not None:
            tokens.append(("num", num))
        elif var is not None:
            tokens.append(("var", var))
        else:
            tokens.append(("op", "*" if op == "·" else op))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self):
        terms = [self.term()]
        while self.peek() == ("op", "+"):
            self.take()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else ("add", terms)

    def term(self):
        factors = [self.factor()]
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                factors.append(self.factor())
            elif tok is not None and (tok[0] in ("num", "var") or tok == ("op", "(")):
                factors.append(self.factor())
            else:
                break
        return factors[0] if len(factors) == 1 else ("mul", factors)

    def factor(self):
        tok = self.take()
        if tok is None:
            raise ContractError("unexpected end of expression")
        kind, text = tok
        if kind == "num":
            return ("num", int(text))
        if kind == "var":
            return ("var", text)
        if text == "(":
            node = self.expr()
            if self.take() != ("op", ")"):
                raise ContractError("unbalanced parentheses")
            return node
        raise ContractError(f"unexpected token {text!r}")


def parse(text: str):
    tokens = tokenize(text)
    if not tokens:
        raise ContractError("empty expression")
    parser = _Parser(tokens)
    node = parser.expr()
    if parser.peek() is not None:
        raise ContractError(f"trailing input at token {parser.i}")
    return node
