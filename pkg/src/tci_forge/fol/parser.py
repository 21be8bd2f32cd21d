"""Recursive-descent parser for the ASCII formula language.

    iff    := imp {"<->" imp}
    imp    := disj ["->" imp]
    disj   := conj {"|" conj}
    conj   := unit {"&" unit}
    unit   := "~" unit | ("forall"|"exists") IDENT unit | "true" | "false"
            | "(" iff ")" | atom
    atom   := IDENT "(" term {"," term} ")" | term "=" term
    term   := IDENT | IDENT "(" term {"," term} ")"

Quantifiers may appear anywhere; the result is normalised to prenex form.
``a <-> b`` desugars to ``(a -> b) & (b -> a)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    EXISTS,
    FORALL,
    And,
    Const,
    Eq,
    Formula,
    Func,
    Implies,
    Node,
    Not,
    Or,
    Quant,
    Rel,
    Signature,
    Truth,
    Var,
)


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, message: str, pos: int, expected: str | None = None):
        self.pos = pos
        self.expected = expected
        detail = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at position {pos}{detail}")


class UnknownSymbolError(FormulaError):
    pass


class ArityError(FormulaError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|[()~&|,=])|(?P<ident>[A-Za-z_][A-Za-z0-9_]*))"
)
KEYWORDS = {"forall", "exists", "true", "false"}


@dataclass(frozen=True)
class Token:
    kind: str  # "op", "ident", "eof"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = "op" if m.group("op") else "ident"
        val = m.group(kind)
        tokens.append(Token(kind, val, m.start(kind)))
        pos = m.end()
    tokens.append(Token("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature, allow_free: bool):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig
        self.allow_free = allow_free
        self.scope: list[str] = []

    # helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "ident")

    def take(self, text: str) -> Token:
        if not self.at(text):
            raise ParseError(f"unexpected {self._describe()}", self.tok.pos, repr(text))
        t = self.tok
        self.i += 1
        return t

    def _describe(self) -> str:
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.text)

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise ParseError(f"unexpected {self._describe()}", t.pos, "identifier")
        self.i += 1
        return t

    # grammar
    def parse(self) -> Node:
        node = self.iff()
        if self.tok.kind != "eof":
            raise ParseError(f"unexpected {self._describe()}", self.tok.pos, "end of input")
        return node

    def iff(self) -> Node:
        node = self.imp()
        while self.at("<->"):
            self.i += 1
            rhs = self.imp()
            node = And(Implies(node, rhs), Implies(rhs, node))
        return node

    def imp(self) -> Node:
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Implies(left, self.imp())
        return left

    def disj(self) -> Node:
        node = self.conj()
        while self.at("|"):
            self.i += 1
            node = Or(node, self.conj())
        return node

    def conj(self) -> Node:
        node = self.unit()
        while self.at("&"):
            self.i += 1
            node = And(node, self.unit())
        return node

    def unit(self) -> Node:
        t = self.tok
        if self.at("~"):
            self.i += 1
            return Not(self.unit())
        if t.kind == "ident" and t.text in (FORALL, EXISTS):
            self.i += 1
            v = self.ident()
            if v.text in self.sig:
                raise ParseError(f"cannot quantify over symbol {v.text}", v.pos, "variable")
            self.scope.append(v.text)
            try:
                body = self.unit()
            finally:
                self.scope.pop()
            return Quant(t.text, v.text, body)
        if t.kind == "ident" and t.text in ("true", "false"):
            self.i += 1
            return Truth(t.text == "true")
        if self.at("("):
            self.i += 1
            node = self.iff()
            self.take(")")
            return node
        return self.atom()

    def atom(self) -> Node:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise ParseError(f"unexpected {self._describe()}", t.pos, "formula")
        decl = self.sig.get(t.text)
        nxt = self.toks[self.i + 1]
        if decl is not None and decl.kind == "relation":
            self.i += 1
            args = self.args()
            if len(args) != decl.arity:
                raise ArityError(
                    f"relation {decl.name} has arity {decl.arity}, got {len(args)} (position {t.pos})"
                )
            return Rel(decl.name, args)
        if decl is None and nxt.text == "(" and nxt.kind == "op":
            raise UnknownSymbolError(f"unknown symbol {t.text} at position {t.pos}")
        left = self.term()
        self.take("=")
        right = self.term()
        return Eq(left, right)

    def args(self) -> tuple:
        self.take("(")
        out = [self.term()]
        while self.at(","):
            self.i += 1
            out.append(self.term())
        self.take(")")
        return tuple(out)

    def term(self):
        t = self.ident()
        decl = self.sig.get(t.text)
        if self.at("("):
            if decl is None:
                raise UnknownSymbolError(f"unknown symbol {t.text} at position {t.pos}")
            if decl.kind != "function":
                raise ParseError(f"{decl.kind} {decl.name} used as a function", t.pos)
            args = self.args()
            if len(args) != decl.arity:
                raise ArityError(
                    f"function {decl.name} has arity {decl.arity}, got {len(args)} (position {t.pos})"
                )
            return Func(decl.name, args)
        if t.text in self.scope:
            return Var(t.text)
        if decl is not None:
            if decl.kind != "constant":
                raise ArityError(f"{decl.kind} {decl.name} used without arguments (position {t.pos})")
            return Const(decl.name)
        if not self.allow_free:
            raise UnknownSymbolError(f"unknown symbol or free variable {t.text} at position {t.pos}")
        return Var(t.text)


def parse_tree(text: str, sig: Signature, allow_free: bool = True) -> Node:
    """Parse to a syntax tree without prenexing."""
    return _Parser(text, sig, allow_free).parse()


def parse_formula(text: str, sig: Signature, allow_free: bool = True) -> Formula:
    from .prenex import to_prenex

    return to_prenex(parse_tree(text, sig, allow_free), avoid=sig.names)


def parse_sentence(text: str, sig: Signature) -> Formula:
    return parse_formula(text, sig, allow_free=False)
