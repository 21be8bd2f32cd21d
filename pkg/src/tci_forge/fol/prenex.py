"""Prenex normalisation and the Pi_n / Sigma_n hierarchy."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .syntax import (
    BINARY,
    FORALL,
    Formula,
    Func,
    Implies,
    Node,
    Not,
    Quant,
    Rel,
    Eq,
    Var,
    dual,
    is_quantifier_free,
    node_vars,
)

PI = "Pi"
SIGMA = "Sigma"


def _split_prefix(n: Node):
    prefix = []
    while isinstance(n, Quant):
        prefix.append((n.q, n.var))
        n = n.body
    return prefix, n


def to_prenex(node, avoid=()) -> Formula:
    """Return a logically equivalent prenex formula.

    Input that is already prenex comes back unchanged. Otherwise every bound
    variable is renamed, in left-to-right pre-order, to x1, x2, ... (skipping
    names that are free in the input or listed in ``avoid``) and quantifiers
    are pulled outward left operand first.

    Pulling a quantifier across a connective assumes a non-empty domain; over
    the empty structure the result can differ from the input.
    """
    if isinstance(node, Formula):
        return node
    prefix, matrix = _split_prefix(node)
    bound = [v for _, v in prefix]
    if is_quantifier_free(matrix) and len(set(bound)) == len(bound):
        return Formula(tuple(prefix), matrix)

    taken = set(node_vars(node)) | set(avoid)
    names = (f"x{i}" for i in itertools.count(1))

    def fresh():
        for nm in names:
            if nm not in taken:
                return nm

    renamed = _rename(node, {}, fresh)
    prefix, matrix = _pull(renamed)
    return Formula(tuple(prefix), matrix)


def _rename_term(t, env):
    if isinstance(t, Var):
        return Var(env.get(t.name, t.name))
    if isinstance(t, Func):
        return Func(t.name, tuple(_rename_term(a, env) for a in t.args))
    return t


def _rename(n: Node, env, fresh) -> Node:
    if isinstance(n, Quant):
        new = fresh()
        return Quant(n.q, new, _rename(n.body, {**env, n.var: new}, fresh))
    if isinstance(n, Not):
        return Not(_rename(n.body, env, fresh))
    if isinstance(n, BINARY):
        left = _rename(n.left, env, fresh)
        return type(n)(left, _rename(n.right, env, fresh))
    if isinstance(n, Rel):
        return Rel(n.name, tuple(_rename_term(a, env) for a in n.args))
    if isinstance(n, Eq):
        return Eq(_rename_term(n.left, env), _rename_term(n.right, env))
    return n


def _flip(prefix):
    return [(dual(q), v) for q, v in prefix]


def _pull(n: Node):
    if isinstance(n, Quant):
        p, m = _pull(n.body)
        return [(n.q, n.var)] + p, m
    if isinstance(n, Not):
        p, m = _pull(n.body)
        return _flip(p), Not(m)
    if isinstance(n, BINARY):
        pl, ml = _pull(n.left)
        pr, mr = _pull(n.right)
        if isinstance(n, Implies):
            pl = _flip(pl)
        return pl + pr, type(n)(ml, mr)
    return [], n


# ---------------------------------------------------------------- hierarchy


@dataclass(frozen=True, order=True)
class QuantClass:
    side: str
    level: int

    def __post_init__(self):
        if self.side not in (PI, SIGMA):
            raise ValueError(f"bad side {self.side!r}")
        if self.level < 0:
            raise ValueError("level must be >= 0")

    def __str__(self):
        return f"{self.side}_{self.level}"


@dataclass(frozen=True)
class QuantClassSet:
    """Upward-closed set of classes: (Pi, n) is a member iff n >= pi_min."""

    pi_min: int
    sigma_min: int

    def __contains__(self, c) -> bool:
        if isinstance(c, tuple):
            c = QuantClass(*c)
        return c.level >= (self.pi_min if c.side == PI else self.sigma_min)

    def minimal(self) -> list[QuantClass]:
        lo = min(self.pi_min, self.sigma_min)
        out = []
        if self.pi_min == lo:
            out.append(QuantClass(PI, lo))
        if self.sigma_min == lo:
            out.append(QuantClass(SIGMA, lo))
        return out

    @property
    def level(self) -> int:
        return min(self.pi_min, self.sigma_min)

    def upto(self, n: int) -> frozenset[QuantClass]:
        return frozenset(
            QuantClass(side, k)
            for side, lo in ((PI, self.pi_min), (SIGMA, self.sigma_min))
            for k in range(lo, n + 1)
        )

    def __and__(self, other: "QuantClassSet") -> "QuantClassSet":
        return QuantClassSet(max(self.pi_min, other.pi_min), max(self.sigma_min, other.sigma_min))

    def to_json(self):
        return {"minimal": [str(c) for c in self.minimal()], "pi_min": self.pi_min, "sigma_min": self.sigma_min}


EVERYTHING = QuantClassSet(0, 0)


def quantifier_blocks(f: Formula) -> list[str]:
    blocks: list[str] = []
    for q, _ in f.prefix:
        if not blocks or blocks[-1] != q:
            blocks.append(q)
    return blocks


def classify_formula(f: Formula) -> QuantClassSet:
    if not f.is_sentence():
        raise ValueError(f"not a sentence: free variables {sorted(f.free_vars())}")
    blocks = quantifier_blocks(f)
    if not blocks:
        return QuantClassSet(0, 0)
    b = len(blocks)
    if blocks[0] == FORALL:
        return QuantClassSet(b, b + 1)
    return QuantClassSet(b + 1, b)
