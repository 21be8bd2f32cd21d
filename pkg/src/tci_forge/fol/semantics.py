"""Finite structures and Tarskian evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

from .syntax import (
    EXISTS,
    And,
    Const,
    Eq,
    Formula,
    Func,
    Implies,
    Not,
    Or,
    Quant,
    Rel,
    Truth,
    Var,
)


class EvaluationError(ValueError):
    pass


def element_key(tag: str):
    """Canonical element order: numeric tags by value first, then lexicographic."""
    if tag.isdigit():
        return (0, int(tag), tag)
    return (1, 0, tag)


def tuple_key(t: tuple):
    return tuple(element_key(x) for x in t)


def subset_key(s) -> tuple:
    """Subsets ordered by size, then lexicographically in element order."""
    keys = sorted(element_key(x) for x in s)
    return (len(keys), keys)


@dataclass(frozen=True)
class FuncTable:
    """Immutable function graph: sorted (argument tuple, value) pairs."""

    items: tuple

    @classmethod
    def of(cls, mapping: Mapping) -> "FuncTable":
        return cls(tuple(sorted(((tuple(k), v) for k, v in mapping.items()), key=lambda kv: tuple_key(kv[0]))))

    @cached_property
    def mapping(self) -> dict:
        return dict(self.items)

    def __call__(self, args: tuple) -> str:
        return self.mapping[args]

    def graph(self) -> frozenset:
        return frozenset(k + (v,) for k, v in self.items)


def _norm(value):
    if isinstance(value, str):
        return value
    if isinstance(value, FuncTable):
        return value
    if isinstance(value, Mapping):
        return FuncTable.of(value)
    return frozenset(tuple(t) for t in value)


def _value_key(value):
    if isinstance(value, str):
        return (0, element_key(value))
    if isinstance(value, FuncTable):
        return (2, [(tuple_key(k), element_key(v)) for k, v in value.items])
    return (1, sorted(tuple_key(t) for t in value))


@dataclass(frozen=True)
class Structure:
    """A finite structure (U; I).

    Constants map to an element, relations to a frozenset of tuples and
    functions to a :class:`FuncTable` total on ``universe ** arity``.
    """

    universe: frozenset
    interp: tuple  # sorted (name, value) pairs

    @classmethod
    def make(cls, universe, interp: Mapping | None = None) -> "Structure":
        interp = interp or {}
        return cls(frozenset(universe), tuple(sorted((k, _norm(v)) for k, v in interp.items())))

    @cached_property
    def table(self) -> dict:
        return dict(self.interp)

    def __getitem__(self, name):
        return self.table[name]

    def __contains__(self, name):
        return name in self.table

    @cached_property
    def elements(self) -> tuple:
        return tuple(sorted(self.universe, key=element_key))

    def sort_key(self):
        return (subset_key(self.universe), [(k, _value_key(v)) for k, v in self.interp])

    def to_json(self) -> dict:
        out = {}
        for name, value in self.interp:
            if isinstance(value, str):
                out[name] = value
            elif isinstance(value, FuncTable):
                out[name] = [list(k) + [v] for k, v in value.items]
            else:
                out[name] = [list(t) for t in sorted(value, key=tuple_key)]
        return {"universe": list(self.elements), "interp": out}

    @classmethod
    def from_json(cls, doc: dict, sig=None) -> "Structure":
        interp = {}
        for name, value in doc.get("interp", {}).items():
            kind = sig[name].kind if sig is not None and name in sig else None
            if isinstance(value, str):
                interp[name] = value
            elif kind == "function":
                interp[name] = {tuple(row[:-1]): row[-1] for row in value}
            else:
                interp[name] = [tuple(row) for row in value]
        return cls.make(doc.get("universe", []), interp)

    def __str__(self):
        parts = [f"{{{', '.join(self.elements)}}}"]
        for name, value in self.interp:
            if isinstance(value, str):
                parts.append(f"{name}={value}")
            elif isinstance(value, FuncTable):
                parts.append(f"{name}={{{', '.join(f'{k}->{v}' for k, v in value.items)}}}")
            else:
                parts.append(f"{name}={sorted(value, key=tuple_key)}")
        return "(" + "; ".join(parts) + ")"


def eval_term(M: Structure, t, env: Mapping[str, str]) -> str:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvaluationError(f"unassigned variable {t.name}") from None
    if isinstance(t, Const):
        if t.name not in M:
            raise EvaluationError(f"symbol {t.name} not interpreted")
        return M[t.name]
    if isinstance(t, Func):
        if t.name not in M:
            raise EvaluationError(f"symbol {t.name} not interpreted")
        args = tuple(eval_term(M, a, env) for a in t.args)
        try:
            return M[t.name](args)
        except KeyError:
            raise EvaluationError(f"function {t.name} undefined at {args}") from None
    raise TypeError(t)


def eval_node(M: Structure, n, env: Mapping[str, str]) -> bool:
    if isinstance(n, Truth):
        return n.value
    if isinstance(n, Rel):
        if n.name not in M:
            raise EvaluationError(f"symbol {n.name} not interpreted")
        return tuple(eval_term(M, a, env) for a in n.args) in M[n.name]
    if isinstance(n, Eq):
        return eval_term(M, n.left, env) == eval_term(M, n.right, env)
    if isinstance(n, Not):
        return not eval_node(M, n.body, env)
    if isinstance(n, And):
        return eval_node(M, n.left, env) and eval_node(M, n.right, env)
    if isinstance(n, Or):
        return eval_node(M, n.left, env) or eval_node(M, n.right, env)
    if isinstance(n, Implies):
        return (not eval_node(M, n.left, env)) or eval_node(M, n.right, env)
    if isinstance(n, Quant):
        return _quant(M, [(n.q, n.var)], n.body, dict(env))
    raise TypeError(n)


def _quant(M, prefix, matrix, env) -> bool:
    if not prefix:
        return eval_node(M, matrix, env)
    (q, v), rest = prefix[0], prefix[1:]
    gen = (_quant(M, rest, matrix, {**env, v: a}) for a in M.elements)
    return any(gen) if q == EXISTS else all(gen)


def eval_formula(M: Structure, f, env: Mapping[str, str] | None = None) -> bool:
    """Truth of ``f`` in ``M`` under ``env``; quantifiers range over M's universe."""
    env = dict(env or {})
    if isinstance(f, Formula):
        return _quant(M, list(f.prefix), f.matrix, env)
    return eval_node(M, f, env)
