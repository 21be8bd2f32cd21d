"""The literal alphabet of a TCI and the diagram Sigma(T, M) of its models."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .fol import Structure, element_key
from .fol.semantics import FuncTable, tuple_key
from .tci import TCI, TCIError, models_star

UNIVERSE = "universe"
KIND_RANK = {UNIVERSE: 0, "constant": 1, "relation": 2, "function": 3}


class DiagramError(TCIError):
    pass


@dataclass(frozen=True, eq=True)
class Literal:
    """A signed atomic sentence with carrier-element parameters.

    ``args`` holds the parameters: ``(x,)`` for U(x) and c = x, the tuple for
    a relation, and argument tuple plus value for a function equation.
    """

    kind: str
    symbol: str
    args: tuple
    positive: bool = True

    def __post_init__(self):
        # literals are hashed constantly inside condition sets
        object.__setattr__(self, "_hash", hash((self.kind, self.symbol, self.args, self.positive)))

    def __hash__(self):
        return self._hash

    def __neg__(self) -> "Literal":
        return Literal(self.kind, self.symbol, self.args, not self.positive)

    negate = __neg__

    @property
    def atom(self) -> "Literal":
        return self if self.positive else -self

    def key(self):
        k = self.__dict__.get("_key")
        if k is None:
            k = (KIND_RANK[self.kind], self.symbol, tuple_key(self.args), 0 if self.positive else 1)
            object.__setattr__(self, "_key", k)
        return k

    def __lt__(self, other):
        return self.key() < other.key()

    def atom_text(self) -> str:
        if self.kind == "constant":
            return f"{self.symbol}={self.args[0]}"
        if self.kind == "function":
            return f"{self.symbol}({','.join(self.args[:-1])})={self.args[-1]}"
        return f"{self.symbol}({','.join(self.args)})"

    def __str__(self):
        text = self.atom_text()
        if self.positive:
            return text
        return f"~({text})" if "=" in text else f"~{text}"

    def holds(self, M: Structure) -> bool | None:
        """Truth in M, or None when a parameter lies outside M's universe."""
        if self.kind == UNIVERSE:
            val = self.args[0] in M.universe
        elif not set(self.args) <= M.universe:
            return None
        elif self.kind == "constant":
            val = M[self.symbol] == self.args[0]
        elif self.kind == "relation":
            val = self.args in M[self.symbol]
        else:
            val = M[self.symbol](self.args[:-1]) == self.args[-1]
        return val if self.positive else not val


def sort_literals(lits: Iterable[Literal]) -> list[Literal]:
    return sorted(lits, key=Literal.key)


def condition_key(p) -> tuple:
    """Canonical order on finite literal sets: size, then sorted literal keys."""
    return (len(p), sorted(l.key() for l in p))


def is_consistent_set(p: Iterable[Literal]) -> bool:
    """No complementary pair."""
    s = set(p)
    return not any(-l in s for l in s)


def show_condition(p) -> list[str]:
    return [str(l) for l in sort_literals(p)]


_LIT = re.compile(
    r"\s*(?P<neg>~)?\s*(?P<paren>\()?\s*(?P<sym>[A-Za-z_]\w*)\s*"
    r"(?:\((?P<args>[^()]*)\))?\s*(?:=\s*(?P<val>\w+))?\s*(?(paren)\))\s*\Z"
)


def parse_literal(text: str, t: TCI) -> Literal:
    """Inverse of ``str(Literal)``: U(a), ~U(a), c=a, ~(c=a), R(a,b), F(a)=b."""
    m = _LIT.match(text)
    if not m:
        raise DiagramError(f"cannot parse literal {text!r}")
    sym = m.group("sym")
    args = tuple(a.strip() for a in m.group("args").split(",")) if m.group("args") is not None else ()
    val = m.group("val")
    positive = m.group("neg") is None
    if sym == t.universe_symbol:
        kind = UNIVERSE
    elif sym in t.sig:
        kind = t.sig[sym].kind
    else:
        raise DiagramError(f"unknown symbol {sym} in literal {text!r}")
    if kind == "constant":
        if args or val is None:
            raise DiagramError(f"constant literal must read {sym}=x: {text!r}")
        args = (val,)
    elif kind == "function":
        if val is None:
            raise DiagramError(f"function literal must read {sym}(..)=x: {text!r}")
        args = args + (val,)
    elif val is not None:
        raise DiagramError(f"relation literal cannot carry '=': {text!r}")
    return Literal(kind, sym, args, positive)


class LiteralAlphabet:
    """L_T. Finite alphabets hold a sorted tuple; lazy ones an iterator factory."""

    def __init__(self, literals: Iterable[Literal] | None = None, *,
                 lazy: Callable[[], Iterator[Literal]] | None = None,
                 member: Callable[[Literal], bool] | None = None):
        if literals is not None:
            self.literals: tuple | None = tuple(sort_literals(set(literals)))
            self._set = frozenset(self.literals)
        else:
            self.literals = None
            self._set = None
        self._lazy = lazy
        self._member = member

    @property
    def finite(self) -> bool:
        return self.literals is not None

    def __iter__(self) -> Iterator[Literal]:
        if self.literals is not None:
            return iter(self.literals)
        return self._lazy()

    def __contains__(self, lit) -> bool:
        if self._set is not None:
            return lit in self._set
        return self._member(lit)

    def __len__(self) -> int:
        if self.literals is None:
            raise TypeError("lazy alphabet has no finite length")
        return len(self.literals)

    def atoms(self) -> list[Literal]:
        """The positive literals, one per atomic sentence."""
        return [l for l in self if l.positive] if self.finite else []


def _positive_literals(t: TCI) -> Iterator[Literal]:
    ucar = t.universe.carrier
    for x in t.universe.sorted_carrier():
        yield Literal(UNIVERSE, t.universe_symbol, (x,))
    for decl in t.sig:
        con = t.constraint(decl.name)
        for x in con.sorted_carrier():
            if decl.kind == "constant":
                if x in ucar:
                    yield Literal("constant", decl.name, (x,))
            else:
                yield Literal(decl.kind, decl.name, x)


def build_literal_alphabet(t: TCI) -> LiteralAlphabet:
    if t.schematic is not None:
        from .families import family_for

        return family_for(t).alphabet()
    pos = list(_positive_literals(t))
    return LiteralAlphabet(pos + [-l for l in pos])


def sigma_diagram(t: TCI, M: Structure, check: bool = True) -> frozenset:
    """(U(M) u Diag(M)) n L_T."""
    if check and not models_star(M, t):
        raise DiagramError(f"{M} is not a model of {t.name}")
    out = set()
    for lit in _positive_literals(t):
        val = lit.holds(M)
        if val is None:
            continue  # parameters outside M: not in Diag(M), either sign
        out.add(lit if val else -lit)
    return frozenset(out)


def recover_model(t: TCI, d: Iterable[Literal]) -> Structure:
    """The unique model whose diagram is ``d``; raises if there is none."""
    d = frozenset(d)
    if t.schematic is not None:
        raise DiagramError("recover_model needs finite carriers")
    universe = frozenset(l.args[0] for l in d if l.kind == UNIVERSE and l.positive)
    interp: dict = {}
    for decl in t.sig:
        pos = [l for l in d if l.symbol == decl.name and l.positive]
        if decl.kind == "constant":
            vals = sorted({l.args[0] for l in pos}, key=element_key)
            if len(vals) != 1:
                raise DiagramError(f"diagram does not pin down constant {decl.name}")
            interp[decl.name] = vals[0]
        elif decl.kind == "relation":
            interp[decl.name] = frozenset(l.args for l in pos)
        else:
            table = {}
            for l in pos:
                if table.setdefault(l.args[:-1], l.args[-1]) != l.args[-1]:
                    raise DiagramError(f"diagram gives {decl.name} two values at {l.args[:-1]}")
            interp[decl.name] = FuncTable.of(table)
    try:
        M = Structure.make(universe, interp)
        ok = models_star(M, t)
    except (KeyError, TypeError):
        ok = False
    if not ok or sigma_diagram(t, M, check=False) != d:
        raise DiagramError("diagram is not realizable: no model of the TCI has it as its Sigma-set")
    return M
