"""First-order syntax trees, signatures and the pretty-printer."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

KINDS = ("constant", "relation", "function")


class SignatureError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class SymbolDecl:
    name: str
    kind: str
    arity: int

    def __post_init__(self):
        if not isinstance(self.name, str) or not IDENT_RE.match(self.name):
            raise SignatureError(f"bad symbol name {self.name!r}")
        if self.kind not in KINDS:
            raise SignatureError(f"symbol {self.name}: unknown kind {self.kind!r}")
        if self.kind == "constant" and self.arity != 0:
            raise SignatureError(f"constant {self.name} must have arity 0")
        if self.kind != "constant" and (not isinstance(self.arity, int) or self.arity < 1):
            raise SignatureError(f"{self.kind} {self.name} must have arity >= 1")


class Signature:
    """A finite set of symbol declarations with unique names."""

    def __init__(self, symbols: Iterable[SymbolDecl] = ()):
        table: dict[str, SymbolDecl] = {}
        for s in symbols:
            if s.name in table:
                raise SignatureError(f"duplicate symbol {s.name}")
            table[s.name] = s
        self._table = dict(sorted(table.items()))

    def __contains__(self, name) -> bool:
        return name in self._table

    def __getitem__(self, name: str) -> SymbolDecl:
        return self._table[name]

    def get(self, name, default=None):
        return self._table.get(name, default)

    def __iter__(self) -> Iterator[SymbolDecl]:
        return iter(self._table.values())

    def __len__(self) -> int:
        return len(self._table)

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and self._table == other._table

    def __hash__(self) -> int:
        return hash(tuple(self._table.values()))

    def __repr__(self) -> str:
        return f"Signature({list(self._table.values())!r})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._table)

    def of_kind(self, kind: str) -> list[SymbolDecl]:
        return [s for s in self if s.kind == kind]

    def extend(self, symbols: Iterable[SymbolDecl]) -> "Signature":
        return Signature(list(self) + list(symbols))

    @classmethod
    def of(cls, **arities) -> "Signature":
        """Shorthand: ``Signature.of(R=("relation", 2), c=("constant", 0))``."""
        return cls(SymbolDecl(n, k, a) for n, (k, a) in arities.items())


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple


Term = Union[Var, Const, Func]

# ---------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Truth:
    value: bool


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Node"


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Implies:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Quant:
    """Embedded quantifier; only appears in trees that are not yet prenex."""

    q: str  # "forall" | "exists"
    var: str
    body: "Node"


Node = Union[Truth, Rel, Eq, Not, And, Or, Implies, Quant]
BINARY = (And, Or, Implies)
ATOMIC = (Truth, Rel, Eq)

FORALL = "forall"
EXISTS = "exists"


def dual(q: str) -> str:
    return EXISTS if q == FORALL else FORALL


@dataclass(frozen=True)
class Formula:
    """A prenex formula: quantifier prefix plus quantifier-free matrix."""

    prefix: tuple = ()
    matrix: Node = field(default=Truth(True))

    def __post_init__(self):
        seen = set()
        for q, v in self.prefix:
            if q not in (FORALL, EXISTS):
                raise ValueError(f"bad quantifier {q!r}")
            if v in seen:
                raise ValueError(f"variable {v} bound twice in prefix")
            seen.add(v)
        if not is_quantifier_free(self.matrix):
            raise ValueError("matrix must be quantifier-free")

    @property
    def bound(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.prefix)

    def free_vars(self) -> frozenset[str]:
        return node_vars(self.matrix) - set(self.bound)

    def is_sentence(self) -> bool:
        return not self.free_vars()

    def as_tree(self) -> Node:
        node = self.matrix
        for q, v in reversed(self.prefix):
            node = Quant(q, v, node)
        return node

    def __str__(self) -> str:
        return pretty(self)


# ---------------------------------------------------------------- traversal


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Func):
        return frozenset().union(*(term_vars(a) for a in t.args)) if t.args else frozenset()
    return frozenset()


def node_vars(n: Node) -> frozenset[str]:
    """Free variables of a (possibly non-prenex) tree."""
    if isinstance(n, Truth):
        return frozenset()
    if isinstance(n, Rel):
        return frozenset().union(*(term_vars(a) for a in n.args))
    if isinstance(n, Eq):
        return term_vars(n.left) | term_vars(n.right)
    if isinstance(n, Not):
        return node_vars(n.body)
    if isinstance(n, BINARY):
        return node_vars(n.left) | node_vars(n.right)
    if isinstance(n, Quant):
        return node_vars(n.body) - {n.var}
    raise TypeError(n)


def all_var_names(n: Node) -> set[str]:
    """Every variable name occurring in the tree, bound or free."""
    if isinstance(n, Quant):
        return {n.var} | all_var_names(n.body)
    if isinstance(n, Not):
        return all_var_names(n.body)
    if isinstance(n, BINARY):
        return all_var_names(n.left) | all_var_names(n.right)
    return set(node_vars(n))


def is_quantifier_free(n: Node) -> bool:
    if isinstance(n, Quant):
        return False
    if isinstance(n, Not):
        return is_quantifier_free(n.body)
    if isinstance(n, BINARY):
        return is_quantifier_free(n.left) and is_quantifier_free(n.right)
    return True


def symbols_used(n: Node) -> set[tuple[str, str, int]]:
    """(name, kind, arity) for each non-logical symbol in the tree."""
    out: set[tuple[str, str, int]] = set()

    def term(t):
        if isinstance(t, Const):
            out.add((t.name, "constant", 0))
        elif isinstance(t, Func):
            out.add((t.name, "function", len(t.args)))
            for a in t.args:
                term(a)

    def walk(m):
        if isinstance(m, Rel):
            out.add((m.name, "relation", len(m.args)))
            for a in m.args:
                term(a)
        elif isinstance(m, Eq):
            term(m.left)
            term(m.right)
        elif isinstance(m, (Not, Quant)):
            walk(m.body)
        elif isinstance(m, BINARY):
            walk(m.left)
            walk(m.right)

    walk(n)
    return out


def subst_term(t: Term, mapping: dict) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Func):
        return Func(t.name, tuple(subst_term(a, mapping) for a in t.args))
    return t


def substitute(n: Node, mapping: dict) -> Node:
    """Replace free variables by terms. Bound occurrences are left alone."""
    if isinstance(n, Truth):
        return n
    if isinstance(n, Rel):
        return Rel(n.name, tuple(subst_term(a, mapping) for a in n.args))
    if isinstance(n, Eq):
        return Eq(subst_term(n.left, mapping), subst_term(n.right, mapping))
    if isinstance(n, Not):
        return Not(substitute(n.body, mapping))
    if isinstance(n, BINARY):
        return type(n)(substitute(n.left, mapping), substitute(n.right, mapping))
    if isinstance(n, Quant):
        inner = {k: v for k, v in mapping.items() if k != n.var}
        return Quant(n.q, n.var, substitute(n.body, inner))
    raise TypeError(n)


def conj(parts) -> Node:
    parts = list(parts)
    if not parts:
        return Truth(True)
    node = parts[0]
    for p in parts[1:]:
        node = And(node, p)
    return node


# ---------------------------------------------------------------- printing

_PREC = {Implies: 1, Or: 2, And: 3}


def pretty_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    return f"{t.name}({','.join(pretty_term(a) for a in t.args)})"


def pretty_node(n: Node) -> str:
    if isinstance(n, Truth):
        return "true" if n.value else "false"
    if isinstance(n, Rel):
        return f"{n.name}({','.join(pretty_term(a) for a in n.args)})"
    if isinstance(n, Eq):
        return f"{pretty_term(n.left)} = {pretty_term(n.right)}"
    if isinstance(n, Not):
        body = n.body
        if isinstance(body, (Truth, Rel, Not)):
            return "~" + pretty_node(body)
        return f"~({pretty_node(body)})"
    if isinstance(n, Quant):
        return f"{n.q} {n.var} ({pretty_node(n.body)})"
    prec = _PREC[type(n)]
    left, right = pretty_node(n.left), pretty_node(n.right)
    # & and | associate left, -> associates right
    if _needs_parens(n.left, prec, right_side=False, op=type(n)):
        left = f"({left})"
    if _needs_parens(n.right, prec, right_side=True, op=type(n)):
        right = f"({right})"
    sym = {And: "&", Or: "|", Implies: "->"}[type(n)]
    return f"{left} {sym} {right}"


def _needs_parens(child, prec, right_side, op) -> bool:
    if isinstance(child, Quant):
        return True
    if not isinstance(child, BINARY):
        return False
    cp = _PREC[type(child)]
    if cp < prec:
        return True
    if cp > prec:
        return False
    if op is Implies:
        return not right_side
    return right_side


def pretty(f: Formula) -> str:
    body = pretty_node(f.matrix)
    if not f.prefix:
        return body
    quants = " ".join(f"{q} {v}" for q, v in f.prefix)
    return f"{quants} ({body})"
