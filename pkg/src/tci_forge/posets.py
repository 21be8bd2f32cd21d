"""Finite and lazy forcing posets: compatibility, atoms, filters, genericity.

Convention throughout: ``le(p, q)`` means p <= q, i.e. p is the stronger
condition (an extension of q).
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .diagram import Literal, LiteralAlphabet, condition_key, show_condition, sort_literals
from .fol import Signature, SymbolDecl, element_key
from .tci import EQUAL, SUBSET, TCI, make_tci

DEFAULT_CAP = 16

DENSE = "dense"
PREDENSE = "predense"
UPWARD_CLOSED = "upward_closed"
FILTER = "filter"
PROPERTIES = (DENSE, PREDENSE, UPWARD_CLOSED, FILTER)


class PosetError(ValueError):
    pass


class CapExceeded(PosetError):
    pass


class NotDenseError(PosetError):
    pass


class AtomError(PosetError):
    """Raised when a construction needs a splitting but meets an atom."""


class UndecidableError(PosetError):
    pass


# ---------------------------------------------------------------- dense-set descriptors


@dataclass(frozen=True)
class Decides:
    """Conditions that contain the literal or its negation."""

    literal: Literal

    def __contains__(self, p) -> bool:
        return self.literal in p or -self.literal in p

    def __str__(self):
        return f"decides {self.literal.atom}"


@dataclass(frozen=True)
class ExplicitSet:
    members: frozenset

    def __contains__(self, p) -> bool:
        return p in self.members

    def __str__(self):
        return f"set of {len(self.members)}"


def _as_descriptor(d):
    if isinstance(d, (Decides, ExplicitSet)):
        return d
    return ExplicitSet(frozenset(d))


# ---------------------------------------------------------------- posets


class Poset:
    """Shared algorithms; subclasses supply elements, le, compatible, key."""

    name = "poset"
    finite = True

    # -- required
    @property
    def elements(self) -> tuple:
        raise NotImplementedError

    def le(self, p, q) -> bool:
        raise NotImplementedError

    def key(self, p):
        raise NotImplementedError

    def __contains__(self, p) -> bool:
        raise NotImplementedError

    # -- derived
    def __len__(self):
        return len(self.elements)

    def extensions(self, p) -> list:
        return [q for q in self.elements if self.le(q, p)]

    def up(self, p) -> list:
        return [q for q in self.elements if self.le(p, q)]

    def compatible(self, p, q) -> bool:
        return any(self.le(r, p) and self.le(r, q) for r in self.elements)

    def minimal(self) -> list:
        return [p for p in self.elements if all(not self.le(q, p) or q == p for q in self.elements)]

    def split(self, p):
        """First pair of incompatible extensions of p, or None when p is an atom."""
        ext = self.extensions(p)
        for a, b in itertools.combinations(ext, 2):
            if not self.compatible(a, b):
                return a, b
        return None

    def is_atom(self, p) -> bool:
        self._require(p)
        return self.split(p) is None

    def _require(self, p):
        if p not in self:
            raise PosetError(f"{self.show(p)} is not a condition of {self.name}")

    def show(self, p):
        return p

    def sort(self, items: Iterable) -> list:
        return sorted(items, key=self.key)


class ExplicitPoset(Poset):
    def __init__(self, elements: Iterable[str], pairs: Iterable[tuple[str, str]] = (), name: str = "poset"):
        self.name = name
        elems = sorted(set(elements), key=element_key)
        index = set(elems)
        le = {(p, p) for p in elems}
        for p, q in pairs:
            if p not in index or q not in index:
                raise PosetError(f"order pair ({p}, {q}) mentions an unknown element")
            le.add((p, q))
        # transitive closure
        changed = True
        while changed:
            changed = False
            for (p, q), (r, s) in itertools.product(list(le), repeat=2):
                if q == r and (p, s) not in le:
                    le.add((p, s))
                    changed = True
        for p, q in le:
            if p != q and (q, p) in le:
                raise PosetError(f"antisymmetry fails: {p} <= {q} <= {p}")
        self._elements = tuple(elems)
        self._set = frozenset(elems)
        self._le = frozenset(le)
        self._compat = {
            (p, q): any((r, p) in le and (r, q) in le for r in elems) for p in elems for q in elems
        }

    @property
    def elements(self) -> tuple:
        return self._elements

    @property
    def order(self) -> frozenset:
        return self._le

    def le(self, p, q) -> bool:
        return (p, q) in self._le

    def compatible(self, p, q) -> bool:
        return self._compat[(p, q)]

    def key(self, p):
        return element_key(p)

    def __contains__(self, p) -> bool:
        return p in self._set

    def to_json(self) -> dict:
        pairs = sorted((list(x) for x in self._le if x[0] != x[1]), key=lambda x: (element_key(x[0]), element_key(x[1])))
        return {"name": self.name, "elements": list(self._elements), "le": pairs}


def load_poset(source) -> ExplicitPoset:
    if isinstance(source, dict):
        doc = source
    else:
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    try:
        return ExplicitPoset(doc["elements"], [tuple(x) for x in doc.get("le", [])], doc.get("name", "poset"))
    except KeyError as exc:
        raise PosetError(f"poset document missing {exc}") from None


class LiteralPoset(Poset):
    """Finite literal sets ordered by reverse inclusion.

    Finite instances carry their conditions and the branches (maximal
    conditions, here the surviving Sigma-sets). Lazy instances carry a
    membership predicate and a splitting oracle instead.
    """

    def __init__(self, alphabet: LiteralAlphabet, *, conditions: Iterable | None = None,
                 branches: Iterable | None = None, member: Callable | None = None,
                 splitter: Callable | None = None, atom_oracle: Callable | None = None,
                 dense_oracle: Callable | None = None, name: str = "P(T)"):
        self.name = name
        self.alphabet = alphabet
        if conditions is not None:
            self._conds = tuple(sorted((frozenset(p) for p in set(map(frozenset, conditions))), key=condition_key))
            self._cset = frozenset(self._conds)
        else:
            self._conds = None
            self._cset = None
        self.branches = None if branches is None else tuple(sorted(map(frozenset, branches), key=condition_key))
        self._member = member
        self._splitter = splitter
        self._atom_oracle = atom_oracle
        self._dense_oracle = dense_oracle

    @property
    def finite(self) -> bool:
        return self._conds is not None

    @property
    def elements(self) -> tuple:
        if self._conds is None:
            raise UndecidableError(f"{self.name} is infinite; its conditions cannot be listed")
        return self._conds

    def __contains__(self, p) -> bool:
        p = frozenset(p)
        if self._cset is not None:
            return p in self._cset
        return self._member(p)

    def le(self, p, q) -> bool:
        return frozenset(p) >= frozenset(q)

    def key(self, p):
        return condition_key(p)

    def compatible(self, p, q) -> bool:
        return (frozenset(p) | frozenset(q)) in self

    def extensions(self, p) -> list:
        p = frozenset(p)
        return [q for q in self.elements if q >= p]

    def up(self, p) -> list:
        return [frozenset(c) for r in range(len(p) + 1) for c in itertools.combinations(sort_literals(p), r)]

    def minimal(self) -> list:
        # P is downward closed, so p is maximal-as-a-set iff no single
        # literal extends it; this avoids trusting the branch list
        if self._conds is None:
            return super().minimal()
        lits = list(self.alphabet)
        return [p for p in self.elements if not any(l not in p and (p | {l}) in self for l in lits)]

    def split(self, p):
        """Canonical split: first literal in alphabet order that p leaves
        undecided and both signs extend; the negative side is branch 0."""
        p = frozenset(p)
        if self._splitter is not None:
            return self._splitter(p)
        for lit in self.alphabet:
            if not lit.positive or lit in p or -lit in p:
                continue
            q1, q0 = p | {lit}, p | {-lit}
            if q0 in self and q1 in self:
                return q0, q1
        return None

    def is_atom(self, p) -> bool:
        p = frozenset(p)
        self._require(p)
        if self.branches is not None:
            return sum(1 for x in self.branches if p <= x) == 1
        if self._atom_oracle is not None:
            return self._atom_oracle(p)
        if self._splitter is not None:
            return self._splitter(p) is None
        return super().is_atom(p)

    def show(self, p):
        return show_condition(p)

    def decides_dense(self, lit: Literal) -> bool:
        if self._dense_oracle is not None:
            return self._dense_oracle(lit)
        return all((p | {lit}) in self or (p | {-lit}) in self for p in self.elements)


# ---------------------------------------------------------------- filters


@dataclass(frozen=True)
class Filter:
    elements: frozenset
    generator: object = None

    def __contains__(self, p):
        return p in self.elements

    def __len__(self):
        return len(self.elements)


def filter_key(P: Poset, F: Filter):
    return (len(F.elements), sorted(P.key(p) for p in F.elements))


def check_subset_property(P: Poset, S, prop: str) -> bool:
    if prop not in PROPERTIES:
        raise PosetError(f"unknown property {prop!r}; choose from {', '.join(PROPERTIES)}")
    if not P.finite:
        if isinstance(S, Decides) and prop == DENSE and isinstance(P, LiteralPoset):
            return P.decides_dense(S.literal)
        raise UndecidableError(f"{prop} is undecidable for this subset of the lazy poset {P.name}")
    S = _as_descriptor(S)
    members = [p for p in P.elements if p in S]
    if isinstance(S, ExplicitSet) and not S.members <= set(P.elements):
        raise PosetError("subset contains non-members of the poset")
    if prop == DENSE:
        return all(any(P.le(d, p) for d in members) for p in P.elements)
    if prop == PREDENSE:
        return all(any(P.compatible(d, p) for d in members) for p in P.elements)
    upward = all(q in S for p in members for q in P.up(p))
    if prop == UPWARD_CLOSED:
        return upward
    directed = all(any(P.le(r, p) and P.le(r, q) for r in members) for p in members for q in members)
    return upward and directed


def g_p(P: Poset, p) -> Filter:
    """{q : q compatible with p}; a generic filter when p is an atom."""
    P._require(p)
    if isinstance(P, LiteralPoset) and P.branches is not None:
        p = frozenset(p)
        above = [x for x in P.branches if p <= x]
        out = {frozenset(c) for x in above for c in _powerset(x)}
        out = {q for q in out if any(p | q <= x for x in above)}
        return Filter(frozenset(out), p)
    return Filter(frozenset(q for q in P.elements if P.compatible(p, q)), p)


def _powerset(x) -> Iterator[tuple]:
    items = sort_literals(x) if x and isinstance(next(iter(x)), Literal) else sorted(x)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def dense_subsets(P: Poset, cap: int = DEFAULT_CAP) -> list[frozenset]:
    """All nonempty dense subsets, by scanning every subset (bitmask form)."""
    els = P.elements
    if len(els) > cap:
        raise CapExceeded(f"{P.name} has {len(els)} elements, over the cap of {cap}")
    masks = sorted(_dense_masks(P), key=lambda m: _subset_sort(P, [els[j] for j in range(len(els)) if m >> j & 1]))
    return [_unmask(els, m) for m in masks]


def _down_masks(P: Poset) -> list[int]:
    els = P.elements
    return [sum(1 << j for j, q in enumerate(els) if P.le(q, p)) for p in els]


def _dense_masks(P: Poset) -> list[int]:
    down = _down_masks(P)
    n = len(down)
    return [m for m in range(1, 1 << n) if all(d & m for d in down)]


def _subset_sort(P: Poset, items):
    return (len(items), sorted(P.key(p) for p in items))


def _unmask(els, m) -> frozenset:
    return frozenset(els[j] for j in range(len(els)) if m >> j & 1)


def enumerate_generic_filters(P: Poset, cap: int = DEFAULT_CAP, method: str = "scan") -> list[Filter]:
    """Filters meeting every nonempty dense subset of a finite poset.

    ``scan`` checks every subset literally against the list of dense subsets
    and honours the cap. ``minimal`` uses the finite-poset fact that the
    generic filters are exactly the cones above minimal elements; ``auto``
    scans under the cap and falls back to the cone route above it.
    """
    if method == "auto":
        method = "scan" if len(P.elements) <= cap else "minimal"
    if method == "minimal":
        out = [Filter(frozenset(P.up(m)), m) for m in P.minimal()]
        if not P.elements:
            out = [Filter(frozenset())]
        return sorted(out, key=lambda F: filter_key(P, F))
    if method != "scan":
        raise PosetError(f"unknown method {method!r}")
    els = P.elements
    n = len(els)
    if n > cap:
        raise CapExceeded(f"{P.name} has {n} elements, over the cap of {cap}")
    dense = _dense_masks(P)
    up = [sum(1 << j for j, q in enumerate(els) if P.le(p, q)) for p in els]
    down = _down_masks(P)
    out = []
    for m in range(1 << n):
        members = [i for i in range(n) if m >> i & 1]
        if any(up[i] & ~m for i in members):
            continue
        if not all(down[i] & down[j] & m for i in members for j in members):
            continue
        if all(m & d for d in dense):
            out.append(Filter(_unmask(els, m)))
    return sorted(out, key=lambda F: filter_key(P, F))


def _meet(P: Poset, D, c):
    """First extension of c lying in D, in canonical order."""
    if isinstance(D, Decides):
        if c in D:
            return c
        for lit in (D.literal.atom, -D.literal.atom):
            q = frozenset(c) | {lit}
            if q in P:
                return q
        raise NotDenseError(f"{D} is not dense below {P.show(c)}")
    if D is None:
        return c
    D = _as_descriptor(D)
    if P.finite:
        for q in P.extensions(c):
            if q in D:
                return q
    elif isinstance(D, ExplicitSet):
        for q in sorted(D.members, key=P.key):
            if P.le(q, c) and q in P:
                return q
    raise NotDenseError(f"family member {D} has nothing below {P.show(c)}")


def _filter_of(P: Poset, c) -> Filter:
    return Filter(frozenset(P.up(c)), c)


def build_generic_filter(P: Poset, family: Sequence = (), start=None) -> Filter:
    """Descend through the listed dense sets from ``start``, taking the first
    extension in canonical order each time, and return the generated filter."""
    if start is None:
        start = frozenset() if isinstance(P, LiteralPoset) else P.elements[-1]
    if isinstance(P, LiteralPoset):
        start = frozenset(start)
    P._require(start)
    c = start
    for D in family:
        c = _meet(P, D, c)
    return _filter_of(P, c)


def cantor_scheme(P: Poset, family: Sequence | None, depth: int, start=None) -> dict[str, object]:
    """Binary strings of length <= depth mapped to conditions.

    p_s extends p_t when t is a prefix of s, siblings are incompatible, and
    each p_s with |s| = i + 1 lies in family[i].
    """
    if depth < 0:
        raise PosetError("depth must be >= 0")
    if family is not None and len(family) < depth:
        raise PosetError(f"dense family has {len(family)} members, depth {depth} needs {depth}")
    if start is None:
        start = frozenset() if isinstance(P, LiteralPoset) else None
        if start is None:
            tops = [p for p in P.elements if len(P.up(p)) == 1]
            if not tops:
                raise PosetError("empty poset has no root condition")
            start = tops[0]
    P._require(start)
    scheme = {"": start}
    level = [""]
    for i in range(depth):
        nxt = []
        for s in level:
            pair = P.split(scheme[s])
            if pair is None:
                raise AtomError(f"node {s!r}: {P.show(scheme[s])} is an atom, no splitting exists")
            D = None if family is None else family[i]
            for bit, q in zip("01", pair):
                scheme[s + bit] = _meet(P, D, q)
                nxt.append(s + bit)
        level = nxt
    return scheme


def scheme_leaves(scheme: dict, depth: int) -> list:
    return [scheme[s] for s in sorted(scheme) if len(s) == depth]


def check_scheme(P: Poset, scheme: dict, family: Sequence | None) -> list[str]:
    """Clause violations of a Cantor scheme; empty when it is sound."""
    bad = []
    keys = sorted(scheme)
    for s in keys:
        if s and family is not None and scheme[s] not in _as_descriptor(family[len(s) - 1]):
            bad.append(f"{s!r} misses family member {len(s) - 1}")
        if s and not P.le(scheme[s], scheme[s[:-1]]):
            bad.append(f"{s!r} does not extend its parent")
    depth = max(map(len, keys))
    leaves = [s for s in keys if len(s) == depth]
    for a, b in itertools.combinations(leaves, 2):
        if P.compatible(scheme[a], scheme[b]):
            bad.append(f"leaves {a!r} and {b!r} are compatible")
    return bad


# ---------------------------------------------------------------- encoder


def encode_forcing_tci(P: ExplicitPoset, cap: int = DEFAULT_CAP, name: str | None = None) -> TCI:
    """T(P): its models are the generic filters of P, read off through G."""
    dense = dense_subsets(P, cap)
    decls = [SymbolDecl("Le", "relation", 2), SymbolDecl("G", "relation", 1)]
    dnames = [f"D_{i}" for i in range(len(dense))]
    decls += [SymbolDecl(d, "relation", 1) for d in dnames]
    constraints = {
        "U": (list(P.elements), EQUAL),
        "Le": ([list(x) for x in P.order], EQUAL),
        "G": ([[p] for p in P.elements], SUBSET),
    }
    for d, D in zip(dnames, dense):
        constraints[d] = ([[p] for p in D], EQUAL)
    theory = [
        "forall p forall q exists r ((G(p) & G(q)) -> (G(r) & Le(r,p) & Le(r,q)))",
        "forall p forall q ((Le(p,q) & G(p)) -> G(q))",
    ] + [f"exists p (G(p) & {d}(p))" for d in dnames]
    return make_tci(name or f"T({P.name})", Signature(decls), "U", constraints, theory)


def generic_of_model(M) -> frozenset:
    return frozenset(p for (p,) in M["G"])
