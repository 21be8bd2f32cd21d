"""Theories with constraints in interpretation and the starred satisfaction relation."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property, reduce
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .fol import (
    Formula,
    FormulaError,
    QuantClassSet,
    Signature,
    SignatureError,
    Structure,
    SymbolDecl,
    classify_formula,
    element_key,
    eval_formula,
    parse_sentence,
    pretty,
)
from .fol.prenex import EVERYTHING as EVERYTHING_CLASSES
from .fol.semantics import FuncTable, subset_key, tuple_key

SUBSET = 0
EQUAL = 1


class TCIError(ValueError):
    pass


class TCIValidationError(TCIError):
    """Raised by :func:`validate_tci`; ``errors`` lists (code, message) pairs."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = errors
        super().__init__("; ".join(f"{c}: {m}" for c, m in errors))

    @property
    def codes(self) -> set[str]:
        return {c for c, _ in self.errors}


class SignatureMismatch(TCIError):
    pass


class SchematicCarrierError(TCIError):
    pass


@dataclass(frozen=True)
class Schematic:
    """Placeholder carrier for an infinite family handled analytically."""

    family: str
    cutoff: int


@dataclass(frozen=True)
class Constraint:
    carrier: object  # frozenset of elements / tuples, or Schematic
    mode: int

    @property
    def schematic(self) -> bool:
        return isinstance(self.carrier, Schematic)

    def sorted_carrier(self) -> list:
        if self.schematic:
            raise SchematicCarrierError("schematic carrier has no finite listing")
        return sorted(self.carrier, key=lambda x: element_key(x) if isinstance(x, str) else tuple_key(x))


@dataclass(frozen=True)
class TCI:
    name: str
    theory: tuple  # of Formula
    sig: Signature
    universe_symbol: str
    constraints: tuple  # sorted (symbol, Constraint) pairs

    @cached_property
    def constraint_map(self) -> dict[str, Constraint]:
        return dict(self.constraints)

    def constraint(self, name: str) -> Constraint:
        return self.constraint_map[name]

    @property
    def universe(self) -> Constraint:
        return self.constraint_map[self.universe_symbol]

    @property
    def schematic(self) -> Schematic | None:
        for _, c in self.constraints:
            if c.schematic:
                return c.carrier
        return None

    @property
    def finite(self) -> bool:
        return self.schematic is None

    def __str__(self):
        return f"TCI {self.name}"


# ---------------------------------------------------------------- validation


def _norm_member(x, want_tuple: bool):
    if isinstance(x, (list, tuple)):
        return tuple(str(e) for e in x)
    if want_tuple:
        return (str(x),)
    return str(x)


def validate_tci(raw: Mapping) -> TCI:
    """Build a TCI from its JSON-shaped description, checking every invariant.

    Theory entries may be strings (parsed against the signature) or
    :class:`Formula` objects.
    """
    errors: list[tuple[str, str]] = []
    name = raw.get("name", "unnamed")
    usym = raw.get("universe_symbol", "U")

    decls = []
    seen = set()
    for entry in raw.get("signature", []):
        if isinstance(entry, SymbolDecl):
            decl = entry
        else:
            try:
                decl = SymbolDecl(entry["name"], entry["kind"], int(entry.get("arity", 0)))
            except (SignatureError, KeyError, TypeError, ValueError) as exc:
                errors.append(("bad-symbol", str(exc)))
                continue
        if decl.name in seen:
            errors.append(("duplicate-symbol", f"symbol {decl.name} declared twice"))
            continue
        seen.add(decl.name)
        decls.append(decl)
    sig = Signature(decls)

    if usym in sig:
        errors.append(("universe-symbol-in-signature", f"universe symbol {usym} is also in the signature"))

    raw_constraints = dict(raw.get("constraints", {}))
    missing = [s for s in list(sig.names) + [usym] if s not in raw_constraints]
    if missing:
        errors.append(("constraints-not-total", f"constraints not total: missing {', '.join(missing)}"))
    extra = [s for s in raw_constraints if s not in sig and s != usym]
    if extra:
        errors.append(("unknown-constraint-symbol", f"constraints for undeclared symbols {', '.join(sorted(extra))}"))

    constraints: dict[str, Constraint] = {}
    for sym, entry in raw_constraints.items():
        if sym in extra:
            continue
        if isinstance(entry, Constraint):
            constraints[sym] = entry
            continue
        mode = entry.get("mode")
        if mode not in (0, 1):
            errors.append(("bad-mode", f"{sym}: mode must be 0 or 1, got {mode!r}"))
            continue
        carrier = entry.get("carrier", [])
        if isinstance(carrier, Schematic):
            constraints[sym] = Constraint(carrier, mode)
        elif isinstance(carrier, Mapping):
            if "schematic" not in carrier:
                errors.append(("bad-carrier", f"{sym}: carrier object needs a 'schematic' key"))
                continue
            constraints[sym] = Constraint(Schematic(str(carrier["schematic"]), int(carrier.get("cutoff", 8))), mode)
        else:
            decl = sig.get(sym)
            want_tuple = decl is not None and decl.kind != "constant"
            constraints[sym] = Constraint(frozenset(_norm_member(x, want_tuple) for x in carrier), mode)

    ucon = constraints.get(usym)
    if ucon is not None and not ucon.schematic:
        bad = [x for x in ucon.carrier if not isinstance(x, str)]
        if bad:
            errors.append(("universe-carrier-not-elements", f"universe carrier contains tuples {bad[:3]}"))
    for decl in sig:
        con = constraints.get(decl.name)
        if con is None or con.schematic:
            continue
        width = 0 if decl.kind == "constant" else decl.arity + (decl.kind == "function")
        for x in con.carrier:
            if width == 0:
                if not isinstance(x, str):
                    errors.append(("carrier-arity-mismatch", f"{decl.name}: constant carrier member {x} is a tuple"))
                    break
                members = (x,)
            else:
                if not isinstance(x, tuple) or len(x) != width:
                    errors.append(("carrier-arity-mismatch", f"{decl.name}: carrier member {x} is not a {width}-tuple"))
                    break
                members = x
            if ucon is not None and not ucon.schematic and not set(members) <= ucon.carrier:
                errors.append(("carrier-outside-universe", f"{decl.name}: carrier member {x} not over the universe carrier"))
                break

    theory = []
    for entry in raw.get("theory", []):
        if isinstance(entry, Formula):
            if not entry.is_sentence():
                errors.append(("theory-not-sentence", f"{pretty(entry)} has free variables"))
                continue
            theory.append(entry)
            continue
        try:
            theory.append(parse_sentence(entry, sig))
        except FormulaError as exc:
            errors.append(("theory-parse-error", f"{entry!r}: {exc}"))
    for f in theory:
        used = _symbols(f)
        for sym, kind, arity in used:
            decl = sig.get(sym)
            if decl is None or decl.kind != kind or decl.arity != arity:
                errors.append(("theory-symbol-mismatch", f"{pretty(f)} uses {sym}"))

    if errors:
        raise TCIValidationError(errors)
    return TCI(
        name=name,
        theory=tuple(theory),
        sig=sig,
        universe_symbol=usym,
        constraints=tuple(sorted(constraints.items())),
    )


def _symbols(f: Formula):
    from .fol.syntax import symbols_used

    return symbols_used(f.matrix)


def make_tci(name, sig: Signature, universe_symbol: str, constraints: Mapping, theory: Iterable = ()) -> TCI:
    """Programmatic constructor. ``constraints`` maps symbol -> (carrier, mode)."""
    raw_constraints = {}
    for sym, value in constraints.items():
        if isinstance(value, Constraint):
            raw_constraints[sym] = value
        else:
            carrier, mode = value
            raw_constraints[sym] = {"carrier": carrier if isinstance(carrier, Schematic) else list(carrier), "mode": mode}
    return validate_tci(
        {
            "name": name,
            "signature": list(sig),
            "universe_symbol": universe_symbol,
            "constraints": raw_constraints,
            "theory": list(theory),
        }
    )


# ---------------------------------------------------------------- satisfaction


def _well_formed(M: Structure, t: TCI) -> bool:
    U = M.universe
    for decl in t.sig:
        value = M[decl.name]
        if decl.kind == "constant":
            if not isinstance(value, str) or value not in U:
                return False
        elif decl.kind == "relation":
            if isinstance(value, (str, FuncTable)):
                return False
            if any(len(tp) != decl.arity or not set(tp) <= U for tp in value):
                return False
        else:
            if not isinstance(value, FuncTable):
                return False
            domain = set(itertools.product(sorted(U), repeat=decl.arity))
            if set(value.mapping) != domain or not set(value.mapping.values()) <= U:
                return False
    return True


def models_star(M: Structure, t: TCI) -> bool:
    """M |=* t: Tarski truth of the theory plus compliance with every constraint."""
    if set(M.table) != set(t.sig.names):
        raise SignatureMismatch(
            f"structure interprets {sorted(M.table)} but signature is {list(t.sig.names)}"
        )
    if t.schematic is not None:
        raise SchematicCarrierError(f"{t.name}: schematic carriers need a family oracle")
    if not _well_formed(M, t):
        return False
    U = M.universe
    ucon = t.universe
    if ucon.mode == SUBSET and not U <= ucon.carrier:
        return False
    if ucon.mode == EQUAL and U != ucon.carrier:
        return False
    for decl in t.sig:
        con = t.constraint(decl.name)
        value = M[decl.name]
        if decl.kind == "constant":
            # the mode flag plays no role for constants
            if value not in con.carrier:
                return False
            continue
        if decl.kind == "relation":
            actual = value
            width = decl.arity
        else:
            actual = value.graph()
            width = decl.arity + 1
        allowed = frozenset(x for x in con.carrier if set(x) <= U and len(x) == width)
        if con.mode == SUBSET and not actual <= allowed:
            return False
        if con.mode == EQUAL and actual != allowed:
            return False
    return all(eval_formula(M, f) for f in t.theory)


def _subsets(items: list) -> Iterator[frozenset]:
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


def _universes(t: TCI) -> list[frozenset]:
    ucon = t.universe
    if ucon.mode == EQUAL:
        return [frozenset(ucon.carrier)]
    return sorted(_subsets(ucon.sorted_carrier()), key=subset_key)


def _candidates(decl: SymbolDecl, con: Constraint, U: frozenset) -> list:
    elems = sorted(U, key=element_key)
    if decl.kind == "constant":
        return [x for x in con.sorted_carrier() if x in U]
    if decl.kind == "relation":
        allowed = [x for x in con.sorted_carrier() if set(x) <= U]
        if con.mode == EQUAL:
            return [frozenset(allowed)]
        return sorted(_subsets(allowed), key=lambda s: (len(s), sorted(tuple_key(x) for x in s)))
    # function: pick, for each argument tuple, a value whose graph point is allowed
    allowed = {x for x in con.carrier if set(x) <= U}
    domain = list(itertools.product(elems, repeat=decl.arity))
    options = [[v for v in elems if a + (v,) in allowed] for a in domain]
    out = []
    for values in itertools.product(*options):
        table = FuncTable.of(dict(zip(domain, values)))
        if con.mode == EQUAL and table.graph() != frozenset(allowed):
            continue
        out.append(table)
    return out


def iter_models(t: TCI) -> Iterator[Structure]:
    """Exhaustive search over every structure the carriers permit."""
    if t.schematic is not None:
        raise SchematicCarrierError(
            f"{t.name}: cannot enumerate models over schematic carrier {t.schematic.family!r}"
        )
    decls = list(t.sig)
    for U in _universes(t):
        pools = [_candidates(d, t.constraint(d.name), U) for d in decls]
        for combo in itertools.product(*pools):
            M = Structure.make(U, {d.name: v for d, v in zip(decls, combo)})
            if all(eval_formula(M, f) for f in t.theory):
                yield M


def count_candidates(t: TCI) -> int:
    """Number of structures the exhaustive search inspects."""
    if t.schematic is not None:
        raise SchematicCarrierError(f"{t.name}: schematic carriers have no finite search space")
    total = 0
    for U in _universes(t):
        n = 1
        for d in t.sig:
            n *= len(_candidates(d, t.constraint(d.name), U))
        total += n
    return total


def enumerate_models(t: TCI) -> list[Structure]:
    return sorted(iter_models(t), key=Structure.sort_key)


def is_consistent(t: TCI) -> bool:
    if t.schematic is not None:
        from .families import family_for

        return family_for(t).is_consistent()
    return next(iter_models(t), None) is not None


def classify_tci(t: TCI) -> QuantClassSet:
    """Classes every theory sentence belongs to; the empty theory is in all of them."""
    return reduce(lambda a, b: a & b, (classify_formula(f) for f in t.theory), EVERYTHING_CLASSES)


# ---------------------------------------------------------------- JSON


def _carrier_json(c: Constraint):
    if c.schematic:
        return {"schematic": c.carrier.family, "cutoff": c.carrier.cutoff}
    return [x if isinstance(x, str) else list(x) for x in c.sorted_carrier()]


def tci_to_json(t: TCI) -> dict:
    return {
        "name": t.name,
        "signature": [{"name": d.name, "kind": d.kind, "arity": d.arity} for d in t.sig],
        "universe_symbol": t.universe_symbol,
        "constraints": {sym: {"carrier": _carrier_json(c), "mode": c.mode} for sym, c in t.constraints},
        "theory": [pretty(f) for f in t.theory],
    }


def load_tci(source) -> TCI:
    """Load from a path, a JSON string or an already-decoded document."""
    if isinstance(source, Mapping):
        return validate_tci(source)
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        doc = json.loads(source)
    return validate_tci(doc)


def dump_tci(t: TCI) -> str:
    return json.dumps(tci_to_json(t), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
