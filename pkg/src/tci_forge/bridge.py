"""From a TCI to its condition poset and back.

P(T) is computed extensionally: a finite literal set is a condition exactly
when it is contained in the Sigma-set of some model avoiding every forbidden
atom. For finite carriers the models come from exhaustive search; schematic
families answer through their closed-form oracles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .diagram import (
    DiagramError,
    build_literal_alphabet,
    condition_key,
    is_consistent_set,
    show_condition,
    sigma_diagram,
)
from .families import Cohen, family_for
from .fol import PI, Structure
from .posets import (
    DEFAULT_CAP,
    CapExceeded,
    Decides,
    ExplicitPoset,
    LiteralPoset,
    PosetError,
    cantor_scheme,
    check_scheme,
    encode_forcing_tci,
    enumerate_generic_filters,
    g_p,
    scheme_leaves,
)
from .tci import TCI, TCIError, classify_tci, count_candidates, enumerate_models, models_star
from .trace import CONTINUUM, EMPTY, SINGLETON_V, DerivativeTrace, StageRecord, TrichotomyVerdict

DEFAULT_STAGE_CAP = 64


class BridgeError(TCIError):
    pass


class WrongClass(BridgeError):
    pass


@lru_cache(maxsize=128)
def _models_and_diagrams(t: TCI) -> tuple:
    models = enumerate_models(t)
    return tuple((M, sigma_diagram(t, M, check=False)) for M in models)


def diagrams(t: TCI) -> list[frozenset]:
    return [d for _, d in _models_and_diagrams(t)]


def certifies(t: TCI, x, p, forbidden=()) -> bool:
    """x is the Sigma-set of a model, p is inside x and no forbidden condition is.

    For a schematic family ``x`` names a branch (see the family's ``certifies``).
    """
    p = frozenset(p)
    if t.schematic is not None:
        return family_for(t).certifies(x, p, [frozenset(q) for q in forbidden])
    x = frozenset(x)
    if x not in set(diagrams(t)):
        raise DiagramError("x is not the Sigma-set of any model")
    return p <= x and not any(frozenset(q) <= x for q in forbidden)


def _subsets(x) -> list[frozenset]:
    items = sorted(x, key=lambda l: l.key())
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def build_conditions(t: TCI, forbidden=(), stage: int = 0) -> LiteralPoset:
    """P(T) with the given atoms forbidden, ordered by reverse inclusion.

    Schematic families take a stage index in place of an explicit forbidden
    set, since their atoms at each stage are infinite in number.
    """
    if t.schematic is not None:
        return family_for(t).poset(stage)
    forbidden = [frozenset(q) for q in forbidden]
    surviving = [x for x in diagrams(t) if not any(q <= x for q in forbidden)]
    conds = set()
    for x in surviving:
        conds.update(_subsets(x))
    return LiteralPoset(build_literal_alphabet(t), conditions=conds, branches=surviving, name=f"P({t.name})")


def _canonical_atom(P: LiteralPoset, x: frozenset):
    """First condition inside x, in canonical order, that lies in no other branch."""
    others = [y for y in P.branches if y != x]
    for p in sorted(_subsets(x), key=condition_key):
        if not any(p <= y for y in others):
            return p
    return None


@lru_cache(maxsize=64)
def compute_derivative(t: TCI, stage_cap: int = DEFAULT_STAGE_CAP) -> DerivativeTrace:
    """Strip atoms stage by stage until the condition set stops changing.

    Forbidding one atom per isolated branch removes the same branches as
    forbidding every atom, since each atom lies in exactly one branch.
    """
    if t.schematic is not None:
        return family_for(t).derivative()
    index = {d: i for i, d in enumerate(diagrams(t))}
    forbidden: set = set()
    stages = []
    P = build_conditions(t)
    for alpha in itertools.count():
        if alpha > stage_cap:
            raise BridgeError(f"no fixpoint within {stage_cap} stages")
        atoms = []
        isolated = []
        for x in P.branches:
            a = _canonical_atom(P, x)
            if a is not None:
                atoms.append(a)
                isolated.append(index[x])
        atom_count = sum(1 for p in P.elements if P.is_atom(p))
        stages.append(
            StageRecord(
                index=alpha,
                condition_count=len(P.elements),
                canonical_atoms=tuple(atoms),
                isolated=tuple(isolated),
                surviving=tuple(index[x] for x in P.branches),
                atom_count=atom_count,
            )
        )
        forbidden.update(atoms)
        nxt = build_conditions(t, forbidden)
        if set(nxt.elements) == set(P.elements):
            return DerivativeTrace(tuple(stages), alpha, not P.elements, top=P, forbidden=frozenset(forbidden))
        P = nxt


def finitely_determined_models(t: TCI) -> dict:
    """Canonical stage-0 atom -> the model whose Sigma-set is the union of g_p."""
    if t.schematic is not None:
        return family_for(t).finitely_determined_models()
    P = build_conditions(t)
    trace = compute_derivative(t)
    models = dict((d, M) for M, d in _models_and_diagrams(t))
    out = {}
    for p in trace.stage(0).canonical_atoms:
        union = frozenset().union(*g_p(P, p).elements)
        out[p] = models[union]
    return out


def determination_rank(t: TCI, M) -> int | None:
    """Least stage with an atom inside Sigma(T, M); None if there is none."""
    if t.schematic is not None:
        return family_for(t).rank(M)
    if not models_star(M, t):
        raise BridgeError(f"{M} is not a model of {t.name}")
    d = sigma_diagram(t, M, check=False)
    i = diagrams(t).index(d)
    return compute_derivative(t).rank_of(i)


# ---------------------------------------------------------------- trichotomy


def _leaf_report(P, scheme, family, depth) -> dict:
    leaves = scheme_leaves(scheme, depth)
    problems = check_scheme(P, scheme, family)
    meets = all(leaf in D for leaf in leaves for D in family[:depth]) if family is not None else True
    return {
        "depth": depth,
        "leaves": len(leaves),
        "pairwise_incompatible": not any("compatible" in m for m in problems),
        "leaves_meet_family": meets,
        "clause_violations": problems,
        "sample_leaves": {s: show_condition(scheme[s]) for s in sorted(scheme) if len(s) == depth}
        if depth <= 3
        else {s: show_condition(scheme[s]) for s in ("0" * depth, "1" * depth)},
    }


def classify_trichotomy(t: TCI, scheme_depth: int = 10, split_depth: int = 6) -> TrichotomyVerdict:
    pi2 = (PI, 2) in classify_tci(t)
    if t.schematic is None and not diagrams(t):
        return TrichotomyVerdict(EMPTY, {
            "proof": "exhaustive search found no model",
            "candidates_checked": count_candidates(t),
            "pi2": pi2,
        })
    trace = compute_derivative(t)
    if trace.top_is_empty:
        if t.schematic is None:
            ranks = {str(i): trace.rank_of(i) for i in range(len(diagrams(t)))}
        else:
            fam = family_for(t)
            ranks = {f"M_{k}": fam.rank(k) for k in range(fam.cutoff)}
            ranks["omega"] = fam.rank("omega")
        if any(r is None for r in ranks.values()):
            raise BridgeError("top is empty but some model has no determination rank")
        return TrichotomyVerdict(SINGLETON_V, {
            "fixpoint_stage": trace.fixpoint_stage,
            "ranks": ranks,
            "all_almost_finitely_determined": True,
            "pi2": pi2,
        })
    return TrichotomyVerdict(CONTINUUM, continuum_evidence(t, scheme_depth, split_depth) | {"pi2": pi2})


def continuum_evidence(t: TCI, scheme_depth: int = 10, split_depth: int = 6) -> dict:
    """Atomless certificate plus a Cantor scheme in the top poset."""
    # positional call so every spelling of the arguments shares one cache slot
    return _continuum_evidence(t, scheme_depth, split_depth)


@lru_cache(maxsize=16)
def _continuum_evidence(t: TCI, scheme_depth: int, split_depth: int) -> dict:
    trace = compute_derivative(t)
    top = trace.top
    if t.schematic is not None:
        fam = family_for(t)
        family = fam.dense_family(scheme_depth)
        if isinstance(fam, Cohen):
            cert = fam.splitting_certificate(split_depth)
            split = {"depth": split_depth, "conditions": len(cert), "all_split": all(c["ok"] for c in cert)}
        else:
            split = {"depth": split_depth, "conditions": 0, "all_split": False}
    else:
        # a finite family of branches always has isolated points, so this
        # path only runs on a nonempty finite top, which cannot arise
        family = [Decides(l) for l in top.alphabet.atoms()[:scheme_depth]]
        cert = [top.split(p) is not None for p in top.elements]
        split = {"depth": None, "conditions": len(cert), "all_split": all(cert)}
    scheme = cantor_scheme(top, family, scheme_depth)
    return {
        "fixpoint_stage": trace.fixpoint_stage,
        "atomless_certificate": split,
        "cantor_scheme": _leaf_report(top, scheme, family, scheme_depth),
    }


# ---------------------------------------------------------------- witness map


@dataclass(frozen=True)
class SymbolicHandle:
    """Stands for T(P^top) when P^top is infinite and cannot be encoded."""

    source: str
    family: str
    description: str
    certificate: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "symbolic": f"T(P({self.source})^top)",
            "family": self.family,
            "description": self.description,
            "certificate": self.certificate,
        }


def empty_forcing_tci() -> TCI:
    return encode_forcing_tci(ExplicitPoset([], name="(0,0)"), name="T((0,0))")


def _looks_encoded(t: TCI) -> bool:
    return {"Le", "G"} <= set(t.sig.names) and t.universe.mode == 1


def _explicit(P: LiteralPoset) -> ExplicitPoset:
    names = {p: f"p{i}" for i, p in enumerate(P.elements)}
    pairs = [(names[p], names[q]) for p in P.elements for q in P.elements if p != q and P.le(p, q)]
    return ExplicitPoset(names.values(), pairs, name=f"{P.name}^top")


def witness_map(t: TCI, fallback: TCI, cap: int = DEFAULT_CAP, symbolic: bool = True):
    """F(T): the fallback when T is inconsistent, otherwise T(P(T)^top)."""
    if (PI, 2) not in classify_tci(t):
        raise WrongClass(f"{t.name} is not Pi_2")
    if not _looks_encoded(fallback):
        raise BridgeError(f"fallback {fallback.name} is not an encoded forcing TCI")
    consistent = t.schematic is not None and family_for(t).is_consistent() or t.schematic is None and bool(diagrams(t))
    if not consistent:
        return fallback
    trace = compute_derivative(t)
    if trace.top_is_empty:
        return empty_forcing_tci()
    top = trace.top
    if top.finite and len(top.elements) <= cap:
        return encode_forcing_tci(_explicit(top), cap, name=f"T(P({t.name})^top)")
    if not symbolic:
        raise CapExceeded("top poset is infinite or over the cap and symbolic handles are disabled")
    ev = continuum_evidence(t)
    fam = family_for(t) if t.schematic is not None else None
    return SymbolicHandle(
        source=t.name,
        family=fam.name if fam else "",
        description=f"top = P({t.name})^({trace.fixpoint_stage}), nonempty and atomless",
        certificate=ev,
    )


# ---------------------------------------------------------------- generic models


def generic_model_check(t: TCI, cap: int = DEFAULT_CAP, method: str = "auto") -> dict:
    """Every generic filter g of P(T) has union Sigma(T, M) for a model M,
    and g is recovered as the conditions inside that union."""
    if t.schematic is not None:
        raise BridgeError("generic_model_check needs finite carriers")
    pairs = _models_and_diagrams(t)
    P = build_conditions(t)
    report = {"tci": t.name, "pi2": (PI, 2) in classify_tci(t), "conditions": len(P.elements)}
    if not pairs:
        # the theorem presupposes a consistent TCI; with P(T) empty there is
        # nothing to force with and the report is vacuous
        report.update({"consistent": False, "filters": [], "filter_count": 0, "model_count": 0,
                       "all_ok": True, "note": "inconsistent: empty condition set, no filters examined"})
        return report
    by_diagram = {d: i for i, (_, d) in enumerate(pairs)}
    if method == "auto":
        method = "scan" if len(P.elements) <= cap else "minimal"
    filters = enumerate_generic_filters(P, cap=cap, method=method)
    rows = []
    for F in filters:
        union = frozenset().union(*F.elements)
        model = by_diagram.get(union)
        recovered = frozenset(p for p in P.elements if p <= union)
        rows.append({
            "union": show_condition(union),
            "pair_free": is_consistent_set(union),
            "model_index": model,
            "recovered": recovered == F.elements,
        })
    matched = sorted(r["model_index"] for r in rows if r["model_index"] is not None)
    report.update({
        "consistent": True,
        "method": method,
        "filters": rows,
        "filter_count": len(rows),
        "model_count": len(pairs),
        "bijective": matched == list(range(len(pairs))),
        "all_ok": all(r["pair_free"] and r["model_index"] is not None and r["recovered"] for r in rows)
        and matched == list(range(len(pairs))),
    })
    return report


def models_of_encoding(t: TCI) -> list[Structure]:
    return enumerate_models(t)
