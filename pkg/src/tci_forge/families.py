"""Schematic TCIs over the naturals, handled by closed-form oracles.

cohen
    No symbols, empty theory, U constrained to subsets of omega. Every
    subset is a model, so the condition poset is Cohen forcing: atomless.
initial_segment
    Z = {0} and P = {(n+1, n)} with mode 1, U a subset of omega, theory
    ``forall y exists x (Z(y) | P(y,x))``. The models are the initial
    segments {0..k-1} and omega itself. Finite segments are isolated at
    stage 0; omega only at stage 1.

Each oracle is cross-checked against the finite truncation with carrier
range(N) by :meth:`SchematicFamily.crosscheck`.
"""
from __future__ import annotations

import itertools
from typing import Iterator

from .diagram import UNIVERSE, Literal, LiteralAlphabet, condition_key, is_consistent_set
from .fol import Structure, pretty
from .posets import Decides, LiteralPoset
from .tci import TCI, TCIError, validate_tci
from .trace import DerivativeTrace, StageRecord

OMEGA = "omega"


class UnsupportedFamily(TCIError):
    pass


def _u(n: int, positive: bool = True) -> Literal:
    return Literal(UNIVERSE, "U", (str(n),), positive)


def _nums(lit: Literal) -> list[int] | None:
    if not all(a.isdigit() and (a == "0" or not a.startswith("0")) for a in lit.args):
        return None
    return [int(a) for a in lit.args]


class SchematicFamily:
    name = ""
    description = ""

    def __init__(self, cutoff: int):
        self._ok_cache: dict = {}
        if cutoff < 1:
            raise UnsupportedFamily("cutoff must be >= 1")
        self.cutoff = cutoff

    # -- to be supplied
    def template(self, carrier) -> dict:
        raise NotImplementedError

    def literal_ok(self, lit: Literal) -> bool:
        raise NotImplementedError

    def window(self, n: int) -> list[Literal]:
        """Alphabet literals whose largest parameter is exactly n."""
        raise NotImplementedError

    def member(self, p: frozenset, stage: int = 0) -> bool:
        raise NotImplementedError

    def split(self, p: frozenset, stage: int = 0):
        raise NotImplementedError

    def is_atom(self, p: frozenset, stage: int = 0) -> bool:
        raise NotImplementedError

    def derivative(self) -> DerivativeTrace:
        raise NotImplementedError

    # -- shared
    def tci(self) -> TCI:
        return validate_tci(self.template({"schematic": self.name, "cutoff": self.cutoff}))

    def truncate(self, n: int) -> TCI:
        """The finite TCI with carrier range(n) in place of omega."""
        return validate_tci(self.template(n))

    def is_consistent(self) -> bool:
        return True

    def alphabet(self) -> LiteralAlphabet:
        def gen() -> Iterator[Literal]:
            for n in itertools.count():
                yield from self.window(n)

        return LiteralAlphabet(lazy=gen, member=self.literal_ok)

    def alphabet_below(self, n: int) -> list[Literal]:
        return [l for k in range(n) for l in self.window(k)]

    def poset(self, stage: int = 0) -> LiteralPoset:
        return LiteralPoset(
            self.alphabet(),
            member=lambda p: self.member(frozenset(p), stage),
            splitter=lambda p: self.split(frozenset(p), stage),
            atom_oracle=lambda p: self.is_atom(frozenset(p), stage),
            dense_oracle=lambda lit: self.decides_dense(lit, stage),
            name=f"P({self.name})^({stage})",
        )

    def decides_dense(self, lit: Literal, stage: int = 0) -> bool:
        raise NotImplementedError

    def dense_family(self, n: int) -> list[Decides]:
        return [Decides(_u(i)) for i in range(n)]

    def _well_formed(self, p) -> bool:
        ok = self._ok_cache
        for l in p:
            v = ok.get(l)
            if v is None:
                v = ok[l] = self.literal_ok(l)
            if not v:
                return False
        return is_consistent_set(p)

    def to_json(self) -> dict:
        return {"family": self.name, "cutoff": self.cutoff, "description": self.description}


class Cohen(SchematicFamily):
    name = "cohen"
    description = "all subsets of omega; Cohen forcing, atomless"

    def template(self, carrier) -> dict:
        if isinstance(carrier, int):
            carrier = [str(i) for i in range(carrier)]
        return {
            "name": self.name if isinstance(carrier, dict) else f"{self.name}_{len(carrier)}",
            "signature": [],
            "universe_symbol": "U",
            "constraints": {"U": {"carrier": carrier, "mode": 0}},
            "theory": [],
        }

    def literal_ok(self, lit) -> bool:
        return lit.kind == UNIVERSE and lit.symbol == "U" and len(lit.args) == 1 and _nums(lit) is not None

    def window(self, n):
        return [_u(n), _u(n, False)]

    def member(self, p, stage=0) -> bool:
        # the derivative is stationary from stage 0 on
        return self._well_formed(p)

    def _decided(self, p) -> set[int]:
        return {int(l.args[0]) for l in p}

    def split(self, p, stage=0):
        if not self.member(p, stage):
            return None
        d = self._decided(p)
        k = next(i for i in itertools.count() if i not in d)
        return p | {_u(k, False)}, p | {_u(k)}

    def is_atom(self, p, stage=0) -> bool:
        return False

    def decides_dense(self, lit, stage=0) -> bool:
        return self.literal_ok(lit)

    def certifies(self, branch, p, forbidden=()) -> bool:
        """``branch`` is a predicate on naturals naming the model's universe."""
        if not self.member(frozenset(p)):
            return False
        if not all(branch(int(l.args[0])) == l.positive for l in p):
            return False
        return not any(all(branch(int(l.args[0])) == l.positive for l in q) for q in forbidden)

    def derivative(self) -> DerivativeTrace:
        st = StageRecord(
            index=0,
            condition_count=None,
            canonical_atoms=(),
            isolated=(),
            surviving=("every subset of omega",),
            atom_count=0,
            schema="no atoms: every condition splits at its least undecided index",
        )
        return DerivativeTrace((st,), 0, False, top=self.poset(0), forbidden=frozenset())

    def rank(self, branch) -> int | None:
        return None

    def finitely_determined_models(self) -> dict:
        return {}

    def splitting_certificate(self, depth: int) -> list[dict]:
        """A split for every condition deciding only indices below ``depth``."""
        out = []
        for signs in itertools.product((None, False, True), repeat=depth):
            p = frozenset(_u(i, s) for i, s in enumerate(signs) if s is not None)
            q0, q1 = self.split(p)
            ok = p < q0 and p < q1 and self.member(q0) and self.member(q1) and not self.member(q0 | q1)
            out.append({"condition": p, "split": (q0, q1), "ok": ok})
        return out

    def crosscheck(self, n: int) -> list[str]:
        """Compare the oracles with the brute-force poset of the range(n) truncation."""
        from .bridge import build_conditions

        bad = []
        P = build_conditions(self.truncate(n))
        window = self.alphabet_below(n)
        pool = [frozenset(c) for r in range(n + 1) for c in itertools.combinations(window, r)]
        for p in pool:
            if self.member(p) != (p in P):
                bad.append(f"membership differs at {sorted(map(str, p))}")
            undecided = [i for i in range(n) if i not in self._decided(p)]
            if p in P:
                truncated_atom = P.is_atom(p)
                if truncated_atom != (not undecided):
                    bad.append(f"truncated atom status unexpected at {sorted(map(str, p))}")
                if undecided and P.split(p) != self.split(p):
                    bad.append(f"split differs at {sorted(map(str, p))}")
        return bad


class InitialSegment(SchematicFamily):
    name = "initial_segment"
    description = "models are {0..k-1} for each k and omega; omega is isolated only at stage 1"

    THEORY = "forall y exists x (Z(y) | P(y,x))"

    def template(self, carrier) -> dict:
        if isinstance(carrier, int):
            n = carrier
            ucar = [str(i) for i in range(n)]
            pcar = [[str(i + 1), str(i)] for i in range(n - 1)]
            name = f"{self.name}_{n}"
        else:
            ucar = pcar = carrier
            name = self.name
        return {
            "name": name,
            "signature": [
                {"name": "P", "kind": "relation", "arity": 2},
                {"name": "Z", "kind": "relation", "arity": 1},
            ],
            "universe_symbol": "U",
            "constraints": {
                "U": {"carrier": ucar, "mode": 0},
                "Z": {"carrier": [["0"]], "mode": 1},
                "P": {"carrier": pcar, "mode": 1},
            },
            "theory": [self.THEORY],
        }

    def literal_ok(self, lit) -> bool:
        nums = _nums(lit)
        if nums is None:
            return False
        if lit.kind == UNIVERSE:
            return lit.symbol == "U" and len(nums) == 1
        if lit.kind != "relation":
            return False
        if lit.symbol == "Z":
            return nums == [0]
        if lit.symbol == "P":
            return len(nums) == 2 and nums[0] == nums[1] + 1
        return False

    def window(self, n):
        out = [_u(n), _u(n, False)]
        if n == 0:
            z = Literal("relation", "Z", ("0",))
            out += [z, -z]
        else:
            pl = Literal("relation", "P", (str(n), str(n - 1)))
            out += [pl, -pl]
        return out

    @staticmethod
    def bounds(p) -> tuple[int, float]:
        """Branches M_k containing p are those with lo <= k <= hi (omega too when hi is infinite)."""
        lo, hi = 0, float("inf")
        for l in p:
            n = int(l.args[0])
            if l.kind == UNIVERSE:
                if l.positive:
                    lo = max(lo, n + 1)
                else:
                    hi = min(hi, n)
            elif l.symbol == "Z":
                lo = max(lo, 1)
            else:
                lo = max(lo, n + 1)
        return lo, hi

    def _branches_of(self, p, stage: int):
        if not self._well_formed(p) or any(not l.positive for l in p if l.kind != UNIVERSE):
            return None
        lo, hi = self.bounds(p)
        if lo > hi:
            return None
        finite = (lo, hi) if stage == 0 else None
        return finite, hi == float("inf") and stage <= 1

    def member(self, p, stage=0) -> bool:
        b = self._branches_of(p, stage)
        if b is None:
            return False
        finite, omega = b
        return finite is not None or omega

    def is_atom(self, p, stage=0) -> bool:
        b = self._branches_of(p, stage)
        if b is None:
            raise UnsupportedFamily(f"{sorted(map(str, p))} is not a stage-{stage} condition")
        finite, omega = b
        n_finite = 0 if finite is None else (float("inf") if finite[1] == float("inf") else finite[1] - finite[0] + 1)
        return n_finite + omega == 1

    def split(self, p, stage=0):
        if not self.member(p, stage) or self.is_atom(p, stage):
            return None
        lo, _ = self.bounds(p)
        return p | {_u(lo, False)}, p | {_u(lo)}

    def decides_dense(self, lit, stage=0) -> bool:
        return self.literal_ok(lit) and stage <= 1

    # models
    def model(self, k) -> Structure:
        if k == OMEGA:
            raise UnsupportedFamily("the omega branch is infinite; use sigma_literal")
        U = [str(i) for i in range(k)]
        return Structure.make(
            U,
            {"Z": [("0",)] if k else [], "P": [(str(i + 1), str(i)) for i in range(k - 1)]},
        )

    def sigma_contains(self, k, lit: Literal) -> bool:
        """Membership of a literal in the Sigma-set of branch k (an int or OMEGA)."""
        n = int(lit.args[0])
        top = float("inf") if k == OMEGA else k
        if lit.kind == UNIVERSE:
            return (n < top) == lit.positive
        if not lit.positive:
            return False
        return n < top

    def certifies(self, branch, p, forbidden=()) -> bool:
        if not all(self.sigma_contains(branch, l) for l in p):
            return False
        return not any(all(self.sigma_contains(branch, l) for l in q) for q in forbidden)

    def canonical_atom(self, k) -> frozenset:
        if k == OMEGA:
            return frozenset()
        if k == 0:
            return frozenset({_u(0, False)})
        return frozenset({_u(k - 1), _u(k, False)})

    def derivative(self) -> DerivativeTrace:
        labels = tuple(f"M_{k}" for k in range(self.cutoff))
        stage0 = StageRecord(
            index=0,
            condition_count=None,
            canonical_atoms=tuple(self.canonical_atom(k) for k in range(self.cutoff)),
            isolated=labels,
            surviving=labels + ("...", OMEGA),
            atom_count=None,
            schema="M_0 by {~U(0)}; M_n by {U(n-1), ~U(n)} for n >= 1",
        )
        stage1 = StageRecord(
            index=1,
            condition_count=None,
            canonical_atoms=(self.canonical_atom(OMEGA),),
            isolated=(OMEGA,),
            surviving=(OMEGA,),
            atom_count=None,
            schema="every condition is a finite set of positive literals and an atom; the least is the empty set",
        )
        stage2 = StageRecord(2, 0, (), (), (), 0, "no certifying diagram avoids the empty condition")
        forbidden = frozenset(stage0.canonical_atoms) | frozenset(stage1.canonical_atoms)
        return DerivativeTrace((stage0, stage1, stage2), 2, True, top=None, forbidden=forbidden)

    def rank(self, branch) -> int | None:
        return 1 if branch == OMEGA else 0

    def finitely_determined_models(self) -> dict:
        return {self.canonical_atom(k): self.model(k) for k in range(self.cutoff)}

    def crosscheck(self, n: int) -> list[str]:
        """Compare the oracles with brute force on the range(n) truncation.

        The truncation's models are M_0..M_n; M_n plays omega. Membership
        agrees on every condition over the window; atom status agrees on
        conditions with a negative U literal, where the truncation cannot
        see the difference between M_n and omega.
        """
        from .bridge import build_conditions, compute_derivative

        bad = []
        t = self.truncate(n)
        P = build_conditions(t)
        window = self.alphabet_below(n)
        for r in range(3):
            for c in itertools.combinations(window, r):
                p = frozenset(c)
                if self.member(p) != (p in P):
                    bad.append(f"membership differs at {sorted(map(str, p))}")
                    continue
                if p in P and any(l.kind == UNIVERSE and not l.positive for l in p):
                    if self.is_atom(p) != P.is_atom(p):
                        bad.append(f"atom status differs at {sorted(map(str, p))}")
        trace = compute_derivative(t)
        got = [condition_key(p) for p in trace.stage(0).canonical_atoms]
        want = sorted(
            [condition_key(self.canonical_atom(k)) for k in range(n)] + [condition_key({_u(n - 1)})]
        )
        if sorted(got) != want:
            bad.append("stage-0 canonical atoms differ from the closed form")
        return bad


FAMILIES = {"cohen": Cohen, "initial_segment": InitialSegment}


def family_for(t: TCI) -> SchematicFamily:
    """The oracle for a schematic TCI, after checking it matches its template."""
    sch = t.schematic
    if sch is None:
        raise UnsupportedFamily(f"{t.name} has no schematic carrier")
    cls = FAMILIES.get(sch.family)
    if cls is None:
        raise UnsupportedFamily(f"unknown schematic family {sch.family!r}")
    fam = cls(sch.cutoff)
    want = fam.tci()
    same = (
        t.sig == want.sig
        and t.universe_symbol == want.universe_symbol
        and [pretty(f) for f in t.theory] == [pretty(f) for f in want.theory]
        and t.constraints == want.constraints
    )
    if not same:
        raise UnsupportedFamily(f"{t.name} does not match the {sch.family} template")
    return fam


def is_schematic(t: TCI) -> bool:
    return t.schematic is not None
