"""Records produced by the derivative and the trichotomy classifier."""
from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import show_condition

EMPTY = "EMPTY"
SINGLETON_V = "SINGLETON_V"
CONTINUUM = "CONTINUUM"


@dataclass(frozen=True)
class StageRecord:
    index: int
    condition_count: int | None  # None when the stage poset is infinite
    canonical_atoms: tuple  # one per isolated branch, first in canonical order
    isolated: tuple  # labels of branches isolated at this stage
    surviving: tuple  # labels of branches certifying at this stage
    atom_count: int | None = None
    schema: str | None = None  # closed-form description for schematic families

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "condition_count": self.condition_count,
            "canonical_atoms": [show_condition(p) for p in self.canonical_atoms],
            "isolated": list(self.isolated),
            "surviving": list(self.surviving),
            "atom_count": self.atom_count,
            "schema": self.schema,
        }


@dataclass(frozen=True)
class DerivativeTrace:
    stages: tuple
    fixpoint_stage: int
    top_is_empty: bool
    top: object = field(default=None, compare=False)  # LiteralPoset at the fixpoint
    forbidden: frozenset = frozenset()

    def stage(self, i: int) -> StageRecord:
        return self.stages[i]

    def rank_of(self, label) -> int | None:
        for st in self.stages:
            if label in st.isolated:
                return st.index
        return None

    def to_json(self) -> dict:
        return {
            "stages": [s.to_json() for s in self.stages],
            "fixpoint_stage": self.fixpoint_stage,
            "top_is_empty": self.top_is_empty,
        }


@dataclass(frozen=True)
class TrichotomyVerdict:
    tag: str
    evidence: dict

    def to_json(self) -> dict:
        return {"tag": self.tag, "evidence": self.evidence}
