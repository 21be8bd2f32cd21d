import pytest

from conftest import family_tci
from tci_forge.diagram import parse_literal
from tci_forge.families import Cohen, InitialSegment, family_for, is_schematic
from tci_forge.tci import TCIError, enumerate_models


def test_family_lookup():
    assert isinstance(family_for(family_tci("cohen")), Cohen)
    assert isinstance(family_for(family_tci("initial_segment")), InitialSegment)
    assert is_schematic(family_tci("cohen"))


@pytest.mark.parametrize("name", ["cohen", "initial_segment"])
@pytest.mark.parametrize("n", [1, 3, 5])
def test_oracles_agree_with_truncated_brute_force(name, n):
    assert family_for(family_tci(name)).crosscheck(n) == []


def test_schematic_refuses_enumeration():
    with pytest.raises(TCIError):
        enumerate_models(family_tci("cohen"))


def test_cohen_membership_and_splitting():
    t = family_tci("cohen")
    fam = family_for(t)
    p = frozenset({parse_literal("U(0)", t)})
    assert fam.member(p) and not fam.is_atom(p)
    q0, q1 = fam.split(p)
    assert p < q0 and p < q1 and not fam.member(q0 | q1)
    assert len(fam.splitting_certificate(6)) == 3 ** 6


def test_initial_segment_models():
    t = family_tci("initial_segment")
    fam = family_for(t)
    assert sorted(fam.model(3).universe) == ["0", "1", "2"]
    assert fam.is_atom(frozenset({parse_literal("~U(0)", t)}))
    assert not fam.member(frozenset({parse_literal("~U(0)", t), parse_literal("U(1)", t)}))
    assert fam.rank(2) == 0 and fam.rank("omega") == 1
