import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import POSET_FILES, corpus_tci, family_tci
from oracles import conditions_ab, generic_filters
from tci_forge.bridge import build_conditions
from tci_forge.diagram import parse_literal
from tci_forge.families import family_for
from tci_forge.posets import (
    AtomError,
    CapExceeded,
    Decides,
    ExplicitPoset,
    NotDenseError,
    PosetError,
    UndecidableError,
    build_generic_filter,
    cantor_scheme,
    check_scheme,
    check_subset_property,
    dense_subsets,
    encode_forcing_tci,
    enumerate_generic_filters,
    g_p,
    generic_of_model,
    load_poset,
    scheme_leaves,
)
from tci_forge.fol import PI
from tci_forge.tci import classify_tci, enumerate_models

ANTI = ExplicitPoset(["a", "b"])
CHAIN = ExplicitPoset(["a", "b"], [("b", "a")])  # b is stronger


def cond(t, *texts):
    return frozenset(parse_literal(s, t) for s in texts)


@pytest.fixture
def p_ab(t_ab):
    return build_conditions(t_ab)


@pytest.fixture
def cohen():
    fam = family_for(family_tci("cohen"))
    return fam, fam.poset(0)


# -- explicit posets


def test_order_is_closed_and_antisymmetry_checked():
    P = ExplicitPoset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert P.le("a", "c") and P.le("b", "b")
    with pytest.raises(PosetError):
        ExplicitPoset(["a", "b"], [("a", "b"), ("b", "a")])


def test_subset_property_examples():
    assert not check_subset_property(ANTI, {"a"}, "dense")
    assert not check_subset_property(ANTI, {"a"}, "predense")
    assert check_subset_property(ANTI, {"a", "b"}, "predense")
    assert check_subset_property(CHAIN, {"a"}, "upward_closed")
    assert check_subset_property(CHAIN, {"a"}, "filter")
    with pytest.raises(PosetError):
        check_subset_property(ANTI, {"a"}, "thick")


def test_lazy_subset_property(cohen):
    fam, P = cohen
    assert check_subset_property(P, Decides(parse_literal("U(3)", family_tci("cohen"))), "dense")
    with pytest.raises(UndecidableError):
        check_subset_property(P, {frozenset()}, "filter")


def test_atoms(p_ab, t_ab, cohen):
    assert ANTI.is_atom("a")
    assert not p_ab.is_atom(cond(t_ab, "U(a)"))
    assert p_ab.is_atom(cond(t_ab, "U(a)", "U(b)"))
    _, P = cohen
    F = build_generic_filter(P, family_for(family_tci("cohen")).dense_family(5))
    assert not P.is_atom(frozenset()) and not P.is_atom(F.generator)


def test_ab_conditions_match_oracle(p_ab):
    got = {frozenset((l.args[0], l.positive) for l in p) for p in p_ab.elements}
    assert got == set(conditions_ab())


def test_g_p_examples(p_ab, t_ab):
    assert g_p(ANTI, "a").elements == {"a"}
    assert g_p(CHAIN, "b").elements == {"a", "b"}
    top = cond(t_ab, "U(a)", "U(b)")
    assert g_p(p_ab, top).elements == {frozenset(c) for r in range(3) for c in itertools.combinations(top, r)}


@pytest.mark.parametrize("path", POSET_FILES, ids=lambda p: p.stem)
def test_g_p_generic_at_atoms(path):
    P = load_poset(path)
    dense = dense_subsets(P)
    for p in P.elements:
        if P.is_atom(p):
            F = g_p(P, p)
            assert check_subset_property(P, F.elements, "filter")
            assert all(F.elements & D for D in dense)


def test_generic_filter_examples():
    assert [sorted(F.elements) for F in enumerate_generic_filters(ANTI)] == [["a"], ["b"]]
    assert [sorted(F.elements) for F in enumerate_generic_filters(CHAIN)] == [["a", "b"]]
    assert [sorted(F.elements) for F in enumerate_generic_filters(ExplicitPoset(["x"]))] == [["x"]]


def test_generic_filter_cap():
    P = ExplicitPoset([f"e{i}" for i in range(17)])
    with pytest.raises(CapExceeded):
        enumerate_generic_filters(P)
    assert len(enumerate_generic_filters(P, method="auto")) == 17


@pytest.mark.parametrize("path", POSET_FILES, ids=lambda p: p.stem)
def test_generic_filters_match_oracle(path):
    P = load_poset(path)
    expect = generic_filters(P.elements, [tuple(x) for x in P.order])
    assert {F.elements for F in enumerate_generic_filters(P)} == expect
    assert {F.elements for F in enumerate_generic_filters(P, method="minimal")} == expect


@st.composite
def small_posets(draw):
    n = draw(st.integers(1, 5))
    els = [f"e{i}" for i in range(n)]
    # i < j only, so the closure stays antisymmetric
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda x: x[0] < x[1]),
                          max_size=6))
    return els, [(els[i], els[j]) for i, j in pairs]


@settings(max_examples=40, deadline=None)
@given(small_posets())
def test_scan_and_cone_routes_agree_with_brute_force(data):
    els, pairs = data
    P = ExplicitPoset(els, pairs)
    expect = generic_filters(els, pairs)
    assert {F.elements for F in enumerate_generic_filters(P)} == expect
    assert {F.elements for F in enumerate_generic_filters(P, method="minimal")} == expect
    assert {generic_of_model(M) for M in enumerate_models(encode_forcing_tci(P))} == expect


# -- building filters and schemes


def test_build_generic_filter_ab(p_ab, t_ab):
    fam = [Decides(parse_literal("U(a)", t_ab)), Decides(parse_literal("U(b)", t_ab))]
    F = build_generic_filter(p_ab, fam)
    assert F.generator == cond(t_ab, "U(a)", "U(b)")
    assert check_subset_property(p_ab, F.elements, "filter")
    assert all(F.elements & {p for p in p_ab.elements if p in D} for D in fam)


def test_build_generic_filter_empty_family():
    assert build_generic_filter(CHAIN, (), start="b").elements == {"a", "b"}
    assert build_generic_filter(CHAIN, (), start="a").elements == {"a"}


def test_build_generic_filter_cohen(cohen):
    fam, P = cohen
    F = build_generic_filter(P, fam.dense_family(10))
    assert len(F.generator) == 10
    assert all(F.generator in D for D in fam.dense_family(10))


def test_build_generic_filter_rejects_non_dense():
    with pytest.raises(NotDenseError):
        build_generic_filter(ANTI, [{"a"}], start="b")


def test_cantor_cohen_depth2(cohen):
    fam, P = cohen
    t = family_tci("cohen")
    s = cantor_scheme(P, fam.dense_family(2), 2)
    leaves = scheme_leaves(s, 2)
    assert len(leaves) == 4
    assert s["00"] == cond(t, "~U(0)", "~U(1)")
    assert s["11"] == cond(t, "U(0)", "U(1)")
    assert check_scheme(P, s, fam.dense_family(2)) == []


def test_cantor_depth0(cohen):
    _, P = cohen
    assert cantor_scheme(P, [], 0) == {"": frozenset()}


def test_cantor_ab_hits_atom(p_ab):
    assert len(scheme_leaves(cantor_scheme(p_ab, None, 2), 2)) == 4
    with pytest.raises(AtomError):
        cantor_scheme(p_ab, None, 3)


@pytest.mark.parametrize("depth", [1, 4, 7])
def test_cantor_leaves_pairwise_incompatible(cohen, depth):
    fam, P = cohen
    s = cantor_scheme(P, fam.dense_family(depth), depth)
    leaves = scheme_leaves(s, depth)
    assert len(leaves) == 2 ** depth == len(set(leaves))
    assert check_scheme(P, s, fam.dense_family(depth)) == []


# -- encoder


def test_encoder_antichain():
    T = encode_forcing_tci(ANTI)
    assert dense_subsets(ANTI) == [frozenset({"a", "b"})]
    assert sorted(sorted(generic_of_model(M)) for M in enumerate_models(T)) == [["a"], ["b"]]
    assert [str(c) for c in classify_tci(T).minimal()] == ["Pi_2"]


def test_encoder_chain():
    assert set(dense_subsets(CHAIN)) == {frozenset({"b"}), frozenset({"a", "b"})}
    models = enumerate_models(encode_forcing_tci(CHAIN))
    assert [generic_of_model(M) for M in models] == [frozenset({"a", "b"})]


def test_encoder_singleton():
    models = enumerate_models(encode_forcing_tci(ExplicitPoset(["x"])))
    assert [generic_of_model(M) for M in models] == [frozenset({"x"})]


@pytest.mark.parametrize("path", [p for p in POSET_FILES if len(load_poset(p).elements) <= 6], ids=lambda p: p.stem)
def test_encoder_biconditional(path):
    P = load_poset(path)
    T = encode_forcing_tci(P)
    assert (PI, 2) in classify_tci(T)
    assert {generic_of_model(M) for M in enumerate_models(T)} == {F.elements for F in enumerate_generic_filters(P)}
