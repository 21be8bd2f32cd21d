import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tci_forge.fol import (
    PI,
    SIGMA,
    And,
    ArityError,
    EvaluationError,
    Formula,
    ParseError,
    Quant,
    Rel,
    Signature,
    SignatureError,
    Structure,
    SymbolDecl,
    Truth,
    UnknownSymbolError,
    Var,
    classify_formula,
    eval_formula,
    parse_formula,
    parse_sentence,
    parse_tree,
    pretty,
    to_prenex,
)
from tci_forge.fol.syntax import EXISTS, FORALL, Not, Or, Implies, Eq, Const
from conftest import TCI_FILES
from tci_forge.tci import load_tci

SIG = Signature([SymbolDecl("R", "relation", 2), SymbolDecl("S", "relation", 1)])


def structures(sig, max_size=3, min_size=1):
    """Every structure over {e0..e(n-1)} for relation-only signatures."""
    for n in range(min_size, max_size + 1):
        U = [f"e{i}" for i in range(n)]
        spaces = []
        for d in sig:
            tuples = list(itertools.product(U, repeat=d.arity))
            spaces.append([frozenset(t for t, bit in zip(tuples, bits) if bit)
                           for bits in itertools.product((0, 1), repeat=len(tuples))])
        for choice in itertools.product(*spaces):
            yield Structure.make(U, {d.name: v for d, v in zip(sig, choice)})


# -- parser


def test_parse_forall():
    f = parse_formula("forall x (R(x,x))", SIG)
    assert f.prefix == ((FORALL, "x"),)
    assert f.matrix == Rel("R", (Var("x"), Var("x")))


def test_parse_true():
    f = parse_formula("true", SIG)
    assert f.prefix == () and f.matrix == Truth(True)


def test_parse_forall_exists_conjunction():
    f = parse_formula("forall x exists y (R(x,y) & ~R(y,x))", SIG)
    assert f.prefix == ((FORALL, "x"), (EXISTS, "y"))
    assert isinstance(f.matrix, And)
    assert parse_formula(pretty(f), SIG) == f


def test_parse_errors():
    with pytest.raises(ParseError) as exc:
        parse_formula("forall x (R(x,x)", SIG)
    assert "expected" in str(exc.value)
    with pytest.raises(UnknownSymbolError):
        parse_formula("Q(x)", SIG)
    with pytest.raises(ArityError):
        parse_formula("R(x)", SIG)


def test_implication_right_assoc_and_iff_desugars():
    t = parse_tree("S(x) -> S(y) -> S(z)", Signature([SymbolDecl("S", "relation", 1)]))
    assert isinstance(t, Implies) and isinstance(t.right, Implies)
    f = parse_formula("S(x) <-> S(y)", SIG)
    assert "<->" not in pretty(f)


def test_signature_rejects_duplicates_and_bad_arity():
    with pytest.raises(SignatureError):
        Signature([SymbolDecl("R", "relation", 1), SymbolDecl("R", "relation", 2)])
    with pytest.raises(SignatureError):
        SymbolDecl("c", "constant", 1)
    with pytest.raises(SignatureError):
        SymbolDecl("R", "relation", 0)


def test_roundtrip_corpus_formulas():
    for path in TCI_FILES:
        t = load_tci(path)
        for f in t.theory:
            assert parse_formula(pretty(f), t.sig) == f


# -- prenex


def test_prenex_fixpoint():
    f = parse_formula("forall x exists y (R(x,y))", SIG)
    assert to_prenex(f) == f


def test_prenex_negated_exists():
    f = to_prenex(parse_tree("~exists x R(x,x)", SIG))
    assert len(f.prefix) == 1 and f.prefix[0][0] == FORALL
    v = f.prefix[0][1]
    assert f.matrix == Not(Rel("R", (Var(v), Var(v))))


def test_prenex_conjunction_of_blocks():
    f = to_prenex(parse_tree("(forall x R(x,x)) & (exists y S(y))", SIG))
    assert pretty(f) == "forall x1 exists x2 (R(x1,x1) & S(x2))"


def test_prenex_equivalence_exhaustive_small():
    texts = [
        "(forall x R(x,x)) & (exists y S(y))",
        "~(exists x (S(x) & forall y R(x,y)))",
        "(forall x S(x)) -> exists y R(y,y)",
        "(exists x S(x)) | ~(forall y exists z R(y,z))",
        "forall x ((exists y R(x,y)) -> S(x))",
    ]
    for text in texts:
        tree = parse_tree(text, SIG)
        f = to_prenex(tree)
        original = Formula((), Truth(True))
        for M in structures(SIG, 3):
            from tci_forge.fol.semantics import eval_node
            assert eval_formula(M, f) == eval_node(M, tree, {}), (text, M)


# -- classification


def test_classify_examples():
    qf = classify_formula(parse_formula("R(c,c) | true", Signature([SymbolDecl("R", "relation", 2), SymbolDecl("c", "constant", 0)])))
    assert (PI, 0) in qf and (SIGMA, 0) in qf
    ae = classify_formula(parse_formula("forall x exists y (R(x,y))", SIG))
    assert [str(c) for c in ae.minimal()] == ["Pi_2"]
    aa = classify_formula(parse_formula("forall x forall y (R(x,y))", SIG))
    assert [str(c) for c in aa.minimal()] == ["Pi_1"] and (SIGMA, 2) in aa


def test_classify_rejects_open_formula():
    with pytest.raises(ValueError):
        classify_formula(parse_formula("R(x,x)", SIG))


prefixes = st.lists(st.sampled_from([FORALL, EXISTS]), max_size=6)


@given(prefixes)
def test_classify_matches_alternation_count(qs):
    prefix = tuple((q, f"v{i}") for i, q in enumerate(qs))
    matrix = Truth(True)
    cls = classify_formula(Formula(prefix, matrix))
    blocks = sum(1 for i, q in enumerate(qs) if i == 0 or qs[i - 1] != q)
    if blocks == 0:
        assert cls.pi_min == cls.sigma_min == 0
    else:
        first = PI if qs[0] == FORALL else SIGMA
        assert (first, blocks) in cls and (first, blocks - 1) not in cls
    # upward closure
    for side in (PI, SIGMA):
        lo = cls.pi_min if side == PI else cls.sigma_min
        assert all((side, m) in cls for m in range(lo, lo + 4))


# -- evaluation


def test_eval_examples():
    M = Structure.make(["a", "b"], {"R": [("a", "b")], "S": []})
    assert eval_formula(M, parse_formula("true", SIG))
    assert not eval_formula(M, parse_formula("forall x forall y (R(x,y) -> R(y,x))", SIG))
    E = Structure.make([], {"R": [], "S": []})
    assert eval_formula(E, parse_formula("forall x (R(x,x))", SIG))
    assert not eval_formula(E, parse_formula("exists x (S(x))", SIG))


def test_eval_errors():
    M = Structure.make(["a"], {"R": [], "S": []})
    with pytest.raises(EvaluationError):
        eval_formula(M, parse_formula("S(x)", SIG))
    with pytest.raises(EvaluationError):
        eval_formula(Structure.make(["a"], {"R": []}), parse_formula("exists x S(x)", SIG))


def test_functions_and_equality():
    sig = Signature([SymbolDecl("f", "function", 1), SymbolDecl("c", "constant", 0)])
    M = Structure.make(["a", "b"], {"f": {("a",): "b", ("b",): "a"}, "c": "a"})
    assert eval_formula(M, parse_formula("f(f(c)) = c & ~(f(c) = c)", sig))
    assert eval_formula(M, parse_formula("forall x ~(f(x) = x)", sig))


RENAMINGS = [
    ("forall x exists y (R(x,y) | S(y))", "forall p exists w (R(p,w) | S(w))"),
    ("exists x forall y (R(x,y) -> S(x))", "exists q forall t (R(q,t) -> S(q))"),
    ("forall x (S(x) -> exists y R(y,x))", "forall z (S(z) -> exists u R(u,z))"),
]


@pytest.mark.parametrize("text,renamed", RENAMINGS)
def test_eval_invariant_under_bound_renaming(text, renamed):
    f, g = parse_formula(text, SIG), parse_formula(renamed, SIG)
    for M in structures(SIG, 2):
        assert eval_formula(M, f) == eval_formula(M, g)
