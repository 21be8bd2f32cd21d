"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Expected numbers come from tests/oracles.py (brute force, no package
imports) wherever an independent count exists.
"""
import io
import json
import time

import pytest

from conftest import CORPUS, POSET_FILES, TCI_FILES, corpus_poset, corpus_tci, family_tci
from oracles import MODEL_COUNTS, generic_filters
from tci_forge.bridge import (
    SymbolicHandle,
    classify_trichotomy,
    compute_derivative,
    determination_rank,
    generic_model_check,
    witness_map,
)
from tci_forge.cli import run
from tci_forge.codec import decode_set, encode_set, hf_sets_of_rank_at_most, pair, unpair
from tci_forge.compiler import compile_pi_to_sigma, model_expand, model_restrict
from tci_forge.diagram import recover_model, sigma_diagram
from tci_forge.families import family_for
from tci_forge.fol import PI, SIGMA, Structure
from tci_forge.posets import encode_forcing_tci, enumerate_generic_filters, generic_of_model, load_poset
from tci_forge.tci import classify_tci, enumerate_models, load_tci


def report(capsys, n, title, ok, elapsed, limit=None, detail=""):
    within = limit is None or elapsed < limit
    verdict = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit}s)" if limit is not None else ""
    with capsys.disabled():
        print(f"\nCRITERION {n:2d} {verdict}: {title} [{elapsed:.2f}s{budget}] {detail}".rstrip())
    assert ok, detail
    assert within, f"took {elapsed:.2f}s, limit {limit}s"


def test_criterion_01_model_counts(capsys):
    rows = []
    worst = 0.0
    for name in ("tci_ab", "tci_sym"):
        out = io.StringIO()
        t0 = time.perf_counter()
        code = run(["models", "--in", str(CORPUS / "tcis" / f"{name}.json")], out)
        worst = max(worst, time.perf_counter() - t0)
        got = json.loads(out.getvalue())["result"]["model_count"]
        rows.append((name, got, MODEL_COUNTS[name](), code))
    ok = all(g == e and c == 0 for _, g, e, c in rows) and [e for _, _, e, _ in rows] == [4, 13]
    report(capsys, 1, "model-count oracle", ok, worst, 1,
           ", ".join(f"{n}={g} (oracle {e})" for n, g, e, _ in rows))


def test_criterion_02_diagram_bijection(capsys):
    t0 = time.perf_counter()
    failures = []
    total = 0
    for path in TCI_FILES:
        t = load_tci(path)
        models = enumerate_models(t)
        ds = [sigma_diagram(t, M) for M in models]
        total += len(ds)
        if len(set(ds)) != len(ds):
            failures.append(f"{path.stem}: not injective")
        if any(recover_model(t, d) != M for d, M in zip(ds, models)):
            failures.append(f"{path.stem}: recover_model mismatch")
    report(capsys, 2, "diagram bijection", not failures, time.perf_counter() - t0, 5,
           f"{total} models over {len(TCI_FILES)} TCIs; failures={failures}")


def test_criterion_03_compiler_bijection(capsys):
    t0 = time.perf_counter()
    failures = []
    runs = []
    for path in TCI_FILES:
        t = load_tci(path)
        for n in (1, 2):
            if (PI, n + 1) not in classify_tci(t):
                continue
            c = compile_pi_to_sigma(t, n)
            src, out = enumerate_models(t), enumerate_models(c.output)
            good = ((SIGMA, n) in classify_tci(c.output) and len(src) == len(out)
                    and sorted((model_expand(c, M) for M in src), key=Structure.sort_key) == out
                    and all(model_restrict(c, model_expand(c, M)) == M for M in src)
                    and all(model_expand(c, model_restrict(c, M2)) == M2 for M2 in out))
            runs.append(f"{path.stem}/n={n}:{len(src)}<->{len(out)}")
            if not good:
                failures.append(f"{path.stem} n={n}")
    sym = next(r for r in runs if r.startswith("tci_sym/n=1"))
    report(capsys, 3, "compiler bijection", not failures and sym.endswith("13<->13"),
           time.perf_counter() - t0, 10, f"{len(runs)} compilations; {sym}; failures={failures}")


def test_criterion_04_encoder_biconditional(capsys):
    t0 = time.perf_counter()
    failures = []
    checked = 0
    for path in POSET_FILES:
        P = load_poset(path)
        if len(P.elements) > 6:
            continue
        checked += 1
        from_models = {generic_of_model(M) for M in enumerate_models(encode_forcing_tci(P))}
        filters = {F.elements for F in enumerate_generic_filters(P)}
        oracle = generic_filters(P.elements, [tuple(x) for x in P.order])
        if not (from_models == filters == oracle):
            failures.append(path.stem)
    report(capsys, 4, "encoder biconditional", not failures and checked >= 6, time.perf_counter() - t0, 30,
           f"{checked} posets; failures={failures}")


def test_criterion_05_generic_models(capsys):
    t0 = time.perf_counter()
    failures = []
    filters = 0
    for path in TCI_FILES:
        r = generic_model_check(load_tci(path))
        filters += r["filter_count"]
        if not r["all_ok"] or r["filter_count"] != r["model_count"]:
            failures.append(path.stem)
    report(capsys, 5, "generic-model property", not failures, time.perf_counter() - t0, 60,
           f"{filters} generic filters checked; failures={failures}")


def test_criterion_06_derivative_traces(capsys):
    t0 = time.perf_counter()
    ab = compute_derivative(corpus_tci("tci_ab"))
    seg_t = family_tci("initial_segment")
    seg = compute_derivative(seg_t)
    coh_t = family_tci("cohen")
    coh = compute_derivative(coh_t)
    cert = family_for(coh_t).splitting_certificate(6)
    got = {
        "ab": (ab.fixpoint_stage, ab.top_is_empty),
        "initial_segment": (seg.fixpoint_stage, seg.top_is_empty, determination_rank(seg_t, "omega")),
        "cohen": (coh.fixpoint_stage, coh.top_is_empty, coh.stage(0).atom_count in (0, None),
                  len(cert), all(c["ok"] for c in cert)),
    }
    want = {"ab": (1, True), "initial_segment": (2, True, 1), "cohen": (0, False, True, 729, True)}
    report(capsys, 6, "derivative traces", got == want, time.perf_counter() - t0, 30, f"{got}")


def test_criterion_07_trichotomy(capsys):
    t0 = time.perf_counter()
    tags = {p.stem: classify_trichotomy(load_tci(p)).tag for p in TCI_FILES}
    expected = {name: ("EMPTY" if MODEL_COUNTS[name]() == 0 else "SINGLETON_V") for name in tags}
    v = classify_trichotomy(family_tci("cohen"))
    scheme = v.evidence["cantor_scheme"]
    ok = (tags == expected and v.tag == "CONTINUUM" and scheme["leaves"] == 1024
          and scheme["pairwise_incompatible"] and scheme["leaves_meet_family"])
    report(capsys, 7, "trichotomy", ok, time.perf_counter() - t0, 60,
           f"finite: {sum(x == 'SINGLETON_V' for x in tags.values())} SINGLETON_V, "
           f"{sum(x == 'EMPTY' for x in tags.values())} EMPTY; cohen {v.tag} with {scheme['leaves']} leaves")


def test_criterion_08_witness_map(capsys):
    t0 = time.perf_counter()
    fallback = encode_forcing_tci(corpus_poset("antichain2"))
    w_false = witness_map(corpus_tci("tci_false"), fallback)
    w_ab = witness_map(corpus_tci("tci_ab"), fallback)
    w_cohen = witness_map(family_tci("cohen"), fallback)
    ab_models = enumerate_models(w_ab)
    ok = (w_false is fallback and len(ab_models) == 1 and generic_of_model(ab_models[0]) == frozenset()
          and isinstance(w_cohen, SymbolicHandle))
    report(capsys, 8, "witness map", ok, time.perf_counter() - t0, None,
           f"inconsistent->fallback={w_false is fallback}, T_ab->{len(ab_models)} model(s), "
           f"cohen->{type(w_cohen).__name__}")


def test_criterion_09_codec(capsys):
    t0 = time.perf_counter()
    xs = hf_sets_of_rank_at_most(4, 10**4)
    bad_sets = sum(decode_set(encode_set(x)) != x for x in xs)
    bad_n = sum(pair(*unpair(n)) != n for n in range(10**4))
    bad_ab = sum(unpair(pair(a, b)) != (a, b) for a in range(100) for b in range(100))
    ok = len(xs) == 10**4 and bad_sets == bad_n == bad_ab == 0
    report(capsys, 9, "codec round trips", ok, time.perf_counter() - t0, 10,
           f"{len(xs)} HF sets, failures sets={bad_sets} unpair={bad_n} pair={bad_ab}")


def test_criterion_10_determinism(capsys):
    t0 = time.perf_counter()
    outs = []
    codes = []
    for _ in range(2):
        buf = io.StringIO()
        codes.append(run(["corpus-verify"], buf))
        outs.append(buf.getvalue())
    doc = json.loads(outs[0])["result"]
    ok = outs[0] == outs[1] and codes == [0, 0] and doc["all_pass"]
    report(capsys, 10, "corpus-verify determinism", ok, time.perf_counter() - t0, None,
           f"{doc['check_count']} checks, all_pass={doc['all_pass']}, identical={outs[0] == outs[1]}")
