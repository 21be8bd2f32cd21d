"""Corpus verification: every check compares an expected value from the
manifest (or a structural identity) against what the library computes."""
from __future__ import annotations

import json
from pathlib import Path

from .bridge import SymbolicHandle, classify_trichotomy, compute_derivative, generic_model_check, witness_map
from .codec import decode_set, encode_set, hf_sets_of_rank_at_most, pair, unpair
from .compiler import compile_pi_to_sigma, model_expand, model_restrict
from .diagram import recover_model, sigma_diagram
from .families import Cohen, InitialSegment, family_for
from .fol import PI, SIGMA, Structure
from .posets import encode_forcing_tci, enumerate_generic_filters, generic_of_model, load_poset
from .tci import classify_tci, enumerate_models, load_tci

MANIFEST = "expectations.json"
ENCODER_MAX = 6


class _Checks:
    def __init__(self):
        self.rows: list[dict] = []

    def add(self, check: str, file: str, expected, fn):
        try:
            actual = fn()
        except Exception as exc:  # a failing check must not stop the run
            actual = f"error: {type(exc).__name__}: {exc}"
        self.rows.append({"check": check, "file": file, "expected": expected, "actual": actual,
                          "pass": actual == expected})


def _diagram_bijection(t) -> dict:
    models = enumerate_models(t)
    ds = [sigma_diagram(t, M) for M in models]
    incomparable = all(not (a <= b) for i, a in enumerate(ds) for j, b in enumerate(ds) if i != j)
    return {
        "injective": len(set(ds)) == len(ds),
        "incomparable": incomparable,
        "recovered": all(recover_model(t, d) == M for d, M in zip(ds, models)),
    }


def _compiler(t, n) -> dict:
    c = compile_pi_to_sigma(t, n)
    a = enumerate_models(t)
    b = enumerate_models(c.output)
    expanded = sorted((model_expand(c, M) for M in a), key=Structure.sort_key)
    return {
        "output_sigma": (SIGMA, n) in classify_tci(c.output),
        "counts_equal": len(a) == len(b),
        "expand_onto": expanded == b,
        "restrict_inverts": all(model_restrict(c, M2) in a for M2 in b)
        and all(model_restrict(c, model_expand(c, M)) == M for M in a),
    }


def _encoder(P) -> bool:
    T = encode_forcing_tci(P)
    from_models = {generic_of_model(M) for M in enumerate_models(T)}
    return from_models == {F.elements for F in enumerate_generic_filters(P)}


def _codec_roundtrip() -> dict:
    xs = hf_sets_of_rank_at_most(4, 10**4)
    return {
        "hf_sets": len(xs),
        "decode_encode_identity": all(decode_set(encode_set(x)) == x for x in xs),
        "pair_unpair": all(pair(*unpair(n)) == n for n in range(10**4)),
        "unpair_pair": all(unpair(pair(a, b)) == (a, b) for a in range(100) for b in range(100)),
    }


def verify_corpus(root: Path, cap: int = 16) -> dict:
    root = Path(root)
    mpath = root / MANIFEST
    manifest = json.loads(mpath.read_text(encoding="utf-8")) if mpath.is_file() else {}
    exp_t = manifest.get("tcis", {})
    exp_p = manifest.get("posets", {})
    exp_f = manifest.get("families", {})
    ck = _Checks()
    loaded = {}

    for path in sorted((root / "tcis").glob("*.json")):
        rel = path.relative_to(root).as_posix()
        try:
            t = load_tci(path)
        except Exception as exc:
            ck.add("load", rel, "ok", lambda exc=exc: f"error: {exc}")
            continue
        loaded[path.stem] = t
        exp = exp_t.get(path.stem, {})
        ck.add("model-count", rel, exp.get("models"), lambda t=t: len(enumerate_models(t)))
        ck.add("classes", rel, exp.get("min_class"), lambda t=t: [str(c) for c in classify_tci(t).minimal()])
        ck.add("diagram-bijection", rel, {"injective": True, "incomparable": True, "recovered": True},
               lambda t=t: _diagram_bijection(t))
        for n in (1, 2):
            if (PI, n + 1) in classify_tci(t):
                ck.add(f"compiler-pi{n + 1}-sigma{n}", rel,
                       {"output_sigma": True, "counts_equal": True, "expand_onto": True, "restrict_inverts": True},
                       lambda t=t, n=n: _compiler(t, n))
        consistent = exp.get("models", 0) > 0
        ck.add("generic-model", rel, {"all_ok": True, "filters_equal_models": True},
               lambda t=t: (lambda r: {"all_ok": r["all_ok"], "filters_equal_models": r["filter_count"] == r["model_count"]})(
                   generic_model_check(t, cap)))
        ck.add("derivative", rel, {"fixpoint_stage": 1 if consistent else 0, "top_is_empty": True},
               lambda t=t: (lambda tr: {"fixpoint_stage": tr.fixpoint_stage, "top_is_empty": tr.top_is_empty})(
                   compute_derivative(t)))
        ck.add("trichotomy", rel, exp.get("trichotomy"), lambda t=t: classify_trichotomy(t).tag)

    posets = {}
    for path in sorted((root / "posets").glob("*.json")):
        rel = path.relative_to(root).as_posix()
        try:
            P = load_poset(path)
        except Exception as exc:
            ck.add("load", rel, "ok", lambda exc=exc: f"error: {exc}")
            continue
        posets[path.stem] = P
        ck.add("generic-filters", rel, exp_p.get(path.stem, {}).get("generic_filters"),
               lambda P=P: len(enumerate_generic_filters(P, cap)))
        if len(P.elements) <= ENCODER_MAX:
            ck.add("encoder-biconditional", rel, True, lambda P=P: _encoder(P))

    families = {}
    for path in sorted((root / "families").glob("*.json")):
        rel = path.relative_to(root).as_posix()
        try:
            t = load_tci(path)
            fam = family_for(t)
        except Exception as exc:
            ck.add("load", rel, "ok", lambda exc=exc: f"error: {exc}")
            continue
        families[fam.name] = t
        exp = exp_f.get(fam.name, {})
        ck.add("family-crosscheck", rel, [], lambda fam=fam: fam.crosscheck(min(fam.cutoff, 6)))
        ck.add("derivative", rel, {"fixpoint_stage": exp.get("fixpoint_stage"), "top_is_empty": exp.get("top_is_empty")},
               lambda t=t: (lambda tr: {"fixpoint_stage": tr.fixpoint_stage, "top_is_empty": tr.top_is_empty})(
                   compute_derivative(t)))
        if isinstance(fam, InitialSegment):
            ck.add("omega-rank", rel, exp.get("omega_rank"), lambda fam=fam: fam.rank("omega"))
        if isinstance(fam, Cohen):
            ck.add("atomless-depth6", rel, True,
                   lambda fam=fam: all(c["ok"] for c in fam.splitting_certificate(6)))

            def scheme(t=t):
                ev = classify_trichotomy(t).evidence["cantor_scheme"]
                return {k: ev[k] for k in ("leaves", "pairwise_incompatible", "leaves_meet_family")}

            ck.add("cantor-scheme-depth10", rel,
                   {"leaves": 1024, "pairwise_incompatible": True, "leaves_meet_family": True}, scheme)
        ck.add("trichotomy", rel, exp.get("trichotomy"), lambda t=t: classify_trichotomy(t).tag)

    # the three branches of the witness map
    wit = manifest.get("witness", {})
    if wit:
        fb_name = wit.get("fallback_poset")
        fallback = encode_forcing_tci(posets[fb_name]) if fb_name in posets else None

        def branch(name):
            t = loaded.get(name) or families.get(name)
            w = witness_map(t, fallback)
            if w is fallback:
                return "fallback"
            if isinstance(w, SymbolicHandle):
                return "symbolic"
            return f"tci with {len(enumerate_models(w))} model(s)"

        for name, expected in sorted(wit.get("branches", {}).items()):
            ck.add("witness-map", name, expected, lambda name=name: branch(name))

    ck.add("codec-roundtrip", "(builtin)",
           {"hf_sets": 10**4, "decode_encode_identity": True, "pair_unpair": True, "unpair_pair": True},
           _codec_roundtrip)

    failed = [r for r in ck.rows if not r["pass"]]
    return {
        "checks": ck.rows,
        "check_count": len(ck.rows),
        "failed": [f"{r['check']} ({r['file']})" for r in failed],
        "all_pass": not failed,
    }
