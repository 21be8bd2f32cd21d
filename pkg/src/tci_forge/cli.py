"""tci-forge: command-line front end.

Every subcommand prints one JSON report (sorted keys) on standard output.
Exit status 0 on success, 1 on a domain error, 2 on a usage error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .bridge import (
    SymbolicHandle,
    build_conditions,
    classify_trichotomy,
    compute_derivative,
    determination_rank,
    finitely_determined_models,
    generic_model_check,
    witness_map,
)
from .codec import PAIRING_NOTE, CodecError, decode_set, encode_set, parse_code, parse_hf, show_hf
from .compiler import compile_pi_to_sigma, model_expand, model_restrict
from .diagram import show_condition
from .families import family_for
from .fol import FormulaError, Signature, SymbolDecl, classify_formula, parse_formula, parse_tree, pretty, to_prenex
from .fol.syntax import pretty_node
from .fol.semantics import Structure
from .posets import (
    DEFAULT_CAP,
    ExplicitPoset,
    PosetError,
    cantor_scheme,
    check_scheme,
    dense_subsets,
    encode_forcing_tci,
    enumerate_generic_filters,
    generic_of_model,
    load_poset,
    scheme_leaves,
)
from .tci import TCI, TCIError, classify_tci, count_candidates, enumerate_models, load_tci, models_star, tci_to_json

CORPUS_DIR = Path(__file__).parent / "corpus"
DETERMINISM_NOTE = "all operations are deterministic; no randomness is used anywhere"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- reports


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _numeric_paths(value, path="result"):
    if isinstance(value, bool):
        return
    if isinstance(value, (int, float)):
        yield path
    elif isinstance(value, dict):
        for k, v in value.items():
            yield from _numeric_paths(v, f"{path}.{k}")
    elif isinstance(value, (list, tuple)):
        seen = set()
        for v in value:
            for p in _numeric_paths(v, f"{path}[]"):
                if p not in seen:
                    seen.add(p)
                    yield p


def _provenance(result, default: str, overrides: dict) -> dict:
    """Name the producing operation for every numeric leaf (list indices folded)."""
    out = {}
    for p in _numeric_paths(result):
        op = default
        for prefix, name in overrides.items():
            if p == f"result.{prefix}" or p.startswith(f"result.{prefix}.") or p.startswith(f"result.{prefix}["):
                op = name
        out[p] = op
    return out


class Report:
    def __init__(self, command: list[str], op: str):
        self.command = command
        self.op = op
        self.inputs: dict[str, str] = {}
        self.result: dict = {}
        self.notes: list[str] = [DETERMINISM_NOTE]
        self.ops: dict[str, str] = {}

    def input(self, path: Path, label: str | None = None):
        self.inputs[label or str(path)] = _digest(path)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "provenance": _provenance(self.result, self.op, self.ops),
            "notes": self.notes,
            "version": __version__,
        }

    def render(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _table(doc: dict) -> str:
    rows = []

    def walk(v, path):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(v[k], f"{path}.{k}" if path else k)
        elif isinstance(v, list) and v and all(isinstance(x, (dict, list)) for x in v):
            rows.append((path, f"[{len(v)} entries]"))
        else:
            rows.append((path, json.dumps(v, sort_keys=True, ensure_ascii=False)))

    walk(doc["result"], "")
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"


# ---------------------------------------------------------------- inputs


def _path(p) -> Path:
    if p is None:
        raise UsageError("--in FILE is required")
    path = Path(p)
    if not path.is_file():
        raise UsageError(f"no such file: {p}")
    return path


def _read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TCIError(f"{path}: malformed JSON: {exc}") from None


def _tci(args, rep: Report) -> TCI:
    path = _path(args.input)
    rep.input(path)
    return load_tci(_read_json(path))


def _poset(args, rep: Report) -> ExplicitPoset:
    path = _path(args.input)
    rep.input(path)
    return load_poset(_read_json(path))


def _models_json(models, limit):
    return [M.to_json() for M in models[:limit]]


def _sig_from_text(text: str | None) -> Signature:
    """``R:relation:2,c:constant:0`` (kind defaults to relation)."""
    decls = []
    for part in filter(None, (p.strip() for p in (text or "").split(","))):
        bits = part.split(":")
        if len(bits) == 2:
            bits = [bits[0], "relation", bits[1]]
        if len(bits) != 3:
            raise UsageError(f"bad signature entry {part!r}; expected NAME:KIND:ARITY")
        decls.append(SymbolDecl(bits[0], bits[1], int(bits[2])))
    return Signature(decls)


# ---------------------------------------------------------------- commands


def cmd_parse(args, rep):
    if args.input:
        sig = _tci(args, rep).sig
    else:
        sig = _sig_from_text(args.sig)
    rep.op = "parse_formula"
    tree = parse_tree(args.formula, sig)
    f = parse_formula(args.formula, sig)
    rep.result = {"tree": pretty_node(tree), "pretty": pretty(f), "sentence": f.is_sentence(),
                  "free": sorted(f.free_vars())}
    if f.is_sentence():
        p = to_prenex(f)
        rep.result["prenex"] = pretty(p)
        rep.result["classes"] = classify_formula(p).to_json()
        rep.ops["classes"] = "classify_formula"


def cmd_models(args, rep):
    t = _tci(args, rep)
    models = enumerate_models(t)
    rep.result = {
        "tci": t.name,
        "model_count": len(models),
        "candidates_checked": count_candidates(t),
        "models": _models_json(models, args.limit),
        "listed": min(len(models), args.limit),
    }
    rep.op = "enumerate_models"
    rep.ops = {"candidates_checked": "count_candidates", "listed": "run"}


def cmd_check(args, rep):
    t = _tci(args, rep)
    if not args.model:
        raise UsageError("--model FILE is required")
    mpath = _path(args.model)
    rep.input(mpath)
    M = Structure.from_json(_read_json(mpath), t.sig)
    rep.result = {"tci": t.name, "model": M.to_json(), "models_star": models_star(M, t)}
    rep.op = "models_star"


def cmd_classify(args, rep):
    t = _tci(args, rep)
    rep.result = {
        "tci": t.name,
        "classes": classify_tci(t).to_json(),
        "sentences": [{"text": pretty(f), "classes": classify_formula(f).to_json()} for f in t.theory],
    }
    rep.op = "classify_tci"
    rep.ops = {"sentences": "classify_formula"}


def cmd_compile(args, rep):
    t = _tci(args, rep)
    c = compile_pi_to_sigma(t, args.level)
    rep.result = {"source": t.name, "level": c.level, "output": tci_to_json(c.output),
                  "constants": dict(c.constant_table), "output_classes": classify_tci(c.output).to_json()}
    rep.op = "compile_pi_to_sigma"
    rep.ops = {"output_classes": "classify_tci"}
    if args.out:
        # the file gets the compiled TCI itself; the report still goes to stdout
        doc = tci_to_json(c.output)
        doc["compiled_from"] = {"source": t.name, "level": c.level, "guard": c.guard_symbol,
                                "constants": dict(c.constant_table), "input_sha256": next(iter(rep.inputs.values()))}
        Path(args.out).write_text(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
        args.out = None
    if args.verify:
        a = enumerate_models(t)
        b = enumerate_models(c.output)
        expanded = sorted((model_expand(c, M) for M in a), key=Structure.sort_key)
        rep.result["verify"] = {
            "source_models": len(a),
            "output_models": len(b),
            "expand_onto": expanded == b,
            "restrict_inverts": all(model_restrict(c, model_expand(c, M)) == M for M in a),
        }
        rep.ops["verify"] = "enumerate_models"


def cmd_encode_poset(args, rep):
    P = _poset(args, rep)
    T = encode_forcing_tci(P, args.cap)
    models = enumerate_models(T)
    rep.result = {
        "poset": P.name,
        "size": len(P.elements),
        "dense_subsets": len(dense_subsets(P, args.cap)),
        "tci": tci_to_json(T),
        "model_count": len(models),
        "generic_filters_from_models": sorted(sorted(generic_of_model(M)) for M in models),
    }
    rep.op = "encode_forcing_tci"
    rep.ops = {"dense_subsets": "dense_subsets", "model_count": "enumerate_models"}


def cmd_generic(args, rep):
    P = _poset(args, rep)
    filters = enumerate_generic_filters(P, args.cap, args.method)
    rep.result = {"poset": P.name, "method": args.method, "count": len(filters),
                  "filters": [sorted(F.elements) for F in filters]}
    rep.op = "enumerate_generic_filters"


def cmd_cantor(args, rep):
    path = _path(args.input)
    doc = _read_json(path)
    rep.input(path)
    if "elements" in doc:
        P = load_poset(doc)
        family = None
        show = lambda p: p
    else:
        t = load_tci(doc)
        P = build_conditions(t)
        family = family_for(t).dense_family(args.depth) if t.schematic is not None else None
        show = show_condition
    scheme = cantor_scheme(P, family, args.depth)
    leaves = scheme_leaves(scheme, args.depth)
    problems = check_scheme(P, scheme, family)
    rep.result = {
        "poset": P.name,
        "depth": args.depth,
        "leaves": len(leaves),
        "violations": problems,
        "scheme": {s: show(scheme[s]) for s in sorted(scheme, key=lambda s: (len(s), s)) if len(s) <= min(args.depth, 4)},
    }
    rep.op = "cantor_scheme"


def cmd_conditions(args, rep):
    t = _tci(args, rep)
    P = build_conditions(t, stage=args.stage) if t.schematic is not None else build_conditions(t)
    if not P.finite:
        fam = family_for(t)
        rep.result = {"tci": t.name, "finite": False, "family": fam.to_json(), "stage": args.stage,
                      "empty_condition_is_member": frozenset() in P,
                      "sample_split_of_empty": [show_condition(q) for q in (P.split(frozenset()) or ())]}
    else:
        els = sorted(P.elements, key=P.key)
        rep.result = {
            "tci": t.name,
            "finite": True,
            "condition_count": len(els),
            "branch_count": len(P.branches),
            "atom_count": sum(1 for p in els if P.is_atom(p)),
            "conditions": [show_condition(p) for p in els[: args.limit]],
            "listed": min(len(els), args.limit),
        }
        rep.ops = {"listed": "run"}
    rep.op = "build_conditions"


def cmd_derive(args, rep):
    t = _tci(args, rep)
    trace = compute_derivative(t)
    rep.result = {"tci": t.name, "fixpoint_stage": trace.fixpoint_stage, "top_is_empty": trace.top_is_empty}
    if args.trace:
        rep.result["stages"] = trace.to_json()["stages"]
    fdm = finitely_determined_models(t)
    rep.result["finitely_determined"] = [
        {"atom": show_condition(p), "model": M.to_json() if isinstance(M, Structure) else str(M)}
        for p, M in sorted(fdm.items(), key=lambda kv: (len(kv[0]), show_condition(kv[0])))
    ]
    if t.schematic is not None and t.schematic.family == "initial_segment":
        rep.result["omega_rank"] = determination_rank(t, "omega")
        rep.ops["omega_rank"] = "determination_rank"
    rep.op = "compute_derivative"


def cmd_trichotomy(args, rep):
    t = _tci(args, rep)
    v = classify_trichotomy(t, scheme_depth=args.depth)
    rep.result = {"tci": t.name, **v.to_json()}
    rep.op = "classify_trichotomy"
    rep.ops = {"evidence.candidates_checked": "count_candidates", "evidence.ranks": "determination_rank",
               "evidence.cantor_scheme": "cantor_scheme", "evidence.atomless_certificate": "splitting_certificate"}


def _witness_json(w) -> dict:
    if isinstance(w, SymbolicHandle):
        return {"kind": "symbolic", **w.to_json()}
    models = enumerate_models(w)
    return {"kind": "tci", "tci": tci_to_json(w), "model_count": len(models),
            "generic_filters": sorted(sorted(generic_of_model(M)) for M in models)}


def cmd_witness(args, rep):
    t = _tci(args, rep)
    if not args.fallback:
        raise UsageError("--fallback FILE is required")
    fpath = _path(args.fallback)
    rep.input(fpath)
    doc = _read_json(fpath)
    fallback = encode_forcing_tci(load_poset(doc), args.cap) if "elements" in doc else load_tci(doc)
    w = witness_map(t, fallback, args.cap)
    rep.result = {"tci": t.name, "is_fallback": w is fallback, "witness": _witness_json(w)}
    rep.op = "witness_map"
    rep.ops = {"witness.model_count": "enumerate_models", "witness.certificate": "continuum_evidence"}


def cmd_generic_check(args, rep):
    t = _tci(args, rep)
    rep.result = generic_model_check(t, args.cap, args.method)
    rep.op = "generic_model_check"


def cmd_codec(args, rep):
    if args.action == "encode":
        if args.set is None:
            raise UsageError("codec encode needs --set")
        x = parse_hf(args.set)
        rep.result = {"set": show_hf(x), "code": encode_set(x)}
        rep.op = "encode_set"
    else:
        if args.code is None:
            raise UsageError("codec decode needs --code")
        code = parse_code(args.code)
        rep.result = {"code": sorted(set(code)), "set": show_hf(decode_set(code))}
        rep.op = "decode_set"
    rep.notes.append(PAIRING_NOTE)


def cmd_corpus_verify(args, rep):
    from .verify import verify_corpus

    root = Path(args.corpus) if args.corpus else CORPUS_DIR
    if not root.is_dir():
        raise UsageError(f"corpus directory not found: {root}")
    files = sorted(p for p in root.rglob("*.json") if p.name != "expectations.json")
    if not files:
        raise UsageError(f"corpus directory {root} holds no corpus files")
    for p in files:
        rep.input(p, p.relative_to(root).as_posix())
    rep.result = verify_corpus(root, cap=args.cap)
    rep.op = "corpus_verify"
    rep.notes.append(PAIRING_NOTE)


COMMANDS = {
    "parse": cmd_parse,
    "models": cmd_models,
    "check": cmd_check,
    "classify": cmd_classify,
    "compile": cmd_compile,
    "encode-poset": cmd_encode_poset,
    "generic": cmd_generic,
    "cantor": cmd_cantor,
    "conditions": cmd_conditions,
    "derive": cmd_derive,
    "trichotomy": cmd_trichotomy,
    "witness": cmd_witness,
    "generic-check": cmd_generic_check,
    "codec": cmd_codec,
    "corpus-verify": cmd_corpus_verify,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="input", metavar="FILE")
    common.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="size cap for finite enumerations")
    common.add_argument("--depth", type=int, default=10)
    common.add_argument("--seedless", action="store_true", help="accepted for scripts; nothing is random")
    common.add_argument("--format", choices=("json", "table"), default="json")

    p = _Parser(prog="tci-forge", description="Theories with constraints in interpretation, at desk scale.")
    p.add_argument("--version", action="version", version=f"tci-forge {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("parse", parents=[common])
    s.add_argument("--formula", required=True)
    s.add_argument("--sig", help="NAME:KIND:ARITY,... when no --in TCI supplies the signature")
    s = sub.add_parser("models", parents=[common])
    s.add_argument("--limit", type=int, default=100)
    s = sub.add_parser("check", parents=[common])
    s.add_argument("--model", metavar="FILE")
    sub.add_parser("classify", parents=[common])
    s = sub.add_parser("compile", parents=[common])
    s.add_argument("--level", type=int, default=1)
    s.add_argument("--verify", action="store_true")
    sub.add_parser("encode-poset", parents=[common])
    s = sub.add_parser("generic", parents=[common])
    s.add_argument("--method", choices=("scan", "minimal", "auto"), default="scan")
    sub.add_parser("cantor", parents=[common])
    s = sub.add_parser("conditions", parents=[common])
    s.add_argument("--limit", type=int, default=100)
    s.add_argument("--stage", type=int, default=0)
    s = sub.add_parser("derive", parents=[common])
    s.add_argument("--trace", action="store_true")
    sub.add_parser("trichotomy", parents=[common])
    s = sub.add_parser("witness", parents=[common])
    s.add_argument("--fallback", metavar="FILE")
    s = sub.add_parser("generic-check", parents=[common])
    s.add_argument("--method", choices=("scan", "minimal", "auto"), default="auto")
    s = sub.add_parser("codec", parents=[common])
    s.add_argument("action", choices=("encode", "decode"))
    s.add_argument("--set")
    s.add_argument("--code")
    s = sub.add_parser("corpus-verify", parents=[common])
    s.add_argument("--corpus", metavar="DIR")
    return p


DOMAIN_ERRORS = (TCIError, PosetError, CodecError, FormulaError, ValueError)


def _error_report(argv, kind, exc) -> str:
    doc = {"command": argv, "error": {"kind": kind, "type": type(exc).__name__, "message": str(exc)},
           "version": __version__}
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def run(argv: list[str] | None = None, stdout=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        rep = Report(argv, args.command)
        COMMANDS[args.command](args, rep)
    except UsageError as exc:
        stdout.write(_error_report(argv, "usage", exc))
        print(f"tci-forge: usage error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        stdout.write(_error_report(argv, "domain", exc))
        print(f"tci-forge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = rep.render() if args.format == "json" else _table(rep.to_json())
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    if args.command == "corpus-verify" and not rep.result.get("all_pass", False):
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
