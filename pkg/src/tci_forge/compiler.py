"""Compile a Pi_{n+1} TCI into a Sigma_n TCI with the same models, up to a bijection.

The output keeps the universe fixed at the old universe carrier and moves the
old universe into a fresh unary guard. Every leading universal block is
grounded over fresh constants, one per carrier element.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fol import (
    And,
    Const,
    Eq,
    Formula,
    Func,
    Implies,
    Quant,
    Rel,
    Structure,
    SymbolDecl,
    Var,
    pretty,
    to_prenex,
)
from .fol.prenex import PI
from .fol.syntax import EXISTS, FORALL, IDENT_RE, Node, conj, substitute
from .fol.semantics import FuncTable
from .tci import EQUAL, SUBSET, TCI, Constraint, TCIError, classify_tci, make_tci, models_star

GUARD = "T__"
CONST_PREFIX = "c__"


class CompileError(TCIError):
    pass


@dataclass(frozen=True)
class CompiledTCI:
    source: TCI
    output: TCI
    level: int
    guard_symbol: str
    constant_table: tuple  # sorted (element, constant symbol) pairs

    @property
    def constants(self) -> dict[str, str]:
        return dict(self.constant_table)


def _guard(guard: str, term) -> Rel:
    return Rel(guard, (term,))


def relativize_instance(phi: Formula, consts, guard: str = GUARD, avoid=()) -> Formula:
    """phi_a: guard each quantified subformula, strip the leading universal
    block, then substitute the given constant symbols for its variables."""
    k = 0
    for q, _ in phi.prefix:
        if q != FORALL:
            break
        k += 1
    consts = tuple(consts)
    if len(consts) != k:
        raise CompileError(f"instance needs {k} constants, got {len(consts)}")

    # step 1 wraps each quantifier body in its guard; step 2 drops the
    # leading universal quantifiers while keeping their guards
    body: Node = phi.matrix
    for i in reversed(range(len(phi.prefix))):
        q, v = phi.prefix[i]
        g = _guard(guard, Var(v))
        body = Implies(g, body) if q == FORALL else And(g, body)
        if i >= k:
            body = Quant(q, v, body)
    # step 3
    mapping = {v: Const(c) for (_, v), c in zip(phi.prefix[:k], consts)}
    body = substitute(body, mapping)
    return to_prenex(body, avoid=avoid)


def _tags_ok(y) -> None:
    for x in y:
        if not IDENT_RE.match(CONST_PREFIX + x):
            raise CompileError(f"carrier element {x!r} cannot name a constant symbol")


def _totality(decl: SymbolDecl, taken) -> Formula:
    fresh = (v for v in (f"x{i}" for i in itertools.count(1)) if v not in taken)
    names = list(itertools.islice(fresh, decl.arity + 1))
    args = tuple(Var(v) for v in names[:-1])
    prefix = tuple((FORALL, v) for v in names[:-1]) + ((EXISTS, names[-1]),)
    return Formula(prefix, Eq(Func(decl.name, args), Var(names[-1])))


def _guard_axioms(t: TCI, cname, guard: str) -> list[Formula]:
    out = []
    for decl in t.sig:
        con = t.constraint(decl.name)
        if decl.kind == "constant":
            out.append(Formula((), _guard(guard, Const(decl.name))))
            continue
        for tup in con.sorted_carrier():
            cs = tuple(Const(cname[x]) for x in tup)
            if decl.kind == "relation":
                atom = Rel(decl.name, cs)
            else:
                atom = Eq(Func(decl.name, cs[:-1]), cs[-1])
            guards = conj([_guard(guard, c) for c in cs])
            out.append(Formula((), Implies(atom, guards)))
            if con.mode == EQUAL:
                out.append(Formula((), Implies(guards, atom)))
    return out


def compile_pi_to_sigma(t: TCI, n: int) -> CompiledTCI:
    if n < 1:
        raise CompileError("level must be at least 1: no Pi_1 to Sigma_0 reduction is claimed")
    if not t.finite:
        raise CompileError(f"{t.name}: compiler needs finite carriers")
    if (PI, n + 1) not in classify_tci(t):
        raise CompileError(f"{t.name} is not Pi_{n + 1}")
    for name in (GUARD,):
        if name in t.sig or name == t.universe_symbol:
            raise CompileError(f"fresh symbol {name} already used")
    ucon = t.universe
    y = ucon.sorted_carrier()
    _tags_ok(y)
    cname = {x: CONST_PREFIX + x for x in y}
    clash = set(cname.values()) & (set(t.sig.names) | {t.universe_symbol})
    if clash:
        raise CompileError(f"fresh constants clash with {sorted(clash)}")

    new_decls = [SymbolDecl(GUARD, "relation", 1)] + [SymbolDecl(c, "constant", 0) for c in cname.values()]
    sig2 = t.sig.extend(new_decls)
    taken = set(sig2.names) | {t.universe_symbol}

    tstar = list(t.theory)
    tstar += [_totality(d, taken) for d in t.sig.of_kind("function")]
    tstar += _guard_axioms(t, cname, GUARD)

    theory: list[Formula] = []
    seen = set()
    consts = [cname[x] for x in y]
    for phi in tstar:
        k = next((i for i, (q, _) in enumerate(phi.prefix) if q != FORALL), len(phi.prefix))
        for a in itertools.product(consts, repeat=k):
            inst = relativize_instance(phi, a, GUARD, avoid=taken)
            text = pretty(inst)
            if text not in seen:
                seen.add(text)
                theory.append(inst)

    # the guard is a unary relation, so its copy of the carrier holds 1-tuples
    guard_carrier = frozenset((x,) for x in y)
    constraints = {t.universe_symbol: Constraint(ucon.carrier, EQUAL), GUARD: Constraint(guard_carrier, ucon.mode)}
    for d in t.sig:
        constraints[d.name] = Constraint(t.constraint(d.name).carrier, SUBSET)
    for x, c in cname.items():
        constraints[c] = Constraint(frozenset({x}), SUBSET)
    out = make_tci(f"{t.name}__sigma{n}", sig2, t.universe_symbol, constraints, theory)
    return CompiledTCI(t, out, n, GUARD, tuple(sorted(cname.items())))


def model_restrict(c: CompiledTCI, M2: Structure) -> Structure:
    """(T1): shrink to the guard and forget the fresh symbols."""
    if not models_star(M2, c.output):
        raise CompileError("input is not a model of the compiled TCI")
    U = frozenset(x for (x,) in M2[c.guard_symbol])
    interp = {}
    for d in c.source.sig:
        v = M2[d.name]
        if d.kind == "constant":
            interp[d.name] = v
        elif d.kind == "relation":
            interp[d.name] = frozenset(tp for tp in v if set(tp) <= U)
        else:
            interp[d.name] = {k: val for k, val in v.items if set(k) <= U}
    return Structure.make(U, interp)


def model_expand(c: CompiledTCI, M: Structure) -> Structure:
    """(T2): widen the universe to the full carrier, the guard marking the old one."""
    t = c.source
    if not models_star(M, t):
        raise CompileError("input is not a model of the source TCI")
    y = t.universe.sorted_carrier()
    interp = {c.guard_symbol: {(x,) for x in M.universe}}
    for x, cn in c.constant_table:
        interp[cn] = x
    for d in t.sig:
        v = M[d.name]
        if d.kind != "function":
            interp[d.name] = v
            continue
        table = dict(v.mapping)
        for args in itertools.product(y, repeat=d.arity):
            if args in table:
                continue
            # off the guard every carrier graph point trips a guard axiom
            raise CompileError(
                f"{d.name} has no admissible value at {args} outside the old universe; "
                "the construction needs the universe carrier fixed when function symbols occur"
            )
        interp[d.name] = FuncTable.of(table)
    M2 = Structure.make(y, interp)
    if not models_star(M2, c.output):
        raise CompileError("expansion is not a model of the compiled TCI")
    return M2
