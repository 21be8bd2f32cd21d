"""Independent oracles, written against the definitions and not the package.

Each corpus TCI gets a hand-coded predicate over plain Python structures;
nothing here imports tci_forge.
"""
import itertools


def subsets(xs):
    xs = list(xs)
    return [frozenset(c) for r in range(len(xs) + 1) for c in itertools.combinations(xs, r)]


def universes(carrier, mode):
    return [frozenset(carrier)] if mode == 1 else subsets(sorted(carrier))


def count_ab():
    return len(universes("ab", 0))


def count_sym():
    n = 0
    for U in universes("ab", 0):
        pairs = [(x, y) for x in sorted(U) for y in sorted(U)]
        for R in subsets(pairs):
            n += all((y, x) in R for (x, y) in R)
    return n


def count_false():
    return 0


def count_func():
    # U mode 1 on {a,b}; f total on U with f(f(x)) = x
    U = "ab"
    n = 0
    for vals in itertools.product(U, repeat=2):
        f = dict(zip(U, vals))
        n += all(f[f[x]] == x for x in U)
    return n


def count_func_mode1():
    # the carrier forces f = swap, which has no fixed point
    return 1


def count_mode1():
    # mode 1 on a relation pins it to carrier & U^n, not to the whole carrier
    n = 0
    for U in universes("abc", 0):
        R = {"a", "b"} & U
        for S in subsets(sorted(U)):
            n += S <= R
    return n


def count_const():
    n = 0
    for U in universes("ab", 0):
        for c in sorted(U & {"a", "b"}):
            for R in subsets(sorted(U)):
                n += c in R
    return n


def count_serial():
    n = 0
    for U in universes("ab", 0):
        pairs = [(x, y) for x in sorted(U) for y in sorted(U)]
        for R in subsets(pairs):
            n += all(any((x, y) in R for y in U) for x in U)
    return n


def count_pi3():
    # forall x exists y forall z (R(x,y) & (R(y,z) -> R(x,z)))
    n = 0
    for U in universes("ab", 0):
        pairs = [(x, y) for x in sorted(U) for y in sorted(U)]
        for R in subsets(pairs):
            n += all(any(all((x, y) in R and ((y, z) not in R or (x, z) in R) for z in U) for y in U) for x in U)
    return n


def count_order():
    U = "abc"
    pairs = [(x, y) for x in U for y in U]
    n = 0
    for R in subsets(pairs):
        refl = all((x, x) in R for x in U)
        anti = all(x == y or not ((x, y) in R and (y, x) in R) for x in U for y in U)
        trans = all((x, z) in R for (x, y) in R for (y2, z) in R if y == y2)
        n += refl and anti and trans
    return n


def count_exists():
    n = 0
    for U in universes("ab", 0):
        n += sum(1 for R in subsets(sorted(U)) if R)
    return n


MODEL_COUNTS = {
    "tci_ab": count_ab,
    "tci_sym": count_sym,
    "tci_false": count_false,
    "tci_func": count_func,
    "tci_func_mode1": count_func_mode1,
    "tci_mode1": count_mode1,
    "tci_const": count_const,
    "tci_serial": count_serial,
    "tci_pi3": count_pi3,
    "tci_order": count_order,
    "tci_exists": count_exists,
}


# ---------------------------------------------------------------- posets


def close(elements, pairs):
    le = {(x, x) for x in elements} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(le), repeat=2):
            if b == c and (a, d) not in le:
                le.add((a, d))
                changed = True
    return le


def generic_filters(elements, pairs):
    """Brute force over all subsets: filters meeting every dense subset."""
    le = close(elements, pairs)
    E = list(elements)

    def is_filter(G):
        up = all(q in G for p in G for q in E if (p, q) in le)
        directed = all(any(r in G and (r, p) in le and (r, q) in le for r in E) for p in G for q in G)
        return up and directed

    def dense(D):
        return all(any(d in D and (d, p) in le for d in E) for p in E)

    dense_sets = [D for D in subsets(E) if D and dense(D)]
    return {G for G in subsets(E) if is_filter(G) and all(G & D for D in dense_sets)}


# ---------------------------------------------------------------- conditions


def conditions_ab():
    """Complementary-pair-free subsets of the four U-literals over {a, b}."""
    lits = [("a", True), ("a", False), ("b", True), ("b", False)]
    return [s for s in subsets(lits) if not any((x, not v) in s for x, v in s)]
