"""Coding hereditarily finite sets as finite sets of naturals.

A set x becomes the pairing-code of the membership relation on
Y = trcl(x) + {x}, indexed by a canonical bijection. Decoding is the
Mostowski collapse of the relation read back through unpair.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable

HFSet = frozenset
EMPTY = frozenset()

PAIRING_NOTE = (
    "Cantor pairing (a+b)(a+b+1)/2 + b stands in for the ordinal pairing "
    "function; on finite ordinals both are bijections N x N -> N"
)


class CodecError(ValueError):
    pass


class HFParseError(CodecError):
    pass


class IllFoundedError(CodecError):
    pass


class NonExtensionalError(CodecError):
    pass


class NoUniqueMaximalError(CodecError):
    pass


# ---------------------------------------------------------------- syntax


def parse_hf(text: str) -> HFSet:
    """Braces and commas, whitespace ignored: ``{{},{{}}}``."""
    s = "".join(text.split())
    pos = 0

    def one() -> HFSet:
        nonlocal pos
        if pos >= len(s) or s[pos] != "{":
            raise HFParseError(f"expected '{{' at offset {pos} in {text!r}")
        pos += 1
        members = []
        if pos < len(s) and s[pos] == "}":
            pos += 1
            return EMPTY
        while True:
            members.append(one())
            if pos >= len(s):
                raise HFParseError(f"unterminated set in {text!r}")
            if s[pos] == ",":
                pos += 1
                continue
            if s[pos] == "}":
                pos += 1
                return frozenset(members)
            raise HFParseError(f"unexpected {s[pos]!r} at offset {pos} in {text!r}")

    x = one()
    if pos != len(s):
        raise HFParseError(f"trailing text at offset {pos} in {text!r}")
    return x


@lru_cache(maxsize=None)
def rank(x: HFSet) -> int:
    return max((rank(m) + 1 for m in x), default=0)


@lru_cache(maxsize=None)
def hf_key(x: HFSet) -> tuple:
    """A total order on HF sets: by rank, then by the sorted member keys."""
    return (rank(x), tuple(sorted(hf_key(m) for m in x)))


def show_hf(x: HFSet) -> str:
    return "{" + ",".join(show_hf(m) for m in sorted(x, key=hf_key)) + "}"


def von_neumann(n: int) -> HFSet:
    x = EMPTY
    for _ in range(n):
        x = x | {x}
    return x


# ---------------------------------------------------------------- pairing


def pair(a: int, b: int) -> int:
    if a < 0 or b < 0:
        raise CodecError("pair takes naturals")
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    if n < 0:
        raise CodecError("unpair takes a natural")
    s = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - s * (s + 1) // 2
    return s - b, b


# ---------------------------------------------------------------- codes


def transitive_closure(x: HFSet) -> HFSet:
    out: set = set()
    stack = list(x)
    while stack:
        m = stack.pop()
        if m not in out:
            out.add(m)
            stack.extend(m)
    return frozenset(out)


def canonical_enumeration(x: HFSet) -> list[HFSet]:
    """f: |Y| -> Y, ordered by rank and then by the sorted list of member indices."""
    Y = transitive_closure(x) | {x}
    by_rank: dict[int, list] = {}
    for y in Y:
        by_rank.setdefault(rank(y), []).append(y)
    index: dict = {}
    order: list = []
    for r in sorted(by_rank):
        level = sorted(by_rank[r], key=lambda y: sorted(index[m] for m in y))
        for y in level:
            index[y] = len(order)
            order.append(y)
    return order


def membership_pairs(x: HFSet) -> list[tuple[int, int]]:
    f = canonical_enumeration(x)
    index = {y: i for i, y in enumerate(f)}
    return sorted((index[m], index[y]) for y in f for m in y)


def encode_set(x: HFSet) -> list[int]:
    """The code of x as a sorted list of naturals."""
    return sorted(pair(a, b) for a, b in membership_pairs(x))


def decode_set(code: Iterable[int]) -> HFSet:
    code = sorted(set(code))
    if not code:
        return EMPTY
    if any(not isinstance(n, int) or n < 0 for n in code):
        raise CodecError("a code is a finite set of naturals")
    members: dict[int, set] = {}
    in_something: set = set()
    for n in code:
        a, b = unpair(n)
        members.setdefault(a, set())
        members.setdefault(b, set()).add(a)
        in_something.add(a)

    # Kahn's algorithm: a node collapses once all its members have collapsed
    value: dict[int, HFSet] = {}
    pending = {v: len(ms) for v, ms in members.items()}
    parents: dict[int, list] = {v: [] for v in members}
    for v, ms in members.items():
        for m in ms:
            parents[m].append(v)
    ready = sorted(v for v, k in pending.items() if k == 0)
    while ready:
        v = ready.pop()
        value[v] = frozenset(value[m] for m in members[v])
        for p in parents[v]:
            pending[p] -= 1
            if pending[p] == 0:
                ready.append(p)
    if len(value) != len(members):
        stuck = sorted(v for v in members if v not in value)
        raise IllFoundedError(f"ill-founded: nodes {stuck[:5]} lie on or above a membership cycle")

    seen: dict[HFSet, int] = {}
    for v in sorted(value):
        other = seen.setdefault(value[v], v)
        if other != v:
            raise NonExtensionalError(f"non-extensional: nodes {other} and {v} have the same members")

    tops = sorted(set(members) - in_something)
    if len(tops) != 1:
        raise NoUniqueMaximalError(f"no unique maximal element: maximal nodes {tops}")
    return value[tops[0]]


def parse_code(text: str) -> list[int]:
    text = text.strip().strip("[]{}")
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise CodecError(f"bad code {text!r}: {exc}") from None


def hf_sets_of_rank_at_most(r: int, limit: int | None = None) -> list[HFSet]:
    """Sets of rank <= r (the members of V_{r+1}) in bitmask order over V_r,
    at most ``limit`` of them."""
    if r < 0:
        return []
    level: list = []  # V_0
    for _ in range(r):
        level = _power(level, None)
    return _power(level, limit)


def _power(xs: list, limit: int | None) -> list:
    xs = sorted(xs, key=hf_key)
    n = 1 << len(xs)
    if limit is not None:
        n = min(n, limit)
    return [frozenset(x for i, x in enumerate(xs) if mask >> i & 1) for mask in range(n)]
