"""Congruence kernels of SL_2 over Z/p^k and over F_p[T]/(T^k).

Both kernels carry the congruence filtration G_i = {x = I mod p^i} (resp.
mod T^i) and a shift isomorphism between consecutive factors: the p-th
power map over Z/p^k, and the coefficient shift I + T^(i-1) A -> I + T^i A
over F_p[T]/(T^k).
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import BadPrime, CapExceeded, NotWellDefined
from .filtration import Filtration, SimilarityStructure, induced_factor_map, power_similarity
from .group import (
    Automorphism,
    FiniteGroup,
    as_automorphism,
    closure,
    conjugation_automorphism,
    default_table_cap,
    subgroup_from_members,
)

ZP = "zp"
LAMBDA = "lambda"


class ZRing:
    """Z/p^k; elements are least nonnegative residues."""

    def __init__(self, p: int, k: int):
        self.p, self.k, self.n = p, k, p ** k
        self.width = max(1, (self.n.bit_length() + 7) // 8)
        self.zero, self.one = 0, 1

    def add(self, a, b):
        return (a + b) % self.n

    def sub(self, a, b):
        return (a - b) % self.n

    def mul(self, a, b):
        return (a * b) % self.n

    def neg(self, a):
        return (-a) % self.n

    def inv(self, a):
        return pow(a, -1, self.n)

    def from_int(self, a):
        return a % self.n

    def valuation(self, a) -> int:
        """Largest j <= k with p^j dividing a."""
        j = 0
        while j < self.k and a % self.p ** (j + 1) == 0:
            j += 1
        return j

    def digit(self, a, j) -> int:
        return (a // self.p ** j) % self.p

    def encode(self, a) -> bytes:
        return a.to_bytes(self.width, "big")

    def decode(self, data: bytes):
        return int.from_bytes(data, "big")

    def format(self, a) -> str:
        return str(a)


class TRing:
    """F_p[T]/(T^k); elements are coefficient tuples, constant term first."""

    def __init__(self, p: int, k: int):
        self.p, self.k = p, k
        self.width = k
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1) if k else ()

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        k, p = self.k, self.p
        out = [0] * k
        for i, x in enumerate(a):
            if x:
                for j in range(k - i):
                    out[i + j] += x * b[j]
        return tuple(v % p for v in out)

    def inv(self, a):
        p, k = self.p, self.k
        c0 = pow(a[0], -1, p)
        out = [0] * k
        out[0] = c0
        for n in range(1, k):
            s = sum(a[i] * out[n - i] for i in range(1, n + 1))
            out[n] = (-c0 * s) % p
        return tuple(out)

    def from_int(self, a):
        return ((a % self.p),) + (0,) * (self.k - 1)

    def valuation(self, a) -> int:
        for j, c in enumerate(a):
            if c:
                return j
        return self.k

    def digit(self, a, j) -> int:
        return a[j]

    def encode(self, a) -> bytes:
        return bytes(a)

    def decode(self, data: bytes):
        return tuple(data)

    def format(self, a) -> str:
        return "(" + ",".join(str(c) for c in a) + ")"


@functools.lru_cache(maxsize=None)
def ring(kind: str, p: int, k: int):
    if kind == ZP:
        return ZRing(p, k)
    if kind == LAMBDA:
        return TRing(p, k)
    raise ValueError(f"unknown matrix kind {kind!r}")


@dataclass(frozen=True)
class UnimodularMatrix:
    """2x2 matrix ((a, b), (c, d)) over Z/p^k or F_p[T]/(T^k)."""

    kind: str
    p: int
    k: int
    entries: tuple  # (a, b, c, d)

    @property
    def ring(self):
        return ring(self.kind, self.p, self.k)

    def det(self):
        R = self.ring
        a, b, c, d = self.entries
        return R.sub(R.mul(a, d), R.mul(b, c))

    def __matmul__(self, other: UnimodularMatrix) -> UnimodularMatrix:
        R = self.ring
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return UnimodularMatrix(self.kind, self.p, self.k, (
            R.add(R.mul(a, e), R.mul(b, g)), R.add(R.mul(a, f), R.mul(b, h)),
            R.add(R.mul(c, e), R.mul(d, g)), R.add(R.mul(c, f), R.mul(d, h))))

    def inverse(self) -> UnimodularMatrix:
        R = self.ring
        a, b, c, d = self.entries
        u = R.inv(self.det())
        return UnimodularMatrix(self.kind, self.p, self.k,
                                (R.mul(u, d), R.mul(u, R.neg(b)), R.mul(u, R.neg(c)), R.mul(u, a)))

    def level(self) -> int:
        """Largest i with self = I mod p^i (resp. T^i)."""
        R = self.ring
        a, b, c, d = self.entries
        return min(R.valuation(R.sub(a, R.one)), R.valuation(b), R.valuation(c),
                   R.valuation(R.sub(d, R.one)))

    def leading_term(self, i: int) -> tuple[int, int, int, int]:
        """Digits at p^i (resp. T^i) of self - I."""
        R = self.ring
        a, b, c, d = self.entries
        return tuple(R.digit(x, i) for x in (R.sub(a, R.one), b, c, R.sub(d, R.one)))

    def encode(self) -> bytes:
        R = self.ring
        return b"".join(R.encode(x) for x in self.entries)

    def __str__(self):
        R = self.ring
        a, b, c, d = (R.format(x) for x in self.entries)
        return f"[[{a}, {b}], [{c}, {d}]]"


def matrix(kind: str, p: int, k: int, rows) -> UnimodularMatrix:
    """Build from nested rows of ints (or coefficient lists for LAMBDA)."""
    R = ring(kind, p, k)

    def coerce(x):
        if isinstance(x, int):
            return R.from_int(x)
        x = tuple(int(c) % p for c in x)
        return x + (0,) * (k - len(x))

    (a, b), (c, d) = rows
    return UnimodularMatrix(kind, p, k, tuple(coerce(x) for x in (a, b, c, d)))


def decode(kind: str, p: int, k: int, data: bytes) -> UnimodularMatrix:
    R = ring(kind, p, k)
    w = R.width
    return UnimodularMatrix(kind, p, k, tuple(R.decode(data[i * w:(i + 1) * w]) for i in range(4)))


def _uniformizer(kind, p, k):
    return p if kind == ZP else (0, 1) + (0,) * (k - 2)


def kernel_generators(kind: str, p: int, k: int) -> list[UnimodularMatrix]:
    R = ring(kind, p, k)
    t = _uniformizer(kind, p, k)
    one_plus_t = R.add(R.one, t)
    return [
        UnimodularMatrix(kind, p, k, (R.one, t, R.zero, R.one)),
        UnimodularMatrix(kind, p, k, (R.one, R.zero, t, R.one)),
        UnimodularMatrix(kind, p, k, (one_plus_t, R.zero, R.zero, R.inv(one_plus_t))),
    ]


def kernel_group(kind: str, p: int, k: int, table_cap: int | None = None,
                 cap: int | None = None, **kwargs) -> FiniteGroup:
    if p == 2:
        raise BadPrime("p = 2 is excluded for congruence kernels")
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise BadPrime(f"{p} is not prime")
    if k < 1:
        raise ValueError("k must be at least 1")
    table_cap = default_table_cap() if table_cap is None else table_cap
    cap = table_cap if cap is None else cap
    size = p ** (3 * (k - 1))
    if size > cap:
        raise CapExceeded(cap, f"{kind} kernel p={p}, k={k}")
    R = ring(kind, p, k)
    ident = UnimodularMatrix(kind, p, k, (R.one, R.zero, R.zero, R.one))
    gens = [g.encode() for g in kernel_generators(kind, p, k)] if k > 1 else []
    dec = functools.partial(decode, kind, p, k)
    return closure(
        gens,
        lambda a, b: (dec(a) @ dec(b)).encode(),
        lambda a: dec(a).inverse().encode(),
        cap=size, prime=p, table_cap=table_cap, identity=ident.encode(), decode=dec,
        name=f"sl2{kind}:p={p},k={k}", **kwargs)


def kernel_group_zp(p: int, k: int, **kwargs) -> FiniteGroup:
    """ker(SL_2(Z/p^k) -> SL_2(F_p))."""
    return kernel_group(ZP, p, k, **kwargs)


def kernel_group_lambda(p: int, k: int, **kwargs) -> FiniteGroup:
    """ker(SL_2(F_p[T]/(T^k)) -> SL_2(F_p))."""
    return kernel_group(LAMBDA, p, k, **kwargs)


def congruence_filtration(G: FiniteGroup) -> Filtration:
    sample = G.decode(G.elements[0])
    levels = [G.decode(e).level() for e in G.elements]
    chain = [subgroup_from_members(G, [x for x, lv in enumerate(levels) if lv >= i])
             for i in range(1, sample.k + 1)]
    return Filtration(G, chain)


def p_power_similarity(G: FiniteGroup, strict: bool = True) -> SimilarityStructure:
    return power_similarity(congruence_filtration(G), strict)


def t_map_similarity(G: FiniteGroup, strict: bool = True) -> SimilarityStructure:
    """Coefficient shift between congruence factors of the F_p[T] kernel."""
    filt = congruence_filtration(G)
    mats = [G.decode(e) for e in G.elements]
    maps = {}
    for i in range(2, filt.length):
        target = {}
        for y in filt.term(i).members:
            target.setdefault(mats[y].leading_term(i), y)

        def shift(x, i=i, target=target):
            lead = mats[x].leading_term(i - 1)
            y = target.get(lead)
            if y is None:
                raise NotWellDefined(f"no element of G_{i} with leading term {lead}", witness=x)
            return y

        maps[i] = induced_factor_map(filt, i, shift, strict)
    return SimilarityStructure(filt, maps, name="T-shift")


def ambient_conjugation(G: FiniteGroup, M: UnimodularMatrix) -> Automorphism:
    """x -> M^-1 x M for an invertible ambient matrix M."""
    Mi = M.inverse()
    images = [G.index[(Mi @ G.decode(e) @ M).encode()] for e in G.elements]
    return as_automorphism(G, images)


def standard_conjugations(G: FiniteGroup) -> list[Automorphism]:
    """Conjugations by diag(1,-1), the elementary lifts from SL_2(F_p), a
    diagonal torus element, and by the group generators."""
    sample = G.decode(G.elements[0])
    kind, p, k = sample.kind, sample.p, sample.k
    ambient = [
        matrix(kind, p, k, ((1, 0), (0, -1))),
        matrix(kind, p, k, ((1, 1), (0, 1))),
        matrix(kind, p, k, ((1, 0), (1, 1))),
    ]
    R = ring(kind, p, k)
    two = R.from_int(2)
    ambient.append(UnimodularMatrix(kind, p, k, (two, R.zero, R.zero, R.inv(two))))
    auts = [ambient_conjugation(G, M) for M in ambient]
    auts += [conjugation_automorphism(G, g) for g in G.generators]
    return auts
