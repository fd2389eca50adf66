"""Truncated Nottingham group: series T + a2 T^2 + ... + aN T^N under substitution.

The group law is ``compose(f, g) = f(g(T)) mod T^(N+1)``.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass

from .errors import CapExceeded, MixedParameters
from .fields import GF, field
from .group import FiniteGroup, Subgroup, closure, default_table_cap, subgroup_from_members


@functools.total_ordering
class _Infinite:
    """Depth of the identity: larger than every finite depth."""

    def __eq__(self, other):
        return isinstance(other, _Infinite)

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return not isinstance(other, _Infinite)

    def __hash__(self):
        return hash("inf-depth")

    def __repr__(self):
        return "INF_DEPTH"

    def __str__(self):
        return "inf"


INF_DEPTH = _Infinite()


@dataclass(frozen=True)
class TruncatedSeries:
    q: int
    N: int
    coeffs: tuple[int, ...]  # a2..aN

    def __post_init__(self):
        if len(self.coeffs) != self.N - 1:
            raise ValueError(f"need {self.N - 1} coefficients, got {len(self.coeffs)}")
        if any(not 0 <= c < self.q for c in self.coeffs):
            raise ValueError("coefficients must be reduced field elements")

    @property
    def field(self) -> GF:
        return field(self.q)

    def coeff(self, i: int) -> int:
        """Coefficient of T^i (i >= 1)."""
        return 1 if i == 1 else self.coeffs[i - 2]

    def full(self) -> list[int]:
        """Coefficients of T^0..T^N."""
        return [0, 1, *self.coeffs]

    def encode(self) -> bytes:
        return bytes(self.coeffs)

    def __str__(self):
        return format_series(self)


def identity(q: int, N: int) -> TruncatedSeries:
    return TruncatedSeries(q, N, (0,) * (N - 1))


def series(q: int, N: int, terms: dict[int, int]) -> TruncatedSeries:
    """Build T + sum terms[i] T^i."""
    coeffs = [0] * (N - 1)
    for i, c in terms.items():
        if not 2 <= i <= N:
            raise ValueError(f"exponent {i} outside 2..{N}")
        coeffs[i - 2] = c
    return TruncatedSeries(q, N, tuple(coeffs))


def decode(q: int, N: int, data: bytes) -> TruncatedSeries:
    return TruncatedSeries(q, N, tuple(data))


def _mul_trunc(F: GF, a: list[int], b: list[int], N: int) -> list[int]:
    out = [0] * (N + 1)
    add, mul = F.add, F.mul
    for i, x in enumerate(a):
        if x:
            for j in range(0, N + 1 - i):
                y = b[j]
                if y:
                    out[i + j] = add[out[i + j]][mul[x][y]]
    return out


def _substitute(F: GF, f: list[int], g: list[int], N: int) -> list[int]:
    """f(g) mod T^(N+1), for g without constant term."""
    out = [0] * (N + 1)
    power = g[:]
    add, mul = F.add, F.mul
    for i in range(1, N + 1):
        c = f[i]
        if c:
            for k in range(N + 1):
                if power[k]:
                    out[k] = add[out[k]][mul[c][power[k]]]
        if i < N:
            power = _mul_trunc(F, power, g, N)
    return out


def _check(f: TruncatedSeries, g: TruncatedSeries):
    if f.q != g.q or f.N != g.N:
        raise MixedParameters(f"cannot combine (q={f.q}, N={f.N}) with (q={g.q}, N={g.N})")


def compose(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    _check(f, g)
    out = _substitute(f.field, f.full(), g.full(), f.N)
    assert out[0] == 0 and out[1] == 1
    return TruncatedSeries(f.q, f.N, tuple(out[2:]))


def reverse(f: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse, solved one degree at a time."""
    F, N = f.field, f.N
    fc = f.full()
    g = [0, 1] + [0] * (N - 1)
    for n in range(2, N + 1):
        # coefficient n of f(g) is g[n] + (terms in g[2..n-1])
        c = _substitute(F, fc, g, n)[n]
        g[n] = F.neg[c]
    return TruncatedSeries(f.q, N, tuple(g[2:]))


def commutator(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    return compose(compose(reverse(f), reverse(g)), compose(f, g))


def depth(f: TruncatedSeries):
    """Largest m with f = T mod T^(m+1); INF_DEPTH for the identity."""
    for i, c in enumerate(f.coeffs, start=2):
        if c:
            return i - 1
    return INF_DEPTH


def fesenko_member(f: TruncatedSeries, q_param: int) -> bool:
    """Support on exponents 1 + i*q_param only."""
    return all(c == 0 or (i - 1) % q_param == 0 for i, c in enumerate(f.coeffs, start=2))


def quotient_group(q: int, m: int, table_cap: int | None = None, **kwargs) -> FiniteGroup:
    """N_1/N_m, realized on series truncated at T^m."""
    if m < 2:
        raise ValueError("m must be at least 2")
    table_cap = default_table_cap() if table_cap is None else table_cap
    if q ** (m - 1) > table_cap:
        raise CapExceeded(table_cap, f"Nottingham quotient q={q}, m={m}")
    F = field(q)
    gens = [series(q, m, {i: b}).encode() for i in range(2, m + 1) for b in F.basis]
    return closure(
        gens,
        lambda a, b: compose(decode(q, m, a), decode(q, m, b)).encode(),
        lambda a: reverse(decode(q, m, a)).encode(),
        cap=q ** (m - 1), prime=F.p, table_cap=table_cap,
        identity=identity(q, m).encode(),
        decode=functools.partial(decode, q, m),
        name=f"nottingham:q={q},m={m}", **kwargs)


def fesenko_group(p: int, q_param: int, N: int, **kwargs) -> FiniteGroup:
    """Truncation of S_q: series T + sum a_i T^(1+i*q_param), a_i in F_p."""
    gens = [series(p, N, {e: 1}).encode() for e in range(1 + q_param, N + 1, q_param)]
    return closure(
        gens,
        lambda a, b: compose(decode(p, N, a), decode(p, N, b)).encode(),
        lambda a: reverse(decode(p, N, a)).encode(),
        prime=p, identity=identity(p, N).encode(),
        decode=functools.partial(decode, p, N),
        name=f"fesenko:p={p},q={q_param},N={N}", **kwargs)


def depth_subgroup(G: FiniteGroup, level: int) -> Subgroup:
    """Elements of depth >= level (the congruence subgroup N_level)."""
    return subgroup_from_members(G, [i for i, e in enumerate(G.elements) if depth(G.decode(e)) >= level])


def depth_filtration(G: FiniteGroup):
    from .filtration import Filtration

    N = G.decode(G.elements[0]).N
    return Filtration(G, [depth_subgroup(G, j) for j in range(1, N + 1)])


# text format ---------------------------------------------------------------

_TERM = re.compile(r"^\s*(?:(\[[^\]]*\]|\d+)\s*\*\s*)?T(?:\s*\^\s*(\d+))?\s*$")


def format_series(f: TruncatedSeries) -> str:
    F = f.field
    parts = ["T"]
    for i, c in enumerate(f.coeffs, start=2):
        if c:
            parts.append(f"{F.format(c)}*T^{i}")
    return " + ".join(parts)


def parse_series(text: str, q: int, N: int) -> TruncatedSeries:
    F = field(q)
    terms: dict[int, int] = {}
    linear = False
    for chunk in _split_terms(text):
        m = _TERM.match(chunk)
        if not m:
            raise ValueError(f"cannot parse term {chunk!r}")
        c = F.parse(m.group(1)) if m.group(1) else 1
        e = int(m.group(2)) if m.group(2) else 1
        if e == 1:
            if c != 1 or linear:
                raise ValueError("linear coefficient must be exactly 1")
            linear = True
            continue
        if e in terms:
            raise ValueError(f"repeated exponent {e}")
        if e > N:
            raise ValueError(f"exponent {e} exceeds truncation {N}")
        terms[e] = c
    if not linear:
        raise ValueError("series must start with T")
    return series(q, N, terms)


def _split_terms(text: str) -> list[str]:
    out, depth_, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth_ += 1
        elif ch == "]":
            depth_ -= 1
        if ch == "+" and depth_ == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out
