"""Small finite fields F_q with table arithmetic.

An element of F_{p^f} is an integer 0..q-1 whose base-p digits are the
coefficients (constant term first) of a polynomial reduced modulo a fixed
irreducible.
"""
from __future__ import annotations

from functools import lru_cache

from .group import prime_power_log

# Conway polynomials, coefficients constant term first, monic leading term implied
IRREDUCIBLES = {
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (3, 2): (2, 2),
    (3, 3): (1, 2, 0),
    (5, 2): (2, 4),
    (7, 2): (3, 6),
}


class GF:
    def __init__(self, q: int):
        pe = prime_power_log(q)
        if pe is None:
            raise ValueError(f"{q} is not a prime power")
        self.q = q
        self.p, self.f = pe
        if self.f > 1 and pe not in IRREDUCIBLES:
            raise ValueError(f"no irreducible polynomial recorded for q={q}")
        self.modulus = IRREDUCIBLES.get(pe, ())
        p, f = self.p, self.f
        digits = [self._digits(a) for a in range(q)]
        self.add = [[self._undigits([(x + y) % p for x, y in zip(da, db)]) for db in digits] for da in digits]
        self.neg = [self._undigits([(-x) % p for x in da]) for da in digits]
        self.mul = [[self._polymul(da, db) for db in digits] for da in digits]
        self.inv = [0] * q
        for a in range(1, q):
            self.inv[a] = next(b for b in range(1, q) if self.mul[a][b] == 1)
        # F_p-basis: 1, alpha, alpha^2, ...
        self.basis = [p ** i for i in range(f)]

    def _digits(self, a):
        out = []
        for _ in range(self.f):
            out.append(a % self.p)
            a //= self.p
        return out

    def _undigits(self, ds):
        a = 0
        for d in reversed(ds):
            a = a * self.p + d
        return a

    def _polymul(self, da, db):
        p, f = self.p, self.f
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(da):
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
        # reduce using x^f = -(c0 + c1 x + ... )
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for i, m in enumerate(self.modulus):
                    prod[k - f + i] = (prod[k - f + i] - c * m) % p
        return self._undigits(prod[:f])

    @property
    def is_prime(self) -> bool:
        return self.f == 1

    def sub(self, a, b):
        return self.add[a][self.neg[b]]

    def format(self, a: int) -> str:
        if self.is_prime:
            return str(a)
        return "[" + ",".join(str(d) for d in self._digits(a)) + "]"

    def parse(self, text: str) -> int:
        text = text.strip()
        if text.startswith("["):
            if not text.endswith("]"):
                raise ValueError(f"bad field element {text!r}")
            ds = [int(t) for t in text[1:-1].split(",")]
            if len(ds) > self.f or any(not 0 <= d < self.p for d in ds):
                raise ValueError(f"bad field element {text!r}")
            return self._undigits(ds + [0] * (self.f - len(ds)))
        a = int(text)
        if self.is_prime:
            return a % self.p
        if not 0 <= a < self.p:
            raise ValueError(f"integer {a} is not in the prime subfield")
        return a

    def describe(self) -> str:
        if self.is_prime:
            return f"F_{self.p}"
        terms = [f"x^{self.f}"] + [f"{c}*x^{i}" for i, c in reversed(list(enumerate(self.modulus))) if c]
        return f"F_{self.q} = F_{self.p}[x]/({' + '.join(terms)})"


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)
