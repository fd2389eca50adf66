"""Finitely presented groups: words, parsing, coset enumeration, Magnus expansion.

Notation: ``a^b = b^-1 a b`` and ``(a, b) = a^-1 b^-1 a b``; ``(a, b, c)``
is left-normed, ``((a, b), c)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .errors import (
    LimitExceeded,
    PresentationSyntaxError,
    RelatorViolation,
    UndeclaredGenerator,
)
from .group import FiniteGroup, closure

# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    syllables: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def of(*pairs) -> Word:
        return Word(())._join(list(pairs))

    @staticmethod
    def gen(symbol: str, exp: int = 1) -> Word:
        return Word.of((symbol, exp))

    def _join(self, more) -> Word:
        out = list(self.syllables)
        for s, e in more:
            if e == 0:
                continue
            if out and out[-1][0] == s:
                e += out.pop()[1]
                if e == 0:
                    continue
            out.append((s, e))
        return Word(tuple(out))

    def __mul__(self, other: Word) -> Word:
        return self._join(other.syllables)

    def inverse(self) -> Word:
        return Word(tuple((s, -e) for s, e in reversed(self.syllables)))

    def __pow__(self, n: int) -> Word:
        base = self if n >= 0 else self.inverse()
        out = Word()
        for _ in range(abs(n)):
            out = out * base
        return out

    def conjugate(self, by: Word) -> Word:
        """self^by = by^-1 self by."""
        return by.inverse() * self * by

    def letters(self) -> list[tuple[str, int]]:
        """Expanded into (symbol, +-1) letters."""
        out = []
        for s, e in self.syllables:
            out += [(s, 1 if e > 0 else -1)] * abs(e)
        return out

    def symbols(self) -> list[str]:
        seen = []
        for s, _ in self.syllables:
            if s not in seen:
                seen.append(s)
        return seen

    def __len__(self):
        return sum(abs(e) for _, e in self.syllables)

    def __str__(self):
        if not self.syllables:
            return "1"
        return "*".join(s if e == 1 else f"{s}^{e}" for s, e in self.syllables)


def commutator(a: Word, b: Word) -> Word:
    return a.inverse() * b.inverse() * a * b


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        for r in self.relators:
            for s in r.symbols():
                if s not in self.generators:
                    raise UndeclaredGenerator(f"generator {s!r} is not declared")

    def __str__(self):
        return f"<{','.join(self.generators)} | {', '.join(str(r) for r in self.relators)}>"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<op>[-^*(),=<>|]))")


class _Parser:
    def __init__(self, text: str, offset: int = 0, declared=None):
        self.tokens = []
        pos = 0
        text_len = len(text.rstrip())
        while pos < text_len:
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise PresentationSyntaxError(f"unexpected character {text[pos]!r}", offset + pos)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), offset + m.start(kind)))
            pos = m.end()
        self.i = 0
        self.end = offset + len(text)
        self.declared = declared

    def peek(self, value=None):
        if self.i >= len(self.tokens):
            return None
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            return None
        return tok

    def take(self, value=None):
        tok = self.peek()
        if tok is None:
            raise PresentationSyntaxError(f"expected {value or 'more input'}", self.end)
        if value is not None and tok[1] != value:
            raise PresentationSyntaxError(f"expected {value!r}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def pos(self):
        tok = self.peek()
        return tok[2] if tok else self.end

    def word(self) -> Word:
        w = self.factor()
        while True:
            tok = self.peek()
            if tok is None:
                return w
            if tok[1] == "*":
                self.take()
                w = w * self.factor()
            elif tok[0] in ("ident", "int") or tok[1] == "(":
                w = w * self.factor()
            else:
                return w

    def factor(self) -> Word:
        w = self.primary()
        while self.peek("^"):
            self.take()
            tok = self.peek()
            if tok is None:
                raise PresentationSyntaxError("expected exponent", self.end)
            if tok[1] == "-" or tok[0] == "int":
                w = w ** self.integer()
            elif tok[0] == "ident":
                w = w.conjugate(self.primary())
            elif tok[1] == "(":
                # ^(n) is a power, ^(word) a conjugation
                save = self.i
                self.take("(")
                if self.peek("-") or (self.peek() and self.peek()[0] == "int"):
                    n = self.integer()
                    if self.peek(")"):
                        self.take(")")
                        w = w ** n
                        continue
                self.i = save
                self.take("(")
                by = self.word()
                self.take(")")
                w = w.conjugate(by)
            else:
                raise PresentationSyntaxError(f"bad exponent {tok[1]!r}", tok[2])
        return w

    def integer(self) -> int:
        sign = 1
        if self.peek("-"):
            self.take()
            sign = -1
        tok = self.take()
        if tok[0] != "int":
            raise PresentationSyntaxError(f"expected integer, found {tok[1]!r}", tok[2])
        return sign * int(tok[1])

    def primary(self) -> Word:
        tok = self.take()
        kind, value, pos = tok
        if kind == "ident":
            if self.declared is not None and value not in self.declared:
                raise UndeclaredGenerator(f"generator {value!r} is not declared (position {pos})")
            return Word.gen(value)
        if kind == "int":
            if value == "1":
                return Word()
            raise PresentationSyntaxError(f"unexpected integer {value}", pos)
        if value == "(":
            parts = [self.word()]
            while self.peek(","):
                self.take()
                parts.append(self.word())
            self.take(")")
            w = parts[0]
            for nxt in parts[1:]:
                w = commutator(w, nxt)
            return w
        raise PresentationSyntaxError(f"unexpected {value!r}", pos)

    def relation(self) -> Word:
        lhs = self.word()
        if self.peek("="):
            self.take()
            rhs = self.word()
            return lhs * rhs.inverse()
        return lhs

    def done(self):
        tok = self.peek()
        if tok is not None:
            raise PresentationSyntaxError(f"unexpected {tok[1]!r}", tok[2])


def parse_word(text: str, generators=None) -> Word:
    p = _Parser(text, declared=generators)
    w = p.word()
    p.done()
    return w


def parse_presentation(text: str) -> Presentation:
    """Parse ``<x,y | rel, rel>`` or the line-based file format."""
    stripped = text.lstrip()
    if stripped.startswith("<"):
        return _parse_angle(text)
    return _parse_file(text)


def _parse_angle(text: str) -> Presentation:
    p = _Parser(text)
    p.take("<")
    gens = []
    while not p.peek("|"):
        tok = p.take()
        if tok[0] != "ident":
            raise PresentationSyntaxError(f"expected generator name, found {tok[1]!r}", tok[2])
        gens.append(tok[1])
        if not p.peek("|"):
            p.take(",")
    p.take("|")
    p.declared = gens
    rels = []
    while not p.peek(">"):
        rels.append(p.relation())
        if not p.peek(">"):
            p.take(",")
    p.take(">")
    p.done()
    return Presentation(tuple(gens), tuple(rels))


def _parse_file(text: str) -> Presentation:
    gens = None
    rels = []
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0]
        start = offset
        offset += len(line)
        if not body.strip():
            continue
        if gens is None:
            m = re.match(r"\s*gens\s*:(.*)$", body.rstrip("\n"))
            if not m:
                raise PresentationSyntaxError("first line must be 'gens: ...'", start)
            gens = [g.strip() for g in m.group(1).split(",") if g.strip()]
            for g in gens:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", g):
                    raise PresentationSyntaxError(f"bad generator name {g!r}", start)
            continue
        p = _Parser(body.rstrip("\n"), offset=start, declared=gens)
        rels.append(p.relation())
        p.done()
    if gens is None:
        raise PresentationSyntaxError("missing 'gens:' line", 0)
    return Presentation(tuple(gens), tuple(rels))


# ---------------------------------------------------------------------------
# coset enumeration


@dataclass(frozen=True)
class CosetTable:
    """Closed coset table; row 0 is the subgroup coset.

    Column 2*j is generator j, column 2*j+1 its inverse.
    """

    generators: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]
    subgroup: tuple[Word, ...] = ()
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def index(self) -> int:
        return len(self.rows)

    def column(self, symbol: str, sign: int = 1) -> int:
        return 2 * self.generators.index(symbol) + (0 if sign > 0 else 1)

    def trace(self, coset: int, word: Word) -> int:
        for s, e in word.letters():
            coset = self.rows[coset][self.column(s, e)]
        return coset

    def permutation(self, symbol: str) -> tuple[int, ...]:
        col = self.column(symbol)
        return tuple(row[col] for row in self.rows)


def _columns(gens, word: Word) -> list[int]:
    return [2 * gens.index(s) + (0 if e > 0 else 1) for s, e in word.letters()]


def todd_coxeter(P: Presentation, subgroup_words=(), max_cosets: int = 100_000,
                 max_steps: int = 1_000_000) -> CosetTable:
    """HLT coset enumeration with coincidence processing, then standardization."""
    if max_cosets < 1 or max_steps < 1:
        raise ValueError("limits must be positive")
    gens = list(P.generators)
    ncols = 2 * len(gens)
    rels = [_columns(gens, r) for r in P.relators if len(r)]
    subs = [_columns(gens, w) for w in subgroup_words]
    table: list[list[int | None]] = [[None] * ncols]
    parent = [0]

    def find(c):
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def define(c, x):
        if len(table) >= max_cosets:
            raise LimitExceeded(f"coset table exceeded {max_cosets} cosets")
        new = len(table)
        table.append([None] * ncols)
        parent.append(new)
        table[c][x] = new
        table[new][x ^ 1] = c

    def merge(a, b, queue):
        a, b = find(a), find(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        parent[b] = a
        queue.append(b)

    def coincidence(a, b):
        queue = []
        merge(a, b, queue)
        k = 0
        while k < len(queue):
            e = queue[k]
            k += 1
            for x in range(ncols):
                f = table[e][x]
                if f is None:
                    continue
                if table[f][x ^ 1] == e:
                    table[f][x ^ 1] = None
                e1, f1 = find(e), find(f)
                if table[e1][x] is not None:
                    merge(f1, table[e1][x], queue)
                elif table[f1][x ^ 1] is not None:
                    merge(e1, table[f1][x ^ 1], queue)
                else:
                    table[e1][x] = f1
                    table[f1][x ^ 1] = e1

    def scan_and_fill(c, w):
        f, b = c, c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] is not None:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][w[j] ^ 1] is not None:
                b = table[b][w[j] ^ 1]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][w[i] ^ 1] = f
                return
            define(f, w[i])

    for w in subs:
        scan_and_fill(0, w)
    c = 0
    steps = 0
    while c < len(table):
        steps += 1
        if steps > max_steps:
            raise LimitExceeded(f"coset enumeration exceeded {max_steps} steps")
        if find(c) == c:
            for w in rels:
                scan_and_fill(c, w)
                if find(c) != c:
                    break
            if find(c) == c:
                for x in range(ncols):
                    if table[c][x] is None:
                        define(c, x)
        c += 1

    # standardize: renumber live cosets in order of first appearance
    order = [0]
    number = {0: 0}
    k = 0
    while k < len(order):
        row = table[order[k]]
        for x in range(ncols):
            d = find(row[x])
            if d not in number:
                number[d] = len(order)
                order.append(d)
        k += 1
    rows = tuple(tuple(number[find(table[c][x])] for x in range(ncols)) for c in order)
    result = CosetTable(tuple(gens), rows, tuple(subgroup_words),
                        {"defined": len(table), "steps": steps})
    _verify_table(result, P)
    return result


def _verify_table(T: CosetTable, P: Presentation) -> None:
    for c, row in enumerate(T.rows):
        for x, d in enumerate(row):
            if T.rows[d][x ^ 1] != c:
                raise RelatorViolation(f"table is not a permutation at coset {c}")
    for r in P.relators:
        for c in range(T.index):
            if T.trace(c, r) != c:
                raise RelatorViolation(f"relator {r} fails at coset {c}")
    for w in T.subgroup:
        if T.trace(0, w) != 0:
            raise RelatorViolation(f"subgroup word {w} moves the base coset")


def _spanning_words(T: CosetTable) -> list[list[int]]:
    """For each coset c, columns of a word carrying coset 0 to c."""
    words: list[list[int] | None] = [None] * T.index
    words[0] = []
    queue = [0]
    ncols = 2 * len(T.generators)
    for c in queue:
        for x in range(ncols):
            d = T.rows[c][x]
            if words[d] is None:
                words[d] = words[c] + [x]
                queue.append(d)
    return words


def regular_group(T: CosetTable, P: Presentation | None = None, **kwargs) -> FiniteGroup:
    """The group acting regularly on the cosets of the trivial subgroup.

    Element c is the group element carrying coset 0 to coset c.
    """
    if any(len(w) for w in T.subgroup):
        raise ValueError("regular_group needs a table over the trivial subgroup")
    words = _spanning_words(T)
    width = max(1, ((T.index - 1).bit_length() + 7) // 8)
    rows = T.rows

    def enc(c):
        return c.to_bytes(width, "big")

    def compose(a, b):
        c = int.from_bytes(a, "big")
        for x in words[int.from_bytes(b, "big")]:
            c = rows[c][x]
        return enc(c)

    def inverse(a):
        c = 0
        for x in reversed(words[int.from_bytes(a, "big")]):
            c = rows[c][x ^ 1]
        return enc(c)

    gens = [enc(rows[0][2 * j]) for j in range(len(T.generators))]
    G = closure(gens, compose, inverse, cap=T.index, identity=enc(0),
                decode=lambda e: int.from_bytes(e, "big"), name="regular", **kwargs)
    G.symbols = {s: G.index[enc(rows[0][2 * j])] for j, s in enumerate(T.generators)}
    if P is not None:
        for r in P.relators:
            if evaluate(G, r) != 0:
                raise RelatorViolation(f"relator {r} is not trivial in the regular group")
    return G


def evaluate(G: FiniteGroup, w: Word, symbols: dict | None = None) -> int:
    """Evaluate a word on generator elements of G (default: ``G.symbols``)."""
    symbols = G.symbols if symbols is None else symbols
    out = 0
    for s, e in w.syllables:
        out = G.mul(out, G.pow(symbols[s], e))
    return out


def permutation_closure_order(T: CosetTable, **kwargs) -> int:
    """Order of the permutation group generated by the generators' coset actions.

    Independent of :func:`regular_group`: closes permutations directly.
    """
    n = T.index
    width = max(1, ((n - 1).bit_length() + 7) // 8)

    def pack(perm):
        return b"".join(v.to_bytes(width, "big") for v in perm)

    def unpack(data):
        return [int.from_bytes(data[i:i + width], "big") for i in range(0, len(data), width)]

    def compose(a, b):
        pa, pb = unpack(a), unpack(b)
        return pack(pb[v] for v in pa)

    def inverse(a):
        pa = unpack(a)
        out = [0] * n
        for i, v in enumerate(pa):
            out[v] = i
        return pack(out)

    gens = [pack(T.permutation(s)) for s in T.generators]
    G = closure(gens, compose, inverse, cap=max(n, 1) ** 2, identity=pack(range(n)),
                table_cap=0, spot_checks=8, **kwargs)
    return G.order


# ---------------------------------------------------------------------------
# Magnus expansion


@dataclass(frozen=True)
class NoncommutativePolynomial:
    """Truncated element of F_p<<X_1..X_n>>; monomials are tuples of variable indices."""

    p: int
    D: int
    terms: dict  # tuple[int, ...] -> nonzero residue

    def __mul__(self, other: NoncommutativePolynomial) -> NoncommutativePolynomial:
        out: dict = {}
        p, D = self.p, self.D
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if len(m1) + len(m2) > D:
                    continue
                m = m1 + m2
                out[m] = (out.get(m, 0) + c1 * c2) % p
        return NoncommutativePolynomial(p, D, {m: c for m, c in out.items() if c})

    def __eq__(self, other):
        return (isinstance(other, NoncommutativePolynomial) and self.p == other.p
                and self.D == other.D and self.terms == other.terms)

    def __hash__(self):
        return hash((self.p, self.D, frozenset(self.terms.items())))

    def min_degree(self) -> int | None:
        """Least degree of a nonconstant term, or None."""
        degrees = [len(m) for m in self.terms if m]
        return min(degrees) if degrees else None

    def coefficient(self, *monomial: int) -> int:
        return self.terms.get(tuple(monomial), 0)

    def format(self, names) -> str:
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            mono = "".join(names[i] for i in m) or "1"
            c = self.terms[m]
            parts.append(mono if c == 1 and m else f"{c}*{mono}" if m else str(c))
        return " + ".join(parts) or "0"


def one(p: int, D: int) -> NoncommutativePolynomial:
    return NoncommutativePolynomial(p, D, {(): 1})


def gen_binomial(e: int, k: int) -> int:
    """Binomial coefficient C(e, k) for any integer e."""
    if e >= 0:
        return math.comb(e, k)
    return (-1) ** k * math.comb(-e + k - 1, k)


def magnus_expand(w: Word, p: int, D: int, symbols=None) -> NoncommutativePolynomial:
    """Image of w under x_i -> 1 + X_i in F_p<<X>> truncated above degree D."""
    if D < 1:
        raise ValueError("D must be at least 1")
    symbols = list(symbols) if symbols is not None else sorted(w.symbols())
    result = one(p, D)
    for s, e in w.syllables:
        i = symbols.index(s)
        factor = {}
        for k in range(D + 1):
            c = gen_binomial(e, k) % p
            if c:
                factor[(i,) * k] = c
        result = result * NoncommutativePolynomial(p, D, factor)
    return result


@dataclass(frozen=True)
class BeyondCap:
    """Depth sentinel: every term up to the cap vanished."""

    cap: int

    def __str__(self):
        return f">{self.cap}"

    def __ge__(self, n):
        if isinstance(n, int) and n <= self.cap + 1:
            return True
        return NotImplemented

    def __gt__(self, n):
        if isinstance(n, int) and n <= self.cap:
            return True
        return NotImplemented


def zassenhaus_depth(w: Word, p: int, D_cap: int = 6, symbols=None):
    """Least degree of a nonconstant Magnus term mod p; BeyondCap if none up to D_cap."""
    if D_cap < 2:
        raise ValueError("D_cap must be at least 2")
    d = magnus_expand(w, p, D_cap, symbols).min_degree()
    return BeyondCap(D_cap) if d is None else d


def random_word(rng, symbols, length: int) -> Word:
    return Word.of(*[(rng.choice(symbols), rng.choice((-1, 1))) for _ in range(length)])


SCHOLZ_TAUSSKY = "<x,y | y^((x,y)) = y^-2, x^3 = y^3>"
