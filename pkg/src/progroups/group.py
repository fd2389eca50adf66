"""Finite p-group engine.

Groups are built by closure from generator encodings and a composition
oracle.  Elements are indexed breadth-first from the identity (index 0);
within one BFS level new elements are ordered by encoding.  Small groups
carry a full multiplication table, larger ones compute products through the
oracle and memoize them.

Products are written ``mul(a, b) = a*b``; commutators are ``a^-1 b^-1 a b``
and conjugates ``a^b = b^-1 a b``.
"""
from __future__ import annotations

import itertools
import math
import os
import random
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    GroupError,
    NotAbelian,
    NotAHomomorphism,
    NotNormal,
    OracleInconsistent,
)

DEFAULT_TABLE_CAP = 8192
DEFAULT_AUT_CAP = 512
DEFAULT_SEARCH_CAP = 4096
DEFAULT_AUT_COUNT = 50_000
TABLE_CAP_ENV = "PROGROUPS_TABLE_CAP"

# below this order the table is also kept as nested lists for fast scalar access
_ROWS_LIMIT = 1024


def default_table_cap() -> int:
    value = os.environ.get(TABLE_CAP_ENV)
    return int(value) if value else DEFAULT_TABLE_CAP


def prime_power_log(n: int) -> tuple[int, int] | None:
    """Return (p, e) with n == p**e, or None if n is not a prime power."""
    if n < 2:
        return None
    p = next(d for d in itertools.count(2) if n % d == 0)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return (p, e) if n == 1 else None


def int_log(n: int, p: int) -> int:
    e = 0
    while n > 1:
        if n % p:
            raise ValueError(f"{n} is not a power of {p}")
        n //= p
        e += 1
    return e


class FiniteGroup:
    """A finite p-group on canonical byte encodings.

    Do not construct directly; use :func:`closure` or one of the family
    constructors.
    """

    def __init__(self, elements, prime, generators, right, parent, compose,
                 inverse, table=None, decode=None, name=""):
        self.elements: list[bytes] = elements
        self.index: dict[bytes, int] = {e: i for i, e in enumerate(elements)}
        self.prime: int = prime
        self.identity = 0
        self.generators: tuple[int, ...] = tuple(generators)
        self.right = right          # right[a, j] = a * generators[j]
        self.parent = parent        # element b = parent[b][0] * generators[parent[b][1]]
        self.compose_oracle = compose
        self.inverse_oracle = inverse
        self.table = table
        self.decode = decode
        self.name = name
        self.symbols: dict[str, int] = {}
        self._rows = table.tolist() if table is not None and len(elements) <= _ROWS_LIMIT else None
        self._memo: dict[tuple[int, int], int] = {}
        self._lock = threading.Lock()
        self._inv = None
        self._orders = None
        if table is not None:
            self._inv = np.argmax(table == 0, axis=1)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def mode(self) -> str:
        return "table" if self.table is not None else "oracle"

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        label = self.name or "group"
        return f"<FiniteGroup {label} order={self.order} p={self.prime} {self.mode}>"

    def mul(self, a: int, b: int) -> int:
        if self._rows is not None:
            return self._rows[a][b]
        if self.table is not None:
            return int(self.table[a, b])
        key = (a, b)
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        c = self.index[self.compose_oracle(self.elements[a], self.elements[b])]
        with self._lock:
            self._memo[key] = c
        return c

    def inv(self, a: int) -> int:
        if self._inv is not None:
            return int(self._inv[a])
        return self.index[self.inverse_oracle(self.elements[a])]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        result = self.identity
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def comm(self, a: int, b: int) -> int:
        return self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))

    def conj(self, a: int, b: int) -> int:
        return self.mul(self.mul(self.inv(b), a), b)

    def mul_block(self, xs: np.ndarray, ys: Sequence[int]) -> np.ndarray:
        """All products x*y for x in xs, y in ys, flattened."""
        if self.table is not None:
            return self.table[np.asarray(xs)[:, None], np.asarray(ys, dtype=np.int64)[None, :]].ravel()
        return np.array([self.mul(int(x), int(y)) for x in xs for y in ys], dtype=np.int64)

    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            n = self.order
            orders = np.zeros(n, dtype=np.int64)
            orders[0] = 1
            if self.table is not None:
                xs = np.arange(n)
                cur = xs.copy()
                k = 1
                while (orders == 0).any():
                    cur = self.table[cur, xs]
                    k += 1
                    orders[(cur == 0) & (orders == 0)] = k
            else:
                for a in range(1, n):
                    k, cur = 1, a
                    while cur != 0:
                        cur = self.mul(cur, a)
                        k += 1
                    orders[a] = k
            self._orders = orders
        return self._orders

    def element_order(self, a: int) -> int:
        return int(self.element_orders()[a])

    def encode_hex(self, a: int) -> str:
        return self.elements[a].hex()

    def is_abelian(self) -> bool:
        gens = self.generators
        return all(self.mul(a, b) == self.mul(b, a) for a, b in itertools.combinations(gens, 2))

    def whole(self) -> Subgroup:
        return Subgroup(self, tuple(range(self.order)), self.generators)

    def trivial(self) -> Subgroup:
        return Subgroup(self, (0,), ())


def closure(generators: Iterable[bytes], compose: Callable[[bytes, bytes], bytes],
            inverse: Callable[[bytes], bytes], cap: int | None = None, *,
            prime: int | None = None, table_cap: int | None = None,
            identity: bytes | None = None, decode=None, name: str = "",
            spot_checks: int = 32, seed: int = 0) -> FiniteGroup:
    """Close ``generators`` under ``compose``.

    Raises CapExceeded once more than ``cap`` elements appear, and
    OracleInconsistent when associativity or the inverse oracle fails on a
    random spot check.
    """
    table_cap = default_table_cap() if table_cap is None else table_cap
    cap = table_cap if cap is None else cap
    if cap < 1:
        raise ValueError("cap must be positive")
    gens_in = list(generators)
    if identity is None:
        if not gens_in:
            raise GroupError("closure of an empty generator list needs an identity")
        identity = compose(gens_in[0], inverse(gens_in[0]))
    gens: list[bytes] = []
    for g in gens_in:
        if g != identity and g not in gens:
            gens.append(g)

    elements = [identity]
    index = {identity: 0}
    parent = [(-1, -1)]
    right_enc: list[list[bytes]] = []
    frontier = [0]
    while frontier:
        fresh: dict[bytes, tuple[int, int]] = {}
        for a in frontier:
            ea = elements[a]
            row = []
            for j, g in enumerate(gens):
                c = compose(ea, g)
                row.append(c)
                if c not in index and c not in fresh:
                    fresh[c] = (a, j)
            right_enc.append(row)
        frontier = []
        for c in sorted(fresh):
            if len(elements) >= cap:
                raise CapExceeded(cap)
            index[c] = len(elements)
            frontier.append(len(elements))
            elements.append(c)
            parent.append(fresh[c])
    n = len(elements)
    # right_enc rows were appended in BFS order, which is index order
    right = np.array([[index[c] for c in row] for row in right_enc], dtype=np.int64).reshape(n, len(gens))

    if prime is None:
        pe = prime_power_log(n)
        if pe is None:
            raise GroupError(f"order {n} is not a prime power")
        prime = pe[0]
    elif n > 1 and (prime_power_log(n) or (None,))[0] != prime:
        raise GroupError(f"order {n} is not a power of {prime}")

    table = None
    if n <= table_cap:
        dtype = np.int16 if n < 2 ** 15 else np.int32
        table = np.empty((n, n), dtype=dtype)
        table[:, 0] = np.arange(n)
        for b in range(1, n):
            pa, j = parent[b]
            table[:, b] = right[table[:, pa], j]

    G = FiniteGroup(elements, prime, [index[g] for g in gens], right, parent, compose, inverse,
                    table=table, decode=decode, name=name)
    _spot_check(G, spot_checks, seed)
    return G


def _spot_check(G: FiniteGroup, count: int, seed: int) -> None:
    if G.order == 1 or count <= 0:
        return
    rng = random.Random(seed)
    els = G.elements
    comp = G.compose_oracle
    for _ in range(count):
        a, b, c = (els[rng.randrange(G.order)] for _ in range(3))
        if comp(comp(a, b), c) != comp(a, comp(b, c)):
            raise OracleInconsistent(f"associativity fails on {a.hex()}, {b.hex()}, {c.hex()}")
        if G.table is not None and G.index[comp(a, b)] != G.mul(G.index[a], G.index[b]):
            raise OracleInconsistent("multiplication table disagrees with oracle")
        if comp(a, G.inverse_oracle(a)) != els[0]:
            raise OracleInconsistent(f"inverse oracle fails on {a.hex()}")


# ---------------------------------------------------------------------------
# subgroups

@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]
    gens: tuple[int, ...] = ()
    memberset: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(self.members)))
        object.__setattr__(self, "memberset", frozenset(self.members))

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return x in self.memberset

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and other.parent is self.parent
                and other.memberset == self.memberset)

    def __hash__(self):
        return hash(self.memberset)

    def __le__(self, other: Subgroup) -> bool:
        return self.memberset <= other.memberset

    def __repr__(self):
        return f"<Subgroup order={self.order} of {self.parent!r}>"

    def is_trivial(self) -> bool:
        return self.order == 1


def _close_mask(G: FiniteGroup, gens: Sequence[int], mask=None) -> np.ndarray:
    """Membership mask of the subgroup generated by gens (extending mask)."""
    gens = [int(g) for g in gens]
    if mask is None:
        mask = np.zeros(G.order, dtype=bool)
        mask[0] = True
        frontier = np.array([0])
    else:
        mask = mask.copy()
        frontier = np.nonzero(mask)[0]
    if not gens:
        return mask
    while frontier.size:
        prods = np.unique(G.mul_block(frontier, gens))
        new = prods[~mask[prods]]
        mask[new] = True
        frontier = new
    return mask


def _mask_subgroup(G, mask, gens) -> Subgroup:
    return Subgroup(G, tuple(int(i) for i in np.nonzero(mask)[0]), tuple(gens))


def subgroup_generated(G: FiniteGroup, seeds: Iterable[int]) -> Subgroup:
    gens = []
    for s in seeds:
        s = int(s)
        if not 0 <= s < G.order:
            raise IndexError(f"element index {s} out of range")
        if s != 0 and s not in gens:
            gens.append(s)
    return _mask_subgroup(G, _close_mask(G, gens), gens)


def subgroup_from_members(G: FiniteGroup, members: Iterable[int]) -> Subgroup:
    """Wrap a known subgroup member set, choosing a small generating set greedily."""
    members = sorted(int(m) for m in members)
    target = set(members)
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    gens = []
    count = 1
    for m in members:
        if count == len(target):
            break
        if not mask[m]:
            gens.append(m)
            mask = _close_mask(G, gens, mask)
            count = int(mask.sum())
    got = set(np.nonzero(mask)[0].tolist())
    if got != target:
        raise GroupError("member set is not a subgroup")
    return Subgroup(G, tuple(members), tuple(gens))


def is_normal(G: FiniteGroup, N: Subgroup) -> bool:
    return all(G.conj(n, g) in N for g in G.generators for n in N.gens)


def normal_closure(G: FiniteGroup, seeds: Iterable[int]) -> Subgroup:
    gens: list[int] = []
    for s in seeds:
        s = int(s)
        if s != 0 and s not in gens:
            gens.append(s)
    mask = _close_mask(G, gens)
    work = list(gens)
    while work:
        n = work.pop(0)
        for g in G.generators:
            c = G.conj(n, g)
            if not mask[c]:
                gens.append(c)
                work.append(c)
                mask = _close_mask(G, gens)
    return _mask_subgroup(G, mask, gens)


def derived_subgroup(G: FiniteGroup, H: Subgroup | None = None) -> Subgroup:
    """[H, H] for H normal in G (H defaults to G)."""
    gens = G.generators if H is None else H.gens
    return normal_closure(G, [G.comm(a, b) for a, b in itertools.combinations(gens, 2)])


def derived_series(G: FiniteGroup) -> list[Subgroup]:
    series = [G.whole()]
    while not series[-1].is_trivial():
        nxt = derived_subgroup(G, series[-1])
        if nxt == series[-1]:
            raise OracleInconsistent("derived series stabilized above the trivial subgroup")
        series.append(nxt)
    return series


def derived_length(G: FiniteGroup) -> int:
    return len(derived_series(G)) - 1


def lower_central_series(G: FiniteGroup) -> list[Subgroup]:
    series = [G.whole()]
    while not series[-1].is_trivial():
        cur = series[-1]
        nxt = normal_closure(G, [G.comm(h, g) for h in cur.gens for g in G.generators])
        if nxt == cur:
            raise OracleInconsistent("lower central series stabilized above the trivial subgroup")
        series.append(nxt)
    return series


def nilpotency_class(G: FiniteGroup) -> int:
    return len(lower_central_series(G)) - 1


def frattini_subgroup(G: FiniteGroup) -> Subgroup:
    p = G.prime or 1
    seeds = [G.comm(a, b) for a, b in itertools.combinations(G.generators, 2)]
    seeds += [G.pow(g, p) for g in G.generators]
    return normal_closure(G, seeds)


def as_group(H: Subgroup, name: str = "") -> FiniteGroup:
    """Realize a subgroup as a FiniteGroup on the parent's encodings."""
    G = H.parent
    idx, els = G.index, G.elements

    def compose(a, b):
        return els[G.mul(idx[a], idx[b])]

    def inverse(a):
        return els[G.inv(idx[a])]

    return closure([els[g] for g in H.gens], compose, inverse, cap=max(H.order, 1),
                   prime=G.prime, identity=els[0], decode=G.decode,
                   name=name or f"sub({G.name})", spot_checks=0,
                   table_cap=max(default_table_cap(), H.order) if G.table is not None else None)


# ---------------------------------------------------------------------------
# homomorphisms

@dataclass(frozen=True, eq=False)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    images: tuple[int, ...] = field(repr=False)

    def __call__(self, a: int) -> int:
        return self.images[a]

    def kernel(self) -> Subgroup:
        return subgroup_from_members(self.source, [i for i, v in enumerate(self.images) if v == 0])

    def image(self) -> Subgroup:
        return subgroup_from_members(self.target, set(self.images))

    def is_injective(self) -> bool:
        return len(set(self.images)) == self.source.order

    def is_bijective(self) -> bool:
        return self.is_injective() and self.source.order == self.target.order

    def __eq__(self, other):
        return (isinstance(other, GroupHom) and self.source is other.source
                and self.target is other.target and self.images == other.images)

    def __hash__(self):
        return hash(self.images)


@dataclass(frozen=True, eq=False)
class Automorphism(GroupHom):
    order: int = 1

    @property
    def group(self) -> FiniteGroup:
        return self.source

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.images))

    def inverse(self) -> Automorphism:
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images):
            inv[v] = i
        return Automorphism(self.source, self.target, tuple(inv), self.order)

    def then(self, other: Automorphism) -> Automorphism:
        """Apply self first, then other."""
        return as_automorphism(self.source, tuple(other.images[v] for v in self.images))


def permutation_order(images: Sequence[int]) -> int:
    seen = [False] * len(images)
    result = 1
    for start in range(len(images)):
        if seen[start]:
            continue
        length, cur = 0, start
        while not seen[cur]:
            seen[cur] = True
            cur = images[cur]
            length += 1
        result = math.lcm(result, length)
    return result


def as_automorphism(G: FiniteGroup, images: Sequence[int]) -> Automorphism:
    images = tuple(int(v) for v in images)
    if len(set(images)) != G.order:
        raise NotAHomomorphism("map is not bijective")
    return Automorphism(G, G, images, permutation_order(images))


def hom_from_images(source: FiniteGroup, target: FiniteGroup, images: Sequence[int]) -> GroupHom:
    """Extend generator images to a homomorphism, validating every relation.

    The extension follows the closure order of ``source``; the check
    ``f(a*g) == f(a)*f(g)`` over all elements a and generators g is complete.
    """
    images = [int(v) for v in images]
    if len(images) != len(source.generators):
        raise ValueError("need one image per source generator")
    n = source.order
    f = [0] * n
    for b in range(1, n):
        pa, j = source.parent[b]
        f[b] = target.mul(f[pa], images[j])
    fa = np.array(f, dtype=np.int64)
    for j, img in enumerate(images):
        lhs = fa[source.right[:, j]]
        if target.table is not None:
            rhs = target.table[fa, img].astype(np.int64)
        else:
            rhs = np.array([target.mul(x, img) for x in f], dtype=np.int64)
        bad = np.nonzero(lhs != rhs)[0]
        if bad.size:
            a = int(bad[0])
            raise NotAHomomorphism(
                f"relation fails at element {a} times generator {j}", witness=(a, j))
    return GroupHom(source, target, tuple(f))


def automorphism_from_images(G: FiniteGroup, images: Sequence[int]) -> Automorphism:
    hom = hom_from_images(G, G, images)
    if not hom.is_injective():
        raise NotAHomomorphism("images do not define a bijection")
    return as_automorphism(G, hom.images)


def identity_automorphism(G: FiniteGroup) -> Automorphism:
    return Automorphism(G, G, tuple(range(G.order)), 1)


def inversion_automorphism(G: FiniteGroup) -> Automorphism:
    """x -> x^-1; a homomorphism only when G is abelian."""
    sigma = automorphism_from_images(G, [G.inv(g) for g in G.generators])
    bad = next((x for x in range(G.order) if sigma.images[x] != G.inv(x)), None)
    if bad is not None:
        # generator images extend, but to a different map than inversion
        raise NotAHomomorphism("inversion is not a homomorphism", witness=bad)
    return sigma


def conjugation_automorphism(G: FiniteGroup, c: int) -> Automorphism:
    """x -> c^-1 x c."""
    return as_automorphism(G, [G.conj(x, c) for x in range(G.order)])


def fixed_subgroup(G: FiniteGroup, sigma: GroupHom) -> Subgroup:
    return subgroup_from_members(G, [i for i, v in enumerate(sigma.images) if v == i])


def maps_onto(sigma: GroupHom, N: Subgroup) -> bool:
    return {sigma.images[x] for x in N.members} == N.memberset


def is_characteristic(G: FiniteGroup, N: Subgroup, auts: Iterable[Automorphism]) -> bool:
    return all(maps_onto(s, N) for s in auts)


def induced_automorphism(sigma: Automorphism, proj: GroupHom) -> Automorphism:
    """The map induced by sigma on the quotient target of ``proj``.

    Raises NotWellDefined-style NotAHomomorphism if sigma moves the kernel.
    """
    Q = proj.target
    img = [-1] * Q.order
    for x in range(proj.source.order):
        c, d = proj.images[x], proj.images[sigma.images[x]]
        if img[c] == -1:
            img[c] = d
        elif img[c] != d:
            raise NotAHomomorphism("automorphism does not preserve the kernel", witness=x)
    return as_automorphism(Q, img)


# ---------------------------------------------------------------------------
# quotients and invariants

def quotient(G: FiniteGroup, N: Subgroup) -> tuple[FiniteGroup, GroupHom]:
    if not is_normal(G, N):
        raise NotNormal("subgroup is not normal")
    n = G.order
    label = np.full(n, -1, dtype=np.int64)
    reps: list[int] = []
    nm = np.array(N.members, dtype=np.int64)
    by_encoding = sorted(range(n), key=G.elements.__getitem__)
    for x in by_encoding:
        if label[x] == -1:
            coset = G.mul_block(np.array([x]), nm)
            label[coset] = len(reps)
            reps.append(x)
    rep_enc = [G.elements[r] for r in reps]
    enc_label = {e: k for k, e in enumerate(rep_enc)}
    els, idx = G.elements, G.index

    def compose(a, b):
        return rep_enc[label[G.mul(reps[enc_label[a]], reps[enc_label[b]])]]

    def inverse(a):
        return rep_enc[label[G.inv(reps[enc_label[a]])]]

    gens = [rep_enc[label[g]] for g in G.generators]
    Q = closure(gens, compose, inverse, cap=len(reps), prime=G.prime,
                identity=rep_enc[label[0]], decode=G.decode,
                name=f"{G.name}/N", spot_checks=0,
                table_cap=max(default_table_cap(), len(reps)) if G.table is not None else None)
    proj = tuple(Q.index[rep_enc[label[x]]] for x in range(n))
    return Q, GroupHom(G, Q, proj)


def abelian_invariants(G: FiniteGroup) -> list[int]:
    """Invariants of an abelian p-group, from counts of p^k-torsion elements."""
    if not G.is_abelian():
        raise NotAbelian(f"{G!r} is not abelian")
    if G.order == 1:
        return []
    p = G.prime
    orders = G.element_orders()
    emax = int_log(int(orders.max()), p)
    counts = [int((orders <= p ** k).sum()) for k in range(emax + 2)]
    at_least = [int_log(counts[k] // counts[k - 1], p) for k in range(1, emax + 2)]
    inv = []
    for k in range(emax, 0, -1):
        inv += [p ** k] * (at_least[k - 1] - at_least[k])
    return inv


def abelian_invariants_by_splitting(G: FiniteGroup) -> list[int]:
    """Second route: split off cyclic subgroups of maximal element order."""
    if not G.is_abelian():
        raise NotAbelian(f"{G!r} is not abelian")
    result = []
    while G.order > 1:
        orders = G.element_orders()
        x = int(np.argmax(orders))
        result.append(int(orders[x]))
        G, _ = quotient(G, subgroup_generated(G, [x]))
    return result


def exponent(G: FiniteGroup) -> int:
    return int(G.element_orders().max())


def frattini_rank(G: FiniteGroup) -> int:
    if G.order == 1:
        return 0
    return int_log(G.order // frattini_subgroup(G).order, G.prime)


# ---------------------------------------------------------------------------
# automorphisms and searches

def burnside_basis(G: FiniteGroup) -> list[int]:
    """A minimal generating set: elements independent modulo the Frattini subgroup."""
    phi = frattini_subgroup(G)
    mask = np.zeros(G.order, dtype=bool)
    mask[list(phi.members)] = True
    basis = []
    for x in range(G.order):
        if mask.all():
            break
        if not mask[x]:
            basis.append(x)
            mask = _close_mask(G, list(phi.gens) + basis)
    return basis


def _extend_partial(G: FiniteGroup, gens: Sequence[int], imgs: Sequence[int]) -> dict | None:
    """Homomorphism on <gens> sending gens to imgs, or None on conflict."""
    f = {0: 0}
    frontier = [0]
    mul = G.mul
    while frontier:
        nxt = []
        for a in frontier:
            fa = f[a]
            for g, h in zip(gens, imgs):
                b = mul(a, g)
                fb = mul(fa, h)
                old = f.get(b)
                if old is None:
                    f[b] = fb
                    nxt.append(b)
                elif old != fb:
                    return None
        frontier = nxt
    if len(set(f.values())) != len(f):
        return None
    return f


def enumerate_automorphisms(G: FiniteGroup, cap: int = DEFAULT_AUT_CAP,
                            candidates: Callable[[int, int], Iterable[int]] | None = None,
                            max_count: int = DEFAULT_AUT_COUNT) -> list[Automorphism]:
    """All automorphisms, by backtracking over images of a Burnside basis.

    ``candidates(j, x)`` may restrict the images tried for basis element x.
    Raises CapExceeded when more than ``max_count`` automorphisms turn up.
    """
    if G.order > cap:
        raise CapExceeded(cap, "automorphism enumeration")
    if G.table is None:
        raise CapExceeded(cap, "automorphism enumeration (needs a table)")
    if G.order == 1:
        return [identity_automorphism(G)]
    basis = burnside_basis(G)
    phi = frattini_subgroup(G)
    orders = G.element_orders()
    result: list[Automorphism] = []

    def options(j, used):
        x = basis[j]
        pool = candidates(j, x) if candidates is not None else range(G.order)
        span = _close_mask(G, list(phi.gens) + used)
        return [y for y in pool if orders[y] == orders[x] and not span[y]]

    def search(j, used):
        if j == len(basis):
            f = _extend_partial(G, basis, used)
            if f is not None and len(f) == G.order:
                if len(result) >= max_count:
                    raise CapExceeded(max_count, "automorphism count")
                result.append(as_automorphism(G, [f[i] for i in range(G.order)]))
            return
        for y in options(j, used):
            imgs = used + [y]
            if j + 1 < len(basis) and _extend_partial(G, basis[: j + 1], imgs) is None:
                continue
            search(j + 1, imgs)

    search(0, [])
    return result


def subgroup_search(G: FiniteGroup, target_order: int, abelian: bool | None = None,
                    exponent_: int | None = None, search_cap: int = DEFAULT_SEARCH_CAP
                    ) -> list[Subgroup]:
    """Subgroups of the given order generated by at most two elements."""
    if G.order > search_cap or G.table is None:
        raise CapExceeded(search_cap, "subgroup search")
    orders = G.element_orders()
    cyclic: dict[frozenset, int] = {}
    for x in range(G.order):
        if target_order % int(orders[x]):
            continue
        members = frozenset(int(v) for v in np.nonzero(_close_mask(G, [x]))[0])
        cyclic.setdefault(members, x)
    cyc = sorted(cyclic.items(), key=lambda kv: kv[1])
    found: dict[frozenset, tuple[int, ...]] = {}
    for members, x in cyc:
        if len(members) == target_order:
            found.setdefault(members, (x,) if x else ())
    for (m1, x), (m2, y) in itertools.combinations(cyc, 2):
        if y in m1 or x in m2:
            continue
        mask = _bounded_close(G, [x, y], target_order)
        if mask is None:
            continue
        members = frozenset(int(v) for v in np.nonzero(mask)[0])
        if len(members) == target_order:
            found.setdefault(members, (x, y))
    result = []
    for members, gens in found.items():
        H = Subgroup(G, tuple(members), gens)
        if abelian is not None or exponent_ is not None:
            sub_orders = orders[list(H.members)]
            if exponent_ is not None and int(sub_orders.max()) != exponent_:
                continue
            if abelian is not None:
                comm = all(G.mul(a, b) == G.mul(b, a) for a, b in itertools.combinations(gens, 2))
                if comm != abelian:
                    continue
        result.append(H)
    result.sort(key=lambda H: H.members)
    return result


def _bounded_close(G, gens, bound):
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    frontier = np.array([0])
    count = 1
    while frontier.size:
        prods = np.unique(G.mul_block(frontier, gens))
        new = prods[~mask[prods]]
        mask[new] = True
        count += new.size
        if count > bound:
            return None
        frontier = new
    return mask


# ---------------------------------------------------------------------------
# small concrete groups and dumps

def abelian_group(orders: Sequence[int], name: str = "", **kwargs) -> FiniteGroup:
    """Direct product of cyclic groups C_{n1} x C_{n2} x ..."""
    orders = [int(n) for n in orders]
    width = 2

    def pack(v):
        return b"".join(int(x).to_bytes(width, "big") for x in v)

    def unpack(e):
        return [int.from_bytes(e[i:i + width], "big") for i in range(0, len(e), width)]

    def compose(a, b):
        return pack((x + y) % n for x, y, n in zip(unpack(a), unpack(b), orders))

    def inverse(a):
        return pack((-x) % n for x, n in zip(unpack(a), orders))

    gens = [pack([1 if i == j else 0 for i in range(len(orders))]) for j in range(len(orders))]
    label = name or "x".join(f"C{n}" for n in orders)
    pe = prime_power_log(math.prod(orders))
    kwargs.setdefault("prime", pe[0] if pe else None)
    return closure(gens, compose, inverse, cap=max(math.prod(orders), 1),
                   identity=pack([0] * len(orders)), decode=unpack, name=label, **kwargs)


def cyclic_group(n: int, **kwargs) -> FiniteGroup:
    return abelian_group([n], **kwargs)


def group_dump(G: FiniteGroup, with_table: bool = False) -> dict:
    out = {
        "order": str(G.order),
        "prime": str(G.prime),
        "mode": G.mode,
        "generators": [G.encode_hex(g) for g in G.generators],
    }
    if with_table and G.table is not None:
        out["table"] = [[str(v) for v in row] for row in G.table.tolist()]
    return out
