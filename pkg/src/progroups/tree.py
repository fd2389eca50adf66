"""Automorphisms of the depth-d p-ary rooted tree as portraits.

A portrait stores, for each internal node, the rotation (a residue mod p)
applied to its children.  Nodes are listed level by level, each level in
lexicographic order of the path from the root.

``compose(a, b)`` is the automorphism "apply b, then a".
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import CapExceeded, MixedParameters
from .filtration import Filtration
from .group import FiniteGroup, closure, default_table_cap, subgroup_from_members


def node_count(p: int, d: int) -> int:
    return (p ** d - 1) // (p - 1)


def level_offset(p: int, level: int) -> int:
    return (p ** level - 1) // (p - 1)


@dataclass(frozen=True)
class TreePortrait:
    p: int
    d: int
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != node_count(self.p, self.d):
            raise ValueError("wrong number of labels")
        if any(not 0 <= x < self.p for x in self.labels):
            raise ValueError("labels must be reduced mod p")

    def label(self, level: int, position: int) -> int:
        return self.labels[level_offset(self.p, level) + position]

    def level(self, level: int) -> tuple[int, ...]:
        off = level_offset(self.p, level)
        return self.labels[off: off + self.p ** level]

    def apply(self, path: tuple[int, ...]) -> tuple[int, ...]:
        """Image of a vertex given as a path of child digits."""
        out = []
        pos = 0
        for level, x in enumerate(path):
            out.append((x + self.label(level, pos)) % self.p)
            pos = pos * self.p + x
        return tuple(out)

    def encode(self) -> bytes:
        return bytes(self.labels)

    def __str__(self):
        return format_portrait(self)


def identity(p: int, d: int) -> TreePortrait:
    return TreePortrait(p, d, (0,) * node_count(p, d))


def elementary(p: int, d: int, level: int, position: int, value: int = 1) -> TreePortrait:
    labels = [0] * node_count(p, d)
    labels[level_offset(p, level) + position] = value % p
    return TreePortrait(p, d, tuple(labels))


def _image_positions(p: int, d: int, labels) -> list[int]:
    """For every internal node (in label order), the position of its image within its level."""
    images = [0]
    level_images = [0]
    off = 0
    for _ in range(1, d):
        nxt = []
        for pos, img in enumerate(level_images):
            rot = labels[off + pos]
            base = img * p
            nxt.extend(base + (x + rot) % p for x in range(p))
        off += len(level_images)
        level_images = nxt
        images.extend(nxt)
    return images


def _level_starts(p: int, d: int) -> list[int]:
    return [level_offset(p, level) for level in range(d)]


def _compose_labels(p: int, d: int, la, lb) -> list[int]:
    images = _image_positions(p, d, lb)
    out = []
    for level, off in enumerate(_level_starts(p, d)):
        for k in range(off, off + p ** level):
            out.append((lb[k] + la[off + images[k]]) % p)
    return out


def _invert_labels(p: int, d: int, la) -> list[int]:
    images = _image_positions(p, d, la)
    out = [0] * len(la)
    for level, off in enumerate(_level_starts(p, d)):
        for k in range(off, off + p ** level):
            out[off + images[k]] = (-la[k]) % p
    return out


def compose(a: TreePortrait, b: TreePortrait) -> TreePortrait:
    """Apply b first, then a: the label at v is b's label at v plus a's label at b(v)."""
    if a.p != b.p or a.d != b.d:
        raise MixedParameters("portraits of different trees")
    return TreePortrait(a.p, a.d, tuple(_compose_labels(a.p, a.d, a.labels, b.labels)))


def invert(a: TreePortrait) -> TreePortrait:
    return TreePortrait(a.p, a.d, tuple(_invert_labels(a.p, a.d, a.labels)))


def activity_abelianization(a: TreePortrait) -> tuple[int, ...]:
    """Per-level label sums mod p; a homomorphism onto C_p^d."""
    return tuple(sum(a.level(i)) % a.p for i in range(a.d))


def decode(p: int, d: int, data: bytes) -> TreePortrait:
    return TreePortrait(p, d, tuple(data))


def full_group(p: int, d: int, table_cap: int | None = None, cap: int | None = None,
               **kwargs) -> FiniteGroup:
    """The iterated wreath product C_p wr ... wr C_p acting on the depth-d tree.

    ``cap`` above ``table_cap`` allows an oracle-backed group.
    """
    table_cap = default_table_cap() if table_cap is None else table_cap
    cap = table_cap if cap is None else cap
    size = p ** node_count(p, d)
    if size > cap:
        raise CapExceeded(cap, f"tree group p={p}, d={d}")
    gens = [elementary(p, d, level, pos).encode() for level in range(d) for pos in range(p ** level)]
    return closure(
        gens,
        lambda x, y: bytes(_compose_labels(p, d, x, y)),
        lambda x: bytes(_invert_labels(p, d, x)),
        cap=size, prime=p, table_cap=table_cap,
        identity=identity(p, d).encode(),
        decode=functools.partial(decode, p, d),
        name=f"tree:p={p},d={d}", **kwargs)


def level_stabilizer_filtration(G: FiniteGroup) -> Filtration:
    """St(0) >= St(1) >= ... >= St(d) = 1; St(i) has zero labels above level i."""
    sample = G.decode(G.elements[0])
    p, d = sample.p, sample.d
    chain = []
    for i in range(d + 1):
        cut = level_offset(p, i)
        chain.append(subgroup_from_members(G, [k for k, e in enumerate(G.elements) if not any(e[:cut])]))
    return Filtration(G, chain)


def format_portrait(a: TreePortrait) -> str:
    return "/".join(",".join(str(x) for x in a.level(i)) for i in range(a.d))


def parse_portrait(text: str, p: int) -> TreePortrait:
    levels = [chunk.strip() for chunk in text.strip().split("/")]
    labels = []
    for i, chunk in enumerate(levels):
        vals = [int(v) for v in chunk.split(",")]
        if len(vals) != p ** i:
            raise ValueError(f"level {i} needs {p ** i} labels, got {len(vals)}")
        if any(not 0 <= v < p for v in vals):
            raise ValueError("labels must be reduced mod p")
        labels += vals
    return TreePortrait(p, len(levels), tuple(labels))
