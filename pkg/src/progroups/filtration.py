"""Descending normal chains G = G_1 >= G_2 >= ... >= G_L = 1 and maps between
their consecutive factors G_{i-1}/G_i -> G_i/G_{i+1}.

Levels are 1-based to match the usual indexing: ``chain[0]`` is G_1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import NotAHomomorphism, NotIso, NotWellDefined
from .group import (
    Automorphism,
    FiniteGroup,
    GroupHom,
    Subgroup,
    as_automorphism,
    as_group,
    hom_from_images,
    induced_automorphism,
    quotient,
    subgroup_from_members,
)


@dataclass(eq=False)
class Factor:
    group: FiniteGroup          # G_i / G_{i+1}
    label: dict[int, int]       # element of G_i (index in G) -> element of the factor
    reps: list[int]             # factor element -> some preimage in G


@dataclass(eq=False)
class Filtration:
    group: FiniteGroup
    chain: list[Subgroup]
    _quotients: dict = field(default_factory=dict, repr=False)
    _factors: dict = field(default_factory=dict, repr=False)

    @property
    def length(self) -> int:
        return len(self.chain)

    def term(self, i: int) -> Subgroup:
        return self.chain[i - 1]

    def orders(self) -> list[int]:
        return [H.order for H in self.chain]

    def quotient(self, i: int) -> tuple[FiniteGroup, GroupHom]:
        """G/G_i with its projection."""
        if i not in self._quotients:
            self._quotients[i] = quotient(self.group, self.term(i))
        return self._quotients[i]

    def factor(self, i: int) -> Factor:
        """G_i/G_{i+1}, for 1 <= i < length."""
        if i not in self._factors:
            G = self.group
            top, bottom = self.term(i), self.term(i + 1)
            H = as_group(top, name=f"{G.name}[G{i}]")
            inner = subgroup_from_members(H, [H.index[G.elements[x]] for x in bottom.members])
            Q, proj = quotient(H, inner)
            label = {x: proj.images[H.index[G.elements[x]]] for x in top.members}
            reps = [-1] * Q.order
            for x in top.members:
                if reps[label[x]] == -1:
                    reps[label[x]] = x
            self._factors[i] = Factor(Q, label, reps)
        return self._factors[i]

    def quotient_automorphism(self, sigma: Automorphism, i: int) -> Automorphism:
        return induced_automorphism(sigma, self.quotient(i)[1])

    def factor_automorphism(self, sigma: Automorphism, i: int) -> Automorphism:
        fac = self.factor(i)
        img = [-1] * fac.group.order
        for x, c in fac.label.items():
            d = fac.label.get(sigma.images[x])
            if d is None:
                raise NotWellDefined(f"automorphism moves G_{i}", witness=x)
            if img[c] == -1:
                img[c] = d
            elif img[c] != d:
                raise NotWellDefined(f"automorphism moves G_{i + 1}", witness=x)
        return as_automorphism(fac.group, img)


@dataclass(eq=False)
class SimilarityStructure:
    filtration: Filtration
    maps: dict[int, GroupHom]   # i -> phi_i : G_{i-1}/G_i -> G_i/G_{i+1}, 2 <= i < length
    name: str = ""


def induced_factor_map(filt: Filtration, i: int, fn: Callable[[int], int],
                       strict: bool = True) -> GroupHom:
    """The map G_{i-1}/G_i -> G_i/G_{i+1} induced by an element map ``fn``.

    Always checks that the map is well defined and a homomorphism; with
    ``strict`` also that it is bijective.
    """
    src, dst = filt.factor(i - 1), filt.factor(i)
    img = [-1] * src.group.order
    for x, c in src.label.items():
        y = fn(x)
        d = dst.label.get(y)
        if d is None:
            raise NotWellDefined(f"phi_{i} sends element {x} outside G_{i}", witness=x)
        if img[c] == -1:
            img[c] = d
        elif img[c] != d:
            raise NotWellDefined(f"phi_{i} is not constant on the coset of {x}", witness=c)
    hom = hom_from_images(src.group, dst.group, [img[g] for g in src.group.generators])
    if list(hom.images) != img:
        raise NotAHomomorphism(f"phi_{i} is not a homomorphism")
    if strict and not hom.is_bijective():
        bad = next((c for c in range(src.group.order) if c and img[c] == 0), None)
        raise NotIso(f"phi_{i} is not an isomorphism", witness=bad)
    return hom


def similarity_from_element_map(filt: Filtration, fn: Callable[[int], int], strict: bool = True,
                                name: str = "") -> SimilarityStructure:
    maps = {i: induced_factor_map(filt, i, fn, strict) for i in range(2, filt.length)}
    return SimilarityStructure(filt, maps, name)


def power_similarity(filt: Filtration, strict: bool = True) -> SimilarityStructure:
    G = filt.group
    p = G.prime
    return similarity_from_element_map(filt, lambda x: G.pow(x, p), strict, name=f"x -> x^{p}")


def power_filtration(G: FiniteGroup) -> Filtration:
    """G >= G^p >= G^(p^2) >= ... (subgroups generated by p^k-th powers)."""
    from .group import subgroup_generated

    chain = [G.whole()]
    e = G.prime
    while not chain[-1].is_trivial():
        chain.append(subgroup_generated(G, {G.pow(x, e) for x in range(G.order)}))
        e *= G.prime
    return Filtration(G, chain)
