import itertools
import random

import pytest

from progroups import matrices as mx
from progroups.checks import check_self_similarity, default_automorphisms
from progroups.errors import BadPrime, CapExceeded
from progroups.group import abelian_invariants, exponent, nilpotency_class


def brute_kernel(kind, p, k):
    """Every matrix I + tA with determinant 1, by direct enumeration."""
    R = mx.ring(kind, p, k)
    if kind == mx.ZP:
        entries = [p * a for a in range(p ** (k - 1))]
    else:
        entries = [(0,) + c for c in itertools.product(range(p), repeat=k - 1)]
    out = set()
    for a, b, c, d in itertools.product(entries, repeat=4):
        M = mx.UnimodularMatrix(kind, p, k, (R.add(R.one, a), b, c, R.add(R.one, d)))
        if M.det() == R.one:
            out.add(M.encode())
    return out


@pytest.mark.parametrize("kind", [mx.ZP, mx.LAMBDA])
@pytest.mark.parametrize("p,k", [(3, 1), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_kernel_orders(kind, p, k):
    G = mx.kernel_group(kind, p, k)
    assert G.order == p ** (3 * (k - 1))


@pytest.mark.parametrize("kind", [mx.ZP, mx.LAMBDA])
@pytest.mark.parametrize("p,k", [(3, 2), (3, 3), (5, 2)])
def test_kernel_matches_enumeration(kind, p, k):
    G = mx.kernel_group(kind, p, k)
    assert set(G.elements) == brute_kernel(kind, p, k)


def test_orders_from_sl2_sizes():
    # |SL2(Z/p^k)| = p^(3k-2) (p^2 - 1); |SL2(F_p)| = p (p^2 - 1)
    for p, k in [(3, 2), (3, 3), (5, 2)]:
        big = p ** (3 * k - 2) * (p * p - 1)
        small = p * (p * p - 1)
        assert mx.kernel_group_zp(p, k).order == big // small


def test_bad_primes_and_caps():
    with pytest.raises(BadPrime):
        mx.kernel_group_zp(2, 3)
    with pytest.raises(BadPrime):
        mx.kernel_group_lambda(9, 2)
    with pytest.raises(CapExceeded):
        mx.kernel_group_zp(3, 4)


def test_lambda_level_two_is_elementary():
    G = mx.kernel_group_lambda(3, 2)
    assert G.is_abelian() and exponent(G) == 3
    assert abelian_invariants(G) == [3, 3, 3]


def test_zp_structure():
    G = mx.kernel_group_zp(3, 3)
    assert nilpotency_class(G) == 2
    assert exponent(G) == 9
    assert exponent(mx.kernel_group_lambda(3, 3)) == 3


@pytest.mark.parametrize("kind", [mx.ZP, mx.LAMBDA])
def test_determinants_and_levels(kind):
    G = mx.kernel_group(kind, 3, 3)
    for e in G.elements:
        M = G.decode(e)
        assert M.det() == M.ring.one
        assert M.level() >= 1
    assert G.decode(G.elements[0]).level() == 3


@pytest.mark.parametrize("kind", [mx.ZP, mx.LAMBDA])
def test_congruence_filtration(kind):
    G = mx.kernel_group(kind, 3, 3)
    filt = mx.congruence_filtration(G)
    assert filt.orders() == [729, 27, 1]
    for i in range(1, filt.length):
        assert abelian_invariants(filt.factor(i).group) == [3, 3, 3]
    assert mx.congruence_filtration(mx.kernel_group(kind, 3, 2)).orders() == [27, 1]


@pytest.mark.parametrize("kind", [mx.ZP, mx.LAMBDA])
def test_commutator_depth(kind):
    G = mx.kernel_group(kind, 3, 3)
    levels = [G.decode(e).level() for e in G.elements]
    rng = random.Random(5)
    for _ in range(2000):
        a, b = rng.randrange(G.order), rng.randrange(G.order)
        want = min(levels[a] + levels[b], 3)
        assert levels[G.comm(a, b)] >= want


def test_growth_law():
    for kind in (mx.ZP, mx.LAMBDA):
        filt = mx.congruence_filtration(mx.kernel_group(kind, 3, 3))
        n = filt.group.order
        base = n // filt.term(2).order
        for i in range(2, filt.length + 1):
            assert n // filt.term(i).order == base ** (i - 1)


def test_p_power_similarity():
    G = mx.kernel_group_zp(3, 3)
    sim = mx.p_power_similarity(G)
    phi = sim.maps[2]
    assert phi.source.order == phi.target.order == 27
    assert phi.is_bijective()
    assert phi(0) == 0
    # equivariance against conjugation by diag(1,-1), checked coset by coset
    sigma = mx.ambient_conjugation(G, mx.matrix(mx.ZP, 3, 3, ((1, 0), (0, -1))))
    lo = sim.filtration.factor_automorphism(sigma, 1)
    hi = sim.filtration.factor_automorphism(sigma, 2)
    for c in range(27):
        assert phi(lo(c)) == hi(phi(c))


def test_p_power_map_directly():
    G = mx.kernel_group_zp(3, 3)
    sim = mx.p_power_similarity(G)
    fac1, fac2 = sim.filtration.factor(1), sim.filtration.factor(2)
    for x in range(G.order):
        assert sim.maps[2](fac1.label[x]) == fac2.label[G.pow(x, 3)]


def test_t_map_similarity():
    G = mx.kernel_group_lambda(3, 3)
    sim = mx.t_map_similarity(G)
    phi = sim.maps[2]
    assert phi.is_bijective() and phi.source.order == 27
    assert phi(0) == 0
    mats = [G.decode(e) for e in G.elements]
    fac1, fac2 = sim.filtration.factor(1), sim.filtration.factor(2)
    for x in range(G.order):
        y = fac2.reps[phi(fac1.label[x])]
        assert mats[y].leading_term(2) == mats[x].leading_term(1)
    # equivariance against a lifted SL2(F_3) element
    sigma = mx.ambient_conjugation(G, mx.matrix(mx.LAMBDA, 3, 3, ((1, 1), (0, 1))))
    lo = sim.filtration.factor_automorphism(sigma, 1)
    hi = sim.filtration.factor_automorphism(sigma, 2)
    assert all(phi(lo(c)) == hi(phi(c)) for c in range(27))


@pytest.mark.parametrize("kind,k", [(mx.ZP, 2), (mx.LAMBDA, 2)])
def test_certificate_with_enumerated_automorphisms(kind, k):
    G = mx.kernel_group(kind, 3, k)
    sim = mx.p_power_similarity(G)
    rep = check_self_similarity(G, sim)
    assert rep.regime.startswith("not needed")
    assert rep.passed
    # elementary abelian of rank 3: the full automorphism group is GL_3(F_3)
    auts, regime = default_automorphisms(G, None)
    assert regime == "enumerated" and len(auts) == 11232
    assert check_self_similarity(G, sim, auts).passed


def test_certificate_with_conjugations():
    G = mx.kernel_group_zp(3, 3)
    rep = check_self_similarity(G, mx.p_power_similarity(G), mx.standard_conjugations(G))
    assert rep.passed, rep.as_dict()


def test_text_and_encoding():
    M = mx.matrix(mx.ZP, 3, 2, ((4, 3), (0, 7)))
    assert str(M) == "[[4, 3], [0, 7]]"
    assert mx.decode(mx.ZP, 3, 2, M.encode()) == M
    L = mx.matrix(mx.LAMBDA, 3, 3, (([1, 1], [0, 2]), (0, 1)))
    assert mx.decode(mx.LAMBDA, 3, 3, L.encode()) == L
    assert (L @ L.inverse()) == mx.matrix(mx.LAMBDA, 3, 3, ((1, 0), (0, 1)))
