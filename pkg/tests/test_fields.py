import pytest
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem

from progroups.fields import IRREDUCIBLES, field


@pytest.mark.parametrize("key", sorted(IRREDUCIBLES))
def test_modulus_irreducible(key):
    p, f = key
    poly = [1] + list(reversed(IRREDUCIBLES[key]))  # sympy wants leading term first
    assert gf_irreducible_p(poly, p, ZZ)


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27, 49])
def test_multiplication_matches_polynomial_arithmetic(q):
    F = field(q)
    p, f = F.p, F.f
    modulus = [1] + list(reversed(F.modulus))

    def poly(a):
        ds = []
        for _ in range(f):
            ds.append(a % p)
            a //= p
        return list(reversed(ds))

    def value(coeffs):
        coeffs = [0] * (f - len(coeffs)) + list(coeffs)
        a = 0
        for c in coeffs:
            a = a * p + c
        return a

    for a in range(q):
        for b in range(q):
            want = gf_rem(gf_mul(poly(a), poly(b), p, ZZ), modulus, p, ZZ)
            assert F.mul[a][b] == value(want)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9, 27])
def test_field_axioms(q):
    F = field(q)
    for a in range(q):
        assert F.add[a][0] == a and F.mul[a][1] == a
        assert F.add[a][F.neg[a]] == 0
        if a:
            assert F.mul[a][F.inv[a]] == 1
        for b in range(q):
            assert F.mul[a][b] == F.mul[b][a]


def test_multiplicative_group_is_cyclic():
    F = field(9)
    alpha = F.basis[1]
    seen, x = set(), 1
    for _ in range(8):
        x = F.mul[x][alpha]
        seen.add(x)
    # the Conway root generates F_9^*
    assert len(seen) == 8


@pytest.mark.parametrize("q", [3, 4, 9])
def test_format_parse_roundtrip(q):
    F = field(q)
    for a in range(q):
        assert F.parse(F.format(a)) == a


def test_describe_and_errors():
    assert field(3).describe() == "F_3"
    assert field(4).describe() == "F_4 = F_2[x]/(x^2 + 1*x^1 + 1*x^0)"
    with pytest.raises(ValueError):
        field(6)
    with pytest.raises(ValueError):
        field(4).parse("[1,2]")
