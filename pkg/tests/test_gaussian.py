import pytest
from hypothesis import given, strategies as st

from sector_count.gaussian import (IDENTITY, IOTA, ONE, GaussInt, GMatrix, complete_row, divmod_gauss, ggcd,
                                   is_in_H, normalize, same_coset, xgcd)

small = st.integers(-40, 40)
gauss = st.builds(GaussInt, small, small)
nonzero = gauss.filter(lambda g: not g.is_zero())


def divides(d: GaussInt, a: GaussInt) -> bool:
    return divmod_gauss(a, d)[1].is_zero()


def brute_gcd_norm(a: GaussInt, b: GaussInt) -> int:
    # largest norm among common divisors, searched over a box
    best = 1
    r = int(max(a.norm(), b.norm()) ** 0.5) + 1
    for x in range(0, r + 1):
        for y in range(0, r + 1):
            d = GaussInt(x, y)
            if d.is_zero() or d.norm() <= best:
                continue
            if divides(d, a) and divides(d, b):
                best = d.norm()
    return best


@given(gauss, nonzero)
def test_division_remainder_is_small(a, b):
    q, r = divmod_gauss(a, b)
    assert q * b + r == a
    assert 2 * r.norm() <= b.norm()


@given(gauss, gauss)
def test_bezout_certificate(a, b):
    if a.is_zero() and b.is_zero():
        with pytest.raises(ValueError):
            xgcd(a, b)
        return
    g, x, y = xgcd(a, b)
    assert a * x + b * y == g
    assert g.re > 0 and g.im >= 0
    assert divides(g, a) and divides(g, b)


@given(st.builds(GaussInt, st.integers(-6, 6), st.integers(-6, 6)),
       st.builds(GaussInt, st.integers(-6, 6), st.integers(-6, 6)))
def test_gcd_matches_brute_force(a, b):
    if a.is_zero() and b.is_zero():
        return
    assert ggcd(a, b).norm() == brute_gcd_norm(a, b)


def test_gcd_examples():
    assert ggcd(GaussInt(2), GaussInt(1, 1)) == GaussInt(1, 1)
    assert ggcd(GaussInt(3), GaussInt(0, 1)) == ONE
    assert normalize(GaussInt(0, -2)) == (GaussInt(2, 0), GaussInt(0, 1))


@given(gauss, gauss)
def test_complete_row(c, d):
    if c.is_zero() and d.is_zero() or ggcd(c, d) != ONE:
        with pytest.raises(ValueError, match="row not unimodular"):
            complete_row(c, d)
        return
    m = complete_row(c, d)
    assert m.c == c and m.d == d
    assert m.a * m.d - m.b * m.c == ONE


def test_complete_row_example():
    assert complete_row(GaussInt(1), GaussInt(0)) == GMatrix.from_ints(0, -1, 1, 0)


def test_determinant_enforced():
    with pytest.raises(ValueError):
        GMatrix.from_ints(2, 0, 0, 1)


def test_sign_equivalence():
    m = GMatrix.from_ints(1, 1j, 0, 1)
    neg = GMatrix(-m.a, -m.b, -m.c, -m.d)
    assert m == neg and hash(m) == hash(neg)
    assert m.canonical().key() == m.canonical().flat()


def test_inverse_and_product():
    m = complete_row(GaussInt(2, 1), GaussInt(1, -3))
    assert m @ m.inverse() == IDENTITY


def test_membership_in_H():
    assert is_in_H(IDENTITY) and is_in_H(IOTA)
    assert is_in_H(GMatrix.from_ints(1j, 0, 1j, -1j))
    assert not is_in_H(GMatrix.from_ints(1, 1j, 0, 1))


def test_same_coset():
    g = complete_row(GaussInt(1, 2), GaussInt(3, 0))
    h = GMatrix.from_ints(2, 1, 1, 1)
    assert same_coset(h @ g, g)
    assert same_coset(IOTA @ g, g)
    assert not same_coset(GMatrix.from_ints(1, 1j, 0, 1) @ g, g)
