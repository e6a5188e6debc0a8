"""Exact arithmetic in Z[i] and unimodular 2x2 matrices modulo +-I."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class GaussInt:
    re: int
    im: int = 0

    @classmethod
    def of(cls, value) -> GaussInt:
        if isinstance(value, GaussInt):
            return value
        if isinstance(value, complex):
            re, im = int(round(value.real)), int(round(value.imag))
            if complex(re, im) != value:
                raise ValueError(f"{value!r} is not a Gaussian integer")
            return cls(re, im)
        return cls(int(value), 0)

    def __add__(self, other) -> GaussInt:
        o = GaussInt.of(other)
        return GaussInt(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> GaussInt:
        o = GaussInt.of(other)
        return GaussInt(self.re - o.re, self.im - o.im)

    def __rsub__(self, other) -> GaussInt:
        return GaussInt.of(other) - self

    def __mul__(self, other) -> GaussInt:
        o = GaussInt.of(other)
        return GaussInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self) -> GaussInt:
        return GaussInt(-self.re, -self.im)

    def conj(self) -> GaussInt:
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __repr__(self) -> str:
        if self.im == 0:
            return f"{self.re}"
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
I = GaussInt(0, 1)
UNITS = (ONE, I, GaussInt(-1, 0), GaussInt(0, -1))


def _round_half_down(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0); exact halves go toward -inf."""
    return -((den - 2 * num) // (2 * den))


def divmod_gauss(a: GaussInt, b: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Euclidean division a = q*b + r with N(r) <= N(b)/2."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero Gaussian integer")
    n = b.norm()
    p = a * b.conj()
    q = GaussInt(_round_half_down(p.re, n), _round_half_down(p.im, n))
    return q, a - q * b


def normalize(a: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Return (u*a, u) where u is the unit putting a in the first quadrant (re > 0, im >= 0)."""
    if a.is_zero():
        return a, ONE
    for u in UNITS:
        b = a * u
        if b.re > 0 and b.im >= 0:
            return b, u
    raise AssertionError("unreachable")


def xgcd(a: GaussInt, b: GaussInt) -> tuple[GaussInt, GaussInt, GaussInt]:
    """Extended Euclid: (g, x, y) with a*x + b*y = g and g first-quadrant normalized."""
    a, b = GaussInt.of(a), GaussInt.of(b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    r0, r1 = a, b
    x0, x1 = ONE, ZERO
    y0, y1 = ZERO, ONE
    while not r1.is_zero():
        q, r = divmod_gauss(r0, r1)
        r0, r1 = r1, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    g, u = normalize(r0)
    return g, x0 * u, y0 * u


def ggcd(a: GaussInt, b: GaussInt) -> GaussInt:
    return xgcd(a, b)[0]


@dataclass(frozen=True, slots=True, eq=False)
class GMatrix:
    """Element of PSL_2(Z[i]).

    Entries are kept as given so that a completed row stays exactly in
    place; equality and hashing go through the canonical sign
    representative, the lexicographically smaller of M and -M.
    """

    a: GaussInt
    b: GaussInt
    c: GaussInt
    d: GaussInt

    def __post_init__(self):
        entries = tuple(GaussInt.of(e) for e in (self.a, self.b, self.c, self.d))
        det = entries[0] * entries[3] - entries[1] * entries[2]
        if det != ONE:
            raise ValueError(f"determinant is {det}, expected 1")
        for name, e in zip("abcd", entries):
            object.__setattr__(self, name, e)

    def key(self) -> tuple[int, ...]:
        flat = self.flat()
        neg = tuple(-v for v in flat)
        return min(flat, neg)

    def canonical(self) -> GMatrix:
        if self.key() == self.flat():
            return self
        return GMatrix(-self.a, -self.b, -self.c, -self.d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GMatrix):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    @classmethod
    def from_ints(cls, a, b, c, d) -> GMatrix:
        return cls(*(GaussInt.of(e) for e in (a, b, c, d)))

    def flat(self) -> tuple[int, ...]:
        return _flat((self.a, self.b, self.c, self.d))

    def __matmul__(self, other: GMatrix) -> GMatrix:
        return GMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> GMatrix:
        return GMatrix(self.d, -self.b, -self.c, self.a)

    def entries(self) -> tuple[GaussInt, GaussInt, GaussInt, GaussInt]:
        return self.a, self.b, self.c, self.d

    def max_norm(self) -> int:
        return max(e.norm() for e in self.entries())

    def __repr__(self) -> str:
        return f"GMatrix({self.a} {self.b}; {self.c} {self.d})"


def _flat(entries) -> tuple[int, ...]:
    return tuple(v for e in entries for v in (e.re, e.im))


IDENTITY = GMatrix(ONE, ZERO, ZERO, ONE)
IOTA = GMatrix(I, ZERO, ZERO, -I)


def complete_row(c: GaussInt, d: GaussInt) -> GMatrix:
    """A matrix in SL_2(Z[i]) with bottom row (c, d), built from the Bezout certificate."""
    c, d = GaussInt.of(c), GaussInt.of(d)
    if c.is_zero() and d.is_zero():
        raise ValueError("row not unimodular")
    g, x, y = xgcd(c, d)
    if g != ONE:
        raise ValueError("row not unimodular")
    # c*x + d*y = 1, so (y, -x; c, d) has determinant 1.
    return GMatrix(y, -x, c, d)


def is_in_H(g: GMatrix) -> bool:
    """Membership in the stabilizer of the plane x2 = 0: all entries real or all purely imaginary."""
    entries = g.entries()
    return all(e.im == 0 for e in entries) or all(e.re == 0 for e in entries)


def same_coset(g1: GMatrix, g2: GMatrix) -> bool:
    """H g1 == H g2."""
    return is_in_H(g1 @ g2.inverse())
