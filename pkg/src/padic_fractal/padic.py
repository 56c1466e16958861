"""Exact p-adic scalars, metric balls, Haar measure and maximal-ball decomposition.

Everything here works over :class:`fractions.Fraction`; no floating point is
involved, so ties against radii and sibling detection are exact.
"""

from __future__ import annotations

import enum
import operator
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import InputError, PrimeMismatchError

Rational = Union[int, Fraction]


class Infinity(enum.Enum):
    """Valuation of zero."""

    INFINITY = "inf"

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"


INF = Infinity.INFINITY


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Prime(int):
    """An ``int`` that is known to be prime."""

    def __new__(cls, p):
        if isinstance(p, Prime):
            return p
        try:
            value = operator.index(p)
        except TypeError:
            raise InputError(f"prime must be an integer, got {p!r}") from None
        if not is_prime(value):
            raise InputError(f"{value} is not prime")
        return super().__new__(cls, value)

    def __repr__(self) -> str:
        return f"Prime({int(self)})"

    def __str__(self) -> str:
        return str(int(self))


def _as_fraction(x) -> Fraction:
    if isinstance(x, PAdicScalar):
        return x.value
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise InputError(f"expected an exact rational, got {type(x).__name__}")


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p) -> Union[int, Infinity]:
    """Exponent ``v`` with ``x = p**v * a/b`` and ``p`` dividing neither ``a`` nor ``b``.

    Returns :data:`INF` for ``x == 0``.
    """
    p = Prime(p)
    x = _as_fraction(x)
    if x == 0:
        return INF
    return _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)


def padic_abs(x, p) -> Fraction:
    p = Prime(p)
    v = valuation(x, p)
    if v is INF:
        return Fraction(0)
    return Fraction(1, p**v) if v >= 0 else Fraction(p ** (-v))


@dataclass(frozen=True)
class PAdicScalar:
    """A rational number viewed inside ``Q_p``."""

    value: Fraction
    prime: Prime

    def __init__(self, value, prime):
        object.__setattr__(self, "value", _as_fraction(value))
        object.__setattr__(self, "prime", Prime(prime))

    @property
    def valuation(self) -> Union[int, Infinity]:
        return valuation(self.value, self.prime)

    def __abs__(self) -> Fraction:
        return padic_abs(self.value, self.prime)

    def is_zero(self) -> bool:
        return self.value == 0

    def _coerce(self, other) -> Fraction:
        if isinstance(other, PAdicScalar):
            if other.prime != self.prime:
                raise PrimeMismatchError(
                    f"cannot combine {self.prime}-adic and {other.prime}-adic values")
            return other.value
        return _as_fraction(other)

    def __add__(self, other):
        return PAdicScalar(self.value + self._coerce(other), self.prime)

    __radd__ = __add__

    def __sub__(self, other):
        return PAdicScalar(self.value - self._coerce(other), self.prime)

    def __rsub__(self, other):
        return PAdicScalar(self._coerce(other) - self.value, self.prime)

    def __mul__(self, other):
        return PAdicScalar(self.value * self._coerce(other), self.prime)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return PAdicScalar(self.value / self._coerce(other), self.prime)

    def __neg__(self):
        return PAdicScalar(-self.value, self.prime)

    def __str__(self) -> str:
        return f"{self.value} (p={self.prime})"


def _same_prime(a: PAdicScalar, b: PAdicScalar) -> Prime:
    if a.prime != b.prime:
        raise PrimeMismatchError(f"prime mismatch: {a.prime} vs {b.prime}")
    return a.prime


def padic_dist(x: PAdicScalar, y: PAdicScalar) -> Fraction:
    p = _same_prime(x, y)
    return padic_abs(x.value - y.value, p)


def canonical_center(a: Fraction, p: int, n: int) -> Fraction:
    """Representative of ``a + p**n Z_p``: the p-adic expansion of ``a`` truncated below ``p**n``.

    The result is ``r / p**m`` with ``0 <= r < p**(n+m)``; it is 0 when the
    ball contains 0.
    """
    if a == 0:
        return Fraction(0)
    v = _int_valuation(a.numerator, p) - _int_valuation(a.denominator, p)
    if v >= n:
        return Fraction(0)
    m = max(0, -v)
    b = a * p**m
    modulus = p ** (n + m)
    r = (b.numerator * pow(b.denominator, -1, modulus)) % modulus
    return Fraction(r, p**m)


class BallRelation(enum.Enum):
    DISJOINT = "disjoint"
    EQUAL = "equal"
    FIRST_INSIDE_SECOND = "first_inside_second"
    SECOND_INSIDE_FIRST = "second_inside_first"


class Ball:
    """The closed ball ``center + p**radius_exp Z_p`` with Haar measure ``p**-radius_exp``.

    Equality and hashing follow the point set, so any member may serve as
    center.
    """

    __slots__ = ("center", "radius_exp", "_key")

    def __init__(self, center, radius_exp: int, prime=None):
        if not isinstance(center, PAdicScalar):
            if prime is None:
                raise InputError("a prime is required when the center is a plain rational")
            center = PAdicScalar(center, prime)
        elif prime is not None and Prime(prime) != center.prime:
            raise PrimeMismatchError(f"center is {center.prime}-adic, ball requested over {prime}")
        self.center = center
        self.radius_exp = operator.index(radius_exp)
        self._key = (self.radius_exp, canonical_center(center.value, center.prime, self.radius_exp))

    @property
    def prime(self) -> Prime:
        return self.center.prime

    @property
    def key(self) -> tuple[int, Fraction]:
        """``(radius_exp, canonical center)``; identifies the point set."""
        return self._key

    @property
    def radius(self) -> Fraction:
        return Fraction(1, self.prime**self.radius_exp) if self.radius_exp >= 0 \
            else Fraction(self.prime ** (-self.radius_exp))

    def canonical(self) -> "Ball":
        return Ball(PAdicScalar(self._key[1], self.prime), self.radius_exp)

    def parent(self) -> "Ball":
        return Ball(self.center, self.radius_exp - 1)

    def children(self) -> list["Ball"]:
        p = self.prime
        c = self._key[1]
        step = Fraction(p**self.radius_exp) if self.radius_exp >= 0 \
            else Fraction(1, p ** (-self.radius_exp))
        return [Ball(PAdicScalar(c + k * step, p), self.radius_exp + 1) for k in range(p)]

    def __contains__(self, x) -> bool:
        if not isinstance(x, PAdicScalar):
            x = PAdicScalar(x, self.prime)
        return membership(x, self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ball):
            return NotImplemented
        return self.prime == other.prime and self._key == other._key

    def __hash__(self) -> int:
        return hash((int(self.prime), self._key))

    def __repr__(self) -> str:
        return f"Ball({self._key[1]} + {self.prime}^{self.radius_exp} Z_{self.prime})"


def ball_measure(ball: Ball) -> Fraction:
    return ball.radius


def sphere_measure(ball: Ball) -> Fraction:
    return (1 - Fraction(1, ball.prime)) * ball.radius


def membership(x: PAdicScalar, ball: Ball) -> bool:
    _same_prime(x, ball.center)
    return padic_dist(x, ball.center) <= ball.radius


def ball_relation(b1: Ball, b2: Ball) -> BallRelation:
    p = _same_prime(b1.center, b2.center)
    n1, c1 = b1.key
    n2, c2 = b2.key
    if n1 == n2:
        return BallRelation.EQUAL if c1 == c2 else BallRelation.DISJOINT
    if n1 < n2:
        inside = canonical_center(c2, p, n1) == c1
        return BallRelation.SECOND_INSIDE_FIRST if inside else BallRelation.DISJOINT
    inside = canonical_center(c1, p, n2) == c2
    return BallRelation.FIRST_INSIDE_SECOND if inside else BallRelation.DISJOINT


@dataclass(frozen=True)
class BallSet:
    """A finite family of balls over one prime."""

    balls: tuple[Ball, ...]

    def __init__(self, balls: Iterable[Ball] = ()):
        balls = tuple(balls)
        if balls:
            p = balls[0].prime
            for b in balls[1:]:
                if b.prime != p:
                    raise PrimeMismatchError(f"ball set mixes primes {p} and {b.prime}")
        object.__setattr__(self, "balls", balls)

    @property
    def prime(self):
        return self.balls[0].prime if self.balls else None

    def __iter__(self):
        return iter(self.balls)

    def __len__(self) -> int:
        return len(self.balls)

    def total_measure(self) -> Fraction:
        """Sum of the measures (equals the union's measure once canonical)."""
        return sum((ball_measure(b) for b in self.balls), Fraction(0))

    def point_set_key(self) -> frozenset:
        return frozenset(b.key for b in self.balls)


def canonical_decomposition(balls) -> BallSet:
    """Pairwise disjoint maximal balls covering the same union as ``balls``.

    Nested balls are dropped, then every complete family of ``p`` sibling
    balls is replaced by its parent, finest level first, until nothing
    changes.  Output is sorted by ``(radius_exp, canonical center)``.
    """
    balls = BallSet(balls)
    if not balls.balls:
        return balls
    p = balls.prime

    kept: set[tuple[int, Fraction]] = set()
    levels: set[int] = set()
    for n, c in sorted({b.key for b in balls}, key=lambda k: k[0]):
        if any((m, canonical_center(c, p, m)) in kept for m in levels if m < n):
            continue
        kept.add((n, c))
        levels.add(n)

    by_level: dict[int, set[Fraction]] = defaultdict(set)
    for n, c in kept:
        by_level[n].add(c)

    n = max(by_level)
    while n >= min(by_level):
        reps = by_level.get(n)
        if reps:
            families: dict[Fraction, list[Fraction]] = defaultdict(list)
            for c in reps:
                families[canonical_center(c, p, n - 1)].append(c)
            for parent, siblings in families.items():
                if len(siblings) == p:
                    reps.difference_update(siblings)
                    by_level[n - 1].add(parent)
        n -= 1

    out = sorted((n, c) for n, reps in by_level.items() for c in reps)
    return BallSet(Ball(PAdicScalar(c, p), n) for n, c in out)
