"""Geometric zeta functions of lattice strings as rational functions of ``z = base**-s``.

Complex dimensions come in vertical lines: each root ``z0`` of the
denominator gives the poles ``s = log_b(1/z0) + 2*pi*i*nu/log(b)``, all with
the same residue.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from . import polynomial as P
from .errors import (DomainError, EvaluationAtPoleError, FormulaSingularityError, InputError,
                     ModelError, UnsupportedMultiplicityError)
from .strings import (ArchExplicit, EulerPreset, Explicit, FractalString, RationalLattice,
                      to_fraction)

# |Q(z)| < POLE_TOLERANCE * (1 + |P(z)|) counts as evaluating at a pole.
POLE_TOLERANCE = 1e-12
# relative distance in z below which a point is identified with a root of Q
ROOT_MATCH_TOLERANCE = 1e-8


@dataclass(frozen=True)
class RationalZeta:
    """``zeta(s) = P(z) / Q(z)`` with ``z = base**-s``, stored reduced (``gcd(P, Q) = 1``)."""

    base: int
    numerator: tuple
    denominator: tuple

    def __post_init__(self):
        if int(self.base) < 2:
            raise InputError("base must be an integer >= 2")
        # RationalLattice performs the exact gcd reduction and normalization
        reduced = RationalLattice(self.numerator, self.denominator)
        object.__setattr__(self, "base", int(self.base))
        object.__setattr__(self, "numerator", reduced.numerator)
        object.__setattr__(self, "denominator", reduced.denominator)

    @property
    def log_base(self) -> float:
        return math.log(self.base)

    @property
    def period(self) -> float:
        """Vertical spacing ``2*pi/log(base)`` of each line of poles."""
        return 2 * math.pi / self.log_base

    @cached_property
    def poles(self) -> tuple[tuple[complex, int], ...]:
        """Nonzero roots of ``Q`` with their multiplicities (``z = 0`` is ``Re s = +inf``)."""
        q = self.denominator[P.low_order(self.denominator):]
        out = []
        for factor, mult in P.squarefree_factors(q):
            for z0 in P.simple_roots(factor):
                out.append((complex(z0), mult))
        out.sort(key=lambda t: (abs(t[0]), cmath.phase(t[0])))
        return tuple(out)

    def z_of(self, s) -> complex:
        return cmath.exp(-complex(s) * self.log_base)

    def __call__(self, s) -> complex:
        return zeta_eval(self, s)


@dataclass(frozen=True)
class Window:
    """Half-plane ``Re s >= min_real`` (``None`` for the whole plane), optionally cut to a band of ``Im s``."""

    min_real: Optional[float] = None
    imag_band: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.imag_band is not None:
            lo, hi = self.imag_band
            if lo > hi:
                raise InputError("imag_band must satisfy tMin <= tMax")

    def contains(self, s: complex) -> bool:
        if self.min_real is not None and s.real < self.min_real:
            return False
        if self.imag_band is not None and not (self.imag_band[0] <= s.imag <= self.imag_band[1]):
            return False
        return True


FULL_PLANE = Window()


@dataclass(frozen=True)
class DimensionLine:
    real_part: float
    base_imag: float
    period: float
    multiplicity: int
    residue_base: Optional[complex]
    source_root: complex

    def point(self, nu: int) -> complex:
        return complex(self.real_part, self.base_imag + nu * self.period)

    def points(self, terms: int) -> Iterator[complex]:
        for nu in range(-terms, terms + 1):
            yield self.point(nu)


@dataclass(frozen=True)
class DimensionSet:
    lines: tuple[DimensionLine, ...]
    window: Window = field(default=FULL_PLANE)
    base: int = 0

    def __iter__(self):
        return iter(self.lines)

    def __len__(self) -> int:
        return len(self.lines)

    def points(self, terms: int) -> list[complex]:
        """Dimensions with ``|nu| <= terms`` on every line that lie in the window."""
        return [w for line in self.lines for w in line.points(terms) if self.window.contains(w)]


def zeta_closed_form(s: FractalString) -> RationalZeta:
    spec = s.spec
    if isinstance(spec, EulerPreset):
        return RationalZeta(s.base, (1,), (1, -1))
    if isinstance(spec, RationalLattice):
        return RationalZeta(s.base, spec.numerator, spec.denominator)
    if isinstance(spec, Explicit):
        shift = max(0, -min(e for e, _ in spec.entries))
        num = P.from_terms((e + shift, m) for e, m in spec.entries)
        den = P.from_terms([(shift, 1)])
        return RationalZeta(s.base, num, den)
    raise ModelError(f"no rational closed form for {type(spec).__name__} strings")


def zeta_eval(zeta: RationalZeta, s, pole_tol: float = POLE_TOLERANCE) -> complex:
    z = zeta.z_of(s)
    num = P.evaluate(zeta.numerator, z)
    den = P.evaluate(zeta.denominator, z)
    if abs(den) < pole_tol * (1 + abs(num)):
        raise EvaluationAtPoleError(f"s = {s} is (numerically) a pole")
    return num / den


def log_length(s: FractalString, term) -> float:
    if s.is_lattice:
        return -term * math.log(s.base)
    return math.log(term.numerator) - math.log(term.denominator)


def zeta_value(s: FractalString, point) -> complex:
    """``zeta(point)`` from the closed form, or by direct summation for finite real-length strings."""
    if s.is_lattice:
        return zeta_eval(zeta_closed_form(s), point)
    point = complex(point)
    return sum(m * cmath.exp(point * log_length(s, t)) for t, m in s.terms())


def abscissa(zeta: RationalZeta) -> float:
    """Abscissa of convergence; ``-inf`` when the zeta function is entire."""
    if not zeta.poles:
        return -math.inf
    rho = min(abs(z0) for z0, _ in zeta.poles)
    return -math.log(rho) / zeta.log_base + 0.0


def string_abscissa(s: FractalString) -> float:
    if s.is_finite:
        return -math.inf
    return abscissa(zeta_closed_form(s))


def _nearest_pole(zeta: RationalZeta, z: complex) -> Optional[tuple[complex, int]]:
    best = None
    for z0, mult in zeta.poles:
        d = abs(z - z0)
        if d <= ROOT_MATCH_TOLERANCE * max(1.0, abs(z0)) and (best is None or d < best[0]):
            best = (d, z0, mult)
    return None if best is None else (best[1], best[2])


def _simple_residue(zeta: RationalZeta, z0: complex) -> complex:
    num = P.evaluate(zeta.numerator, z0)
    dq = P.evaluate(P.derivative(zeta.denominator), z0)
    return -num / (z0 * dq * zeta.log_base)


def residue_at(zeta: RationalZeta, omega) -> complex:
    """``res(zeta; omega)`` at a simple pole."""
    match = _nearest_pole(zeta, zeta.z_of(omega))
    if match is None:
        raise InputError(f"{omega} is not a pole")
    z0, mult = match
    if mult > 1:
        raise UnsupportedMultiplicityError(
            f"pole at {omega} has multiplicity {mult}; only simple poles are supported")
    return _simple_residue(zeta, z0)


def complex_dimensions(zeta: RationalZeta, window: Window = FULL_PLANE) -> DimensionSet:
    period = zeta.period
    lines = []
    for z0, mult in zeta.poles:
        # adding 0.0 turns -0.0 into 0.0
        sigma = -math.log(abs(z0)) / zeta.log_base + 0.0
        theta = math.fmod(-cmath.phase(z0) / zeta.log_base, period) + 0.0
        if theta < 0:
            theta += period
        if period - theta < 1e-12 * period:
            theta = 0.0
        if window.min_real is not None and sigma < window.min_real - 1e-12:
            continue
        if window.imag_band is not None:
            lo, hi = window.imag_band
            if math.ceil((lo - theta) / period) > math.floor((hi - theta) / period):
                continue
        residue = _simple_residue(zeta, z0) if mult == 1 else None
        lines.append(DimensionLine(sigma, theta, period, mult, residue, z0))
    lines.sort(key=lambda line: (-line.real_part, line.base_imag))
    return DimensionSet(tuple(lines), window, zeta.base)


def string_dimensions(s: FractalString, window: Window = FULL_PLANE) -> DimensionSet:
    return complex_dimensions(zeta_closed_form(s), window)


def tail_bound(s: FractalString, real_part: float, skip: int) -> Optional[float]:
    """Certified upper bound on ``sum |mult * length**s|`` over all but the first ``skip`` entries.

    Returns ``None`` when ``real_part`` is not right of the abscissa.  For
    lattice strings the bound is evaluated exactly in rationals at a dyadic
    point ``x >= base**-real_part``, using the closed form of the generating
    function, which has nonnegative coefficients.
    """
    if s.is_finite:
        rest = [(t, m) for t, m in list(s.terms())[skip:]]
        if not rest:
            return 0.0
        total = sum(m * math.exp(real_part * log_length(s, t)) for t, m in rest)
        return total * (1 + 1e-12)
    sigma = string_abscissa(s)
    if real_part <= sigma:
        return None
    zeta = zeta_closed_form(s)
    x = Fraction(math.exp(-real_part * zeta.log_base)) * (1 + Fraction(1, 2**40))
    if -math.log(x) / zeta.log_base <= sigma + 1e-9:
        return None
    whole = P.evaluate(zeta.numerator, x) / P.evaluate(zeta.denominator, x)
    head = Fraction(0)
    for i, (n, m) in enumerate(s.terms()):
        if i >= skip:
            break
        head += m * x**n
    rest = whole - head
    if rest <= 0:
        return 0.0
    return math.nextafter(float(rest), math.inf)


def zeta_partial_sum(s: FractalString, point, count: int) -> tuple[complex, Optional[float]]:
    """Sum of ``mult * length**point`` over the first ``count`` entries, with a tail bound.

    The bound is ``None`` when ``Re(point)`` is not right of the abscissa.
    """
    if count < 1:
        raise InputError("count must be at least 1")
    point = complex(point)
    value = 0j
    for i, (t, m) in enumerate(s.terms()):
        if i >= count:
            break
        value += m * cmath.exp(point * log_length(s, t))
    return value, tail_bound(s, point.real, count)


def tubular_zeta(zeta: RationalZeta, eps, s) -> complex:
    """``zeta(s) * eps**(1 - s) / (base * (1 - s))``."""
    s = complex(s)
    if s == 1:
        raise FormulaSingularityError("the tubular zeta function has a pole at s = 1")
    eps = float(to_fraction(eps))
    if eps <= 0:
        raise InputError("eps must be positive")
    return zeta_eval(zeta, s) * cmath.exp((1 - s) * math.log(eps)) / (zeta.base * (1 - s))


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for k in range(2, math.isqrt(n) + 1):
        if sieve[k]:
            sieve[k * k::k] = False
    return np.flatnonzero(sieve)


def partial_euler_product(s, pmax: int) -> complex:
    """``prod(1 / (1 - p**-s))`` over primes ``p <= pmax``."""
    s = complex(s)
    if s.real <= 1:
        raise DomainError("the Euler product needs Re(s) > 1")
    if pmax < 2:
        raise DomainError("pmax must be at least 2")
    logs = np.log(primes_up_to(int(pmax)).astype(float))
    factors = 1.0 - np.exp(-s * logs)
    return complex(np.prod(1.0 / factors))


def dirichlet_partial_sum(s, n_max: int) -> complex:
    """``sum(n**-s for n <= n_max)``, added smallest terms first."""
    s = complex(s)
    n = np.arange(int(n_max), 0, -1, dtype=float)
    return complex(np.sum(np.exp(-s * np.log(n))))
