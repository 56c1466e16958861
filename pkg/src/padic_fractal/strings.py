"""Fractal strings: nonincreasing length sequences over a place.

Lattice strings (explicit exponent lists, rational generating functions and
the Euler preset) store lengths as ``base**-exponent`` with ``base`` the prime
of the place; archimedean lattice strings carry their own integer base.
Lengths are produced lazily and the generated prefix is memoized.
"""

from __future__ import annotations

import json
import math
import os
import re
import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Iterator, Optional, Union

from . import polynomial as P
from .errors import InputError, ModelError
from .padic import BallSet, Prime, canonical_decomposition


@dataclass(frozen=True)
class Place:
    """Either ``Q_p`` (``prime`` set) or the real line (``prime is None``)."""

    prime: Optional[Prime] = None

    def __post_init__(self):
        if self.prime is not None:
            object.__setattr__(self, "prime", Prime(self.prime))

    @classmethod
    def padic(cls, p) -> "Place":
        return cls(Prime(p))

    @classmethod
    def arch(cls) -> "Place":
        return cls(None)

    @property
    def is_archimedean(self) -> bool:
        return self.prime is None

    def __str__(self) -> str:
        return "arch" if self.is_archimedean else f"{self.prime}-adic"


@dataclass(frozen=True)
class Explicit:
    """Finitely many lengths ``base**-exponent`` with multiplicities."""

    entries: tuple
    base: Optional[int] = None

    def __post_init__(self):
        counts: Counter = Counter()
        for exponent, mult in self.entries:
            if int(mult) != mult or mult <= 0:
                raise InputError(f"multiplicity must be a positive integer, got {mult!r}")
            counts[int(exponent)] += int(mult)
        object.__setattr__(self, "entries", tuple(sorted(counts.items())))


@dataclass(frozen=True)
class RationalLattice:
    """Lengths whose generating function ``sum(mult * z**exponent)`` equals ``numerator/denominator``."""

    numerator: tuple
    denominator: tuple
    base: Optional[int] = None

    def __post_init__(self):
        num = P.poly(self.numerator)
        den = P.poly(self.denominator)
        if not den:
            raise ModelError("denominator polynomial is zero")
        g = P.gcd(num, den) if num else P.monic(den)
        num = P.divmod_poly(num, g)[0]
        den = P.divmod_poly(den, g)[0]
        # normalize so the lowest nonzero denominator coefficient is 1
        lead = den[P.low_order(den)]
        object.__setattr__(self, "numerator", P.scale(num, 1 / lead))
        object.__setattr__(self, "denominator", P.scale(den, 1 / lead))


@dataclass(frozen=True)
class EulerPreset:
    """Lengths ``base**-n`` for ``n >= 0``, each once."""

    base: Optional[int] = None


@dataclass(frozen=True)
class ArchExplicit:
    """Finitely many real lengths with multiplicities."""

    entries: tuple

    def __post_init__(self):
        counts: Counter = Counter()
        for length, mult in self.entries:
            length = Fraction(length)
            if length <= 0:
                raise InputError(f"lengths must be positive, got {length}")
            if int(mult) != mult or mult <= 0:
                raise InputError(f"multiplicity must be a positive integer, got {mult!r}")
            counts[length] += int(mult)
        object.__setattr__(self, "entries", tuple(sorted(counts.items(), reverse=True)))


LengthSpec = Union[Explicit, RationalLattice, EulerPreset, ArchExplicit]


def _series_terms(num: tuple, den: tuple) -> Iterator[tuple[int, int]]:
    """Nonzero coefficients of the Laurent expansion of ``num/den`` at 0 as ``(exponent, coeff)``."""
    shift = P.low_order(den)
    den = den[shift:]
    q0 = den[0]
    coeffs: list[Fraction] = []
    finite = len(den) == 1
    n = 0
    while True:
        if finite and n >= len(num):
            return
        acc = num[n] if n < len(num) else Fraction(0)
        for j in range(1, min(n, len(den) - 1) + 1):
            acc -= den[j] * coeffs[n - j]
        c = acc / q0
        coeffs.append(c)
        if c:
            if c < 0 or c.denominator != 1:
                raise ModelError(
                    f"expansion coefficient {c} at degree {n - shift} is not a nonnegative integer")
            yield n - shift, int(c)
        n += 1


@dataclass(frozen=True)
class FractalString:
    place: Place
    spec: LengthSpec
    name: str = ""
    _cache: list = field(default_factory=list, init=False, repr=False, compare=False)
    _source: list = field(default_factory=list, init=False, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False,
                                  compare=False)

    def __post_init__(self):
        spec = self.spec
        if isinstance(spec, ArchExplicit):
            if not self.place.is_archimedean:
                raise InputError("real-length entries need the archimedean place")
        else:
            base = getattr(spec, "base", None)
            if self.place.is_archimedean:
                if base is None or int(base) < 2:
                    raise InputError("archimedean lattice strings need an integer base >= 2")
            elif base is not None and int(base) != self.place.prime:
                raise InputError(f"base {base} differs from the prime {self.place.prime}")
        if isinstance(spec, RationalLattice):
            self._check_rational(spec)
        if not self.name:
            object.__setattr__(self, "name", _default_name(self))

    def _check_rational(self, spec: RationalLattice) -> None:
        if not spec.numerator:
            raise ModelError("generating function is identically zero")
        b = self.base
        den = spec.denominator[P.low_order(spec.denominator):]
        if len(den) > 1:
            if P.evaluate(den, Fraction(1, b)) == 0:
                raise ModelError("total length diverges: pole at z = 1/base")
            kernel = P.divmod_poly(den, P.gcd(den, P.derivative(den)))[0]
            roots = P.simple_roots(kernel)
            if min(abs(roots)) <= (1 + 1e-12) / b:
                raise ModelError("total length diverges: generating function has a pole "
                                 "with |z| <= 1/base")
        # surface negative or fractional multiplicities early
        list(islice(_series_terms(spec.numerator, spec.denominator), 64))

    @property
    def base(self) -> Optional[int]:
        if isinstance(self.spec, ArchExplicit):
            return None
        if self.place.is_archimedean:
            return int(self.spec.base)
        return int(self.place.prime)

    @property
    def is_lattice(self) -> bool:
        return not isinstance(self.spec, ArchExplicit)

    @property
    def is_finite(self) -> bool:
        spec = self.spec
        if isinstance(spec, (Explicit, ArchExplicit)):
            return True
        if isinstance(spec, EulerPreset):
            return False
        return len(spec.denominator) - P.low_order(spec.denominator) == 1

    def _raw_terms(self) -> Iterator[tuple]:
        spec = self.spec
        if isinstance(spec, (Explicit, ArchExplicit)):
            yield from spec.entries
        elif isinstance(spec, EulerPreset):
            n = 0
            while True:
                yield n, 1
                n += 1
        else:
            yield from _series_terms(spec.numerator, spec.denominator)

    def terms(self) -> Iterator[tuple]:
        """All entries in nonincreasing length order.

        Lattice strings yield ``(exponent, multiplicity)``, archimedean explicit
        strings ``(length, multiplicity)``.
        """
        i = 0
        while True:
            if i < len(self._cache):
                yield self._cache[i]
                i += 1
                continue
            with self._lock:
                if i >= len(self._cache):
                    if not self._source:
                        self._source.append(self._raw_terms())
                    chunk = list(islice(self._source[0], max(64, i)))
                    if not chunk:
                        return
                    self._cache.extend(chunk)

    def length_of(self, term) -> Fraction:
        if not self.is_lattice:
            return term
        return base_power(self.base, -term)

    def entries(self) -> Iterator[tuple[Fraction, int]]:
        """``(length, multiplicity)`` pairs, nonincreasing in length."""
        for term, mult in self.terms():
            yield self.length_of(term), mult

    def to_json(self) -> dict:
        return string_to_json(self)


def base_power(b: int, k: int) -> Fraction:
    """Exact ``b**k`` for any integer ``k``."""
    return Fraction(b**k) if k >= 0 else Fraction(1, b ** (-k))


def _default_name(s: FractalString) -> str:
    kind = type(s.spec).__name__.lower()
    return f"{kind}@{s.place}"


def lengths(s: FractalString, count: Optional[int] = None,
            threshold=None) -> list[tuple[Fraction, int]]:
    """First ``count`` distinct lengths, or all lengths ``>= threshold`` (exactly one limit)."""
    if (count is None) == (threshold is None):
        raise InputError("give exactly one of count or threshold")
    if count is not None:
        if count <= 0:
            raise InputError("count must be positive")
        return list(islice(s.entries(), count))
    threshold = to_fraction(threshold)
    if threshold <= 0:
        raise InputError("threshold must be positive")
    out = []
    for length, mult in s.entries():
        if length < threshold:
            break
        out.append((length, mult))
    return out


def to_fraction(x) -> Fraction:
    """Exact conversion; floats convert to the rational they represent."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        if isinstance(x, float) and not math.isfinite(x):
            raise InputError(f"not a finite number: {x}")
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise InputError(f"cannot convert {x!r} to an exact rational")


_POWER_RE = re.compile(r"^\s*(\d+)\s*(?:\^|\*\*)\s*\(?\s*([+-]?\d+)\s*\)?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"3/10"``, ``"0.25"``, ``"1e-3"`` or powers such as ``"2^-10"``."""
    m = _POWER_RE.match(text)
    if m:
        return base_power(int(m.group(1)), int(m.group(2)))
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse {text!r} as a rational number") from None


def counting_function(s: FractalString, x) -> int:
    """Number of lengths (with multiplicity) at least ``1/x``."""
    x = to_fraction(x)
    if x <= 0:
        raise InputError("x must be positive")
    total = 0
    for length, mult in s.entries():
        if length * x < 1:
            break
        total += mult
    return total


def total_length(s: FractalString) -> Fraction:
    """``zeta(1)``, the total length, computed in closed form."""
    spec = s.spec
    if isinstance(spec, (Explicit, ArchExplicit)):
        return sum((length * m for length, m in s.entries()), Fraction(0))
    b = s.base
    if isinstance(spec, EulerPreset):
        return Fraction(b, b - 1)
    z = Fraction(1, b)
    return P.evaluate(spec.numerator, z) / P.evaluate(spec.denominator, z)


def head_sum(s: FractalString, eps: Fraction) -> tuple[Fraction, int]:
    """``(sum of length*mult, sum of mult)`` over lengths ``>= eps``."""
    total = Fraction(0)
    count = 0
    for length, mult in s.entries():
        if length < eps:
            break
        total += length * mult
        count += mult
    return total, count


def from_balls(balls, name: str = "") -> FractalString:
    """String whose lengths are the measures of the maximal balls of a finite union."""
    decomposition = canonical_decomposition(balls)
    if not decomposition.balls:
        raise ModelError("empty ball set")
    counts = Counter(b.radius_exp for b in decomposition)
    return FractalString(Place.padic(decomposition.prime), Explicit(tuple(counts.items())),
                         name or "balls")


def euler_string(p, name: str = "") -> FractalString:
    p = Prime(p)
    return FractalString(Place.padic(p), EulerPreset(), name or f"euler:p={p}")


def cantor3() -> FractalString:
    return FractalString(Place.padic(3), RationalLattice((0, 1), (1, -2)), "cantor3")


def arch_geometric(b: int = 2) -> FractalString:
    """Real lengths ``b**-n``, ``n >= 0``."""
    return FractalString(Place.arch(), EulerPreset(base=b), f"arch-euler:b={b}")


def arch_cantor3() -> FractalString:
    """Real ternary Cantor string: ``3**-n`` with multiplicity ``2**(n-1)``."""
    return FractalString(Place.arch(), RationalLattice((0, 1), (1, -2), base=3), "arch-cantor3")


_EULER_RE = re.compile(r"^euler:p=(\d+)$")
_ARCH_EULER_RE = re.compile(r"^arch-euler:b=(\d+)$")


def preset(name: str) -> FractalString:
    """Named strings: ``euler:p=<prime>``, ``cantor3``, ``arch-euler:b=<int>``, ``arch-cantor3``."""
    name = name.strip()
    m = _EULER_RE.match(name)
    if m:
        return euler_string(int(m.group(1)))
    if name == "cantor3":
        return cantor3()
    m = _ARCH_EULER_RE.match(name)
    if m:
        return arch_geometric(int(m.group(1)))
    if name == "arch-cantor3":
        return arch_cantor3()
    raise InputError(f"unknown preset {name!r}")


def _terms_to_poly(pairs) -> tuple:
    try:
        return P.from_terms((d, Fraction(c) if not isinstance(c, str) else parse_rational(c))
                            for d, c in pairs)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad polynomial terms {pairs!r}: {exc}") from None


def string_from_json(obj: dict) -> FractalString:
    """Build a string from the JSON string-spec schema (see README)."""
    try:
        place_obj = obj["place"]
        spec_obj = obj["spec"]
        kind = spec_obj["type"]
        if place_obj["type"] == "padic":
            place = Place.padic(place_obj["p"])
        elif place_obj["type"] == "arch":
            place = Place.arch()
        else:
            raise InputError(f"unknown place type {place_obj['type']!r}")
        base = spec_obj.get("base")
        if kind == "euler":
            spec = EulerPreset(base=base)
        elif kind == "explicit" and "lengths" in spec_obj:
            spec = ArchExplicit(tuple((parse_rational(str(length)), m)
                                      for length, m in spec_obj["lengths"]))
        elif kind == "explicit":
            spec = Explicit(tuple((e, m) for e, m in spec_obj["entries"]), base=base)
        elif kind == "rational":
            spec = RationalLattice(_terms_to_poly(spec_obj["numerator"]),
                                   _terms_to_poly(spec_obj["denominator"]), base=base)
        else:
            raise InputError(f"unknown spec type {kind!r}")
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed string spec: {exc!r}") from None
    return FractalString(place, spec, str(obj.get("name", "")))


def string_to_json(s: FractalString) -> dict:
    place = {"type": "arch"} if s.place.is_archimedean else {"type": "padic", "p": int(s.place.prime)}
    spec = s.spec
    if isinstance(spec, EulerPreset):
        out = {"type": "euler"}
    elif isinstance(spec, Explicit):
        out = {"type": "explicit", "entries": [list(e) for e in spec.entries]}
    elif isinstance(spec, ArchExplicit):
        out = {"type": "explicit", "lengths": [[str(length), m] for length, m in spec.entries]}
    else:
        out = {"type": "rational",
               "numerator": [[d, str(c)] for d, c in enumerate(spec.numerator) if c],
               "denominator": [[d, str(c)] for d, c in enumerate(spec.denominator) if c]}
    if not isinstance(spec, ArchExplicit) and s.place.is_archimedean:
        out["base"] = s.base
    return {"place": place, "spec": out, "name": s.name}


def load_string(source: str) -> FractalString:
    """A preset name, or a path to a JSON string-spec file."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return string_from_json(json.load(fh))
    return preset(source)
