"""Dimension estimates and Mellin-transform identities.

Every integral here is against a step or piecewise-linear function and is
evaluated in closed form piece by piece.  Truncating after ``J`` pieces
leaves a tail that is bounded with the certified series tail from
:func:`padic_fractal.zeta.tail_bound`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateFitError, DivergenceError, InputError, NotApplicableError
from .strings import FractalString, to_fraction, total_length
from .tube import thin_volume
from .zeta import log_length, string_abscissa, tail_bound, zeta_value

DIMENSION_TOLERANCE = 0.02
MELLIN_TOLERANCE = 1e-8
TAIL_TARGET = 1e-10
MAX_PIECES = 4096


def _log(x) -> float:
    """Natural log of a positive exact rational, safe far below the float range."""
    x = to_fraction(x)
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass(frozen=True)
class FitResult:
    estimate: float
    residual: float
    slope: float
    intercept: float
    points: int


def _fit(logx: np.ndarray, logy: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(logx, logy, 1)
    residual = float(np.max(np.abs(logy - (slope * logx + intercept))))
    return float(slope), float(intercept), residual


def _check_span(lo: float, hi: float) -> None:
    if math.log10(hi / lo) < 4 - 1e-9:
        raise InputError("the grid must span at least 4 decades")


def default_eps_grid(base: int, first: float = 4, last: float = 40, per_period: int = 8
                     ) -> list[Fraction]:
    """``eps = base**-x`` for ``x`` at the midpoints of ``per_period`` cells per unit of
    ``[first, last]``; whole periods keep lattice oscillations balanced."""
    cells = int(round((last - first) * per_period))
    xs = first + (np.arange(cells) + 0.5) / per_period
    return [Fraction(float(v)) for v in np.exp(-xs * math.log(base))]


def default_x_grid(base: int, first: int = 10, last: int = 1000, step: int = 10) -> list[int]:
    """Integers ``floor(base**(k + 1/2))`` for ``k = first, first+step, ..., last``."""
    return [math.isqrt(base ** (2 * k + 1)) for k in range(first, last + 1, step)]


def minkowski_fit(s: FractalString, grid: Optional[Sequence] = None) -> FitResult:
    """Least-squares slope ``m`` of ``log V`` against ``log eps``; the estimate is ``1 - m``."""
    if s.place.is_archimedean:
        raise InputError("minkowski_fit needs a nonarchimedean string")
    grid = default_eps_grid(s.base) if grid is None else [to_fraction(e) for e in grid]
    if len(grid) < 2:
        raise InputError("the grid needs at least two points")
    _check_span(float(min(grid)), float(max(grid)))
    logv = []
    for e in grid:
        v = thin_volume(s, e)
        if v == 0:
            raise DegenerateFitError(f"V vanishes at eps = {float(e):.6g}")
        logv.append(_log(v))
    slope, intercept, residual = _fit(np.array([_log(e) for e in grid]), np.array(logv))
    return FitResult(1 - slope, residual, slope, intercept, len(grid))


def counting_many(s: FractalString, xs: Sequence) -> list[int]:
    """``N(x)`` for every ``x`` in one pass over the lengths."""
    xs = [to_fraction(x) for x in xs]
    if any(x <= 0 for x in xs):
        raise InputError("x must be positive")
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    out = [0] * len(xs)
    entries = s.entries()
    pending = next(entries, None)
    total = 0
    for i in order:
        while pending is not None and pending[0] * xs[i] >= 1:
            total += pending[1]
            pending = next(entries, None)
        out[i] = total
    return out


def growth_rate_fit(s: FractalString, x_grid: Optional[Sequence] = None) -> FitResult:
    """Least-squares slope of ``log N(x)`` against ``log x`` over points with ``N(x) >= 1``."""
    base = s.base if s.base is not None else 2
    xs = default_x_grid(base) if x_grid is None else [to_fraction(x) for x in x_grid]
    if len(xs) < 2:
        raise InputError("the grid needs at least two points")
    lo, hi = min(xs), max(xs)
    if _log(hi) - _log(lo) < 4 * math.log(10) - 1e-9:
        raise InputError("the grid must span at least 4 decades")
    counts = counting_many(s, xs)
    kept = [(x, n) for x, n in zip(xs, counts) if n >= 1]
    if len(kept) < 2:
        raise DegenerateFitError("N(x) vanishes on (almost) the whole grid")
    slope, intercept, residual = _fit(np.array([_log(x) for x, _ in kept]),
                                      np.array([math.log(n) for _, n in kept]))
    return FitResult(slope, residual, slope, intercept, len(kept))


def content_bracket(s: FractalString, grid: Optional[Sequence] = None,
                    dimension: Optional[float] = None) -> tuple[float, float]:
    """Min and max of ``V(eps) * eps**-(1 - D)`` over the smallest decade of the grid."""
    if s.is_finite:
        raise NotApplicableError("content bracket needs an infinite string")
    grid = default_eps_grid(s.base) if grid is None else [to_fraction(e) for e in grid]
    d = string_abscissa(s) if dimension is None else dimension
    floor_ = min(grid) * 10
    vals = []
    for e in grid:
        if e > floor_:
            continue
        v = thin_volume(s, e)
        if v == 0:
            raise DegenerateFitError(f"V vanishes at eps = {float(e):.6g}")
        vals.append(math.exp(_log(v) - (1 - d) * _log(e)))
    return min(vals), max(vals)


@dataclass(frozen=True)
class DimensionReport:
    name: str
    sigma: float
    minkowski: FitResult
    growth: FitResult
    content: tuple[float, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        est = (self.sigma, self.minkowski.estimate, self.growth.estimate)
        return all(abs(a - b) <= self.tolerance for i, a in enumerate(est) for b in est[i + 1:])

    @property
    def sigma_in_unit_interval(self) -> bool:
        return 0 <= self.sigma <= 1

    def to_json(self) -> dict:
        return {
            "string": self.name,
            "sigma": self.sigma,
            "minkowski": {"est": self.minkowski.estimate, "residual": self.minkowski.residual},
            "growth": {"est": self.growth.estimate, "residual": self.growth.residual},
            "content": {"inf": self.content[0], "sup": self.content[1]},
            "tolerance": self.tolerance,
            "verdict": "pass" if self.passed else "fail",
        }


def dimension_equality_report(s: FractalString, tolerance: float = DIMENSION_TOLERANCE,
                              eps_grid: Optional[Sequence] = None,
                              x_grid: Optional[Sequence] = None) -> DimensionReport:
    """Abscissa, Minkowski fit and counting growth rate side by side."""
    if s.is_finite:
        raise NotApplicableError("the dimension comparison needs infinitely many lengths")
    if s.place.is_archimedean:
        raise NotApplicableError("the dimension comparison is implemented for p-adic strings")
    grid = default_eps_grid(s.base) if eps_grid is None else eps_grid
    return DimensionReport(s.name, string_abscissa(s), minkowski_fit(s, grid),
                           growth_rate_fit(s, x_grid), content_bracket(s, grid), tolerance)


# -- Mellin identities -------------------------------------------------------

@dataclass(frozen=True)
class MellinCheck:
    form: str
    s_point: complex
    lhs: complex
    rhs: complex
    pieces: int
    tail_bound: float
    tolerance: float = MELLIN_TOLERANCE

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return self.abs_err <= self.tolerance + self.tail_bound


@dataclass(frozen=True)
class _Piece:
    log_len: float
    length: Fraction
    mult: int
    below: Fraction  # sum of l*mult over strictly shorter lengths
    count: int       # number of lengths (with multiplicity) at least this one


def _pieces(s: FractalString, count: int) -> list[_Piece]:
    """The first ``count`` distinct lengths with running head and tail data."""
    below = total_length(s)
    n = 0
    out = []
    for term, mult in s.terms():
        if len(out) >= count:
            break
        length = s.length_of(term)
        below -= length * mult
        n += mult
        out.append(_Piece(log_length(s, term), length, mult, below, n))
    return out


def _pow(piece: Optional[_Piece], w: complex) -> complex:
    """``length**w`` with the convention that a missing length contributes nothing."""
    return 0j if piece is None else cmath.exp(w * piece.log_len)


def _mellin_tail(s: FractalString, sp: complex, pieces: list[_Piece], J: int,
                 form: str) -> float:
    if len(pieces) <= J:
        return 0.0
    sigma = sp.real
    series = tail_bound(s, sigma, J)
    if series is None:
        return math.inf
    nxt, last = pieces[J], pieces[J - 1]
    if form == "V":
        extra = float(last.below) * math.exp((sigma - 1) * nxt.log_len)
    elif form == "N":
        extra = last.count * math.exp(sigma * nxt.log_len)
    else:
        extra = (abs(1 - sp) * last.count * math.exp(sigma * nxt.log_len)
                 + abs(sp) * float(last.below) * math.exp((sigma - 1) * nxt.log_len))
    return (series + extra) * (1 + 1e-12)


def mellin_rhs(s: FractalString, sp, J: int, form: str) -> complex:
    """Piecewise-exact integral side truncated after ``J`` pieces; no convergence checks.

    ``form`` is ``"V"`` (thin-tube volume), ``"N"`` (counting function) or
    ``"arch"`` (real inner tube).
    """
    sp = complex(sp)
    pieces = _pieces(s, J + 1)
    first = pieces[0]
    zeta1 = float(total_length(s))
    get = lambda k: pieces[k] if k < len(pieces) else None
    if form == "V":
        # zeta(1) l_1^{s-1} + (1-s) int_0^{l_1} p V(eps) eps^{s-2}
        rhs = zeta1 * _pow(first, sp - 1)
        for k in range(min(J, len(pieces))):
            cur, nxt = pieces[k], get(k + 1)
            if nxt is None or cur.below == 0:
                break
            rhs += float(cur.below) * (_pow(nxt, sp - 1) - _pow(cur, sp - 1))
        return rhs
    if form == "N":
        # s int_0^inf N(x) x^{-s-1}, N = count_k on [1/l_k, 1/l_{k+1})
        rhs = 0j
        for k in range(min(J, len(pieces))):
            cur, nxt = pieces[k], get(k + 1)
            rhs += cur.count * (_pow(cur, sp) - _pow(nxt, sp))
        return rhs
    if form == "arch":
        # s zeta(1) l_1^{s-1} + s(1-s) int_0^{l_1} (u C(u) + T(u)) u^{s-2} du with u = 2 eps
        rhs = sp * zeta1 * _pow(first, sp - 1)
        for k in range(min(J, len(pieces))):
            cur, nxt = pieces[k], get(k + 1)
            rhs += (1 - sp) * cur.count * (_pow(cur, sp) - _pow(nxt, sp))
            if nxt is not None:
                rhs += sp * float(cur.below) * (_pow(nxt, sp - 1) - _pow(cur, sp - 1))
        return rhs
    raise InputError(f"unknown Mellin form {form!r}")


def _check_domain(s: FractalString, sp: complex, form: str) -> None:
    sigma = string_abscissa(s)
    if sp.real <= sigma:
        raise DivergenceError(f"Re s = {sp.real:.6g} is not right of the abscissa {sigma:.6g}")
    if form in ("N", "arch") and sp.real <= 0:
        raise DivergenceError("the counting-function integral needs Re s > 0")


def choose_pieces(s: FractalString, sp, form: str, target: float = TAIL_TARGET) -> int:
    """Smallest power-of-two ``J >= 16`` whose certified tail is below ``target``."""
    sp = complex(sp)
    _check_domain(s, sp, form)
    J = 16
    while True:
        pieces = _pieces(s, J + 1)
        if len(pieces) <= J or _mellin_tail(s, sp, pieces, J, form) < target or J >= MAX_PIECES:
            return J
        J *= 2


def _mellin_check(s: FractalString, sp, J: Optional[int], form: str,
                  tolerance: float) -> MellinCheck:
    sp = complex(sp)
    _check_domain(s, sp, form)
    if J is None:
        J = choose_pieces(s, sp, form)
    if J < 1:
        raise InputError("J must be at least 1")
    pieces = _pieces(s, J + 1)
    tail = _mellin_tail(s, sp, pieces, J, form)
    return MellinCheck(form, sp, zeta_value(s, sp), mellin_rhs(s, sp, J, form), J, tail,
                       tolerance)


def mellin_check_V(s: FractalString, sp, J: Optional[int] = None,
                   tolerance: float = MELLIN_TOLERANCE) -> MellinCheck:
    """``zeta(s)`` against ``zeta(1) l_1^{s-1} + (1-s) int_0^{l_1} p V(eps) eps^{s-2} d eps``."""
    if s.place.is_archimedean:
        raise InputError("mellin_check_V needs a nonarchimedean string")
    return _mellin_check(s, sp, J, "V", tolerance)


def mellin_check_N(s: FractalString, sp, J: Optional[int] = None,
                   tolerance: float = MELLIN_TOLERANCE) -> MellinCheck:
    """``zeta(s)`` against ``s int_0^inf N(x) x^{-s-1} dx``."""
    return _mellin_check(s, sp, J, "N", tolerance)


def arch_mellin_check(s: FractalString, sp, J: Optional[int] = None,
                      tolerance: float = MELLIN_TOLERANCE) -> MellinCheck:
    """``zeta(s)`` against ``s zeta(1) l_1^{s-1} + 2s(1-s) int_0^{l_1/2} V(eps) (2 eps)^{s-2} d eps``."""
    if not s.place.is_archimedean:
        raise InputError("arch_mellin_check needs an archimedean string")
    return _mellin_check(s, sp, J, "arch", tolerance)

