"""Inner-tube volumes and truncated explicit tube formulas.

Exact volumes are rational and computed from the closed-form total length
minus a finite head sum, so no infinite summation is ever truncated.  The
tube formula sums ``c * eps**(1 - w) / (1 - w)`` over complex dimensions
``w`` with ``c = res(zeta; w) / base``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (FormulaSingularityError, InputError, JumpPointError, NotApplicableError,
                     UnsupportedMultiplicityError)
from .strings import FractalString, head_sum, to_fraction, total_length
from .zeta import DimensionSet, string_dimensions


def _require_padic(s: FractalString) -> int:
    if s.place.is_archimedean:
        raise InputError("p-adic tube volumes need a nonarchimedean string; use arch_volume")
    return int(s.place.prime)


def _positive(eps) -> Fraction:
    eps = to_fraction(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    return eps


def thin_volume(s: FractalString, eps) -> Fraction:
    """``(1/p) * sum(l for l < eps)``, counting multiplicity."""
    p = _require_padic(s)
    eps = _positive(eps)
    head, _ = head_sum(s, eps)
    return (total_length(s) - head) / p


def thick_volume(s: FractalString, eps) -> Fraction:
    """``zeta(1) - (1/p) * sum(l for l >= eps)``."""
    p = _require_padic(s)
    eps = _positive(eps)
    head, _ = head_sum(s, eps)
    return total_length(s) - head / p


def arch_volume(s: FractalString, eps) -> Fraction:
    """Real inner tube: ``sum(2*eps for l >= 2*eps) + sum(l for l < 2*eps)``."""
    if not s.place.is_archimedean:
        raise InputError("arch_volume needs an archimedean string")
    eps = _positive(eps)
    head, count = head_sum(s, 2 * eps)
    return 2 * eps * count + total_length(s) - head


@dataclass(frozen=True)
class StepFunction:
    """``V`` as a left-continuous step function with breakpoints ``e_1 > e_2 > ...``.

    ``values[i]`` is the value on ``(e_{i+1}, e_i]``; ``head_value`` applies for
    ``eps > e_1``.  Below the last breakpoint the string itself is consulted.
    """

    breakpoints: tuple
    values: tuple
    head_value: Fraction
    tail: FractalString = field(repr=False, compare=False)

    def __call__(self, eps) -> Fraction:
        eps = _positive(eps)
        if not self.breakpoints or eps > self.breakpoints[0]:
            return self.head_value
        if eps <= self.breakpoints[-1]:
            return thin_volume(self.tail, eps)
        # breakpoints are decreasing; find i with e_{i+1} < eps <= e_i
        neg = [-b for b in self.breakpoints]
        i = bisect.bisect_right(neg, -eps) - 1
        return self.values[i]


def volume_step_function(s: FractalString, eps_min) -> StepFunction:
    p = _require_padic(s)
    eps_min = _positive(eps_min)
    zeta1 = total_length(s)
    breaks, values = [], []
    head = Fraction(0)
    for length, mult in s.entries():
        if length < eps_min:
            break
        breaks.append(length)
        head += length * mult
        values.append((zeta1 - head) / p)
    return StepFunction(tuple(breaks), tuple(values), zeta1 / p, s)


@dataclass(frozen=True)
class TruncationPolicy:
    """Keep dimensions with ``|Im w| <= (terms + 1/2) * period``; skip grid points within
    ``jump_window`` (in units of one period of ``log_base(1/eps)``) of a breakpoint."""

    terms: int = 500
    jump_window: float = 0.01

    def __post_init__(self):
        if self.terms < 0:
            raise InputError("terms must be nonnegative")
        if not 0 <= self.jump_window < 0.5:
            raise InputError("jump_window must lie in [0, 0.5)")


def _line_points(line, terms: int) -> np.ndarray:
    """Imaginary parts on one line inside the symmetric cutoff, so conjugate lines pair up."""
    cutoff = (terms + 0.5) * line.period
    lo = math.ceil((-cutoff - line.base_imag) / line.period - 1e-9)
    hi = math.floor((cutoff - line.base_imag) / line.period + 1e-9)
    return line.base_imag + line.period * np.arange(lo, hi + 1)


def tube_formula_terms(dims: DimensionSet, policy: TruncationPolicy):
    """``(coefficients, omegas)`` of the truncated formula as flat complex arrays."""
    coeffs, omegas = [], []
    for line in dims:
        if line.multiplicity != 1:
            raise UnsupportedMultiplicityError(
                f"line Re s = {line.real_part:.6g} has multiplicity {line.multiplicity}")
        w = line.real_part + 1j * _line_points(line, policy.terms)
        if np.any(np.abs(1 - w) < 1e-12):
            raise FormulaSingularityError("a complex dimension equals 1")
        coeffs.append(np.full(w.shape, line.residue_base / dims.base, dtype=complex))
        omegas.append(w)
    if not coeffs:
        return np.empty(0, dtype=complex), np.empty(0, dtype=complex)
    return np.concatenate(coeffs), np.concatenate(omegas)


def tube_formula_truncated(dims: DimensionSet, eps, policy: TruncationPolicy = TruncationPolicy()):
    """Truncated tube formula at ``eps`` (scalar or array); the error term is zero here.

    The kept set of dimensions is closed under conjugation, so the exact sum is
    real and only the real part is returned.
    """
    coeffs, omegas = tube_formula_terms(dims, policy)
    eps_arr = np.atleast_1d(np.asarray(eps, dtype=float))
    if np.any(eps_arr <= 0):
        raise InputError("eps must be positive")
    if omegas.size == 0:
        out = np.zeros(eps_arr.shape)
    else:
        weights = coeffs / (1 - omegas)
        logs = np.log(eps_arr)[:, None]
        out = (np.exp((1 - omegas)[None, :] * logs) @ weights).real
    return float(out[0]) if np.ndim(eps) == 0 else out


def near_breakpoint(eps, base: int, window: float) -> bool:
    """True when ``log_base(1/eps)`` is within ``window`` of an integer (every lattice length)."""
    x = -math.log(float(eps)) / math.log(base)
    return abs(x - round(x)) < window


def periodic_form(dims: DimensionSet, policy: TruncationPolicy = TruncationPolicy()
                  ) -> tuple[float, Callable]:
    """``(1 - D, G)`` with ``V(eps) ~ eps**(1 - D) * G(log_base(1/eps))`` for a single line."""
    if len(dims) != 1:
        raise NotApplicableError(f"periodic form needs exactly one line, got {len(dims)}")
    line = dims.lines[0]
    coeffs, omegas = tube_formula_terms(dims, policy)
    weights = coeffs / (1 - omegas)
    freqs = omegas.imag * math.log(dims.base)

    def sampler(x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        vals = (np.exp(1j * np.outer(xs, freqs)) @ weights).real
        return float(vals[0]) if np.ndim(x) == 0 else vals

    return 1 - line.real_part, sampler


def fractional_power_fourier(b: float, x, terms: int):
    """Symmetric partial sum of the Fourier series of ``b**-frac(x)``.

    ``((b-1)/b) * sum(e^{2 pi i n x} / (log b + 2 pi i n), |n| <= terms)`` in real form.
    """
    if b <= 0 or b == 1:
        raise InputError("b must be positive and different from 1")
    if terms < 1:
        raise InputError("terms must be at least 1")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs == np.round(xs)):
        raise JumpPointError("the series converges to the jump midpoint at integer x")
    lb = math.log(b)
    n = np.arange(1, terms + 1, dtype=float)
    angle = 2 * math.pi * np.outer(xs, n)
    pairs = 2 * (lb * np.cos(angle) + 2 * math.pi * n * np.sin(angle)) / (lb**2 + (2 * math.pi * n)**2)
    out = (b - 1) / b * (1 / lb + pairs.sum(axis=1))
    return float(out[0]) if np.ndim(x) == 0 else out


def log_grid(eps_min, eps_max, count: int) -> list[Fraction]:
    """``count`` log-uniform points on ``[eps_min, eps_max)``, each an exact binary rational."""
    lo, hi = float(to_fraction(eps_min)), float(to_fraction(eps_max))
    if not 0 < lo < hi:
        raise InputError("need 0 < eps_min < eps_max")
    if count < 2:
        raise InputError("count must be at least 2")
    t = np.arange(count) / count
    return [Fraction(float(v)) for v in lo * (hi / lo) ** t]


@dataclass(frozen=True)
class TubeReport:
    grid: tuple
    exact: tuple
    formula: tuple
    abs_err: tuple
    rel_err: tuple
    excluded: tuple
    terms: int
    jump_window: float

    @property
    def max_rel_err(self) -> float:
        kept = [r for r, x in zip(self.rel_err, self.excluded) if not x]
        return max(kept) if kept else 0.0

    @property
    def excluded_count(self) -> int:
        return sum(self.excluded)

    def rows(self):
        for row in zip(self.grid, self.exact, self.formula, self.abs_err, self.rel_err,
                       self.excluded):
            yield row


def verify_tube(s: FractalString, grid: Sequence, policy: TruncationPolicy = TruncationPolicy(),
                dims: Optional[DimensionSet] = None) -> TubeReport:
    """Compare exact thin volumes with the truncated tube formula on ``grid``."""
    base = _require_padic(s)
    dims = string_dimensions(s) if dims is None else dims
    grid = [_positive(e) for e in grid]
    exact = [float(thin_volume(s, e)) for e in grid]
    formula = tube_formula_truncated(dims, np.array([float(e) for e in grid]), policy)
    abs_err, rel_err, excluded = [], [], []
    for e, v, f in zip(grid, exact, formula):
        err = abs(f - v)
        abs_err.append(err)
        rel_err.append(err / abs(v) if v else (0.0 if err == 0 else math.inf))
        excluded.append(near_breakpoint(e, base, policy.jump_window))
    return TubeReport(tuple(float(e) for e in grid), tuple(exact), tuple(float(f) for f in formula),
                      tuple(abs_err), tuple(rel_err), tuple(excluded), policy.terms,
                      policy.jump_window)
