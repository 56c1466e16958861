import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from padic_fractal import (Explicit, FractalString, Place, RationalLattice, RationalZeta, Window,
                           abscissa, cantor3, complex_dimensions, euler_string,
                           partial_euler_product, residue_at, tubular_zeta, zeta_closed_form,
                           zeta_eval, zeta_partial_sum)
from padic_fractal.errors import (DomainError, EvaluationAtPoleError, FormulaSingularityError,
                                  InputError, ModelError, UnsupportedMultiplicityError)
from padic_fractal.strings import ArchExplicit, arch_cantor3
from padic_fractal.zeta import dirichlet_partial_sum, string_dimensions, tail_bound, zeta_value

from oracles import dirichlet_sum, richardson_residue

F = Fraction
PRESETS = [euler_string(2), euler_string(3), euler_string(5), cantor3()]
# 1/(1 - 2 z**2) over p = 3: two lines, at theta = 0 and theta = period/2
TWO_LINE = FractalString(Place.padic(3), RationalLattice((1,), (1, 0, -2)))
DOUBLE = FractalString(Place.padic(3), RationalLattice((1,), (1, -2, 1)))


def test_closed_forms():
    z = zeta_closed_form(euler_string(5))
    assert (z.numerator, z.denominator, z.base) == ((1,), (1, -1), 5)
    z = zeta_closed_form(cantor3())
    assert (z.numerator, z.denominator) == ((0, 1), (1, -2))
    z = zeta_closed_form(FractalString(Place.padic(3), Explicit(((1, 2),))))
    assert (z.numerator, z.denominator) == ((0, 2), (1,))
    with pytest.raises(ModelError):
        zeta_closed_form(FractalString(Place.arch(), ArchExplicit(((F(1, 2), 1),))))


def test_closed_form_negative_exponents():
    s = FractalString(Place.padic(2), Explicit(((-1, 1), (0, 1))))
    assert zeta_eval(zeta_closed_form(s), 1) == pytest.approx(3)


def test_eval_examples():
    assert zeta_eval(zeta_closed_form(euler_string(2)), 1) == pytest.approx(2, abs=1e-15)
    assert zeta_eval(zeta_closed_form(cantor3()), 1) == pytest.approx(1, abs=1e-15)
    s = FractalString(Place.padic(2), Explicit(((1, 1),)))
    assert zeta_eval(zeta_closed_form(s), 0) == 1


def test_eval_at_pole_raises():
    z = zeta_closed_form(euler_string(2))
    with pytest.raises(EvaluationAtPoleError):
        zeta_eval(z, 0)
    with pytest.raises(EvaluationAtPoleError):
        zeta_eval(z, 2j * math.pi / math.log(2))


def test_reduction_cancels_common_roots():
    z = RationalZeta(3, (1, -1), (1, -3, 2))  # (1-z)/((1-z)(1-2z))
    assert z.denominator == (1, -2)
    assert len(complex_dimensions(z)) == 1


def test_partial_sum_examples():
    value, bound = zeta_partial_sum(euler_string(2), 2, 30)
    assert abs(value - F(4, 3)) <= bound + 1e-15
    assert bound == pytest.approx(F(4, 3) * 4.0**-30, rel=1e-6)
    value, bound = zeta_partial_sum(cantor3(), 1, 40)
    assert abs(value - 1) <= bound + 1e-15
    s = FractalString(Place.padic(2), Explicit(((0, 1), (2, 3))))
    value, bound = zeta_partial_sum(s, 2, 5)
    assert bound == 0 and value == pytest.approx(1 + 3 / 16, abs=1e-15)


def test_partial_sum_bound_unavailable_left_of_abscissa():
    value, bound = zeta_partial_sum(cantor3(), 0.5, 10)
    assert bound is None and value.real > 0


def test_tail_bound_is_upper_bound():
    s = cantor3()
    exact_tail = sum(2 ** (n - 1) * 3.0 ** (-n * 1.3) for n in range(21, 400))
    assert exact_tail <= tail_bound(s, 1.3, 20) <= exact_tail * (1 + 1e-9)


@pytest.mark.parametrize("s", PRESETS + [TWO_LINE], ids=lambda s: s.name)
def test_eval_matches_partial_sums(s):
    rng = np.random.default_rng(11)
    sigma = abscissa(zeta_closed_form(s))
    z = zeta_closed_form(s)
    for _ in range(20):
        point = complex(rng.uniform(sigma + 0.2, sigma + 3), rng.uniform(-20, 20))
        value, bound = zeta_partial_sum(s, point, 60)
        assert abs(zeta_eval(z, point) - value) <= bound + 1e-12


@pytest.mark.parametrize("s", PRESETS + [TWO_LINE], ids=lambda s: s.name)
def test_periodicity(s):
    z = zeta_closed_form(s)
    rng = np.random.default_rng(5)
    for _ in range(50):
        point = complex(rng.uniform(-2, 3), rng.uniform(-30, 30))
        shifted = point + 1j * z.period
        assert abs(zeta_eval(z, shifted) - zeta_eval(z, point)) <= 1e-12 * (1 + abs(zeta_eval(z, point)))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_euler_dimensions(p):
    dims = complex_dimensions(zeta_closed_form(euler_string(p)))
    assert len(dims) == 1
    line = dims.lines[0]
    assert (line.real_part, line.base_imag) == (0.0, 0.0)
    assert line.period == pytest.approx(2 * math.pi / math.log(p), abs=1e-15)
    assert abs(line.residue_base - 1 / math.log(p)) <= 1e-12


def test_cantor_dimensions():
    line, = complex_dimensions(zeta_closed_form(cantor3())).lines
    assert abs(line.real_part - math.log(2) / math.log(3)) <= 1e-12
    assert abs(line.residue_base - 1 / (2 * math.log(3))) <= 1e-12
    assert abs(3 ** -complex(line.real_part, line.base_imag) - line.source_root) <= 1e-12


def test_finite_string_has_no_dimensions():
    z = zeta_closed_form(FractalString(Place.padic(2), Explicit(((0, 1), (4, 7)))))
    assert len(complex_dimensions(z)) == 0
    assert abscissa(z) == -math.inf


def test_two_line_string():
    dims = string_dimensions(TWO_LINE)
    assert len(dims) == 2
    period = 2 * math.pi / math.log(3)
    d = math.log(2) / (2 * math.log(3))
    assert [line.real_part for line in dims] == pytest.approx([d, d], abs=1e-12)
    assert sorted(line.base_imag for line in dims) == pytest.approx([0, period / 2], abs=1e-12)
    assert all(line.real_part <= abscissa(zeta_closed_form(TWO_LINE)) + 1e-12 for line in dims)


def test_window_filters():
    z = zeta_closed_form(TWO_LINE)
    assert len(complex_dimensions(z, Window(min_real=0.4))) == 0
    band = Window(imag_band=(1.0, 4.0))  # only theta = period/2 ~ 2.86 fits
    lines = complex_dimensions(z, band).lines
    assert len(lines) == 1 and lines[0].base_imag > 1
    points = complex_dimensions(z, band).points(3)
    assert points and all(1.0 <= w.imag <= 4.0 for w in points)
    with pytest.raises(InputError):
        Window(imag_band=(2, 1))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_residue_euler(p):
    z = zeta_closed_form(euler_string(p))
    for nu in (-2, 0, 1, 3):
        omega = 2j * math.pi * nu / math.log(p)
        assert abs(residue_at(z, omega) - 1 / math.log(p)) <= 1e-12


def test_residue_cantor():
    z = zeta_closed_form(cantor3())
    omega = math.log(2) / math.log(3) + 5j * z.period
    assert abs(residue_at(z, omega) - 1 / (2 * math.log(3))) <= 1e-12


@pytest.mark.parametrize("s", PRESETS + [TWO_LINE], ids=lambda s: s.name)
def test_residue_matches_difference_quotient(s):
    z = zeta_closed_form(s)
    for line in complex_dimensions(z):
        omega = line.point(0)
        oracle = richardson_residue(lambda w: zeta_eval(z, w), omega)
        assert abs(residue_at(z, omega) - oracle) <= 1e-8


def test_residue_errors():
    z = zeta_closed_form(euler_string(2))
    with pytest.raises(InputError):
        residue_at(z, 0.5)
    zd = zeta_closed_form(DOUBLE)
    line, = complex_dimensions(zd).lines
    assert line.multiplicity == 2 and line.residue_base is None
    with pytest.raises(UnsupportedMultiplicityError):
        residue_at(zd, line.point(0))


def test_abscissa_examples():
    assert abscissa(zeta_closed_form(euler_string(7))) == 0
    assert abscissa(zeta_closed_form(cantor3())) == pytest.approx(0.630930, abs=1e-6)


def test_tubular_zeta():
    # zeta(2) = 4/3 for the 2-adic Euler string, so (1/2)(4/3)(1)/(1 - 2)
    assert tubular_zeta(zeta_closed_form(euler_string(2)), 1, 2) == pytest.approx(-2 / 3)
    zc = zeta_closed_form(cantor3())
    assert tubular_zeta(zc, F(1, 3), 2) == pytest.approx(-zeta_eval(zc, 2))
    zero = RationalZeta(2, (1, -2), (1,))  # vanishes where 2**-s = 1/2, i.e. s = 1 + 2 pi i k/log 2
    assert abs(tubular_zeta(zero, 1, 1 + 2j * math.pi / math.log(2))) < 1e-15
    with pytest.raises(FormulaSingularityError):
        tubular_zeta(zc, 1, 1)
    with pytest.raises(EvaluationAtPoleError):
        tubular_zeta(zc, 1, math.log(2) / math.log(3))


def test_zeta_value_arch():
    s = FractalString(Place.arch(), ArchExplicit(((F(1, 2), 1), (F(1, 3), 2))))
    assert zeta_value(s, 2) == pytest.approx(0.25 + 2 / 9)
    assert zeta_value(arch_cantor3(), 1) == pytest.approx(1)


def test_euler_product_examples():
    assert partial_euler_product(2, 2) == pytest.approx(4 / 3, abs=1e-15)
    assert abs(partial_euler_product(2, 10**5) - dirichlet_partial_sum(2, 10**6)) <= 1e-5
    assert abs(partial_euler_product(3, 10**4) - dirichlet_partial_sum(3, 10**5)) <= 1e-8
    assert abs(dirichlet_partial_sum(2 + 1j, 500) - dirichlet_sum(2 + 1j, 500)) < 1e-12
    with pytest.raises(DomainError):
        partial_euler_product(1, 100)
    with pytest.raises(DomainError):
        partial_euler_product(2, 1)
