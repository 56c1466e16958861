"""Acceptance criteria, one test per criterion; each prints a PASS/FAIL line."""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from padic_fractal import (Ball, PAdicScalar, TruncationPolicy, canonical_decomposition, cantor3,
                           complex_dimensions, dimension_equality_report, euler_string,
                           fractional_power_fourier, mellin_check_N, mellin_check_V,
                           arch_mellin_check, padic_dist, partial_euler_product, residue_at,
                           thick_volume, thin_volume, total_length, verify_tube,
                           volume_step_function, zeta_closed_form, zeta_eval)
from padic_fractal.strings import Explicit, FractalString, Place, arch_cantor3, arch_geometric
from padic_fractal.tube import log_grid
from padic_fractal.zeta import dirichlet_partial_sum, string_abscissa

from oracles import maximal_balls, residues_of_ball, richardson_residue

F = Fraction


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, elapsed, limit):
        ok = ok and elapsed < limit
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail} "
                  f"[{elapsed:.2f}s, limit {limit}s]")
        assert ok, detail
    return emit


def test_criterion_1_residues(report):
    t = time.perf_counter()
    worst_exact, worst_oracle = 0.0, 0.0
    cases = [(euler_string(p), 1 / math.log(p)) for p in (2, 3, 5)]
    cases.append((cantor3(), 1 / (2 * math.log(3))))
    for s, expected in cases:
        z = zeta_closed_form(s)
        line, = complex_dimensions(z).lines
        for nu in (-3, -1, 0, 1, 2, 5):
            omega = line.point(nu)
            r = residue_at(z, omega)
            worst_exact = max(worst_exact, abs(r - expected))
            worst_oracle = max(worst_oracle,
                               abs(r - richardson_residue(lambda w: zeta_eval(z, w), omega)))
    elapsed = time.perf_counter() - t
    report(1, worst_exact <= 1e-12 and worst_oracle <= 1e-8,
           f"max |res - closed form| = {worst_exact:.2e} (<= 1e-12), "
           f"max |res - difference quotient| = {worst_oracle:.2e} (<= 1e-8)", elapsed, 1)


def test_criterion_2_dimension_structure(report):
    t = time.perf_counter()
    ok = True
    for p in (2, 3, 5, 7):
        lines = complex_dimensions(zeta_closed_form(euler_string(p))).lines
        ok &= len(lines) == 1
        ok &= lines[0].real_part == 0 and lines[0].base_imag == 0
        ok &= abs(lines[0].period - 2 * math.pi / math.log(p)) <= 1e-15
    line, = complex_dimensions(zeta_closed_form(cantor3())).lines
    err = abs(line.real_part - math.log(2) / math.log(3))
    ok &= err <= 1e-12
    report(2, ok, f"Euler: one line (0, 0, 2pi/log p); Cantor |Re - log_3 2| = {err:.1e}",
           time.perf_counter() - t, 1)


@pytest.mark.parametrize("name,s", [("euler:p=2", euler_string(2)), ("euler:p=3", euler_string(3)),
                                    ("cantor3", cantor3())])
def test_criterion_3_tube_formula(report, name, s):
    t = time.perf_counter()
    grid = log_grid(F(1, s.base**10), 1, 200)
    r500 = verify_tube(s, grid, TruncationPolicy(500, 0.01))
    r50 = verify_tube(s, grid, TruncationPolicy(50, 0.01))
    ok = r500.max_rel_err <= 5e-3 and r500.max_rel_err < r50.max_rel_err
    report(3, ok, f"{name}: max rel err N=500 {r500.max_rel_err:.2e} (<= 5e-3), "
                  f"N=50 {r50.max_rel_err:.2e}, excluded {r500.excluded_count}/200",
           time.perf_counter() - t, 10)


def test_criterion_4_thick_thin(report):
    t = time.perf_counter()
    rng = random.Random(4)
    ok = True
    for s in (euler_string(2), euler_string(3), euler_string(5), cantor3()):
        p = s.place.prime
        gap = (1 - F(1, p)) * total_length(s)
        for _ in range(50):
            eps = F(rng.randint(1, 10**6), 10**6) * F(1, p ** rng.randint(0, 20))
            ok &= thick_volume(s, eps) - thin_volume(s, eps) == gap
    limits = {p: thin_volume(euler_string(p), F(1, p**30)) for p in (2, 3, 5)}
    ok &= all(v < F(1, p**29) for p, v in limits.items())
    report(4, ok, "thick - thin = (1 - 1/p) zeta(1) exactly on 50 eps per preset; "
                  f"V(2^-30) = {float(limits[2]):.3e} < 2^-29", time.perf_counter() - t, 1)


def test_criterion_5_mellin(report):
    t = time.perf_counter()
    rng = np.random.default_rng(5)
    worst, worst_tail, count = 0.0, 0.0, 0
    for s in (euler_string(2), euler_string(3), euler_string(5), cantor3()):
        sigma = string_abscissa(s)
        for _ in range(10):
            point = complex(rng.uniform(sigma + 0.2, 2), rng.uniform(-10, 10))
            for check in (mellin_check_V, mellin_check_N):
                c = check(s, point)
                worst = max(worst, c.abs_err)
                worst_tail = max(worst_tail, c.tail_bound)
                count += 1
    arch_worst = 0.0
    for s in (arch_geometric(2), arch_cantor3()):
        sigma = string_abscissa(s)
        for _ in range(10):
            point = complex(rng.uniform(sigma + 0.2, 2), rng.uniform(-10, 10))
            c = arch_mellin_check(s, point)
            arch_worst = max(arch_worst, c.abs_err)
            worst_tail = max(worst_tail, c.tail_bound)
    ok = worst <= 1e-8 and arch_worst <= 1e-6 and worst_tail < 1e-10
    report(5, ok, f"{count} p-adic checks max err {worst:.2e} (<= 1e-8); arch max err "
                  f"{arch_worst:.2e} (<= 1e-6); max certified tail {worst_tail:.1e} (< 1e-10)",
           time.perf_counter() - t, 5)


def test_criterion_6_dimension_equality(report):
    t = time.perf_counter()
    details, ok = [], True
    for s in (euler_string(2), euler_string(3), euler_string(5), cantor3()):
        r = dimension_equality_report(s, 0.02)
        ok &= r.passed and r.sigma_in_unit_interval
        details.append(f"{s.name}: sigma {r.sigma:.4f} mink {r.minkowski.estimate:.4f} "
                       f"growth {r.growth.estimate:.4f}")
    report(6, ok, "; ".join(details), time.perf_counter() - t, 10)


def test_criterion_7_decomposition_oracle(report):
    t = time.perf_counter()
    rng = random.Random(7)
    failures, total = 0, 0
    for p in (2, 3):
        for _ in range(1000):
            depth = rng.randint(1, 4)
            balls = [Ball(F(rng.randrange(p**depth)), rng.randint(0, depth), p)
                     for _ in range(rng.randint(1, 8))]
            result = canonical_decomposition(balls)
            union = set()
            for b in balls:
                union |= residues_of_ball(int(b.key[1]), b.radius_exp, p, 4)
            covered = set()
            for b in result:
                covered |= residues_of_ball(int(b.key[1]), b.radius_exp, p, 4)
            keys = {(b.radius_exp, int(b.key[1])) for b in result}
            failures += covered != union or keys != maximal_balls(union, p, 4)
            total += 1
    report(7, failures == 0, f"{total - failures}/{total} random ball sets match brute force",
           time.perf_counter() - t, 10)


def test_criterion_8_fourier(report):
    t = time.perf_counter()
    rng = np.random.default_rng(8)
    xs = rng.uniform(0, 10, 100)
    xs = xs[xs != np.round(xs)]
    worst = 0.0
    for b in (2, 3):
        approx = fractional_power_fourier(b, xs, 10**4)
        worst = max(worst, float(np.max(np.abs(approx - float(b) ** -(xs - np.floor(xs))))))
    report(8, worst <= 1e-2 and len(xs) == 100,
           f"max |series - b^-frac(x)| = {worst:.2e} (<= 1e-2) over 100 x, b in {{2, 3}}",
           time.perf_counter() - t, 5)


def test_criterion_9_euler_product(report):
    t = time.perf_counter()
    diff = abs(partial_euler_product(2, 10**5) - dirichlet_partial_sum(2, 10**6))
    report(9, diff <= 1e-5, f"|prod_(p<=1e5) - sum_(n<=1e6) n^-2| = {diff:.2e} (<= 1e-5)",
           time.perf_counter() - t, 10)


def test_criterion_10_properties(report):
    t = time.perf_counter()
    rng = random.Random(10)
    failures = 0

    def rand_rational():
        return F(rng.randint(-10**6, 10**6), rng.randint(1, 10**6)) * F(rng.choice([2, 3, 5])) ** rng.randint(-5, 5)

    for _ in range(1000):
        p = rng.choice([2, 3, 5, 7])
        x, y, z = (PAdicScalar(rand_rational(), p) for _ in range(3))
        dxy, dyz, dxz = padic_dist(x, y), padic_dist(y, z), padic_dist(x, z)
        failures += dxz > max(dxy, dyz)
        failures += dxy > dyz and dxz != dxy

    for s in (euler_string(2), cantor3()):
        step = volume_step_function(s, F(1, 3**10))
        eps = sorted(F(rng.randint(1, 10**6), 10**6) ** 4 for _ in range(300))
        values = [step(e) for e in eps]
        failures += values != sorted(values)
        failures += any(step(e) != thin_volume(s, e) for e in eps[::10])

    nprng = np.random.default_rng(10)
    for s in (euler_string(2), euler_string(3), cantor3()):
        z = zeta_closed_form(s)
        for _ in range(50):
            w = complex(nprng.uniform(-2, 3), nprng.uniform(-30, 30))
            a, b = zeta_eval(z, w), zeta_eval(z, w + 1j * z.period)
            failures += abs(a - b) > 1e-12 * (1 + abs(a))

    for _ in range(100):
        p = rng.choice([2, 3, 5])
        entries = [(rng.randint(-2, 8), rng.randint(1, 4)) for _ in range(rng.randint(1, 5))]
        m = rng.randint(1, 4)
        s = FractalString(Place.padic(p), Explicit(tuple(entries)))
        shifted = FractalString(Place.padic(p), Explicit(tuple((e + m, k) for e, k in entries)))
        eps = F(rng.randint(1, 1000), rng.randint(1, 1000))
        failures += thin_volume(shifted, eps) != F(1, p**m) * thin_volume(s, eps * p**m)

    report(10, failures == 0, f"{failures} failures across ultrametric/isosceles (1000 triples), "
                              "step monotonicity, zeta periodicity, scaling covariance",
           time.perf_counter() - t, 30)
