"""Exact p-adic fractal strings: tube volumes, geometric zeta functions and complex dimensions."""

from .errors import *  # noqa: F401,F403
from .padic import (INF, Ball, BallRelation, BallSet, PAdicScalar, Prime, ball_measure,
                    ball_relation, canonical_decomposition, membership, padic_abs, padic_dist,
                    sphere_measure, valuation)
from .strings import (ArchExplicit, EulerPreset, Explicit, FractalString, Place, RationalLattice,
                      arch_cantor3, arch_geometric, cantor3, counting_function, euler_string,
                      from_balls, lengths, load_string, preset, string_from_json, string_to_json,
                      total_length)
from .zeta import (FULL_PLANE, DimensionLine, DimensionSet, RationalZeta, Window, abscissa,
                   complex_dimensions, partial_euler_product, residue_at, tubular_zeta,
                   zeta_closed_form, zeta_eval, zeta_partial_sum)
from .tube import (StepFunction, TruncationPolicy, TubeReport, arch_volume,
                   fractional_power_fourier, periodic_form, thick_volume, thin_volume,
                   tube_formula_truncated, verify_tube, volume_step_function)
from .analysis import (DimensionReport, MellinCheck, arch_mellin_check, content_bracket,
                       dimension_equality_report, growth_rate_fit, mellin_check_N, mellin_check_V,
                       minkowski_fit)

__version__ = "0.1.0"
