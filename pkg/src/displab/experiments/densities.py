"""The fixed suite of piecewise-constant test densities.

Twenty densities on [0, M] whose distribution functions pass the grid
logconcavity certificate. Both the calibration run and the acceptance
tests iterate over exactly this list, so the frozen width-bound constant
is measured on the same inputs it is later checked against.
"""
from __future__ import annotations

import numpy as np

from ..stats import PiecewiseConstantDensity

__all__ = ["density_suite"]


def _density(breakpoints, levels) -> PiecewiseConstantDensity:
    bp = np.asarray(breakpoints, dtype=np.float64)
    lv = np.asarray(levels, dtype=np.float64)
    total = float(np.sum(lv * np.diff(bp)))
    return PiecewiseConstantDensity(bp, lv / total)


def _staircase(m: float, shape, pieces: int) -> PiecewiseConstantDensity:
    bp = np.linspace(0.0, m, pieces + 1)
    mids = 0.5 * (bp[:-1] + bp[1:])
    return _density(bp, shape(mids))


def density_suite() -> list[tuple[str, PiecewiseConstantDensity]]:
    suite: list[tuple[str, PiecewiseConstantDensity]] = []

    suite.append(("uniform_1", _density([0.0, 1.0], [1.0])))
    suite.append(("uniform_5", _density([0.0, 5.0], [0.2])))
    suite.append(("uniform_shifted", _density([0.0, 1.0, 2.0], [0.0, 1.0])))

    for name, m, ratio, pieces in [
        ("geometric_half", 4.0, 0.5, 8),
        ("geometric_08", 8.0, 0.8, 16),
        ("geometric_09", 6.0, 0.9, 24),
    ]:
        levels = [ratio**j for j in range(pieces)]
        suite.append((name, _staircase(m, lambda x, lv=levels, mm=m, p=pieces: np.asarray(lv), pieces)))

    for name, m, pieces in [("exp_8", 8.0, 32), ("exp_3", 3.0, 12)]:
        suite.append((name, _staircase(m, lambda x: np.exp(-x), pieces)))

    for name, m, pieces in [("halfgauss_4", 4.0, 16), ("halfgauss_2", 2.0, 10)]:
        suite.append((name, _staircase(m, lambda x: np.exp(-0.5 * x * x), pieces)))

    for name, m, peak, pieces in [
        ("triangular_mid", 2.0, 1.0, 20),
        ("triangular_early", 3.0, 0.6, 24),
        ("triangular_late", 2.0, 1.4, 16),
    ]:
        suite.append(
            (
                name,
                _staircase(
                    m,
                    lambda x, pk=peak, mm=m: np.where(x <= pk, x / pk, (mm - x) / (mm - pk)),
                    pieces,
                ),
            )
        )

    for name, m, lo, hi, pieces in [
        ("trapezoid_wide", 4.0, 1.0, 3.0, 20),
        ("trapezoid_narrow", 2.0, 0.5, 1.0, 16),
    ]:
        suite.append(
            (
                name,
                _staircase(
                    m,
                    lambda x, a=lo, b=hi, mm=m: np.where(
                        x <= a, x / a, np.where(x <= b, 1.0, (mm - x) / (mm - b))
                    ),
                    pieces,
                ),
            )
        )

    # logistic-like rise with exponential tail
    suite.append(("rise_tail", _staircase(6.0, lambda x: np.minimum(x, 1.0) * np.exp(-0.7 * x), 30)))
    # plateau with linear fall
    suite.append(("plateau_fall", _density([0.0, 1.0, 1.5, 2.0, 2.5, 3.0], [1.0, 1.0, 0.75, 0.5, 0.25])))
    # two-step decreasing
    suite.append(("two_step", _density([0.0, 1.0, 3.0], [0.7, 0.15])))
    # fine geometric staircase with long tail
    suite.append(("fine_tail", _staircase(10.0, lambda x: np.exp(-0.45 * x), 50)))
    # gentle dome
    suite.append(("dome", _staircase(2.0, lambda x: 1.0 - 0.9 * (x - 1.0) ** 2, 20)))

    assert len(suite) == 20
    return suite
