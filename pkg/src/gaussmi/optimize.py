"""Golden-section search over free variances and bisection for scheme crossings."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import formulas, schemes

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI2 = (3 - math.sqrt(5)) / 2

VARIANCE_BRACKET = (1e-6, 1.0)
N_BRACKET = (1e-6, 100.0)

# Threshold variants compared in figA1, listed by decreasing large-gain constant.
THRESHOLD_REFERENCE = "eq9"
THRESHOLD_VARIANTS = ("eq11", "eq10", "eq5")


class NoCrossingError(ValueError):
    """The two curves do not change order inside the bracket."""


@dataclass(frozen=True)
class OptimizationResult:
    variance: float
    mi: float
    iterations: int
    bracket_width: float


@dataclass(frozen=True)
class ThresholdCurve:
    gains: tuple[float, ...]
    thresholds: dict[str, tuple[Optional[float], ...]]
    constants: dict[str, float] = field(default_factory=dict)
    fit_gain: float = 1e3


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       tol: float) -> tuple[float, float, int, float]:
    """Maximise a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x), iterations, final bracket width)``.
    """
    a, b = lo, hi
    c = a + INV_PHI2 * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > tol:
        it += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = a + INV_PHI2 * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x, fx = (c, fc) if fc >= fd else (d, fd)
    return x, fx, it, b - a


def _feasible(scheme_id: str, n: float, g: float, v: float) -> bool:
    try:
        schemes.build_scheme(scheme_id, n, g, variance=v)
    except schemes.InfeasibleBudgetError:
        return False
    return True


def feasible_log_bracket(scheme_id: str, n: float, g: float,
                         bracket: tuple[float, float] = VARIANCE_BRACKET) -> tuple[float, float]:
    """Shrink a variance bracket (in log V) to the part the photon budget can afford.

    The squeezing cost ``V + 1/V - 2`` grows monotonically away from ``V = 1``, so
    the feasible set in ``(0, 1]`` is an interval ending at the upper bound.
    """
    lo, hi = math.log(bracket[0]), math.log(bracket[1])
    if not _feasible(scheme_id, n, g, math.exp(hi)):
        raise schemes.InfeasibleBudgetError(f"no feasible variance for {scheme_id} at n={n}")
    if _feasible(scheme_id, n, g, math.exp(lo)):
        return lo, hi
    bad, good = lo, hi
    while good - bad > 1e-13:
        mid = 0.5 * (bad + good)
        if _feasible(scheme_id, n, g, math.exp(mid)):
            good = mid
        else:
            bad = mid
    return good, hi


def maximize_variance(scheme_id: str, n: float, g: float = 1.0, tol: float = 1e-10,
                      bracket: tuple[float, float] = VARIANCE_BRACKET) -> OptimizationResult:
    """Search the free variance of a scheme that maximises its simulated MI.

    The search runs over ``log V``; ``tol`` is the final bracket width in ``log V``.
    """
    if scheme_id not in schemes.FREE_VARIANCE:
        raise KeyError(f"scheme {scheme_id!r} has no free variance")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = feasible_log_bracket(scheme_id, n, g, bracket)

    def objective(log_v):
        return schemes.scheme_mi(scheme_id, n, g, variance=math.exp(log_v))

    x, fx, it, width = golden_section_max(objective, lo, hi, tol)
    return OptimizationResult(variance=math.exp(x), mi=fx, iterations=it, bracket_width=width)


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-9) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo < 0) == (fhi < 0):
        raise NoCrossingError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def crossing_threshold(id_a: str, id_b: str, g: float = 1.0,
                       bracket: tuple[float, float] = N_BRACKET, xtol: float = 1e-9) -> float:
    """Photon number where the closed-form MI of two channels cross."""

    def diff(n):
        return formulas.formula_mi(id_a, n, g, math.e) - formulas.formula_mi(id_b, n, g, math.e)

    return bisect(diff, bracket[0], bracket[1], xtol)


def threshold_curve(gains: Sequence[float], variants: Sequence[str] = THRESHOLD_VARIANTS,
                    reference: str = THRESHOLD_REFERENCE, fit_gain: float = 1e3) -> ThresholdCurve:
    """Photon number above which ``reference`` beats each gain-degraded variant.

    ``None`` marks gains without a finite threshold. The large-gain constant ``c``
    in ``n* ~ c / g`` is read off at ``fit_gain``.
    """
    thresholds = {}
    constants = {}
    for variant in variants:
        row = []
        for g in gains:
            try:
                row.append(crossing_threshold(reference, variant, g))
            except NoCrossingError:
                row.append(None)
        thresholds[variant] = tuple(row)
        constants[variant] = crossing_threshold(reference, variant, fit_gain) * fit_gain
    return ThresholdCurve(tuple(float(g) for g in gains), thresholds, constants, fit_gain)
