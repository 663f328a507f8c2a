"""Closed-form mutual information, optimal variances and high-gain limits.

Every expression is evaluated in nats and converted at the boundary. ``n`` is
the mean photon number of the whole alphabet (total over both uses for the
double-use channels) and ``g`` the phase-insensitive gain.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

LN2 = math.log(2.0)


def _sq_optimum(a: float, g: float) -> float:
    # maximiser of (a - V - 1/V) / (V + (g-1)/g); a = 4 x (photons per mode + 1/2)
    if math.isinf(g):
        return (1.0 + math.sqrt(a + 2.0)) / (a + 1.0)
    return (g + math.sqrt(g * g + (a * g + g - 1.0) * (g - 1.0))) / (a * g + g - 1.0)


def _sq_snr(a: float, g: float, v: float) -> float:
    return g * (a - v - 1.0 / v) / (g * v + g - 1.0)


def _eq1(n, g):
    return 0.5 * math.log1p(4 * n)


def _eq2(n, g):
    return math.log1p(2 * n)


def _eq3(n, g):
    return math.log1p(n)


def _eq4(n, g):
    return 0.5 * math.log1p(4 * g * n / (2 * g - 1))


def _eq5(n, g):
    a = 4 * (n + 0.5)
    return 0.5 * math.log1p(_sq_snr(a, g, _sq_optimum(a, g)))


def _eq7(n, g):
    return math.log1p(2 * n)


def _eq8(n, g):
    return 2 * math.log1p(n)


def _eq9(n, g):
    return 2 * math.log1p(n / 2)


def _eq10(n, g):
    return math.log1p(2 * g * n / (2 * g - 1))


def _eq11(n, g):
    a = 2 * (n + 1)
    return math.log1p(_sq_snr(a, g, _sq_optimum(a, g)))


def _eq13(n, g):
    return math.log1p(n + n * n / 2)


def _eq14(n, g):
    return math.log1p(2 * n)


def _eq15(n, g):
    return 2 * math.log1p(n)


def _dense(n, g):
    return math.log1p(n + n * n)


def _eq4_limit(n, g):
    return 0.5 * math.log1p(2 * n)


def _eq10_limit(n, g):
    return math.log1p(n)


def _a1(n, g):
    s = math.sqrt(n + 1)
    return 0.5 * math.log(s * (4 * n + 3) ** 2 / (5 * s + 4 * n * (s + 1) + 4))


def _a2(n, g):
    s = math.sqrt(2) * math.sqrt(n + 2)
    return math.log(s * (2 * n + 3) ** 2 / (2 * s * n + 4 * n + 5 * s + 8))


FORMULAS: dict[str, Callable[[float, float], float]] = {
    "eq1": _eq1,
    "eq2": _eq2,
    "eq3": _eq3,
    "eq4": _eq4,
    "eq5": _eq5,
    "eq6": _eq3,
    "eq7": _eq7,
    "eq8": _eq8,
    "eq9": _eq9,
    "eq10": _eq10,
    "eq11": _eq11,
    "eq12": _eq9,
    "eq13": _eq13,
    "eq14": _eq14,
    "eq15": _eq15,
    "dense": _dense,
    "eq4_limit": _eq4_limit,
    "eq10_limit": _eq10_limit,
    "A1": _a1,
    "A2": _a2,
}

# Formulas that do not depend on the gain (either unamplified or gain invariant).
GAIN_FREE = {"eq1", "eq2", "eq3", "eq6", "eq7", "eq8", "eq9", "eq12", "eq13", "eq14", "eq15",
             "dense", "eq4_limit", "eq10_limit", "A1", "A2"}

# Amplified formula reproduced by each scheme of the catalog.
SCHEME_FORMULA = {
    "1d_coh_1": "eq4",
    "1d_sq_1": "eq5",
    "2d_coh_1": "eq6",
    "1d_coh_2": "eq10",
    "1d_sq_2": "eq11",
    "2d_coh_2": "eq12",
    "epr_disp_2": "eq13",
    "conj_coh_2": "eq14",
    "epr_conj_2": "eq15",
    "dense_coding": "dense",
}

HIGH_GAIN_LIMIT = {
    "1d_coh_1": "eq4_limit",
    "1d_coh_2": "eq10_limit",
    "1d_sq_1": "A1",
    "1d_sq_2": "A2",
}


def resolve(formula_id: str) -> str:
    """Map a scheme id or equation tag to an equation tag."""
    tag = SCHEME_FORMULA.get(formula_id, formula_id)
    if tag not in FORMULAS:
        raise KeyError(f"unknown formula or scheme id {formula_id!r}")
    return tag


def formula_mi(formula_id: str, n: float, g: float = 1.0, base: float = 2.0) -> float:
    """Closed-form mutual information for a scheme id or equation tag.

    Gain-free formulas accept any ``g`` and ignore it.
    """
    tag = resolve(formula_id)
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    if g < 1:
        raise ValueError(f"gain must be >= 1, got {g}")
    if n == 0:
        return 0.0
    return FORMULAS[tag](n, g) / math.log(base)


def optimal_variance(scheme_id: str, n: float, g: float = 1.0) -> float:
    """Optimal squeezing (or two-mode squeezing) variance for the free-variance schemes.

    ``g`` may be ``math.inf`` for the high-gain limit of the squeezed alphabets.
    """
    if n < 0:
        raise ValueError(f"photon number must be >= 0, got {n}")
    if g < 1:
        raise ValueError(f"gain must be >= 1, got {g}")
    if n == 0:
        return 1.0
    if scheme_id == "1d_sq_1":
        return _sq_optimum(4 * (n + 0.5), g)
    if scheme_id == "1d_sq_2":
        return _sq_optimum(2 * (n + 1), g)
    if scheme_id in ("epr_disp_2", "epr_conj_2"):
        return 1.0 / (1.0 + n)
    if scheme_id == "dense_coding":
        return 1.0 / (2.0 * n + 1.0)
    raise KeyError(f"scheme {scheme_id!r} has no free variance")


def high_gain_limit(scheme_id: str, n: float, base: float = 2.0) -> float:
    try:
        tag = HIGH_GAIN_LIMIT[scheme_id] if scheme_id in HIGH_GAIN_LIMIT else {
            "eq4": "eq4_limit", "eq10": "eq10_limit", "eq5": "A1", "eq11": "A2"}[scheme_id]
    except KeyError:
        raise KeyError(f"no high-gain limit for {scheme_id!r}") from None
    return formula_mi(tag, n, 1.0, base)


def formula_curve(formula_id: str, n_values, g: float = 1.0, base: float = 2.0) -> np.ndarray:
    return np.array([formula_mi(formula_id, float(n), g, base) for n in n_values])
