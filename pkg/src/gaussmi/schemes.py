"""Catalog of single- and double-use channel configurations with photon accounting.

Double-use budgets are totals over both modes, and the two uses carry
independent symbols. Non-conjugate double-use schemes go through one
single-mode amplifier per mode; the conjugate and entangled schemes share a
joint two-input amplifier and a Bell measurement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import formulas
from .detection import (
    Amplifier,
    MeasurementModel,
    ModulationModel,
    bell,
    gaussian_mi,
    heterodyne,
    homodyne,
    joint_statistics,
)
from .gaussian import GaussianState, mean_photons, partial_trace, squeeze, two_mode_squeeze, vacuum

SCHEME_IDS = (
    "1d_coh_1",
    "1d_sq_1",
    "2d_coh_1",
    "1d_coh_2",
    "1d_sq_2",
    "2d_coh_2",
    "epr_disp_2",
    "conj_coh_2",
    "epr_conj_2",
    "dense_coding",
)
FREE_VARIANCE = ("1d_sq_1", "1d_sq_2", "epr_disp_2", "epr_conj_2", "dense_coding")
GAIN_INVARIANT = ("2d_coh_1", "2d_coh_2", "epr_disp_2", "conj_coh_2", "epr_conj_2", "dense_coding")
GAIN_DEGRADED = ("1d_coh_1", "1d_sq_1", "1d_coh_2", "1d_sq_2")

# relative slack before a negative signal variance counts as an infeasible budget
_FEASIBILITY_SLACK = 1e-12


class UnknownSchemeError(KeyError):
    pass


class InfeasibleBudgetError(ValueError):
    """The chosen squeezing uses more photons than the budget allows."""


@dataclass(frozen=True, eq=False)
class SchemeSpec:
    id: str
    budget: float
    gain: float
    state: GaussianState
    modulation: ModulationModel
    channel: Amplifier
    detector: MeasurementModel
    signal_modes: tuple[int, ...]
    variance: Optional[float] = None

    @property
    def num_modes(self) -> int:
        return self.state.num_modes


def _signal_variance(total: float, n: float, v: float) -> float:
    vs = total
    if vs < 0:
        if vs >= -_FEASIBILITY_SLACK * max(1.0, n):
            return 0.0
        raise InfeasibleBudgetError(
            f"variance {v} needs more than the {n} photon budget (signal variance {vs:.3g})"
        )
    return vs


def _excess(v: float) -> float:
    # V + 1/V - 2, computed without cancellation near V = 1
    return (1.0 - v) ** 2 / v


def build_scheme(scheme_id: str, n: float, g: float = 1.0,
                 variance: Optional[float] = None) -> SchemeSpec:
    """Assemble one catalog configuration at photon budget ``n`` and gain ``g``.

    ``variance`` overrides the optimal squeezing variance of the free-variance
    schemes (``V_gamma`` for squeezed alphabets, the two-mode squeezed variance
    for the entangled ones).
    """
    if scheme_id not in SCHEME_IDS:
        raise UnknownSchemeError(f"unknown scheme id {scheme_id!r}; known: {', '.join(SCHEME_IDS)}")
    if n < 0:
        raise ValueError(f"photon budget must be >= 0, got {n}")
    if g < 1:
        raise ValueError(f"gain must be >= 1, got {g}")
    if scheme_id in FREE_VARIANCE:
        v = formulas.optimal_variance(scheme_id, n, g) if variance is None else float(variance)
        if v <= 0:
            raise ValueError(f"variance must be positive, got {v}")
    elif variance is not None:
        raise ValueError(f"scheme {scheme_id!r} has no free variance")
    else:
        v = None

    single = lambda *modes: Amplifier(g, tuple((m,) for m in modes))  # noqa: E731
    joint = Amplifier(g, ((0, 1),))
    x_only = np.array([[1.0], [0.0]])
    conjugate = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, -1.0]])
    on_first = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
    signal_modes: tuple[int, ...] = (0,)

    if scheme_id == "1d_coh_1":
        state, channel, detector = vacuum(1), single(0), homodyne(0, "x")
        modulation = ModulationModel([[4 * n]], x_only)
    elif scheme_id == "1d_sq_1":
        state, channel, detector = squeeze(vacuum(1), 0, v), single(0), homodyne(0, "x")
        vs = _signal_variance(4 * n - _excess(v), n, v)
        modulation = ModulationModel([[vs]], x_only)
    elif scheme_id == "2d_coh_1":
        state, channel, detector = vacuum(1), single(0), heterodyne(0)
        modulation = ModulationModel(2 * n * np.eye(2), np.eye(2))
    elif scheme_id == "1d_coh_2":
        state, channel = vacuum(2), single(0, 1)
        detector = homodyne(0, "x") + homodyne(1, "x")
        modulation = ModulationModel(2 * n * np.eye(2), np.kron(np.eye(2), x_only))
        signal_modes = (0, 1)
    elif scheme_id == "1d_sq_2":
        state = squeeze(squeeze(vacuum(2), 0, v), 1, v)
        channel = single(0, 1)
        detector = homodyne(0, "x") + homodyne(1, "x")
        vs = _signal_variance(2 * n - _excess(v), n, v)
        modulation = ModulationModel(vs * np.eye(2), np.kron(np.eye(2), x_only))
        signal_modes = (0, 1)
    elif scheme_id == "2d_coh_2":
        state, channel = vacuum(2), single(0, 1)
        detector = heterodyne(0) + heterodyne(1)
        modulation = ModulationModel(n * np.eye(4), np.eye(4))
        signal_modes = (0, 1)
    elif scheme_id == "conj_coh_2":
        state, channel, detector = vacuum(2), joint, bell((0, 1))
        modulation = ModulationModel(n * np.eye(2), conjugate)
        signal_modes = (0, 1)
    else:
        if v > 1:
            raise ValueError(f"two-mode squeezing variance must lie in (0, 1], got {v}")
        state, channel, detector = two_mode_squeeze(vacuum(2), (0, 1), v), joint, bell((0, 1))
        if scheme_id == "epr_disp_2":
            vs = _signal_variance(2 * n - _excess(v), n, v)
            modulation = ModulationModel(vs * np.eye(2), on_first)
            signal_modes = (0, 1)
        elif scheme_id == "epr_conj_2":
            vs = _signal_variance(n - _excess(v) / 2, n, v)
            modulation = ModulationModel(vs * np.eye(2), conjugate)
            signal_modes = (0, 1)
        else:
            # dense coding: the undisplaced arm is not charged to the budget
            vs = _signal_variance(2 * n - _excess(v) / 2, n, v)
            modulation = ModulationModel(vs * np.eye(2), on_first)

    return SchemeSpec(
        id=scheme_id,
        budget=float(n),
        gain=float(g),
        state=state,
        modulation=modulation,
        channel=channel,
        detector=detector,
        signal_modes=signal_modes,
        variance=v,
    )


def ensemble_state(spec: SchemeSpec) -> GaussianState:
    """Symbol-averaged input state, before the channel."""
    enc = spec.modulation.encode_map
    return GaussianState(spec.state.mean, spec.state.cov + enc @ spec.modulation.symbol_cov @ enc.T)


def photon_budget(spec: SchemeSpec) -> float:
    return mean_photons(partial_trace(ensemble_state(spec), spec.signal_modes))


def evaluate(spec: SchemeSpec, log_base: float = 2.0) -> float:
    """Mutual information of a configuration, computed through the phase-space engine."""
    js = joint_statistics(spec.state, spec.modulation, spec.detector, spec.channel)
    return gaussian_mi(js, log_base)


def scheme_mi(scheme_id: str, n: float, g: float = 1.0, variance: Optional[float] = None,
              log_base: float = 2.0) -> float:
    return evaluate(build_scheme(scheme_id, n, g, variance), log_base)
