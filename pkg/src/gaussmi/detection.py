"""Gaussian measurements and the mutual information of Gaussian symbol/outcome pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .gaussian import (
    GaussianState,
    amplifier_transfer,
    beam_splitter_matrix,
    expand,
    tensor,
    vacuum,
)

SINGULAR_GUARD = 1e-300


class UnboundedInformationError(ArithmeticError):
    """The outcomes determine the symbols exactly (noiseless measurement)."""


@dataclass(frozen=True)
class Ancilla:
    """Reference to the j-th vacuum ancilla appended by a measurement."""

    index: int


ModeRef = Union[int, Ancilla]


@dataclass(frozen=True, eq=False)
class ModulationModel:
    """Gaussian symbol distribution and its linear map onto phase-space displacements.

    ``encode_map`` has shape ``(2M, k)``: a symbol draw ``s`` displaces the state
    by ``encode_map @ s``.
    """

    symbol_cov: np.ndarray
    encode_map: np.ndarray

    def __post_init__(self):
        cov = np.atleast_2d(np.array(self.symbol_cov, dtype=float))
        enc = np.atleast_2d(np.array(self.encode_map, dtype=float))
        if cov.shape[0] != cov.shape[1]:
            raise ValueError("symbol_cov must be square")
        if enc.shape[1] != cov.shape[0]:
            raise ValueError(f"encode_map has {enc.shape[1]} columns for {cov.shape[0]} symbols")
        if not np.all(np.isfinite(enc)):
            raise ValueError("encode_map must be finite")
        if np.linalg.eigvalsh(0.5 * (cov + cov.T)).min() < -1e-12 * max(1.0, np.abs(cov).max()):
            raise ValueError("symbol_cov must be positive semidefinite")
        object.__setattr__(self, "symbol_cov", cov)
        object.__setattr__(self, "encode_map", enc)

    @property
    def symbol_dim(self) -> int:
        return self.symbol_cov.shape[0]


@dataclass(frozen=True)
class MeasurementModel:
    """Passive network followed by homodyne readout of one quadrature per mode.

    ``network`` is a sequence of ``(mode_a, mode_b, transmittance)`` beam splitters,
    applied in order after ``num_ancillas`` vacuum modes have been appended.
    """

    measured: tuple[tuple[ModeRef, str], ...]
    network: tuple[tuple[ModeRef, ModeRef, float], ...] = ()
    num_ancillas: int = 0

    def __post_init__(self):
        seen = set()
        for mode, quad in self.measured:
            if quad not in ("x", "p"):
                raise ValueError(f"quadrature must be 'x' or 'p', got {quad!r}")
            if mode in seen:
                raise ValueError(f"mode {mode!r} measured twice; quadratures would not commute")
            seen.add(mode)

    @property
    def num_outcomes(self) -> int:
        return len(self.measured)

    def __add__(self, other: MeasurementModel) -> MeasurementModel:
        """Run two measurements side by side; ancillas of ``other`` are renumbered."""
        shift = self.num_ancillas

        def moved(ref):
            return Ancilla(ref.index + shift) if isinstance(ref, Ancilla) else ref

        return MeasurementModel(
            measured=self.measured + tuple((moved(m), q) for m, q in other.measured),
            network=self.network + tuple((moved(a), moved(b), t) for a, b, t in other.network),
            num_ancillas=self.num_ancillas + other.num_ancillas,
        )


def homodyne(mode: int, quadrature: str = "x") -> MeasurementModel:
    return MeasurementModel(measured=((mode, quadrature),))


def heterodyne(mode: int) -> MeasurementModel:
    """Split the signal with a vacuum ancilla on a 50:50 beam splitter; read x and p."""
    anc = Ancilla(0)
    return MeasurementModel(
        measured=((mode, "x"), (anc, "p")),
        network=((mode, anc, 0.5),),
        num_ancillas=1,
    )


def bell(modes: Sequence[int]) -> MeasurementModel:
    """Continuous-variable Bell measurement: 50:50 beam splitter, x on port 1, p on port 2."""
    a, b = modes
    if a == b:
        raise ValueError("Bell measurement needs two distinct modes")
    return MeasurementModel(measured=((a, "x"), (b, "p")), network=((a, b, 0.5),))


@dataclass(frozen=True)
class Amplifier:
    """Phase-insensitive amplification stage.

    ``groups`` lists the amplified units: ``(m,)`` amplifies mode ``m`` against a
    vacuum idler, ``(a, b)`` amplifies the two modes jointly.
    """

    gain: float = 1.0
    groups: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.gain < 1:
            raise ValueError(f"gain must be >= 1, got {self.gain}")

    def transfer(self, num_modes: int) -> tuple[np.ndarray, np.ndarray]:
        dim = 2 * num_modes
        t_total, n_total = np.eye(dim), np.zeros((dim, dim))
        for group in self.groups:
            t, n = amplifier_transfer(num_modes, group, self.gain)
            t_total = t @ t_total
            n_total = t @ n_total @ t.T + n
        return t_total, n_total


NO_CHANNEL = Amplifier()


@dataclass(frozen=True, eq=False)
class JointStatistics:
    ss: np.ndarray
    so: np.ndarray
    oo: np.ndarray

    def block(self) -> np.ndarray:
        return np.block([[self.ss, self.so], [self.so.T, self.oo]])


def _resolve(ref: ModeRef, num_modes: int) -> int:
    return num_modes + ref.index if isinstance(ref, Ancilla) else ref


def measurement_maps(num_modes: int, measurement: MeasurementModel) -> np.ndarray:
    """Matrix taking the (signal + ancilla) phase-space vector to the measured quadratures."""
    total = num_modes + measurement.num_ancillas
    net = np.eye(2 * total)
    for a, b, t in measurement.network:
        pair = [_resolve(a, num_modes), _resolve(b, num_modes)]
        net = expand(beam_splitter_matrix(t), pair, total) @ net
    rows = [2 * _resolve(m, num_modes) + (q == "p") for m, q in measurement.measured]
    for r in rows:
        if not 0 <= r < 2 * total:
            raise IndexError(f"measured mode out of range for {num_modes}-mode state")
    return net[rows]


def propagate(state: GaussianState, modulation: ModulationModel, measurement: MeasurementModel,
              channel: Amplifier = NO_CHANNEL) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(G, N)``: outcomes are ``G @ s + noise`` with noise covariance ``N``.

    ``state`` is the prepared state for a zero symbol; its mean only shifts the
    outcomes and is ignored here.
    """
    m = state.num_modes
    if modulation.encode_map.shape[0] != 2 * m:
        raise ValueError(
            f"encode_map acts on {modulation.encode_map.shape[0] // 2} modes, state has {m}"
        )
    transfer, added = channel.transfer(m)
    cov = transfer @ state.cov @ transfer.T + added
    enc = transfer @ modulation.encode_map
    if measurement.num_ancillas:
        cov = tensor(GaussianState(np.zeros(2 * m), cov), vacuum(measurement.num_ancillas)).cov
        enc = np.vstack([enc, np.zeros((2 * measurement.num_ancillas, enc.shape[1]))])
    readout = measurement_maps(m, measurement)
    noise = readout @ cov @ readout.T
    return readout @ enc, 0.5 * (noise + noise.T)


def joint_statistics(state: GaussianState, modulation: ModulationModel,
                     measurement: MeasurementModel, channel: Amplifier = NO_CHANNEL) -> JointStatistics:
    gain_map, noise = propagate(state, modulation, measurement, channel)
    ss = modulation.symbol_cov
    so = ss @ gain_map.T
    return JointStatistics(ss=ss, so=so, oo=gain_map @ so + noise)


def gaussian_mi(js: JointStatistics, log_base: float = 2.0) -> float:
    """Mutual information between jointly Gaussian symbols and outcomes.

    Computed as ``1/2 log det(I + C^-1 D)`` where ``D = so^T ss^+ so`` is the
    signal part of the outcome covariance and ``C = oo - D`` the conditional
    (noise) covariance. For scalar symbol and outcome this is ``1/2 log(1 + S/N)``.
    """
    signal = js.so.T @ np.linalg.pinv(js.ss, hermitian=True) @ js.so
    signal = 0.5 * (signal + signal.T)
    cond = js.oo - signal
    cond = 0.5 * (cond + cond.T)
    try:
        chol = np.linalg.cholesky(cond)
    except np.linalg.LinAlgError:
        raise UnboundedInformationError("conditional outcome covariance is singular") from None
    sign, logdet_cond = np.linalg.slogdet(cond)
    _, logdet_oo = np.linalg.slogdet(js.oo)
    if sign <= 0 or logdet_cond - logdet_oo < math.log(SINGULAR_GUARD):
        raise UnboundedInformationError("conditional outcome covariance is singular")
    whitened = np.linalg.solve(chol, np.linalg.solve(chol, signal).T)
    eig = np.linalg.eigvalsh(0.5 * (whitened + whitened.T))
    nats = 0.5 * float(np.sum(np.log1p(np.clip(eig, 0.0, None))))
    return nats / math.log(log_base)
