"""Multimode Gaussian states and the linear maps acting on them.

Conventions used throughout the package:

* quadratures satisfy ``[x, p] = 2i`` so the vacuum covariance is the identity;
* vectors are interleaved, ``(x1, p1, x2, p2, ...)``;
* the commutator matrix (see :func:`omega`) has 2x2 blocks ``[[0, 2], [-2, 0]]``.

States are immutable. Every operation returns a new :class:`GaussianState`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

SYMMETRY_TOL = 1e-12
PHYSICAL_TOL = 1e-9

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def omega(num_modes: int) -> np.ndarray:
    """Commutator matrix for ``num_modes`` modes, ``[r_i, r_j] = i * omega[i, j]``."""
    return np.kron(np.eye(num_modes), 2.0 * _J)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second moments of an M-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size == 0 or mean.size % 2:
            raise ValueError(f"mean must have positive even length, got {mean.size}")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def num_modes(self) -> int:
        return self.mean.size // 2

    def __repr__(self):
        return f"GaussianState(num_modes={self.num_modes})"


@dataclass(frozen=True)
class PhysicalityReport:
    ok: bool
    min_symplectic_eigenvalue: float
    asymmetry: float

    def __bool__(self):
        return self.ok


def _check_mode(state: GaussianState, mode: int) -> None:
    if not 0 <= mode < state.num_modes:
        raise IndexError(f"mode {mode} out of range for {state.num_modes}-mode state")


def _check_pair(state: GaussianState, modes: Sequence[int]) -> tuple[int, int]:
    if len(modes) != 2:
        raise ValueError(f"expected a mode pair, got {modes!r}")
    a, b = modes
    _check_mode(state, a)
    _check_mode(state, b)
    if a == b:
        raise ValueError("mode pair must consist of distinct modes")
    return a, b


def _symmetrize(cov: np.ndarray) -> np.ndarray:
    return 0.5 * (cov + cov.T)


def _congruence(matrix: np.ndarray, cov: np.ndarray) -> np.ndarray:
    """``matrix @ cov @ matrix.T``, symmetrized.

    Products run in extended precision and are rounded once. Strong squeezing or
    gain makes the small symplectic eigen-directions come from large cancelling
    entries, and float64 products would lose them (errors of order eps * cond).
    """
    m = matrix.astype(EXTENDED)
    out = m @ cov.astype(EXTENDED) @ m.T
    return _symmetrize(out)


# --- local symplectic matrices -------------------------------------------------
#
# Builders accept a ``dtype``. State operations build them in ``np.longdouble``:
# a float64 matrix is symplectic only to about eps * gain, and the next
# operation magnifies that defect by the conditioning of the state.

EXTENDED = np.longdouble


def squeezer_matrix(variance: float, dtype=float) -> np.ndarray:
    """Single-mode squeezer taking vacuum to x-variance ``variance``."""
    if variance <= 0:
        raise ValueError(f"squeezing variance must be positive, got {variance}")
    s = np.sqrt(dtype(variance))
    return np.diag(np.array([s, 1 / s], dtype=dtype))


def two_mode_squeezer_matrix(variance: float, dtype=float) -> np.ndarray:
    """Two-mode squeezer with ``x1 + x2`` and ``p1 - p2`` squeezed to ``variance``.

    Annihilation operators map as ``a1 -> cosh(r) a1 - sinh(r) a2^dag`` with
    ``exp(-2r) = variance``.
    """
    if not 0 < variance <= 1:
        raise ValueError(f"two-mode squeezing variance must lie in (0, 1], got {variance}")
    v = dtype(variance)
    root = 2 * np.sqrt(v)
    c, s = (1 + v) / root, (1 - v) / root  # cosh r, sinh r
    z = dtype(0)
    return np.array(
        [
            [c, z, -s, z],
            [z, c, z, s],
            [-s, z, c, z],
            [z, s, z, c],
        ],
        dtype=dtype,
    )


def beam_splitter_matrix(transmittance: float, dtype=float) -> np.ndarray:
    """Passive two-mode map ``a1 -> sqrt(t) a1 + sqrt(1-t) a2``, ``a2 -> sqrt(1-t) a1 - sqrt(t) a2``.

    At ``t = 0.5`` output 1 carries ``(x1 + x2)/sqrt(2)`` and output 2 carries
    ``(p1 - p2)/sqrt(2)``, the Bell-measurement combinations.
    """
    if not 0 <= transmittance <= 1:
        raise ValueError(f"transmittance must lie in [0, 1], got {transmittance}")
    t = dtype(transmittance)
    u = np.array([[np.sqrt(t), np.sqrt(1 - t)], [np.sqrt(1 - t), -np.sqrt(t)]], dtype=dtype)
    return np.kron(u, np.eye(2, dtype=dtype))


def amplifier_matrix(gain: float, conjugate_idler: bool = True, dtype=float) -> np.ndarray:
    """Two-mode Bogoliubov map ``a1 -> sqrt(g) a1 + sqrt(g-1) a2^dag`` (and 1 <-> 2).

    ``conjugate_idler=False`` drops the conjugation on the partner mode. The result
    is not symplectic; it exists only so the verification harness can show that a
    broken convention is caught.
    """
    if gain < 1:
        raise ValueError(f"gain must be >= 1, got {gain}")
    g = dtype(gain)
    a, b = np.sqrt(g), np.sqrt(g - 1)
    eye = np.eye(2, dtype=dtype)
    conj = np.diag(np.array([1, -1], dtype=dtype)) if conjugate_idler else eye
    return np.block([[a * eye, b * conj], [b * conj, a * eye]])


def expand(local: np.ndarray, modes: Sequence[int], num_modes: int) -> np.ndarray:
    """Embed a local ``2k x 2k`` matrix acting on ``modes`` into the full phase space."""
    idx = np.array([[2 * m, 2 * m + 1] for m in modes]).reshape(-1)
    if local.shape != (idx.size, idx.size):
        raise ValueError(f"local matrix shape {local.shape} does not match {len(modes)} modes")
    full = np.eye(2 * num_modes, dtype=local.dtype)
    full[np.ix_(idx, idx)] = local
    return full


def is_symplectic(matrix: np.ndarray, tol: float = 1e-10) -> bool:
    n = matrix.shape[0] // 2
    om = omega(n)
    return bool(np.max(np.abs(matrix @ om @ matrix.T - om)) <= tol)


# --- operations on states ------------------------------------------------------


def vacuum(num_modes: int) -> GaussianState:
    if num_modes < 1:
        raise ValueError(f"number of modes must be >= 1, got {num_modes}")
    return GaussianState(np.zeros(2 * num_modes), np.eye(2 * num_modes))


def apply_symplectic(state: GaussianState, matrix: np.ndarray, modes: Sequence[int] | None = None,
                     displacement: np.ndarray | None = None) -> GaussianState:
    """Apply ``r -> S r + d``; ``S`` is local to ``modes`` when those are given."""
    full = matrix if modes is None else expand(matrix, modes, state.num_modes)
    mean = (full @ state.mean).astype(float)
    if displacement is not None:
        mean = mean + displacement
    return GaussianState(mean, _congruence(full, state.cov).astype(float))


def displace(state: GaussianState, mode: int, dx: float, dp: float) -> GaussianState:
    _check_mode(state, mode)
    mean = state.mean.copy()
    mean[2 * mode] += dx
    mean[2 * mode + 1] += dp
    return GaussianState(mean, state.cov)


def squeeze(state: GaussianState, mode: int, variance: float) -> GaussianState:
    _check_mode(state, mode)
    return apply_symplectic(state, squeezer_matrix(variance, EXTENDED), [mode])


def two_mode_squeeze(state: GaussianState, modes: Sequence[int], variance: float) -> GaussianState:
    pair = _check_pair(state, modes)
    return apply_symplectic(state, two_mode_squeezer_matrix(variance, EXTENDED), pair)


def beam_splitter(state: GaussianState, modes: Sequence[int], transmittance: float) -> GaussianState:
    pair = _check_pair(state, modes)
    return apply_symplectic(state, beam_splitter_matrix(transmittance, EXTENDED), pair)


def tensor(*states: GaussianState) -> GaussianState:
    """Product state, modes concatenated in argument order."""
    mean = np.concatenate([s.mean for s in states])
    cov = np.zeros((mean.size, mean.size))
    i = 0
    for s in states:
        k = s.mean.size
        cov[i:i + k, i:i + k] = s.cov
        i += k
    return GaussianState(mean, cov)


def partial_trace(state: GaussianState, keep_modes: Sequence[int]) -> GaussianState:
    keep = list(keep_modes)
    if not keep:
        raise ValueError("keep_modes must be non-empty")
    for m in keep:
        _check_mode(state, m)
    idx = np.array([[2 * m, 2 * m + 1] for m in keep]).reshape(-1)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def amplifier_transfer(num_modes: int, modes: Sequence[int], gain: float,
                       conjugate_idler: bool = True, dtype=float) -> tuple[np.ndarray, np.ndarray]:
    """Linear-channel form ``(T, N)`` of a phase-insensitive amplifier.

    The channel acts as ``mean -> T mean`` and ``cov -> T cov T^T + N``. A single
    mode is amplified against a vacuum idler that is traced out afterwards; a
    mode pair is amplified jointly, each mode acting as the other's idler.
    """
    if gain < 1:
        raise ValueError(f"gain must be >= 1, got {gain}")
    modes = list(modes)
    local = amplifier_matrix(gain, conjugate_idler, dtype)
    if len(modes) == 1:
        ext = expand(local, [modes[0], num_modes], num_modes + 1)
        dim = 2 * num_modes
        transfer = ext[:dim, :dim]
        coupling = ext[:dim, dim:]
        return transfer, coupling @ coupling.T
    if len(modes) == 2:
        if modes[0] == modes[1]:
            raise ValueError("joint amplification needs two distinct modes")
        return expand(local, modes, num_modes), np.zeros((2 * num_modes, 2 * num_modes), dtype=dtype)
    raise ValueError(f"amplify acts on one mode or a mode pair, got {modes!r}")


def amplify(state: GaussianState, modes: Sequence[int], gain: float,
            conjugate_idler: bool = True) -> GaussianState:
    """Phase-insensitive amplification of one mode or a jointly amplified pair."""
    modes = list(modes)
    for m in modes:
        _check_mode(state, m)
    transfer, noise = amplifier_transfer(state.num_modes, modes, gain, conjugate_idler, EXTENDED)
    cov = _congruence(transfer, state.cov) + noise
    return GaussianState((transfer @ state.mean).astype(float), _symmetrize(cov).astype(float))


def mean_photons(state: GaussianState) -> float:
    """Total mean photon number, ``sum((<x^2> + <p^2>)/4 - 1/2)`` over modes."""
    second = np.diag(state.cov) + state.mean ** 2
    return float(second.sum() / 4.0 - state.num_modes / 2.0)


def _williamson_extended(cov: np.ndarray, dps: int = 40) -> np.ndarray:
    n = cov.shape[0] // 2
    with mpmath.workdps(dps):
        low = mpmath.cholesky(mpmath.matrix(cov.tolist()))
        herm = mpmath.mpc(0, 1) * low.T * mpmath.matrix(omega(n).tolist()) * low
        eig = mpmath.eigh(herm, eigvals_only=True)
        return np.array([float(abs(e)) for e in eig]) / 2.0


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Williamson spectrum, normalised so the vacuum has all eigenvalues equal to 1.

    Double precision resolves the spectrum only to about ``eps * cond(cov)``;
    ill-conditioned covariances are diagonalised in extended precision.
    """
    n = cov.shape[0] // 2
    sym = _symmetrize(cov)
    try:
        chol = np.linalg.cholesky(sym)
    except np.linalg.LinAlgError:
        nu = np.abs(np.linalg.eigvals(1j * omega(n) @ sym)) / 2.0
    else:
        if np.finfo(float).eps * np.linalg.cond(sym) > 1e-2 * PHYSICAL_TOL:
            nu = _williamson_extended(sym)
        else:
            nu = np.abs(np.linalg.eigvalsh(1j * chol.T @ omega(n) @ chol)) / 2.0
    return np.sort(nu)[::2]


def check_physical(state: GaussianState, tol: float = PHYSICAL_TOL) -> PhysicalityReport:
    asym = float(np.max(np.abs(state.cov - state.cov.T)))
    nu_min = float(symplectic_eigenvalues(state.cov).min())
    return PhysicalityReport(bool(asym <= SYMMETRY_TOL and nu_min >= 1.0 - tol), nu_min, asym)
