"""Invariant checks behind ``gaussmi verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import formulas, gaussian, montecarlo, optimize, schemes

N_GRID = tuple(np.linspace(0.5, 10.0, 20))
G_GRID = (1.0, 1.5, 2.0, 5.0, 10.0, 100.0)
OPT_N = (0.5, 1.0, 2.0, 5.0)
OPT_G = (1.0, 2.0, 10.0, 1e6)
MC_CASES = (
    ("2d_coh_1", 1.0, 1.0),
    ("conj_coh_2", 2.0, 5.0),
    ("epr_conj_2", 2.0, 3.0),
    ("1d_sq_2", 0.5, 5.0),
    ("dense_coding", 2.0, 1.0),
    ("1d_coh_1", 2.0, 5.0),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    observed: str
    expected: str


def check_engine_vs_formula(tol: float) -> CheckResult:
    worst, where = 0.0, ""
    for sid in schemes.SCHEME_IDS:
        for n in N_GRID:
            for g in G_GRID:
                diff = abs(schemes.scheme_mi(sid, n, g) - formulas.formula_mi(sid, n, g))
                if diff > worst:
                    worst, where = diff, f" ({sid}, n={n:g}, g={g:g})"
    return CheckResult("engine vs closed form", worst <= tol, f"max diff {worst:.3e}{where}",
                       f"<= {tol:g} bits")


def check_gain_invariance(tol: float) -> CheckResult:
    spread = 0.0
    for sid in schemes.GAIN_INVARIANT:
        for n in N_GRID:
            vals = [schemes.scheme_mi(sid, n, g) for g in G_GRID]
            spread = max(spread, max(vals) - min(vals))
    return CheckResult("gain invariance", spread <= tol, f"max spread {spread:.3e}", f"<= {tol:g} bits")


def check_gain_degradation() -> CheckResult:
    failures = []
    for sid in schemes.GAIN_DEGRADED:
        for n in N_GRID:
            vals = np.array([schemes.scheme_mi(sid, n, g) for g in G_GRID])
            if not np.all(np.diff(vals) < 0):
                failures.append(f"{sid}@n={n:g}")
    return CheckResult("1D alphabets degrade with gain", not failures,
                       ", ".join(failures[:5]) or "all strictly decreasing", "strictly decreasing in g")


def check_crossings() -> CheckResult:
    a = optimize.crossing_threshold("eq13", "eq14")
    b = optimize.crossing_threshold("eq9", "eq14")
    ok = abs(a - 2) <= 1e-6 and abs(b - 4) <= 1e-6
    return CheckResult("fig2 crossings", ok, f"n*={a:.9f}, {b:.9f}", "2, 4 within 1e-6")


def check_high_gain_limits() -> CheckResult:
    worst = 0.0
    for sid in formulas.HIGH_GAIN_LIMIT:
        for n in N_GRID:
            worst = max(worst, abs(formulas.formula_mi(sid, n, 1e6) - formulas.high_gain_limit(sid, n)))
    a1 = formulas.high_gain_limit("1d_sq_1", 1.0)
    ok = worst <= 1e-3 and abs(a1 - 0.87066) <= 1e-4
    return CheckResult("high-gain limits", ok, f"max diff {worst:.2e}, A1(1)={a1:.5f}",
                       "<= 1e-3 bits, A1(1)=0.87066+-1e-4")


def check_optimizer() -> CheckResult:
    worst_v, worst_mi = 0.0, 0.0
    for sid in ("1d_sq_1", "1d_sq_2", "epr_disp_2", "dense_coding", "epr_conj_2"):
        for n in OPT_N:
            for g in OPT_G:
                res = optimize.maximize_variance(sid, n, g)
                v = formulas.optimal_variance(sid, n, g)
                worst_v = max(worst_v, abs(res.variance / v - 1))
                if sid == "epr_conj_2":
                    worst_mi = max(worst_mi, abs(res.mi - 2 * math.log2(1 + n)))
    ok = worst_v <= 1e-6 and worst_mi <= 1e-9
    return CheckResult("optimizer vs optimal variance", ok,
                       f"rel {worst_v:.2e}, epr_conj_2 MI {worst_mi:.2e}", "<= 1e-6 rel, <= 1e-9 bits")


def check_equivalences(tol: float) -> CheckResult:
    worst = 0.0
    for n in N_GRID:
        worst = max(worst, abs(schemes.scheme_mi("1d_coh_2", n) - schemes.scheme_mi("conj_coh_2", n)))
        worst = max(worst, abs(schemes.scheme_mi("1d_sq_2", n) - schemes.scheme_mi("epr_conj_2", n)))
    return CheckResult("scheme equivalences", worst <= tol, f"max diff {worst:.3e}", f"<= {tol:g} bits")


def check_monte_carlo(samples: int, seed: int, threads: int) -> CheckResult:
    bad = []
    worst_z = 0.0
    for sid, n, g in MC_CASES:
        spec = schemes.build_scheme(sid, n, g)
        est = montecarlo.estimate_mi(spec, samples, seed, threads=threads)
        again = montecarlo.estimate_mi(spec, samples, seed, threads=1)
        z = abs(est.mi - formulas.formula_mi(sid, n, g)) / est.stderr
        worst_z = max(worst_z, z)
        if z > 3 or est.stderr > 0.02 or (est.mi, est.stderr) != (again.mi, again.stderr):
            bad.append(sid)
    return CheckResult("Monte Carlo oracle", not bad, f"max |z|={worst_z:.2f}" + (f" fail: {bad}" if bad else ""),
                       "|z| <= 3, SE <= 0.02, deterministic")


def check_threshold_curve() -> CheckResult:
    curve = optimize.threshold_curve((1.0, 2.0, 5.0, 10.0))
    eq10 = curve.thresholds["eq10"][1:]
    err = max(abs(t - 4 / (2 * g - 1)) for t, g in zip(eq10, (2.0, 5.0, 10.0)))
    consts = [curve.constants[v] for v in optimize.THRESHOLD_VARIANTS]
    const_ok = all(abs(c / target - 1) <= 0.05 for c, target in zip(consts, (4, 2, 1)))
    ok = err <= 1e-6 and const_ok and curve.thresholds["eq11"][0] is None
    return CheckResult("figA1 thresholds", ok,
                       f"eq10 err {err:.1e}, c={', '.join(f'{c:.3f}' for c in consts)}",
                       "4/(2g-1), c=(4, 2, 1) within 5%, eq11@g=1 none")


def random_sequence(rng: np.random.Generator, corrupt: bool = False, max_ops: int = 4):
    """Apply a random chain of operations to vacuum; return the state and the symplectics used."""
    num_modes = int(rng.integers(1, 4))
    state = gaussian.vacuum(num_modes)
    mats = []
    for _ in range(int(rng.integers(1, max_ops + 1))):
        kind = rng.integers(0, 5 if num_modes > 1 else 3)
        m = int(rng.integers(0, num_modes))
        if kind == 0:
            state = gaussian.displace(state, m, *rng.normal(0, 2, 2))
        elif kind == 1:
            v = float(1 - rng.random())
            mats.append(gaussian.squeezer_matrix(v))
            state = gaussian.squeeze(state, m, v)
        elif kind == 2:
            g = float(rng.uniform(1, 10))
            state = gaussian.amplify(state, [m], g, conjugate_idler=not corrupt)
        else:
            a, b = (int(i) for i in rng.choice(num_modes, 2, replace=False))
            if kind == 3:
                v = float(1 - rng.random())
                mats.append(gaussian.two_mode_squeezer_matrix(v))
                state = gaussian.two_mode_squeeze(state, (a, b), v)
            else:
                if rng.random() < 0.5:
                    t = float(rng.random())
                    mats.append(gaussian.beam_splitter_matrix(t))
                    state = gaussian.beam_splitter(state, (a, b), t)
                else:
                    g = float(rng.uniform(1, 10))
                    mats.append(gaussian.amplifier_matrix(g, conjugate_idler=not corrupt))
                    state = gaussian.amplify(state, (a, b), g, conjugate_idler=not corrupt)
    return state, mats


def check_physicality(trials: int = 1000, seed: int = 0, corrupt: bool = False) -> CheckResult:
    rng = np.random.default_rng(seed)
    unphysical, nonsymplectic, nu_min = 0, 0, math.inf
    for _ in range(trials):
        state, mats = random_sequence(rng, corrupt)
        report = gaussian.check_physical(state)
        nu_min = min(nu_min, report.min_symplectic_eigenvalue)
        unphysical += not report.ok
        nonsymplectic += sum(not gaussian.is_symplectic(s) for s in mats)
    ok = unphysical == 0 and nonsymplectic == 0
    return CheckResult("physicality", ok,
                       f"{unphysical}/{trials} unphysical, {nonsymplectic} non-symplectic, min nu {nu_min:.6f}",
                       "all physical, all symplectic")


def run_checks(tolerance: float = 1e-9, samples: int = 200_000, seed: int = 2024, threads: int = 1,
               corrupt: bool = False) -> list[CheckResult]:
    checks: list[Callable[[], CheckResult]] = [
        lambda: check_engine_vs_formula(tolerance),
        lambda: check_gain_invariance(tolerance),
        check_gain_degradation,
        check_crossings,
        check_high_gain_limits,
        check_optimizer,
        lambda: check_equivalences(tolerance),
        lambda: check_monte_carlo(samples, seed, threads),
        check_threshold_curve,
        lambda: check_physicality(corrupt=corrupt),
    ]
    return [check() for check in checks]
