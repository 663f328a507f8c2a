import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gaussmi import formulas, gaussian
from gaussmi.schemes import (
    FREE_VARIANCE,
    GAIN_DEGRADED,
    GAIN_INVARIANT,
    SCHEME_IDS,
    InfeasibleBudgetError,
    UnknownSchemeError,
    build_scheme,
    ensemble_state,
    evaluate,
    photon_budget,
    scheme_mi,
)

BUDGETS = np.round(np.linspace(0.1, 10, 12), 6)
GAINS = (1.0, 1.5, 2.0, 5.0, 10.0, 100.0)


def test_1d_coherent_single_use():
    spec = build_scheme("1d_coh_1", 1.0)
    assert_allclose(spec.modulation.symbol_cov, [[4.0]])
    assert spec.detector.measured == ((0, "x"),)
    assert spec.detector.num_ancillas == 0


def test_conjugate_pair_alphabet():
    spec = build_scheme("conj_coh_2", 1.0)
    assert_allclose(spec.modulation.symbol_cov, np.eye(2))
    x, p = 0.3, -0.8
    assert_allclose(spec.modulation.encode_map @ [x, p], [x, p, x, -p])
    assert spec.detector.measured == ((0, "x"), (1, "p"))
    assert spec.detector.network == ((0, 1, 0.5),)
    assert spec.channel.groups == ((0, 1),)


def test_epr_displacement_budget_algebra():
    spec = build_scheme("epr_disp_2", 1.0, variance=0.5)
    # 2n - (V + 1/V - 2) = 2 - 0.5
    assert_allclose(spec.modulation.symbol_cov, 1.5 * np.eye(2))
    assert photon_budget(spec) == pytest.approx(1.0)


def test_evaluate_examples():
    assert evaluate(build_scheme("2d_coh_1", 1.0, 7.0)) == pytest.approx(1.0, abs=1e-12)
    for g in (1.0, 2.0, 9.0):
        assert evaluate(build_scheme("conj_coh_2", 2.0, g)) == pytest.approx(math.log2(5), abs=1e-12)
    assert evaluate(build_scheme("epr_conj_2", 2.0, 3.0)) == pytest.approx(2 * math.log2(3), abs=1e-12)
    assert evaluate(build_scheme("epr_conj_2", 2.0, 3.0)) == pytest.approx(3.16993, abs=1e-5)


def test_photon_budget_examples():
    for sid in SCHEME_IDS:
        assert photon_budget(build_scheme(sid, 0.0, 2.0)) == pytest.approx(0.0, abs=1e-15)
    assert photon_budget(build_scheme("1d_sq_1", 1.0, variance=1 / 3)) == pytest.approx(1.0)
    assert photon_budget(build_scheme("epr_conj_2", 3.0)) == pytest.approx(3.0)


def test_zero_budget_gives_zero_information():
    for sid in SCHEME_IDS:
        assert evaluate(build_scheme(sid, 0.0, 5.0)) == 0.0


@pytest.mark.parametrize("sid", SCHEME_IDS)
def test_budget_closes_for_every_scheme(sid):
    for n in BUDGETS:
        for g in (1.0, 10.0):
            assert photon_budget(build_scheme(sid, n, g)) == pytest.approx(n, abs=1e-9)


def test_dense_coding_charges_displaced_arm_only():
    n = 2.0
    spec = build_scheme("dense_coding", n)
    both = gaussian.mean_photons(ensemble_state(spec))
    v = spec.variance
    assert photon_budget(spec) == pytest.approx(n)
    assert both - n == pytest.approx((v + 1 / v - 2) / 4)


@pytest.mark.parametrize("sid", SCHEME_IDS)
def test_engine_matches_closed_form(sid):
    for n in BUDGETS:
        for g in GAINS:
            assert scheme_mi(sid, n, g) == pytest.approx(formulas.formula_mi(sid, n, g), abs=1e-9)


@pytest.mark.parametrize("sid", GAIN_INVARIANT)
def test_gain_invariant_schemes(sid):
    for n in BUDGETS:
        vals = [scheme_mi(sid, n, g) for g in GAINS]
        assert max(vals) - min(vals) <= 1e-9


@pytest.mark.parametrize("sid", GAIN_DEGRADED)
def test_1d_schemes_degrade_with_gain(sid):
    for n in BUDGETS:
        vals = np.array([scheme_mi(sid, n, g) for g in GAINS])
        assert np.all(np.diff(vals) < 0)


def test_discussion_equivalences():
    for n in BUDGETS:
        assert scheme_mi("1d_coh_2", n) == pytest.approx(scheme_mi("conj_coh_2", n), abs=1e-9)
        assert scheme_mi("1d_sq_2", n) == pytest.approx(scheme_mi("epr_conj_2", n), abs=1e-9)
        assert scheme_mi("epr_conj_2", n) == pytest.approx(2 * math.log2(1 + n), abs=1e-9)


def test_phase_conjugation_beats_identical_states_under_joint_detection():
    # identical displacements lose the p signal in the Bell measurement
    from gaussmi.detection import ModulationModel, gaussian_mi, joint_statistics

    n = 2.0
    spec = build_scheme("conj_coh_2", n)
    identical = ModulationModel(spec.modulation.symbol_cov, [[1, 0], [0, 1], [1, 0], [0, 1]])
    js = joint_statistics(spec.state, identical, spec.detector, spec.channel)
    assert gaussian_mi(js) == pytest.approx(0.5 * math.log2(1 + 2 * n))
    assert gaussian_mi(js) < evaluate(spec)


def test_unknown_scheme():
    with pytest.raises(UnknownSchemeError):
        build_scheme("nope", 1.0)


def test_infeasible_variance():
    with pytest.raises(InfeasibleBudgetError):
        build_scheme("1d_sq_1", 0.5, variance=0.01)
    with pytest.raises(InfeasibleBudgetError):
        build_scheme("epr_conj_2", 1.0, variance=0.05)


def test_variance_rules():
    with pytest.raises(ValueError):
        build_scheme("1d_coh_1", 1.0, variance=0.5)
    with pytest.raises(ValueError):
        build_scheme("epr_disp_2", 1.0, variance=1.5)
    with pytest.raises(ValueError):
        build_scheme("1d_sq_1", -1.0)
    with pytest.raises(ValueError):
        build_scheme("1d_sq_1", 1.0, 0.9)


@pytest.mark.parametrize("sid", FREE_VARIANCE)
def test_default_variance_is_the_closed_form_optimum(sid):
    spec = build_scheme(sid, 1.5, 2.0)
    assert spec.variance == formulas.optimal_variance(sid, 1.5, 2.0)
