import math

import numpy as np
import pytest

from gaussmi import formulas
from gaussmi.montecarlo import estimate_mi
from gaussmi.schemes import SCHEME_IDS, build_scheme

SEED = 8_675_309


def test_2d_coherent_single_use():
    est = estimate_mi(build_scheme("2d_coh_1", 1.0), 200_000, SEED)
    assert est.stderr <= 0.01
    assert abs(est.mi - 1.0) <= 3 * est.stderr


def test_zero_photons():
    est = estimate_mi(build_scheme("epr_conj_2", 0.0, 2.0), 10_000, SEED)
    assert abs(est.mi) <= 3 * est.stderr


def test_conjugate_pair_under_gain():
    est = estimate_mi(build_scheme("conj_coh_2", 2.0, 5.0), 200_000, SEED)
    assert abs(est.mi - math.log2(5)) <= 3 * est.stderr


def test_deterministic_and_thread_independent():
    spec = build_scheme("epr_disp_2", 1.5, 3.0)
    a = estimate_mi(spec, 50_000, SEED)
    b = estimate_mi(spec, 50_000, SEED)
    c = estimate_mi(spec, 50_000, SEED, threads=4)
    assert (a.mi, a.stderr) == (b.mi, b.stderr) == (c.mi, c.stderr)
    assert estimate_mi(spec, 50_000, SEED + 1).mi != a.mi


def test_too_few_samples():
    with pytest.raises(ValueError):
        estimate_mi(build_scheme("1d_coh_1", 1.0), 999, SEED)


def test_standard_error_scales_as_inverse_root_n():
    # batch-means SE is itself noisy (20 batches), so average the ratio over seeds
    spec = build_scheme("2d_coh_2", 2.0)
    ratios = [estimate_mi(spec, 50_000, s).stderr / estimate_mi(spec, 200_000, s).stderr
              for s in range(12)]
    assert np.mean(ratios) == pytest.approx(2.0, rel=0.3)


@pytest.mark.parametrize("sid", SCHEME_IDS)
def test_catalog_matches_closed_form(sid):
    for n in (0.5, 2.0):
        for g in (1.0, 5.0):
            est = estimate_mi(build_scheme(sid, n, g), 100_000, SEED)
            assert abs(est.mi - formulas.formula_mi(sid, n, g)) <= 3 * est.stderr, (n, g, est)
