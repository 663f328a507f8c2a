"""Mutual information of Gaussian bosonic channels with phase-conjugated alphabets."""

from .detection import gaussian_mi, joint_statistics
from .formulas import formula_mi, high_gain_limit, optimal_variance
from .gaussian import GaussianState, vacuum
from .schemes import SCHEME_IDS, build_scheme, evaluate, photon_budget, scheme_mi

__all__ = [
    "GaussianState",
    "SCHEME_IDS",
    "build_scheme",
    "evaluate",
    "formula_mi",
    "gaussian_mi",
    "high_gain_limit",
    "joint_statistics",
    "optimal_variance",
    "photon_budget",
    "scheme_mi",
    "vacuum",
]
