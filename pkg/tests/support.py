"""Shared fixtures-in-spirit: model builders used across the test modules."""

import math

import numpy as np

from cedrf.linalg import Matrix
from cedrf.spectral import ObservationModel

# Frozen reference constants for the two-component demonstration model
# (lam = [20, 0.5], sigma2 = 1, M = L = 2), derived independently with
# 40-digit arithmetic from the closed forms.
R2_COND = 0.7572865864148791
R2_OBS = 1.9036774610288021
MMSE_EXAMPLE = 5.0 / 14.0
IDRF_AT_1 = 0.6388609420523627
CE_AT_1 = 0.6428571428571429
GAP_AT_1 = 0.003996200804780188
GAP_AT_19037 = 0.05009483899565168
GAP_AT_2 = 0.04686016317421198
GAP_AT_3 = 0.02343008158710599
MAX_GAP = 0.05009562162463500
LB_AT_2 = 0.012523905406158749
UB_AT_2 = 1.3125


def example_model() -> ObservationModel:
    return ObservationModel(Matrix(np.diag([math.sqrt(20.0), math.sqrt(0.5)])), 1.0)


def model_from_eigs(lambdas, sigma2) -> ObservationModel:
    """Diagonal observation matrix with prescribed gram eigenvalues."""
    return ObservationModel(Matrix(np.diag([math.sqrt(v) for v in lambdas])), sigma2)


def random_model(rng: np.random.Generator, max_dim: int = 6,
                 sigma2_choices=(0.1, 1.0, 10.0)) -> ObservationModel:
    m = int(rng.integers(1, max_dim + 1))
    l_dim = int(rng.integers(1, max_dim + 1))
    a = rng.uniform(-2.0, 2.0, size=(l_dim, m))
    return ObservationModel(Matrix(a), float(rng.choice(sigma2_choices)))


def rank_deficient_model(rng: np.random.Generator, l_dim: int = 4, m: int = 3,
                         rank: int = 2, sigma2: float = 1.0) -> ObservationModel:
    b = rng.uniform(-2.0, 2.0, size=(l_dim, rank))
    c = rng.uniform(-2.0, 2.0, size=(rank, m))
    return ObservationModel(Matrix(b @ c), sigma2)
