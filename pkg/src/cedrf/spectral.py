"""Spectra of linear Gaussian observation models.

Turns an observation model ``y = A x + z`` (source ``x ~ N(0, I_M)``,
noise ``z ~ N(0, sigma2 I_L)``) into the three eigenvalue lists the
distortion-rate formulas consume:

* the spectrum ``lam_l`` of ``A A^T``,
* the observation-covariance spectrum ``lam_l + sigma2``, and
* the spectrum ``lam_l / (lam_l + sigma2)`` of the covariance of the
  MMSE estimate of ``x`` from ``y``,

plus the estimation-error floor and source whitening for non-identity
source covariances.  Every downstream formula is purely spectral, so
eigenvectors are not kept here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .linalg import Matrix

#: An eigenvalue counts as zero when it is at most RANK_RTOL times the
#: largest one (RANK_ATOL absolute when the largest is itself zero).
RANK_RTOL = 1e-10
RANK_ATOL = 1e-14


class NotPositiveDefinite(ValueError):
    """A positive-definite matrix was required."""


@dataclass(frozen=True)
class Spectrum:
    """Non-increasing list of non-negative eigenvalues with a numerical rank."""

    values: tuple[float, ...]
    rank: int

    def __post_init__(self) -> None:
        if len(self.values) == 0:
            raise ValueError("spectrum must contain at least one value")
        for i, v in enumerate(self.values):
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"spectrum values must be finite and >= 0, got {v!r}")
            if i > 0 and v > self.values[i - 1]:
                raise ValueError("spectrum values must be non-increasing")
        if not 0 <= self.rank <= len(self.values):
            raise ValueError(f"rank {self.rank} out of range for {len(self.values)} values")

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "Spectrum":
        """Sort descending and classify near-zero values by the rank tolerance."""
        vals = tuple(sorted((float(v) for v in values), reverse=True))
        return cls(vals, _numerical_rank(vals))


def _numerical_rank(sorted_desc: Sequence[float]) -> int:
    top = sorted_desc[0] if sorted_desc else 0.0
    cutoff = RANK_RTOL * top if top > 0.0 else RANK_ATOL
    return sum(1 for v in sorted_desc if v > cutoff)


def _monotone_clamp(values: list[float]) -> tuple[float, ...]:
    # The maps applied to an already-sorted spectrum are monotone; this only
    # repairs last-ulp rounding inversions so Spectrum validation stays strict.
    for i in range(1, len(values)):
        if values[i] > values[i - 1]:
            values[i] = values[i - 1]
    return tuple(values)


class ObservationModel:
    """Source ``x ~ N(0, I_M)`` observed as ``y = A x + z``, ``z ~ N(0, sigma2 I_L)``.

    The spectrum of ``A A^T`` is computed once at construction; the derived
    observation and estimate spectra are cached with it.  ``full_rank``
    records whether ``A`` has numerical rank ``min(M, L)``; rank-deficient
    models are accepted and handled throughout.
    """

    def __init__(self, A: Matrix, sigma2: float):
        s2 = float(sigma2)
        if not math.isfinite(s2) or s2 <= 0.0:
            raise ValueError(f"sigma2 must be a positive finite real, got {sigma2!r}")
        self.A = A
        self.sigma2 = s2
        self.L = A.rows
        self.M = A.cols
        self.r = min(self.M, self.L)
        gram_mat = A.data @ A.data.T
        w, _ = linalg.sym_eig(Matrix((gram_mat + gram_mat.T) / 2.0))
        self.gram = Spectrum.from_values(np.clip(w, 0.0, None))
        self.full_rank = self.gram.rank == self.r
        self.observation = observation_spectrum(self.gram, s2)
        self.conditional = conditional_spectrum(self.gram, s2)

    @property
    def mmse_floor(self) -> float:
        return mmse_floor(self.gram, self.sigma2, self.M)

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"ObservationModel(M={self.M}, L={self.L}, sigma2={self.sigma2}, "
            f"rank={self.gram.rank})"
        )


def gram_spectrum(model: ObservationModel) -> Spectrum:
    """Eigenvalues of ``A A^T``, descending, clamped at zero."""
    return model.gram


def observation_spectrum(gram: Spectrum, sigma2: float) -> Spectrum:
    """Spectrum of the observation covariance: ``lam_l + sigma2``.

    Full rank by construction since ``sigma2 > 0``.
    """
    vals = _monotone_clamp([v + sigma2 for v in gram.values])
    return Spectrum(vals, len(vals))


def conditional_spectrum(gram: Spectrum, sigma2: float) -> Spectrum:
    """Spectrum of the MMSE-estimate covariance: ``lam_l / (lam_l + sigma2)``.

    The map is monotone increasing, so descending order is preserved and
    the rank equals the number of nonzero ``lam_l``.
    """
    vals = _monotone_clamp([v / (v + sigma2) for v in gram.values])
    return Spectrum(vals, gram.rank)


def mmse_floor(gram: Spectrum, sigma2: float, M: int) -> float:
    """Normalized error of estimating the source from the raw observation.

    This is the common large-rate limit of both distortion-rate functions.
    """
    return 1.0 - sum(v / (v + sigma2) for v in gram.values) / M


def whiten(sigma_x: Matrix, A: Matrix, sigma2: float) -> ObservationModel:
    """Reduce a model with source covariance ``sigma_x`` to the identity-source form.

    Returns the model with observation matrix ``A sigma_x^{1/2}`` and unit
    source covariance.  Distortion for the returned model is measured on
    the whitened source ``x' = sigma_x^{-1/2} x``, not the original one.

    Raises :class:`NotPositiveDefinite` when the smallest eigenvalue of
    ``sigma_x`` is at or below the rank tolerance.
    """
    w, vecs = linalg.sym_eig(sigma_x)
    top = float(w[0])
    cutoff = RANK_RTOL * top if top > 0.0 else RANK_ATOL
    if float(w[-1]) <= cutoff:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {float(w[-1]):.3e} is not above the rank tolerance"
        )
    v = vecs.data
    sqrt_sx = (v * np.sqrt(w)) @ v.T
    return ObservationModel(Matrix(A.data @ sqrt_sx), sigma2)
