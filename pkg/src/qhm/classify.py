"""Spectral classification of the negative-type (quasihypermetric) property.

A space is quasihypermetric iff the centered form A = -P D P (P the
projection removing the all-ones component) is positive semidefinite on the
mass-zero subspace, since a mass-zero coefficient vector has
alpha' A alpha = -energy(alpha). The verdict is read off the spectrum of A
restricted to that subspace:

    some eigenvalue < -tau   ->  NotQuasihypermetric (the eigenvector is a
                                 mass-zero witness with positive energy)
    all eigenvalues  >  tau  ->  Strict
    otherwise                ->  NonStrict; eigenvectors within +-tau of zero
                                 span the degenerate (seminorm-zero) directions

with tau = tol * max(1, spectral radius). Single-point spaces are Strict by
convention.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .energy import SignedMeasure, potential
from .errors import (
    EigendecompositionFailure,
    FlatnessViolationError,
    NotApplicableError,
)
from .spaces import FiniteMetricSpace, diameter

DEFAULT_TOL = 1e-9  # relative spectral tolerance


def default_flatness_tol(space: FiniteMetricSpace) -> float:
    """Absolute tolerance for 'constant potential' checks, scaled by size."""
    return 1e-8 * (1.0 + diameter(space))


class Verdict(str, Enum):
    NOT_QUASIHYPERMETRIC = "NotQuasihypermetric"
    STRICT = "Strict"
    NON_STRICT = "NonStrict"


@dataclass(frozen=True, eq=False)
class Classification:
    """Three-way verdict with the spectral evidence that produced it.

    eigenvalues: full centered-form spectrum, ascending (includes the trivial
    zero of the all-ones direction). margin: smallest |eigenvalue| on the
    mass-zero subspace, i.e. the distance of the decision to the
    Strict/NonStrict boundary (None for single-point spaces). witness: present
    iff NotQuasihypermetric, a unit mass-zero measure with positive energy.
    kernel_basis: present iff NonStrict, euclidean-orthonormal mass-zero
    measures spanning the degenerate directions.
    """

    verdict: Verdict
    eigenvalues: np.ndarray
    margin: float | None
    tol_used: float
    witness: SignedMeasure | None = None
    kernel_basis: tuple[SignedMeasure, ...] = ()


def centered_form(space: FiniteMetricSpace) -> np.ndarray:
    """The matrix A = -P dist P with P = I - ones/n; A @ 1 = 0 and
    alpha' A alpha = -energy(alpha) for mass-zero alpha."""
    n = space.n
    p = np.eye(n) - np.full((n, n), 1.0 / n)
    return -(p @ space.dist @ p)


def _mass_zero_basis(n: int) -> np.ndarray:
    """Orthonormal basis (n x (n-1)) of the mass-zero subspace.

    Columns 2..n of the Householder reflection mapping e1 to ones/sqrt(n);
    deterministic and cheap.
    """
    u = np.full(n, 1.0 / np.sqrt(n))
    v = -u.copy()
    v[0] += 1.0  # v = e1 - u
    q = np.eye(n)[:, 1:]
    q -= np.outer(v, (2.0 / (v @ v)) * v[1:])
    return q


def _as_mass_zero_unit(space: FiniteMetricSpace, vec: np.ndarray) -> SignedMeasure:
    w = vec - vec.mean()
    w /= np.linalg.norm(w)
    return SignedMeasure(space, w)


def classify(space: FiniteMetricSpace, tol: float = DEFAULT_TOL) -> Classification:
    """Decide NotQuasihypermetric / Strict / NonStrict for a space."""
    n = space.n
    if n == 1:
        return Classification(verdict=Verdict.STRICT,
                              eigenvalues=np.zeros(1), margin=None,
                              tol_used=tol)
    q = _mass_zero_basis(n)
    b = -(q.T @ space.dist @ q)
    b = (b + b.T) / 2.0
    try:
        vals, vecs = np.linalg.eigh(b)
    except np.linalg.LinAlgError as exc:
        scale = float(np.abs(b).max())
        raise EigendecompositionFailure(
            f"eigensolver failed on the {n - 1} dimensional restricted form "
            f"(entry scale {scale:.3e}): {exc}") from exc

    tau = tol * max(1.0, float(np.abs(vals).max()))
    spectrum = np.sort(np.append(vals, 0.0))
    margin = float(np.abs(vals).min())

    if vals[0] < -tau:
        witness = _as_mass_zero_unit(space, q @ vecs[:, 0])
        return Classification(verdict=Verdict.NOT_QUASIHYPERMETRIC,
                              eigenvalues=spectrum, margin=margin,
                              tol_used=tau, witness=witness)

    kernel_idx = np.flatnonzero(np.abs(vals) <= tau)
    if kernel_idx.size:
        basis = tuple(_as_mass_zero_unit(space, q @ vecs[:, i])
                      for i in kernel_idx)
        return Classification(verdict=Verdict.NON_STRICT,
                              eigenvalues=spectrum, margin=margin,
                              tol_used=tau, kernel_basis=basis)

    return Classification(verdict=Verdict.STRICT, eigenvalues=spectrum,
                          margin=margin, tol_used=tau)


@dataclass(frozen=True)
class KernelFlatValue:
    """A degenerate direction with the constant value of its potential."""

    vector: SignedMeasure
    value: float
    deviation: float


def kernel_flat_values(space: FiniteMetricSpace, cls: Classification,
                       flatness_tol: float | None = None) -> list[KernelFlatValue]:
    """Constant potential values of the degenerate directions.

    On a genuinely quasihypermetric space the potential of every seminorm-zero
    mass-zero measure is constant; a deviation above `flatness_tol` means the
    classification tolerance was too loose for this space.
    """
    if cls.verdict is not Verdict.NON_STRICT:
        raise NotApplicableError(
            f"kernel flat values require a NonStrict verdict, got {cls.verdict.value}")
    if flatness_tol is None:
        flatness_tol = default_flatness_tol(space)
    out = []
    for f in cls.kernel_basis:
        pot = potential(space, f)
        value = float(pot.mean())
        deviation = float(np.abs(pot - value).max())
        if deviation > flatness_tol:
            raise FlatnessViolationError(
                f"degenerate-direction potential varies by {deviation} > "
                f"{flatness_tol}; classification tolerance too loose")
        out.append(KernelFlatValue(vector=f, value=value, deviation=deviation))
    return out
