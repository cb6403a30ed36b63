"""Majorization of probability vectors."""
from __future__ import annotations

import enum

import numpy as np

from .qcore import DensityMatrix, Spectrum

PARTIAL_SUM_TOL = 1e-12


class Comparability(str, enum.Enum):
    EQUAL = "Equal"
    FIRST_MAJORIZES = "FirstMajorizes"
    SECOND_MAJORIZES = "SecondMajorizes"
    INCOMPARABLE = "Incomparable"


def _probs(x) -> np.ndarray:
    if isinstance(x, Spectrum):
        return np.asarray(x.probs)
    if isinstance(x, DensityMatrix):
        return np.asarray(x.spectrum().probs)
    return np.sort(np.asarray(x, dtype=float).reshape(-1))[::-1]


def _aligned(p, q) -> tuple[np.ndarray, np.ndarray]:
    p, q = _probs(p), _probs(q)
    n = max(p.size, q.size)
    p = np.concatenate([p, np.zeros(n - p.size)])
    q = np.concatenate([q, np.zeros(n - q.size)])
    return p, q


def partial_sum_slack(p, q) -> np.ndarray:
    """``cumsum(p) - cumsum(q)`` after sorting and zero-padding."""
    p, q = _aligned(p, q)
    return np.cumsum(p) - np.cumsum(q)


def majorizes(p, q, tol: float = PARTIAL_SUM_TOL) -> bool:
    """True if ``p`` majorizes ``q``.

    Inputs may be spectra, density matrices or raw vectors in any order;
    shorter vectors are padded with zeros. Ties count as dominance, so the
    relation is reflexive.
    """
    slack = partial_sum_slack(p, q)
    return bool(np.all(slack[:-1] >= -tol) and abs(slack[-1]) <= tol)


def compare(p, q, tol: float = PARTIAL_SUM_TOL) -> Comparability:
    a, b = _aligned(p, q)
    if np.all(np.abs(a - b) <= tol):
        return Comparability.EQUAL
    fwd, bwd = majorizes(a, b, tol), majorizes(b, a, tol)
    if fwd and bwd:
        # partial sums tie everywhere but entries differ beyond tol individually
        return Comparability.EQUAL
    if fwd:
        return Comparability.FIRST_MAJORIZES
    if bwd:
        return Comparability.SECOND_MAJORIZES
    return Comparability.INCOMPARABLE
