"""Passive-state energy of a marginal as an entanglement measure for bipartite states."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import passive
from .errors import DomainError, ValidationError
from .qcore import (
    RESIDUAL_TOL,
    DensityMatrix,
    Hamiltonian,
    PureState,
    Spectrum,
    _as_rng,
    as_matrix,
    local_sum,
    max_abs,
    partial_trace,
    schmidt,
)

MAX_COPY_DIM = 64


@dataclass(frozen=True, eq=False)
class MeasureValue:
    """Entanglement value in energy units.

    ``copies`` is ``None`` for the regularised (many-copy) limit, in which
    case ``beta`` and ``log_z`` describe the entropy-matched thermal state.
    """

    value: float
    copies: int | None
    hamiltonian: Hamiltonian
    beta: float | None = None
    log_z: float | None = None

    def __float__(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        out = {"value": self.value, "copies": self.copies, "energies": self.hamiltonian.energies.tolist()}
        if self.beta is not None:
            out["beta"] = self.beta
            out["log_z"] = self.log_z
        return out


def _bipartite_dims(psi: PureState) -> tuple[int, int]:
    if len(psi.dims) < 2:
        raise ValidationError(f"expected a bipartite state, got dims {psi.dims}")
    return psi.dims[0], int(np.prod(psi.dims[1:]))


def schmidt_spectrum(psi: PureState) -> Spectrum:
    return schmidt(psi, _bipartite_dims(psi)).coefficients


def measure_pure(psi: PureState, h_a: Hamiltonian) -> MeasureValue:
    """Passive energy of the first party's marginal under ``h_a``."""
    da, _ = _bipartite_dims(psi)
    if da > h_a.dim:
        raise ValidationError(f"marginal dimension {da} exceeds Hamiltonian dimension {h_a.dim}")
    lam = schmidt_spectrum(psi)
    return MeasureValue(passive.passive_energy(lam, h_a), 1, h_a)


def vidal_hamiltonian(k: int, n: int) -> Hamiltonian:
    """Zero energy on the first ``k-1`` levels and unit energy on the rest."""
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, {n}], got {k}")
    return Hamiltonian(np.r_[np.zeros(k - 1), np.ones(n - k + 1)])


def vidal_monotones(psi: PureState) -> np.ndarray:
    """Tail sums ``E_k = sum_{i >= k} lambda_i`` for ``k = 1..n``."""
    lam = schmidt_spectrum(psi).probs
    return np.cumsum(lam[::-1])[::-1]


def vidal_monotone(psi: PureState, k: int) -> float:
    tails = vidal_monotones(psi)
    if not 1 <= k <= tails.size:
        raise DomainError(f"k must lie in [1, {tails.size}], got {k}")
    return float(tails[k - 1])


def conversion_probability(psi: PureState, phi: PureState) -> float:
    """Optimal single-copy LOCC probability of ``psi -> phi``.

    Monotones padded to a common length; ``E_k(phi) = 0`` imposes no
    constraint. Returns 0 when ``phi`` has larger Schmidt rank.
    """
    a, b = vidal_monotones(psi), vidal_monotones(phi)
    n = max(a.size, b.size)
    a = np.r_[a, np.zeros(n - a.size)]
    b = np.r_[b, np.zeros(n - b.size)]
    live = b > 0
    ratio = float(np.min(a[live] / b[live]))
    return min(1.0, max(0.0, ratio))


def _pair_spectra(rho_xy, dims):
    m = as_matrix(rho_xy)
    rx = partial_trace(m, dims, [0])
    ry = partial_trace(m, dims, [1])
    return rx, ry, DensityMatrix(m, tuple(dims))


def ergotropic_gap(rho_xy, h_x: Hamiltonian, h_y: Hamiltonian) -> float:
    """Extra work a global unitary extracts over local unitaries on X and Y.

    Equals ``E(rho_X^p) + E(rho_Y^p) - E(rho_XY^p)`` for the non-interacting
    Hamiltonian ``H_X (x) I + I (x) H_Y``.
    """
    if isinstance(rho_xy, PureState):
        rho_xy = rho_xy.density()
    dims = (h_x.dim, h_y.dim)
    m = as_matrix(rho_xy)
    if m.shape[0] != h_x.dim * h_y.dim:
        raise ValidationError(f"state dimension {m.shape[0]} != {h_x.dim} x {h_y.dim}")
    rx, ry, rxy = _pair_spectra(m, dims)
    return (
        passive.passive_energy(rx, h_x)
        + passive.passive_energy(ry, h_y)
        - passive.passive_energy(rxy, local_sum(h_x, h_y))
    )


def per_copy_measure(psi: PureState, n: int, h_a: Hamiltonian) -> MeasureValue:
    """Passive energy per copy of ``n`` copies of the marginal under the summed Hamiltonian."""
    if n < 1:
        raise DomainError(f"copies must be >= 1, got {n}")
    da, _ = _bipartite_dims(psi)
    if h_a.dim**n > MAX_COPY_DIM:
        raise DomainError(f"{n} copies of a {h_a.dim}-level marginal exceed {MAX_COPY_DIM} levels")
    lam = schmidt_spectrum(psi).padded(h_a.dim)
    probs = np.array([math.prod(c) for c in itertools.product(lam, repeat=n)])
    energies = np.array([sum(c) for c in itertools.product(h_a.energies, repeat=n)])
    value = float(np.dot(np.sort(probs)[::-1], np.sort(energies))) / n
    return MeasureValue(value, n, h_a)


def asymptotic_measure(psi: PureState, h_a: Hamiltonian) -> MeasureValue:
    """Many-copy limit: energy of the Gibbs state with the marginal's entropy."""
    s = passive.von_neumann_entropy(schmidt_spectrum(psi), base="nats")
    beta = passive.match_beta_by_entropy(s, h_a)
    tau = passive.gibbs_state(h_a, beta)
    return MeasureValue(tau.energy, None, h_a, beta=beta, log_z=tau.log_z)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """Pure-state ensemble ``sum_i p_i |psi_i><psi_i|``."""

    weights: np.ndarray
    states: tuple[PureState, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size != len(self.states) or w.size == 0:
            raise ValidationError("weights and states differ in length")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise ValidationError("weights must be a probability vector")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", tuple(self.states))

    def reconstruct(self) -> np.ndarray:
        return sum(p * s.density().matrix for p, s in zip(self.weights, self.states))


def eigen_decomposition(rho: DensityMatrix, dims: Sequence[int] | None = None) -> Decomposition:
    dims = tuple(dims) if dims is not None else rho.dims
    vals, vecs = np.linalg.eigh(rho.matrix)
    keep = vals > 1e-12
    w = vals[keep] / vals[keep].sum()
    return Decomposition(w, tuple(PureState(v, dims) for v in vecs[:, keep].T))


def measure_mixed_upper_bound(rho_ab, dec: Decomposition, h_a: Hamiltonian) -> float:
    """Average pure-state measure over ``dec``.

    An upper bound on the convex-roof value, which minimises over all
    decompositions.
    """
    dev = max_abs(dec.reconstruct() - as_matrix(rho_ab))
    if dev > RESIDUAL_TOL:
        raise ValidationError(f"decomposition does not reconstruct the state (deviation {dev:.3e})")
    return float(sum(p * measure_pure(s, h_a).value for p, s in zip(dec.weights, dec.states)))


def append_ground_pairs(psi: PureState, m: int) -> PureState:
    """``psi (x) |00>^{(x) m}`` with the extra qubits grouped on each side."""
    da, db = _bipartite_dims(psi)
    amp = psi.amplitudes.reshape(da, db)
    anc = np.zeros(2**m)
    anc[0] = 1.0
    out = np.einsum("ab,i,j->aibj", amp, anc, anc).reshape(-1)
    return PureState(out, (da * 2**m, db * 2**m))


def hamiltonian_bank(n: int, seed=None, n_random: int | None = None) -> list[Hamiltonian]:
    """Ladder, every ``H_k`` and random non-degenerate spectra with ground energy zero."""
    rng = _as_rng(seed)
    bank = [Hamiltonian.ladder(n)]
    bank += [vidal_hamiltonian(k, n) for k in range(1, n + 1)]
    count = max(1, 10 - len(bank)) if n_random is None else n_random
    for _ in range(count):
        e = np.sort(rng.uniform(0.0, 3.0, n))
        bank.append(Hamiltonian(e - e[0]))
    return bank
