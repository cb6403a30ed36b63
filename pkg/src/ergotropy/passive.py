"""Work extraction from finite systems: passive states, ergotropy, Gibbs states,
entropies and single-shot work.

Entropies are reported in bits unless ``base="nats"`` is requested. Every
thermodynamic identity (free energies, divergences, single-shot work,
entropy-matched temperatures) works in nats.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericalError, ValidationError
from .qcore import (
    DensityMatrix,
    Hamiltonian,
    Spectrum,
    as_matrix,
    dagger,
    dephase,
    max_abs,
)

# eigenvalues below this are treated as exact zeros (rank, supports)
RANK_CUTOFF = 1e-12
BETA_MAX = 1e6
ENTROPY_TOL = 1e-10
COMMUTE_TOL = 1e-10

LN2 = math.log(2.0)


def _check_dim(rho, h: Hamiltonian) -> np.ndarray:
    m = as_matrix(rho)
    if m.shape != (h.dim, h.dim):
        raise ValidationError(f"state dimension {m.shape[0]} != Hamiltonian dimension {h.dim}")
    return m


def _probabilities(x) -> np.ndarray:
    """Eigenvalues (or probabilities) sorted non-increasing, clipped at zero."""
    if isinstance(x, Spectrum):
        return np.asarray(x.probs)
    if isinstance(x, DensityMatrix):
        p = x.eigvals()
    else:
        a = np.asarray(x)
        p = np.linalg.eigvalsh(as_matrix(a)) if a.ndim == 2 else a.astype(float)
    return np.sort(np.clip(p, 0.0, None))[::-1]


def _parse_beta(beta) -> float:
    if isinstance(beta, str):
        beta = float(beta.replace("∞", "inf"))
    beta = float(beta)
    if math.isnan(beta):
        raise DomainError("beta is NaN")
    return beta


# ---------------------------------------------------------------------------
# passive states and ergotropy
# ---------------------------------------------------------------------------


def energy(rho, h: Hamiltonian) -> float:
    m = _check_dim(rho, h)
    return float(np.trace(m @ h.matrix).real)


def passive_state(rho, h: Hamiltonian) -> DensityMatrix:
    """Lowest-energy state unitarily reachable from ``rho``.

    The largest population goes on the ground level; ties keep their
    original order (stable sort).
    """
    _check_dim(rho, h)
    p = _probabilities(rho)
    v = h.basis
    dims = rho.dims if isinstance(rho, DensityMatrix) else ()
    return DensityMatrix((v * p) @ dagger(v), dims)


def passive_energy(spectrum, h: Hamiltonian) -> float:
    """Energy of the passive state with the given spectrum.

    Shorter spectra are padded with zeros up to ``h.dim``.
    """
    p = Spectrum(_probabilities(spectrum)).padded(h.dim)
    return float(np.dot(p, h.energies))


def ergotropy(rho, h: Hamiltonian) -> float:
    return energy(rho, h) - passive_energy(rho, h)


# ---------------------------------------------------------------------------
# Gibbs states
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ThermalState:
    beta: float
    hamiltonian: Hamiltonian
    state: DensityMatrix
    log_z: float
    populations: np.ndarray

    @property
    def energy(self) -> float:
        return float(np.dot(self.populations, self.hamiltonian.energies))

    @property
    def entropy(self) -> float:
        """Von Neumann entropy in nats."""
        p = self.populations[self.populations > 0]
        return float(-np.sum(p * np.log(p))) + 0.0


def _gibbs_populations(h: Hamiltonian, beta: float) -> tuple[np.ndarray, float]:
    e = h.energies
    if math.isinf(beta):
        groups = h.eigenspaces()
        idx = groups[0] if beta > 0 else groups[-1]
        p = np.zeros(h.dim)
        p[idx] = 1.0 / idx.size
        edge = float(e[idx[0]])
        if edge == 0.0:
            log_z = math.log(idx.size)
        else:
            log_z = math.copysign(math.inf, -beta * edge)
        return p, log_z
    ref = e[0] if beta >= 0 else e[-1]
    w = np.exp(-beta * (e - ref))
    z = w.sum()
    return w / z, float(-beta * ref + math.log(z))


def gibbs_state(h: Hamiltonian, beta) -> ThermalState:
    """``exp(-beta H) / Z``; ``beta = +inf`` / ``-inf`` give the uniform
    mixture over the lowest / highest energy eigenspace."""
    beta = _parse_beta(beta)
    p, log_z = _gibbs_populations(h, beta)
    v = h.basis
    state = DensityMatrix((v * p) @ dagger(v))
    return ThermalState(beta, h, state, log_z, p)


def gibbs_entropy(h: Hamiltonian, beta: float) -> float:
    """Entropy of the Gibbs state in nats, stable for large ``beta``."""
    if math.isinf(beta):
        g = h.eigenspaces()
        return math.log((g[0] if beta > 0 else g[-1]).size)
    e = h.energies - (h.energies[0] if beta >= 0 else h.energies[-1])
    w = np.exp(-beta * e)
    z = w.sum()
    return float(beta * np.dot(w, e) / z + math.log(z))


def match_beta_by_entropy(target: float, h: Hamiltonian) -> float:
    """Non-negative inverse temperature whose Gibbs state has entropy ``target`` (nats).

    Returns ``0.0`` at the maximal entropy ``ln d`` and ``math.inf`` at the
    ground-space entropy ``ln g0``.
    """
    lo, hi = math.log(h.ground_degeneracy()), math.log(h.dim)
    if target > hi + ENTROPY_TOL or target < lo - ENTROPY_TOL:
        raise DomainError(
            f"entropy {target!r} nats outside attainable range [{lo!r}, {hi!r}]"
        )
    if h.is_fully_degenerate():
        if abs(target - hi) <= ENTROPY_TOL:
            return 0.0
        raise DomainError("fully degenerate Hamiltonian only admits the maximally mixed state")
    if target >= hi:
        return 0.0
    if target <= lo:
        return math.inf

    def residual(beta):
        return gibbs_entropy(h, beta) - target

    if residual(BETA_MAX) > 0:
        # entropy gap below what beta = BETA_MAX resolves
        return math.inf
    beta, info = brentq(residual, 0.0, BETA_MAX, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                        maxiter=1000, full_output=True, disp=False)
    if not info.converged or abs(residual(beta)) > ENTROPY_TOL:
        raise NumericalError(
            f"entropy matching stalled after {info.iterations} iterations "
            f"(residual {residual(beta):.3e})"
        )
    return float(beta)


def thermodynamic_work(rho, h: Hamiltonian) -> float:
    """Energy released by relaxing to the equal-entropy Gibbs state."""
    _check_dim(rho, h)
    beta = match_beta_by_entropy(von_neumann_entropy(rho, base="nats"), h)
    return energy(rho, h) - gibbs_state(h, beta).energy


# ---------------------------------------------------------------------------
# entropies and divergences
# ---------------------------------------------------------------------------


def _parse_alpha(alpha) -> float:
    if isinstance(alpha, str):
        alpha = float(alpha.replace("∞", "inf"))
    alpha = float(alpha)
    if not alpha >= 0:
        raise DomainError(f"Renyi order must be >= 0, got {alpha!r}")
    return alpha


def _log_base(base: str) -> float:
    if base == "bits":
        return LN2
    if base == "nats":
        return 1.0
    raise ValidationError(f"unknown entropy base {base!r}; use 'bits' or 'nats'")


def renyi_entropy(rho, alpha, base: str = "bits") -> float:
    alpha = _parse_alpha(alpha)
    scale = _log_base(base)
    p = _probabilities(rho)
    p = p[p > RANK_CUTOFF]
    if alpha == 0:
        s = math.log(p.size)
    elif alpha == 1:
        s = float(-np.sum(p * np.log(p)))
    elif math.isinf(alpha):
        s = -math.log(p[0])
    else:
        s = math.log(float(np.sum(p**alpha))) / (1.0 - alpha)
    return s / scale


def von_neumann_entropy(rho, base: str = "bits") -> float:
    return renyi_entropy(rho, 1, base)


def _support_projector(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    v = vecs[:, vals > RANK_CUTOFF]
    return v @ dagger(v)


def _joint_populations(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of two commuting Hermitian matrices in a shared eigenbasis."""
    vals, vecs = np.linalg.eigh(b)
    pa, pb = [], []
    start = 0
    n = vals.size
    for i in range(1, n + 1):
        if i == n or vals[i] - vals[i - 1] > 1e-9:
            v = vecs[:, start:i]
            block = dagger(v) @ a @ v
            pa.extend(np.linalg.eigvalsh(0.5 * (block + dagger(block))))
            pb.extend(vals[start:i])
            start = i
    return np.clip(np.array(pa), 0.0, None), np.clip(np.array(pb), 0.0, None)


def _relative_entropy(a: np.ndarray, b: np.ndarray) -> float:
    va, wa = np.linalg.eigh(a)
    vb, wb = np.linalg.eigh(b)
    supp_b = wb[:, vb > RANK_CUTOFF]
    leak = np.trace(a).real - np.trace(dagger(supp_b) @ a @ supp_b).real
    if leak > RANK_CUTOFF:
        return math.inf
    keep_a = va > RANK_CUTOFF
    first = float(np.sum(va[keep_a] * np.log(va[keep_a])))
    keep_b = vb > RANK_CUTOFF
    log_b = (wb[:, keep_b] * np.log(vb[keep_b])) @ dagger(wb[:, keep_b])
    second = float(np.trace(a @ log_b).real)
    return first - second


def renyi_divergence(rho, sigma, alpha) -> float:
    """Petz-Renyi divergence in nats for ``alpha`` in ``[0, 2]``.

    ``alpha = 0`` and ``alpha = 1`` accept any pair; other orders require
    ``[rho, sigma] = 0``. Support violations give ``math.inf``.
    """
    alpha = _parse_alpha(alpha)
    if alpha > 2:
        raise DomainError(f"Renyi divergence implemented for alpha in [0, 2], got {alpha!r}")
    a, b = as_matrix(rho), as_matrix(sigma)
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch {a.shape} vs {b.shape}")
    if alpha == 0:
        if np.linalg.eigvalsh(a)[0] > RANK_CUTOFF:
            # full support: the projector is the identity and Tr(sigma) = 1
            return 0.0
        overlap = float(np.trace(_support_projector(a) @ b).real)
        return math.inf if overlap <= 0 else -math.log(overlap)
    commute = max_abs(a @ b - b @ a)
    if alpha == 1:
        if commute <= COMMUTE_TOL:
            pa, pb = _joint_populations(a, b)
            return _classical_relative_entropy(pa, pb)
        return _relative_entropy(a, b)
    if commute > COMMUTE_TOL:
        raise ValidationError(
            f"Renyi divergence of order {alpha} needs commuting arguments "
            f"(commutator {commute:.3e})"
        )
    pa, pb = _joint_populations(a, b)
    on_a = pa > RANK_CUTOFF
    on_b = pb > RANK_CUTOFF
    if alpha < 1:
        both = on_a & on_b
        q = float(np.sum(pa[both] ** alpha * pb[both] ** (1 - alpha)))
        if q <= 0:
            return math.inf
    else:
        if np.any(on_a & ~on_b):
            return math.inf
        q = float(np.sum(pa[on_a] ** alpha * pb[on_a] ** (1 - alpha)))
    return math.log(q) / (alpha - 1)


def _classical_relative_entropy(p: np.ndarray, q: np.ndarray) -> float:
    on_p = p > RANK_CUTOFF
    if np.any(on_p & (q <= RANK_CUTOFF)):
        return math.inf
    return float(np.sum(p[on_p] * (np.log(p[on_p]) - np.log(q[on_p]))))


def single_shot_work(rho, h: Hamiltonian, beta) -> float:
    """Deterministic work from ``rho`` with a bath at inverse temperature ``beta``.

    ``(1/beta) * D_0(dephased rho || tau_beta)``, in energy units.
    """
    beta = _parse_beta(beta)
    if not (beta > 0 and math.isfinite(beta)):
        raise DomainError(f"single-shot work needs finite beta > 0, got {beta!r}")
    _check_dim(rho, h)
    omega = dephase(rho, h)
    tau = gibbs_state(h, beta).state
    return renyi_divergence(omega, tau, 0) / beta


def free_energy(rho, h: Hamiltonian, beta) -> float:
    """``E - S/beta`` with the entropy in nats."""
    beta = _parse_beta(beta)
    if beta == 0 or not math.isfinite(beta):
        raise DomainError(f"free energy needs finite non-zero beta, got {beta!r}")
    return energy(rho, h) - von_neumann_entropy(rho, base="nats") / beta


# ---------------------------------------------------------------------------
# summary record
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WorkReport:
    internal_energy: float
    passive_energy: float
    ergotropy: float
    thermodynamic_work: float
    matched_beta: float
    entropy_nats: float
    entropy_bits: float

    def to_dict(self) -> dict:
        return asdict(self)


def work_report(rho, h: Hamiltonian) -> WorkReport:
    e = energy(rho, h)
    ep = passive_energy(rho, h)
    s = von_neumann_entropy(rho, base="nats")
    beta = match_beta_by_entropy(s, h)
    w_th = e - gibbs_state(h, beta).energy
    return WorkReport(
        internal_energy=e,
        passive_energy=ep,
        ergotropy=e - ep,
        thermodynamic_work=w_th,
        matched_beta=beta,
        entropy_nats=s,
        entropy_bits=s / LN2,
    )
