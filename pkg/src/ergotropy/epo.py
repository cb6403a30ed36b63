"""Energy-preserving operations: sampling, validation and monotone checks.

A channel is built from a joint unitary on system (x) environment that
commutes with both local Hamiltonians. Such a unitary is block diagonal on
the joint eigenspaces of the pair ``(H_S, H_E)``; the sampler draws an
independent Haar unitary for every block and never forms an interaction
Hamiltonian. With both spectra non-degenerate every block is
one-dimensional and the channel is a pure dephasing, so the default
environment carries degenerate levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import passive
from .errors import DomainError, ValidationError
from .majorize import partial_sum_slack
from .qcore import (
    DensityMatrix,
    Hamiltonian,
    _as_rng,
    as_matrix,
    dagger,
    max_abs,
    random_unitary,
)

CHANNEL_TOL = 1e-9
ALPHA_GRID = (0.0, 0.5, 1.0, 2.0, math.inf)


@dataclass(frozen=True, eq=False)
class EnvironmentSpec:
    hamiltonian: Hamiltonian
    beta: float = 1.0

    def __post_init__(self):
        b = float(self.beta)
        if math.isnan(b):
            raise ValidationError("environment beta is NaN")
        object.__setattr__(self, "beta", b)

    def state(self) -> passive.ThermalState:
        return passive.gibbs_state(self.hamiltonian, self.beta)


def default_environment(beta: float = 1.0) -> EnvironmentSpec:
    return EnvironmentSpec(Hamiltonian([0.0, 0.0, 1.0, 1.0]), beta)


@dataclass(frozen=True, eq=False)
class EpoChannel:
    """Kraus representation of a candidate energy-preserving channel.

    Construction does not validate; use :func:`validate_epo`.
    """

    system_hamiltonian: Hamiltonian
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ks = []
        d = self.system_hamiltonian.dim
        for k in self.kraus:
            k = np.array(k, dtype=complex)
            if k.shape != (d, d):
                raise ValidationError(f"Kraus operator shape {k.shape} != ({d}, {d})")
            k.flags.writeable = False
            ks.append(k)
        if not ks:
            raise ValidationError("channel needs at least one Kraus operator")
        object.__setattr__(self, "kraus", tuple(ks))

    @property
    def dim(self) -> int:
        return self.system_hamiltonian.dim

    @classmethod
    def identity(cls, h: Hamiltonian) -> "EpoChannel":
        return cls(h, (np.eye(h.dim, dtype=complex),))


def energy_preserving_unitary(h_s: Hamiltonian, h_e: Hamiltonian, seed=None) -> np.ndarray:
    """Haar-random unitary on S (x) E commuting with ``H_S (x) I`` and ``I (x) H_E``."""
    rng = _as_rng(seed)
    ds, de = h_s.dim, h_e.dim
    blocks = np.zeros((ds * de, ds * de), dtype=complex)
    for gs in h_s.eigenspaces():
        for ge in h_e.eigenspaces():
            idx = (gs[:, None] * de + ge[None, :]).reshape(-1)
            blocks[np.ix_(idx, idx)] = random_unitary(idx.size, rng)
    v = np.kron(h_s.basis, h_e.basis)
    return v @ blocks @ dagger(v)


def channel_from_unitary(h_s: Hamiltonian, env: EnvironmentSpec, u: np.ndarray) -> EpoChannel:
    """Kraus operators of ``rho -> Tr_E[U (rho (x) tau_E) U^dag]``."""
    ds, de = h_s.dim, env.hamiltonian.dim
    u = np.asarray(u, dtype=complex)
    if u.shape != (ds * de, ds * de):
        raise ValidationError(f"joint unitary shape {u.shape} != ({ds * de}, {ds * de})")
    w = env.hamiltonian.basis
    local = np.kron(np.eye(ds), w)
    ue = (dagger(local) @ u @ local).reshape(ds, de, ds, de)
    pops = env.state().populations
    kraus = []
    for k in np.flatnonzero(pops > 0):
        for j in range(de):
            m = math.sqrt(pops[k]) * ue[:, j, :, k]
            if max_abs(m) > 0:
                kraus.append(m)
    return EpoChannel(h_s, tuple(kraus))


def sample_epo_channel(h_s: Hamiltonian, env: EnvironmentSpec | None = None, seed=None) -> EpoChannel:
    env = default_environment() if env is None else env
    u = energy_preserving_unitary(h_s, env.hamiltonian, seed)
    return channel_from_unitary(h_s, env, u)


@dataclass(frozen=True)
class EpoValidation:
    completeness: float
    unitality: float
    commutation: float
    tol: float = CHANNEL_TOL

    @property
    def passed(self) -> bool:
        return max(self.completeness, self.unitality, self.commutation) <= self.tol

    def failures(self) -> list[str]:
        return [
            name
            for name in ("completeness", "unitality", "commutation")
            if getattr(self, name) > self.tol
        ]

    def to_dict(self) -> dict:
        return {
            "completeness": self.completeness,
            "unitality": self.unitality,
            "commutation": self.commutation,
            "tol": self.tol,
            "pass": self.passed,
            "failures": self.failures(),
        }


def validate_epo(c: EpoChannel, tol: float = CHANNEL_TOL) -> EpoValidation:
    d = c.dim
    h = c.system_hamiltonian.matrix
    eye = np.eye(d)
    comp = sum(dagger(k) @ k for k in c.kraus)
    unit = sum(k @ dagger(k) for k in c.kraus)
    comm = max(max_abs(k @ h - h @ k) for k in c.kraus)
    return EpoValidation(max_abs(comp - eye), max_abs(unit - eye), comm, tol)


def apply(c: EpoChannel, rho) -> DensityMatrix:
    m = as_matrix(rho)
    if m.shape != (c.dim, c.dim):
        raise ValidationError(f"state dimension {m.shape[0]} != channel dimension {c.dim}")
    out = sum(k @ m @ dagger(k) for k in c.kraus)
    dims = rho.dims if isinstance(rho, DensityMatrix) else ()
    return DensityMatrix(0.5 * (out + dagger(out)), dims)


@dataclass(frozen=True)
class MonotoneCheck:
    name: str
    lhs: float
    rhs: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


@dataclass(frozen=True, eq=False)
class MonotoneReport:
    checks: tuple[MonotoneCheck, ...]
    output: DensityMatrix = field(repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> MonotoneCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_records(self) -> list[dict]:
        return [c.to_dict() for c in self.checks]


def _alpha_label(a: float) -> str:
    return "inf" if math.isinf(a) else repr(a)


def monotone_report(
    rho,
    c: EpoChannel,
    beta_bath: float,
    tol: float = CHANNEL_TOL,
    alphas: Sequence[float] = ALPHA_GRID,
) -> MonotoneReport:
    """Apply ``c`` to ``rho`` and compare every EPO monotone before and after.

    Each check records ``lhs`` for the input and ``rhs`` for the output,
    except majorization where ``lhs`` is the smallest partial-sum slack of
    input over output and ``rhs`` is zero.
    """
    v = validate_epo(c, tol)
    if not v.passed:
        raise ValidationError(f"not an energy-preserving channel: {', '.join(v.failures())} failed")
    beta_bath = float(beta_bath)
    if not (beta_bath > 0 and math.isfinite(beta_bath)):
        raise DomainError(f"bath beta must be finite and positive, got {beta_bath!r}")
    h = c.system_hamiltonian
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(as_matrix(rho))
    sigma = apply(c, rho)
    checks = []

    slack = float(np.min(partial_sum_slack(rho, sigma)))
    checks.append(MonotoneCheck("majorization", slack, 0.0, slack >= -tol))
    for a in alphas:
        s_in = passive.renyi_entropy(rho, a, base="nats")
        s_out = passive.renyi_entropy(sigma, a, base="nats")
        checks.append(MonotoneCheck(f"renyi_entropy[{_alpha_label(a)}]", s_in, s_out, s_in <= s_out + tol))
    ep_in, ep_out = passive.passive_energy(rho, h), passive.passive_energy(sigma, h)
    checks.append(MonotoneCheck("passive_energy", ep_in, ep_out, ep_in <= ep_out + tol))
    we_in, we_out = passive.ergotropy(rho, h), passive.ergotropy(sigma, h)
    checks.append(MonotoneCheck("ergotropy", we_in, we_out, we_in >= we_out - tol))
    ws_in = passive.single_shot_work(rho, h, beta_bath)
    ws_out = passive.single_shot_work(sigma, h, beta_bath)
    checks.append(MonotoneCheck("single_shot_work", ws_in, ws_out, ws_in >= ws_out - tol))
    e_in, e_out = passive.energy(rho, h), passive.energy(sigma, h)
    checks.append(MonotoneCheck("energy", e_in, e_out, abs(e_in - e_out) <= tol))
    f_in = passive.free_energy(rho, h, beta_bath)
    f_out = passive.free_energy(sigma, h, beta_bath)
    checks.append(MonotoneCheck("free_energy", f_in, f_out, f_in >= f_out - tol))
    return MonotoneReport(tuple(checks), sigma)
