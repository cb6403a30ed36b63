"""Dense linear algebra and quantum-state primitives.

Subsystems are ordered row-major: the first listed subsystem is the most
significant factor of every Kronecker product, and all index arithmetic in
the package follows that convention.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NumericalError, ValidationError

# type invariants
ATOL = 1e-10
# reconstruction residuals
RESIDUAL_TOL = 1e-9
# grouping of numerically equal energies into eigenspaces
ENERGY_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def max_abs(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix.

    ``dims`` records the subsystem factorisation; it defaults to a single
    system of size ``dim``.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValidationError(f"density matrix must be square, got shape {m.shape}")
        dims = tuple(int(d) for d in self.dims) if self.dims else (m.shape[0],)
        if int(np.prod(dims)) != m.shape[0]:
            raise ValidationError(f"dims {dims} do not multiply to {m.shape[0]}")
        herm = max_abs(m - dagger(m))
        if herm > ATOL:
            raise ValidationError(f"matrix is not Hermitian (deviation {herm:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > ATOL:
            raise ValidationError(f"trace is {tr!r}, expected 1")
        m = 0.5 * (m + dagger(m))
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -ATOL:
            raise ValidationError(f"matrix has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_diagonal(cls, probs, dims: Sequence[int] = ()) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probs, dtype=float)).astype(complex), tuple(dims))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    def eigvals(self) -> np.ndarray:
        """Eigenvalues in ascending order."""
        return np.linalg.eigvalsh(self.matrix)

    def spectrum(self) -> "Spectrum":
        return Spectrum(self.eigvals())

    def expect(self, op) -> float:
        return float(np.trace(self.matrix @ as_matrix(op)).real)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalised state vector on a product of subsystems."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        dims = tuple(int(d) for d in self.dims) if self.dims else (v.size,)
        if int(np.prod(dims)) != v.size:
            raise ValidationError(f"dims {dims} do not multiply to {v.size}")
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > ATOL:
            raise ValidationError(f"state norm is {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", _frozen(v))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims: Sequence[int] = ()) -> "PureState":
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v), tuple(dims))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Probability vector stored in non-increasing order.

    Negative entries down to ``-ATOL`` are accepted as rounding noise and
    clipped to zero.
    """

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.size == 0:
            raise ValidationError("empty spectrum")
        if np.any(p < -ATOL) or np.any(p > 1 + ATOL):
            raise ValidationError(f"probabilities outside [0, 1]: {p}")
        if abs(p.sum() - 1.0) > ATOL:
            raise ValidationError(f"probabilities sum to {p.sum()!r}, expected 1")
        p = np.clip(p, 0.0, None)
        object.__setattr__(self, "probs", _frozen(np.sort(p)[::-1]))

    def __len__(self) -> int:
        return self.probs.size

    def padded(self, n: int) -> np.ndarray:
        if n < self.probs.size:
            if np.any(self.probs[n:] > ATOL):
                raise ValidationError(f"cannot fit spectrum of rank > {n} into {n} levels")
            return self.probs[:n].copy()
        return np.concatenate([self.probs, np.zeros(n - self.probs.size)])


class Hamiltonian:
    """Hermitian operator in spectral form, energies non-decreasing.

    ``basis`` columns are the energy eigenvectors; it defaults to the
    identity so ``Hamiltonian([0, 1])`` is ``diag(0, 1)``.
    """

    __slots__ = ("energies", "basis")

    def __init__(self, energies, basis=None):
        e = np.asarray(energies, dtype=float).reshape(-1)
        if e.size == 0 or not np.all(np.isfinite(e)):
            raise ValidationError("energies must be a non-empty finite array")
        if basis is None:
            basis = np.eye(e.size, dtype=complex)
        basis = np.asarray(basis, dtype=complex)
        if basis.shape != (e.size, e.size):
            raise ValidationError(f"basis shape {basis.shape} does not match {e.size} energies")
        dev = max_abs(dagger(basis) @ basis - np.eye(e.size))
        if dev > ATOL:
            raise ValidationError(f"eigenbasis is not unitary (deviation {dev:.3e})")
        order = np.argsort(e, kind="stable")
        object.__setattr__(self, "energies", _frozen(e[order]))
        object.__setattr__(self, "basis", _frozen(basis[:, order]))

    def __setattr__(self, name, value):
        raise AttributeError("Hamiltonian is immutable")

    def __repr__(self):
        return f"Hamiltonian(energies={self.energies.tolist()})"

    @classmethod
    def from_matrix(cls, m) -> "Hamiltonian":
        vals, vecs = eig_hermitian(m)
        return cls(vals, vecs)

    @classmethod
    def ladder(cls, dim: int) -> "Hamiltonian":
        """``sum_i i |i><i|``: equally spaced levels starting at zero."""
        return cls(np.arange(dim, dtype=float))

    @property
    def dim(self) -> int:
        return self.energies.size

    @property
    def matrix(self) -> np.ndarray:
        v = self.basis
        return (v * self.energies) @ dagger(v)

    def eigenspaces(self, tol: float = ENERGY_TOL) -> list[np.ndarray]:
        """Index groups of numerically equal energies (chained within ``tol``)."""
        groups, start = [], 0
        for i in range(1, self.dim + 1):
            if i == self.dim or self.energies[i] - self.energies[i - 1] > tol:
                groups.append(np.arange(start, i))
                start = i
        return groups

    def projectors(self, tol: float = ENERGY_TOL) -> list[np.ndarray]:
        out = []
        for idx in self.eigenspaces(tol):
            v = self.basis[:, idx]
            out.append(v @ dagger(v))
        return out

    def ground_degeneracy(self, tol: float = ENERGY_TOL) -> int:
        return len(self.eigenspaces(tol)[0])

    def is_fully_degenerate(self, tol: float = ENERGY_TOL) -> bool:
        return len(self.eigenspaces(tol)) == 1


def local_sum(*hamiltonians: Hamiltonian) -> Hamiltonian:
    """Non-interacting sum ``H_1 x I x ... + ... + I x ... x H_n``."""
    energies = np.zeros(1)
    basis = np.ones((1, 1), dtype=complex)
    for h in hamiltonians:
        energies = np.add.outer(energies, h.energies).reshape(-1)
        basis = np.kron(basis, h.basis)
    return Hamiltonian(energies, basis)


def as_matrix(x) -> np.ndarray:
    if isinstance(x, DensityMatrix):
        return x.matrix
    if isinstance(x, Hamiltonian):
        return x.matrix
    if isinstance(x, PureState):
        return x.density().matrix
    return np.asarray(x, dtype=complex)


def as_density(x) -> DensityMatrix:
    if isinstance(x, DensityMatrix):
        return x
    if isinstance(x, PureState):
        return x.density()
    return DensityMatrix(np.asarray(x, dtype=complex))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    m = as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    dev = max_abs(m - dagger(m))
    if dev > ATOL:
        raise ValidationError(f"matrix is not Hermitian (deviation {dev:.3e})")
    try:
        vals, vecs = np.linalg.eigh(0.5 * (m + dagger(m)))
    except np.linalg.LinAlgError as exc:
        # LAPACK heevd reports the failing sub-problem rather than an iteration count
        raise NumericalError(f"Hermitian eigensolver did not converge: {exc}") from exc
    return vals, vecs


def tensor(*mats) -> np.ndarray:
    """Kronecker product, first factor most significant."""
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        m = as_matrix(m)
        if m.ndim == 1:
            m = m.reshape(-1, 1)
        out = np.kron(out, m)
    return out


def partial_trace(rho, dims: Sequence[int], keep) -> DensityMatrix:
    """Reduced state on the subsystems listed in ``keep`` (in ascending order)."""
    m = as_matrix(rho)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    if int(np.prod(dims)) != m.shape[0]:
        raise ValidationError(f"dims {dims} do not match matrix size {m.shape[0]}")
    keep = sorted({keep} if isinstance(keep, (int, np.integer)) else set(keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValidationError(f"keep indices {keep} out of range for {n} subsystems")
    drop = [i for i in range(n) if i not in keep]
    t = m.reshape(dims + dims)
    perm = keep + drop + [n + i for i in keep] + [n + i for i in drop]
    dk = int(np.prod([dims[i] for i in keep]))
    dd = int(np.prod([dims[i] for i in drop]))
    t = t.transpose(perm).reshape(dk, dd, dk, dd)
    red = np.trace(t, axis1=1, axis2=3)
    return DensityMatrix(red, tuple(dims[i] for i in keep))


def dephase(rho, h: Hamiltonian) -> DensityMatrix:
    """Pinch ``rho`` onto the energy eigenspaces of ``h``."""
    m = as_matrix(rho)
    if m.shape[0] != h.dim:
        raise ValidationError(f"state dimension {m.shape[0]} != Hamiltonian dimension {h.dim}")
    out = np.zeros_like(m)
    for p in h.projectors():
        out += p @ m @ p
    dims = rho.dims if isinstance(rho, (DensityMatrix, PureState)) else ()
    return DensityMatrix(out, dims)


def dephase_in_basis(rho, basis: np.ndarray) -> DensityMatrix:
    """Remove every off-diagonal element in the orthonormal ``basis``."""
    m = as_matrix(rho)
    diag = np.einsum("ji,jk,ki->i", basis.conj(), m, basis).real
    dims = rho.dims if isinstance(rho, (DensityMatrix, PureState)) else ()
    return DensityMatrix((basis * diag) @ dagger(basis), dims)


class Schmidt(NamedTuple):
    coefficients: Spectrum
    left: np.ndarray
    right: np.ndarray


def schmidt(psi: PureState, dims: Sequence[int] | None = None) -> Schmidt:
    """Schmidt decomposition across a bipartition.

    ``coefficients`` are squared Schmidt values. ``left[:, i]`` and
    ``right[:, i]`` are the paired local vectors, so that
    ``psi = sum_i sqrt(c_i) left[:, i] (x) right[:, i]``.
    When ``psi`` has more than two subsystems, ``dims`` groups them as
    ``(d_first, d_rest)``.
    """
    if dims is None:
        if len(psi.dims) < 2:
            raise ValidationError("schmidt needs a bipartite state")
        dims = (psi.dims[0], int(np.prod(psi.dims[1:])))
    da, db = (int(d) for d in dims)
    if da * db != psi.dim:
        raise ValidationError(f"dims {dims} do not match state size {psi.dim}")
    u, s, vh = np.linalg.svd(psi.amplitudes.reshape(da, db))
    coeff = s**2
    return Schmidt(Spectrum(coeff / coeff.sum()), u[:, : s.size], vh[: s.size].T)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    rng = _as_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure(dim: int | Sequence[int], seed=None) -> PureState:
    dims = (dim,) if isinstance(dim, (int, np.integer)) else tuple(dim)
    rng = _as_rng(seed)
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(v / np.linalg.norm(v), dims)


def random_state(dim: int | Sequence[int], seed=None, rank: int | None = None) -> DensityMatrix:
    """Random mixed state from the induced (Ginibre) measure."""
    dims = (dim,) if isinstance(dim, (int, np.integer)) else tuple(dim)
    rng = _as_rng(seed)
    n = int(np.prod(dims))
    k = n if rank is None else rank
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    m = g @ dagger(g)
    return DensityMatrix(m / np.trace(m).real, dims)


def random_spectrum(dim: int, seed=None, concentration: float = 1.0) -> Spectrum:
    rng = _as_rng(seed)
    return Spectrum(rng.dirichlet(np.full(dim, concentration)))


def unitary_conjugate(rho, u: np.ndarray) -> DensityMatrix:
    m = as_matrix(rho)
    dims = rho.dims if isinstance(rho, DensityMatrix) else ()
    return DensityMatrix(u @ m @ dagger(u), dims)
