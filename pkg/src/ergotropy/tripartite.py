"""Three-party states: ergotropic-gap signatures, monogamy terms and a
GHZ / W / biseparable / product classifier for the canonical qubit families."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import passive
from .entangle import ergotropic_gap
from .errors import ValidationError
from .qcore import (
    DensityMatrix,
    Hamiltonian,
    PureState,
    as_matrix,
    dephase_in_basis,
    local_sum,
    partial_trace,
)

GAP_TOL = 1e-9
CUTS = ("A|BC", "B|AC", "C|AB")


class ClassLabel(str, enum.Enum):
    GHZ = "GHZ"
    W = "W"
    BISEP_AB_C = "BisepAB_C"
    BISEP_AC_B = "BisepAC_B"
    BISEP_BC_A = "BisepBC_A"
    PRODUCT = "Product"
    AMBIGUOUS = "AmbiguousGHZorW"


@dataclass(frozen=True)
class GapSignature:
    gap_A_BC: float
    gap_B_AC: float
    gap_C_AB: float

    def __post_init__(self):
        for g in self.as_tuple():
            if g < -1e-10:
                raise ValidationError(f"negative ergotropic gap {g!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.gap_A_BC, self.gap_B_AC, self.gap_C_AB)

    def to_dict(self) -> dict:
        return {"gap_A_BC": self.gap_A_BC, "gap_B_AC": self.gap_B_AC, "gap_C_AB": self.gap_C_AB}


# ---------------------------------------------------------------------------
# canonical families
# ---------------------------------------------------------------------------


def _bases(bases) -> list[np.ndarray]:
    """Three local qubit bases; column 0 is psi_i, column 1 its complement."""
    if bases is None:
        return [np.eye(2, dtype=complex)] * 3
    out = []
    for b in bases:
        b = np.asarray(b, dtype=complex)
        if b.shape != (2, 2) or np.max(np.abs(b.conj().T @ b - np.eye(2))) > 1e-10:
            raise ValidationError("each local basis must be a 2x2 unitary")
        out.append(b)
    if len(out) != 3:
        raise ValidationError(f"need three local bases, got {len(out)}")
    return out


def _ket(bases, bits) -> np.ndarray:
    v = np.ones(1, dtype=complex)
    for b, bit in zip(bases, bits):
        v = np.kron(v, b[:, bit])
    return v


def _check_weights(ws):
    ws = [float(w) for w in ws]
    if any(w < 0 for w in ws) or abs(sum(ws) - 1.0) > 1e-10:
        raise ValidationError(f"weights must be non-negative and sum to 1, got {ws}")
    return ws


def make_ghz(lam_max: float, phase: float = 0.0, bases=None) -> PureState:
    """``sqrt(l_max)|psi1 psi2 psi3> + e^{i phase} sqrt(l_min)|complements>``."""
    lam_max, lam_min = _check_weights([lam_max, 1.0 - lam_max])
    if lam_max < lam_min:
        raise ValidationError("lam_max must be at least 1/2")
    b = _bases(bases)
    v = math.sqrt(lam_max) * _ket(b, (0, 0, 0)) + np.exp(1j * phase) * math.sqrt(lam_min) * _ket(b, (1, 1, 1))
    return PureState(v, (2, 2, 2))


def make_w(l1: float, l2: float, l3: float, phi1: float = 0.0, phi2: float = 0.0,
           bases=None, ordered: bool = True) -> PureState:
    """``sqrt(l1)|001> + e^{i phi1} sqrt(l2)|010> + e^{i phi2} sqrt(l3)|100>`` in the local bases.

    ``ordered=False`` drops the ``l1 >= l2 >= l3`` requirement.
    """
    l1, l2, l3 = _check_weights([l1, l2, l3])
    if ordered and not (l1 >= l2 >= l3):
        raise ValidationError(f"W weights must be non-increasing, got {(l1, l2, l3)}")
    b = _bases(bases)
    v = (
        math.sqrt(l1) * _ket(b, (0, 0, 1))
        + np.exp(1j * phi1) * math.sqrt(l2) * _ket(b, (0, 1, 0))
        + np.exp(1j * phi2) * math.sqrt(l3) * _ket(b, (1, 0, 0))
    )
    return PureState(v, (2, 2, 2))


_PAIRS = {"AB": ((0, 1), 2), "AC": ((0, 2), 1), "BC": ((1, 2), 0)}


def make_bisep(p_min: float, pair: str = "AB", bases=None) -> PureState:
    """Entangled pair ``sqrt(p_min)|psi phi> + sqrt(p_max)|psi' phi'>`` times a
    product state (column 0 of its basis) on the remaining party."""
    p_min, p_max = _check_weights([p_min, 1.0 - p_min])
    if p_min > p_max:
        raise ValidationError("p_min must be at most 1/2")
    if pair not in _PAIRS:
        raise ValidationError(f"pair must be one of {sorted(_PAIRS)}, got {pair!r}")
    (i, j), _ = _PAIRS[pair]
    b = _bases(bases)
    lo, hi = [0, 0, 0], [0, 0, 0]
    hi[i] = hi[j] = 1
    v = math.sqrt(p_min) * _ket(b, lo) + math.sqrt(p_max) * _ket(b, hi)
    return PureState(v, (2, 2, 2))


# ---------------------------------------------------------------------------
# gaps
# ---------------------------------------------------------------------------


def _local_hamiltonians(dims, hamiltonians) -> list[Hamiltonian]:
    if hamiltonians is None:
        return [Hamiltonian.ladder(d) for d in dims]
    hs = list(hamiltonians)
    if [h.dim for h in hs] != list(dims):
        raise ValidationError(f"Hamiltonian dimensions {[h.dim for h in hs]} != state dims {list(dims)}")
    return hs


def _tripartite(psi) -> tuple[np.ndarray, tuple[int, int, int]]:
    dims = tuple(psi.dims)
    if len(dims) != 3:
        raise ValidationError(f"expected three subsystems, got dims {dims}")
    return as_matrix(psi), dims


def _cut_index(cut) -> int:
    if isinstance(cut, str):
        if cut not in CUTS:
            raise ValidationError(f"cut must be one of {CUTS}, got {cut!r}")
        return CUTS.index(cut)
    return int(cut)


def cut_gap(psi: PureState, cut, hamiltonians: Sequence[Hamiltonian] | None = None) -> float:
    """Ergotropic gap of a three-party state across ``X|YZ``.

    Local Hamiltonians default to ``sum_i i|i><i|`` (``|1><1|`` for qubits).
    For a pure state with zero ground energy the global passive energy
    vanishes and the gap is ``E(rho_X^p) + E(rho_YZ^p)``.
    """
    rho, dims = _tripartite(psi)
    hs = _local_hamiltonians(dims, hamiltonians)
    x = _cut_index(cut)
    rest = [i for i in range(3) if i != x]
    rx = partial_trace(rho, dims, [x])
    ryz = partial_trace(rho, dims, rest)
    return (
        passive.passive_energy(rx, hs[x])
        + passive.passive_energy(ryz, local_sum(*(hs[i] for i in rest)))
        - passive.passive_energy(rho, local_sum(*hs))
    )


def gap_signature(psi: PureState, hamiltonians=None) -> GapSignature:
    return GapSignature(*(cut_gap(psi, c, hamiltonians) for c in CUTS))


@dataclass(frozen=True)
class MonogamyTerms:
    gap_A_BC: float
    gap_A_B: float
    gap_A_C: float

    @property
    def slack(self) -> float:
        """``gap_A_B + gap_A_C - gap_A_BC``; zero for three qubits."""
        return self.gap_A_B + self.gap_A_C - self.gap_A_BC

    def to_dict(self) -> dict:
        return {"lhs": self.gap_A_BC, "gap_A_B": self.gap_A_B, "gap_A_C": self.gap_A_C, "slack": self.slack}


def monogamy_decompose(psi: PureState, hamiltonians=None) -> MonogamyTerms:
    rho, dims = _tripartite(psi)
    hs = _local_hamiltonians(dims, hamiltonians)
    lhs = cut_gap(psi, "A|BC", hs)
    rab = partial_trace(rho, dims, [0, 1])
    rac = partial_trace(rho, dims, [0, 2])
    return MonogamyTerms(lhs, ergotropic_gap(rab, hs[0], hs[1]), ergotropic_gap(rac, hs[0], hs[2]))


def marginal_bases(psi, tol: float = 1e-9) -> list[np.ndarray] | None:
    """Eigenbases of the single-party marginals, largest weight first.

    ``None`` when some marginal is degenerate and its basis is not unique.
    """
    rho, dims = _tripartite(psi)
    out = []
    for k in range(3):
        vals, vecs = np.linalg.eigh(partial_trace(rho, dims, [k]).matrix)
        if np.any(np.diff(vals) <= tol):
            return None
        out.append(vecs[:, ::-1])
    return out


def dephased_gap(state, bases=None, hamiltonians=None) -> float:
    """``sum_X E(rho_X^p) - E(rho_ABC^p)`` after dephasing in a local product basis.

    ``bases`` defaults to the marginal eigenbases of ``state``.
    """
    rho, dims = _tripartite(state)
    hs = _local_hamiltonians(dims, hamiltonians)
    if bases is None:
        bases = marginal_bases(state)
        if bases is None:
            raise ValidationError("marginal eigenbases are not unique; pass local bases explicitly")
    bases = [np.asarray(b, dtype=complex) for b in bases]
    if [b.shape[0] for b in bases] != list(dims):
        raise ValidationError("local bases do not match subsystem dimensions")
    product = bases[0]
    for b in bases[1:]:
        product = np.kron(product, b)
    rho_d = dephase_in_basis(DensityMatrix(rho, dims), product)
    local = sum(passive.passive_energy(partial_trace(rho_d, dims, [k]), hs[k]) for k in range(3))
    return local - passive.passive_energy(rho_d, local_sum(*hs))


@dataclass(frozen=True)
class Classification:
    label: ClassLabel
    signature: GapSignature
    dephased_gap: float | None
    rule: str

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "signature": self.signature.to_dict(),
            "dephased_gap": self.dephased_gap,
            "rule": self.rule,
        }


_BISEP_BY_ZERO = {0: ClassLabel.BISEP_BC_A, 1: ClassLabel.BISEP_AC_B, 2: ClassLabel.BISEP_AB_C}


def classify(psi: PureState, tol: float = GAP_TOL, bases=None) -> Classification:
    """Label a three-qubit state from the canonical GHZ, W, biseparable and product families.

    The zero pattern of the gap signature settles product and biseparable
    states. Unequal non-zero gaps only occur for W. Equal non-zero gaps
    ``g`` are shared by GHZ states and the symmetric W state; after
    dephasing in the local bases GHZ gives ``g`` and W gives ``g/2``.
    """
    if tuple(psi.dims) != (2, 2, 2):
        raise ValidationError(f"classification is defined for three qubits, got dims {psi.dims}")
    sig = gap_signature(psi)
    g = np.array(sig.as_tuple())
    zero = np.abs(g) <= tol
    if zero.all():
        return Classification(ClassLabel.PRODUCT, sig, None, "all gaps zero")
    if zero.sum() == 1:
        k = int(np.flatnonzero(zero)[0])
        others = g[~zero]
        if abs(others[0] - others[1]) <= tol:
            return Classification(_BISEP_BY_ZERO[k], sig, None, f"single zero gap at {CUTS[k]}")
        return Classification(ClassLabel.AMBIGUOUS, sig, None,
                              "single zero gap with unequal remaining gaps")
    if zero.any():
        return Classification(ClassLabel.AMBIGUOUS, sig, None, "two zero gaps")
    if np.ptp(g) > tol:
        return Classification(ClassLabel.W, sig, None, "unequal non-zero gaps")
    if bases is None:
        bases = marginal_bases(psi)
        if bases is None:
            return Classification(ClassLabel.AMBIGUOUS, sig, None,
                                  "equal gaps with maximally mixed marginals; local bases unknown")
    d = dephased_gap(psi, bases)
    level = float(g.mean())
    if abs(d - level) <= tol:
        return Classification(ClassLabel.GHZ, sig, d, "equal gaps; dephased gap equals the cut gap")
    if abs(d - level / 2) <= tol:
        return Classification(ClassLabel.W, sig, d, "equal gaps; dephased gap is half the cut gap")
    return Classification(ClassLabel.AMBIGUOUS, sig, d, "equal gaps; dephased gap matches neither family")
