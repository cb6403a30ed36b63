"""JSON wire format.

Matrices are ``{"dims": [...], "re": [[...]], "im": [[...]]}``, pure states
the same with flat ``re``/``im`` vectors, Hamiltonians
``{"energies": [...], "basis_re": [[...]], "basis_im": [[...]]}`` with the
basis optional. Output is UTF-8 with sorted keys and floats written with 17
significant digits so that every value round-trips bit-for-bit.
Non-finite floats are written as the strings ``"inf"``, ``"-inf"``, ``"nan"``.
"""
from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .epo import EpoChannel
from .errors import ValidationError
from .qcore import DensityMatrix, Hamiltonian, PureState, Spectrum

FIXTURE_PREFIX = "fixture:"


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _emit(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj, key=str)):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(": ")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _emit(item, out)
        out.append("]")
    elif hasattr(obj, "value") and isinstance(obj.value, str):  # str enums
        out.append(json.dumps(obj.value, ensure_ascii=False))
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    out: list[str] = []
    _emit(obj, out)
    return "".join(out)


def parse_float(x) -> float:
    if isinstance(x, str):
        try:
            return float(x)
        except ValueError:
            raise ValidationError(f"not a number: {x!r}") from None
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return float(x)
    raise ValidationError(f"not a number: {x!r}")


def _real_array(x, ndim: int, what: str) -> np.ndarray:
    try:
        a = np.vectorize(parse_float, otypes=[float])(np.asarray(x, dtype=object))
    except ValidationError:
        raise
    except Exception as exc:
        raise ValidationError(f"{what}: {exc}") from None
    if a.ndim != ndim:
        raise ValidationError(f"{what} must be {ndim}-dimensional, got shape {a.shape}")
    return a


def _complex(obj: dict, ndim: int, re_key="re", im_key="im") -> np.ndarray:
    if re_key not in obj:
        raise ValidationError(f"missing key {re_key!r}")
    re = _real_array(obj[re_key], ndim, re_key)
    im = _real_array(obj[im_key], ndim, im_key) if obj.get(im_key) is not None else np.zeros_like(re)
    if re.shape != im.shape:
        raise ValidationError(f"{re_key}/{im_key} shapes differ: {re.shape} vs {im.shape}")
    return re + 1j * im


# ---------------------------------------------------------------------------
# per-type converters
# ---------------------------------------------------------------------------


def matrix_to_json(m, dims=None) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"dims": list(dims) if dims else [m.shape[0]], "re": m.real.tolist(), "im": m.imag.tolist()}


def density_to_json(rho: DensityMatrix) -> dict:
    return matrix_to_json(rho.matrix, rho.dims)


def density_from_json(obj: dict) -> DensityMatrix:
    return DensityMatrix(_complex(obj, 2), tuple(obj.get("dims") or ()))


def pure_to_json(psi: PureState) -> dict:
    v = psi.amplitudes
    return {"dims": list(psi.dims), "re": v.real.tolist(), "im": v.imag.tolist()}


def pure_from_json(obj: dict) -> PureState:
    return PureState(_complex(obj, 1), tuple(obj.get("dims") or ()))


def hamiltonian_to_json(h: Hamiltonian) -> dict:
    out = {"energies": h.energies.tolist()}
    if np.max(np.abs(h.basis - np.eye(h.dim))) > 0:
        out["basis_re"] = h.basis.real.tolist()
        out["basis_im"] = h.basis.imag.tolist()
    return out


def hamiltonian_from_json(obj) -> Hamiltonian:
    if isinstance(obj, list):
        return Hamiltonian(_real_array(obj, 1, "energies"))
    if "energies" not in obj:
        if "re" in obj:
            return Hamiltonian.from_matrix(_complex(obj, 2))
        raise ValidationError("Hamiltonian needs 'energies'")
    e = _real_array(obj["energies"], 1, "energies")
    basis = _complex(obj, 2, "basis_re", "basis_im") if obj.get("basis_re") is not None else None
    return Hamiltonian(e, basis)


def spectrum_to_json(s: Spectrum) -> dict:
    return {"probs": s.probs.tolist()}


def spectrum_from_json(obj) -> Spectrum:
    if isinstance(obj, dict):
        obj = obj.get("probs")
    return Spectrum(_real_array(obj, 1, "probs"))


def channel_to_json(c: EpoChannel) -> dict:
    return {"H_S": hamiltonian_to_json(c.system_hamiltonian), "kraus": [matrix_to_json(k) for k in c.kraus]}


def channel_from_json(obj: dict) -> EpoChannel:
    if "H_S" not in obj or "kraus" not in obj:
        raise ValidationError("channel needs 'H_S' and 'kraus'")
    return EpoChannel(hamiltonian_from_json(obj["H_S"]), tuple(_complex(k, 2) for k in obj["kraus"]))


def load_state(obj):
    """Density matrix, pure state or spectrum, inferred from the JSON shape.

    A spectrum (``{"probs": [...]}`` or a bare list) is returned as a
    :class:`Spectrum`.
    """
    if isinstance(obj, list) or (isinstance(obj, dict) and "probs" in obj):
        return spectrum_from_json(obj)
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValidationError("state object needs 're' (and optionally 'im', 'dims')")
    re = np.asarray(obj["re"], dtype=object)
    if re.ndim == 1:
        return pure_from_json(obj)
    return density_from_json(obj)


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------


def fixture_path(name: str) -> Path:
    name = name if name.endswith(".json") else name + ".json"
    return Path(str(resources.files("ergotropy") / "fixtures" / name))


def resolve(path: str) -> Path:
    if path.startswith(FIXTURE_PREFIX):
        return fixture_path(path[len(FIXTURE_PREFIX):])
    return Path(path)


def read_json(path: str):
    p = resolve(path)
    try:
        with open(p, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"no such file: {p}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ValidationError(f"invalid JSON in {p}: {exc}") from None


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n", encoding="utf-8")
