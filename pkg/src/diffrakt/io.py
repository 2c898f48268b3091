"""JSON and CSV formats.

Densities and diffraction measures are stored as

    {"moduli": [m_1, ...], "weights": [...]}

with weights listed in lexicographic element order. A weight is a number or
an [re, im] pair. A diffraction file may say ``"kind": "diffraction"``;
commands that accept either kind compute the diffraction of a density.
"""

from __future__ import annotations

import csv
import io as _io
import json
import sys
from typing import Any, Iterable, Sequence

import numpy as np

from .abelian import FiniteAbelianGroup, GroupFunction, make_group
from .density import DEFAULT_REL_TOL, Density, PointMeasure
from .exceptions import ValidationError
from .phaseforms import ElementaryPhaseForm, make_elementary
from .relators import GeneratorBasis

__all__ = [
    "read_json",
    "dumps",
    "group_from_json",
    "density_from_json",
    "density_to_json",
    "measure_from_json",
    "measure_to_json",
    "function_to_json",
    "phase_form_from_json",
    "phase_form_to_json",
    "rows_to_csv",
]


def read_json(path: str) -> dict:
    try:
        if path == "-":
            data = json.load(sys.stdin)
        else:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a JSON object")
    return data


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def group_from_json(data: dict, cap: int | None = None) -> FiniteAbelianGroup:
    moduli = data.get("moduli")
    if isinstance(moduli, int):
        moduli = [moduli]
    if not isinstance(moduli, list) or not moduli:
        raise ValidationError("'moduli' must be a non-empty list of positive integers")
    if not all(isinstance(m, int) and not isinstance(m, bool) for m in moduli):
        raise ValidationError("'moduli' must contain integers")
    return make_group(moduli, cap)


def _number(v) -> complex:
    if isinstance(v, bool):
        raise ValidationError(f"not a number: {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    raise ValidationError(f"not a number or [re, im] pair: {v!r}")


def _values(data: dict, key: str, g: FiniteAbelianGroup) -> np.ndarray:
    raw = data.get(key)
    if not isinstance(raw, list):
        raise ValidationError(f"'{key}' must be a list")
    if len(raw) != g.order:
        raise ValidationError(f"'{key}' has {len(raw)} entries, group order is {g.order}")
    return np.array([_number(v) for v in raw], dtype=complex)


def _encode(values: np.ndarray, scale: float | None = None) -> list:
    """Real arrays become plain numbers, complex ones [re, im] pairs.

    Entries within 1e-15 of the largest magnitude are roundoff and written as 0.
    """
    v = np.asarray(values, dtype=complex)
    top = float(np.max(np.abs(v), initial=0.0)) if scale is None else scale
    cut = 1e-15 * top
    re = np.where(np.abs(v.real) <= cut, 0.0, v.real)
    im = np.where(np.abs(v.imag) <= cut, 0.0, v.imag)
    if not np.any(im):
        return [float(x) + 0.0 for x in re]
    return [[float(a) + 0.0, float(b) + 0.0] for a, b in zip(re, im)]


def density_from_json(data: dict, cap: int | None = None) -> Density:
    g = group_from_json(data, cap)
    return Density(g, _values(data, "weights", g))


def density_to_json(rho: Density) -> dict:
    return {"kind": "density", "moduli": list(rho.group.moduli), "weights": _encode(rho.weights)}


def measure_from_json(data: dict, cap: int | None = None) -> PointMeasure:
    g = group_from_json(data, cap)
    w = _values(data, "weights", g)
    if np.any(np.abs(w.imag) > 0):
        raise ValidationError("diffraction weights must be real")
    tol = data.get("tol", DEFAULT_REL_TOL)
    if not isinstance(tol, (int, float)) or not tol > 0:
        raise ValidationError("'tol' must be a positive number")
    return PointMeasure(g, w.real, float(tol))


def measure_to_json(omega: PointMeasure) -> dict:
    return {
        "kind": "diffraction",
        "moduli": list(omega.group.moduli),
        "weights": _encode(omega.weights),
        "tol": omega.tol,
    }


def function_to_json(f: GroupFunction) -> dict:
    return {"moduli": list(f.group.moduli), "values": _encode(f.values)}


def phase_form_to_json(a: ElementaryPhaseForm) -> dict:
    return a.to_json()


def phase_form_from_json(data: dict, basis: GeneratorBasis) -> ElementaryPhaseForm:
    """Read angles (turns) and signs; a stored basis must match ``basis``."""
    stored = data.get("basis")
    if stored is not None and stored != basis.to_json():
        raise ValidationError("phase form was written for a different Bragg spectrum")
    angles = data.get("free_angles", [])
    signs = data.get("torsion_signs", [])
    if not isinstance(angles, list) or not isinstance(signs, list):
        raise ValidationError("'free_angles' and 'torsion_signs' must be lists")
    return make_elementary(basis, angles, signs)


def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()
