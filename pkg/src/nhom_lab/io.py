"""JSON encoding of matrices, descriptors, elements and maps.

Matrices are written row-major as ``[re, im]`` pairs::

    {"dim": d, "entries": [[re, im], ...]}                  # square
    {"rows": r, "cols": c, "entries": [[re, im], ...]}      # rectangular

Descriptors are ``{"kind": "direct_sum", "blocks": [...]}`` or
``{"kind": "nilpotent", "size": m}`` (``unitized_nilpotent`` likewise).
A linear map is ``{"domain": <descriptor>, "codomain": <descriptor>,
"matrix": <matrix>}`` where the matrix acts on column-stacked coordinates.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement
from .exceptions import InvalidInput


def matrix_to_dict(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    entries = [[float(z.real), float(z.imag)] for z in m.ravel(order="C")]
    if m.shape[0] == m.shape[1]:
        return {"dim": int(m.shape[0]), "entries": entries}
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "entries": entries}


def matrix_from_dict(data: dict) -> np.ndarray:
    try:
        if "dim" in data:
            rows = cols = int(data["dim"])
        else:
            rows, cols = int(data["rows"]), int(data["cols"])
        raw = data["entries"]
        if len(raw) != rows * cols:
            raise InvalidInput(f"expected {rows * cols} entries, got {len(raw)}")
        flat = np.array([complex(float(re), float(im)) for re, im in raw], dtype=complex)
    except InvalidInput:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"malformed matrix: {exc}") from exc
    if not np.all(np.isfinite(flat)):
        raise InvalidInput("matrix entries must be finite")
    return flat.reshape(rows, cols)


def element_to_dict(e: AlgebraElement) -> dict:
    return {"algebra": e.algebra.to_dict(), "matrix": matrix_to_dict(e.matrix)}


def element_from_dict(data: dict) -> AlgebraElement:
    try:
        algebra = AlgebraDescriptor.from_dict(data["algebra"])
        return AlgebraElement(algebra, matrix_from_dict(data["matrix"]))
    except KeyError as exc:
        raise InvalidInput(f"element is missing field {exc}") from exc


def map_to_dict(phi) -> dict:
    return {
        "domain": phi.domain.to_dict(),
        "codomain": phi.codomain.to_dict(),
        "matrix": matrix_to_dict(phi.matrix),
    }


def map_from_dict(data: dict):
    from .nhom import LinearMapRep

    try:
        domain = AlgebraDescriptor.from_dict(data["domain"])
        codomain = AlgebraDescriptor.from_dict(data["codomain"])
        matrix = matrix_from_dict(data["matrix"])
    except KeyError as exc:
        raise InvalidInput(f"map is missing field {exc}") from exc
    return LinearMapRep(domain, codomain, matrix)


def dumps(obj, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, indent=2, sort_keys=False)
    return json.dumps(obj, separators=(",", ":"))


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: invalid JSON ({exc})") from exc


def write_json(obj, path, pretty: bool = False) -> None:
    Path(path).write_text(dumps(obj, pretty) + "\n")
