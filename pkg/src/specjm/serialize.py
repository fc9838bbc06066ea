"""Shared JSON conventions.

Every document this package writes carries ``"schema": "specjm/1"``.  Readers
accept documents without the marker (hand-written input) and reject documents
carrying any other marker.  Complex matrices are encoded entrywise as parallel
real/imaginary nested lists::

    {"dim": d, "re": [[...], ...], "im": [[...], ...]}

The ``im`` part may be omitted for real matrices.
"""

from __future__ import annotations

from typing import Any, Mapping

import numpy as np

from .errors import NonFinite, NonSquare, SchemaMismatch

__all__ = ["SCHEMA", "matrix_from_json", "matrix_to_json", "require_schema", "stamp"]

SCHEMA = "specjm/1"


def stamp(document: dict[str, Any]) -> dict[str, Any]:
    """Return the document with the schema marker as its first key."""
    return {"schema": SCHEMA, **document}


def require_schema(document: Mapping[str, Any]) -> None:
    """Reject a document whose schema marker names anything but ours."""
    marker = document.get("schema")
    if marker is not None and marker != SCHEMA:
        raise SchemaMismatch(f"expected schema {SCHEMA!r}, found {marker!r}")


def matrix_to_json(matrix: np.ndarray) -> dict[str, Any]:
    """Encode a complex square matrix as {"dim", "re", "im"}."""
    arr = np.asarray(matrix, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NonSquare(f"matrix must be square, got shape {arr.shape}")
    return {
        "dim": int(arr.shape[0]),
        "re": arr.real.tolist(),
        "im": arr.imag.tolist(),
    }


def matrix_from_json(document: Mapping[str, Any]) -> np.ndarray:
    """Decode a {"dim", "re", "im"} document to a complex ndarray."""
    dim = int(document["dim"])
    re = np.asarray(document["re"], dtype=np.float64)
    im_raw = document.get("im")
    im = np.zeros((dim, dim)) if im_raw is None else np.asarray(im_raw, dtype=np.float64)
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise NonSquare(
            f"matrix entries have shape {re.shape}/{im.shape}, expected {(dim, dim)}"
        )
    arr = re + 1j * im
    if not np.all(np.isfinite(re)) or not np.all(np.isfinite(im)):
        raise NonFinite("matrix entries contain NaN or Inf")
    return arr
