"""Input validation shared by the functional API and the estimators."""
from __future__ import annotations

import numbers

import numpy as np

from .algebra import AlgebraDescriptor, AlgebraElement, as_element
from .exceptions import InvalidInput, InvalidN, ShapeMismatch


def check_n(n) -> int:
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 2:
        raise InvalidN(f"n must be an integer >= 2, got {n!r}")
    return int(n)


def check_tol(tol) -> float:
    tol = float(tol)
    if not np.isfinite(tol) or tol < 0:
        raise InvalidInput(f"tol must be a finite non-negative number, got {tol!r}")
    return tol


def check_element(x, algebra: AlgebraDescriptor | None = None) -> AlgebraElement:
    return as_element(x, algebra)


def check_stack(X, algebra: AlgebraDescriptor | None = None):
    """Coerce one element or a sequence of elements into a (m, d, d) array.

    Returns the array and whether the input was a single element.
    """
    if isinstance(X, AlgebraElement):
        if algebra is not None and X.algebra != algebra:
            raise ShapeMismatch(f"element lives in {X.algebra}, expected {algebra}")
        return X.matrix[None], True
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], AlgebraElement):
        return np.stack([check_element(x, algebra).matrix for x in X]), False
    arr = np.asarray(X, dtype=complex)
    single = arr.ndim == 2
    if single:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ShapeMismatch(f"expected square matrices, got shape {np.shape(X)}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix entries must be finite")
    if algebra is not None:
        if arr.shape[1] != algebra.dim:
            raise ShapeMismatch(f"expected {algebra.dim}x{algebra.dim} matrices")
        for m in arr:
            as_element(m, algebra)
    return arr, single


def check_map(phi):
    from .nhom import LinearMapRep

    if not isinstance(phi, LinearMapRep):
        raise InvalidInput(f"expected a LinearMapRep, got {type(phi).__name__}")
    return phi
