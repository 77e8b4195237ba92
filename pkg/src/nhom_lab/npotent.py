"""n-potents: the root set, Lagrange interpolation, partitions of unity.

An element e is an n-potent when e**n == e. Its spectrum sits inside the
root set {0} + {(n-1)-th roots of unity}, and evaluating the Lagrange
basis polynomials of that root set at e splits the unit into mutually
orthogonal idempotents e_0, ..., e_{n-1} with e = sum_k w_k e_k.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    NILPOTENT,
    AlgebraDescriptor,
    AlgebraElement,
    _wrap,
    as_element,
    operator_norm,
)
from .exceptions import (
    IndexOutOfRange,
    NotNPotent,
    NotSelfAdjoint,
    ToleranceExceeded,
)
from .validation import check_n as _check_n


@dataclass(frozen=True)
class RootSet:
    """The n roots of x**n = x, ordered (0, 1, w, w**2, ...)."""

    n: int
    roots: tuple

    def __iter__(self):
        return iter(self.roots)

    def __len__(self):
        return len(self.roots)

    def __getitem__(self, k):
        return self.roots[k]

    def real_roots(self) -> tuple:
        return tuple(r for r in self.roots if r.imag == 0)


def _snap(x: float) -> float:
    return 0.0 if abs(x) < 1e-15 else float(x)


@functools.lru_cache(maxsize=None)
def roots_sigma(n: int) -> RootSet:
    n = _check_n(n)
    roots = [0j]
    for k in range(1, n):
        angle = 2 * np.pi * (k - 1) / (n - 1)
        roots.append(complex(_snap(np.cos(angle)), _snap(np.sin(angle))))
    return RootSet(n, tuple(roots))


@dataclass(frozen=True)
class InterpolationPolynomial:
    """Lagrange basis polynomial p_k for the root set of order n.

    ``coefficients`` are in ascending order of degree.
    """

    n: int
    k: int
    coefficients: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros_like(x)
        for c in reversed(self.coefficients):
            out = out * x + c
        return out

    def at_matrix(self, e) -> np.ndarray:
        return horner(self.coefficients, e)


@functools.lru_cache(maxsize=None)
def lagrange_polynomial(n: int, k: int) -> InterpolationPolynomial:
    n = _check_n(n)
    if not 0 <= k < n:
        raise IndexOutOfRange(f"k must lie in 0..{n - 1}, got {k}")
    roots = roots_sigma(n).roots
    # expand prod_{j != k} (x - w_j), ascending coefficients
    coeffs = np.array([1.0 + 0j])
    denom = 1.0 + 0j
    for j, w in enumerate(roots):
        if j == k:
            continue
        coeffs = np.convolve(coeffs, np.array([-w, 1.0]))
        denom *= roots[k] - w
    coeffs = coeffs / denom
    return InterpolationPolynomial(n, k, tuple(complex(c) for c in coeffs))


def horner(coefficients, e) -> np.ndarray:
    """Evaluate a polynomial (ascending coefficients) at a square matrix."""
    m = e.matrix if isinstance(e, AlgebraElement) else np.asarray(e, dtype=complex)
    eye = np.eye(m.shape[0], dtype=complex)
    out = coefficients[-1] * eye
    for c in reversed(coefficients[:-1]):
        out = out @ m + c * eye
    return out


def npotent_residual(e, n: int) -> float:
    m = e.matrix if isinstance(e, AlgebraElement) else np.asarray(e, dtype=complex)
    return float(np.linalg.norm(np.linalg.matrix_power(m, n) - m, 2))


def is_npotent(e, n: int, tol: float = DEFAULT_TOL) -> bool:
    n = _check_n(n)
    norm = operator_norm(e)
    return npotent_residual(e, n) <= tol * max(1.0, norm ** n)


@dataclass(frozen=True, eq=False)
class NPartition:
    """Mutually orthogonal idempotents e_0..e_{n-1} summing to the unit."""

    n: int
    idempotents: tuple
    roots: RootSet
    residuals: dict = field(default_factory=dict)

    def __iter__(self):
        return iter(self.idempotents)

    def __len__(self):
        return len(self.idempotents)

    def __getitem__(self, k) -> AlgebraElement:
        return self.idempotents[k]

    def reconstruct(self) -> np.ndarray:
        """sum_{k>=1} w_k e_k."""
        return sum(w * e.matrix for w, e in zip(self.roots.roots[1:], self.idempotents[1:]))

    def ranks(self, tol: float = 1e-8) -> list:
        out = []
        for e in self.idempotents:
            s = np.linalg.svd(e.matrix, compute_uv=False)
            out.append(int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0))))
        return out

    def to_dict(self) -> dict:
        from .io import element_to_dict

        return {
            "n": self.n,
            "roots": [[r.real, r.imag] for r in self.roots.roots],
            "idempotents": [element_to_dict(e) for e in self.idempotents],
            "residuals": dict(self.residuals),
        }


def partition_residuals(idempotents, unit: np.ndarray, e: np.ndarray, roots) -> dict:
    mats = [x.matrix if isinstance(x, AlgebraElement) else x for x in idempotents]
    idem = max(np.linalg.norm(m @ m - m, 2) for m in mats)
    ortho = 0.0
    for j, mj in enumerate(mats):
        for k, mk in enumerate(mats):
            if j != k:
                ortho = max(ortho, np.linalg.norm(mj @ mk, 2))
    total = np.linalg.norm(sum(mats) - unit, 2)
    recon = np.linalg.norm(sum(w * m for w, m in zip(roots[1:], mats[1:])) - e, 2)
    return {
        "idempotency": float(idem),
        "orthogonality": float(ortho),
        "sum_to_unit": float(total),
        "reconstruction": float(recon),
    }


def partition_of_unity(e, n: int, tol: float = DEFAULT_TOL) -> NPartition:
    """The n-partition of unity of an n-potent, e_k = p_k(e).

    On the nilpotent algebra the computation happens in its unitization and
    the idempotents are tagged with the unitized descriptor. Nearly
    n-potent inputs are not re-projected; the achieved residuals are
    attached to the result.
    """
    n = _check_n(n)
    e = as_element(e)
    if not is_npotent(e, n, tol):
        raise NotNPotent(f"element is not an {n}-potent within tol={tol:g} "
                         f"(residual {npotent_residual(e, n):.3e})")
    target = e.algebra
    if target.kind == NILPOTENT:
        target = AlgebraDescriptor.unitized_nilpotent(target.size)
    roots = roots_sigma(n)
    idempotents = tuple(
        _wrap(target, target.project(lagrange_polynomial(n, k).at_matrix(e)))
        for k in range(n)
    )
    unit = np.eye(e.dim, dtype=complex)
    residuals = partition_residuals(idempotents, unit, e.matrix, roots.roots)
    scale = max(1.0, operator_norm(e)) ** (n - 1)
    if max(residuals.values()) > tol * scale:
        raise ToleranceExceeded("constructed partition misses its invariants; "
                                "the n-potent is likely ill-conditioned", residuals)
    return NPartition(n, idempotents, roots, residuals)


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """Certificate that a self-adjoint n-potent (n even) is a projection."""

    projection: AlgebraElement
    residuals: dict


@dataclass(frozen=True, eq=False)
class TripotentSplit:
    """e = p1 - p2 with p1, p2 orthogonal projections (n odd)."""

    p1: AlgebraElement
    p2: AlgebraElement
    residuals: dict


def classify_selfadjoint_npotent(e, n: int, tol: float = DEFAULT_TOL):
    """Classify a self-adjoint n-potent.

    Even n: the element is a projection and a :class:`ProjectionResult` is
    returned. Odd n: the element is a self-adjoint tripotent and splits as
    (e**2 + e)/2 - (e**2 - e)/2, returned as a :class:`TripotentSplit`.
    """
    n = _check_n(n)
    e = as_element(e)
    m = e.matrix
    scale = max(1.0, operator_norm(m))
    sa = float(np.linalg.norm(m - m.conj().T, 2))
    if sa > tol * scale:
        raise NotSelfAdjoint(f"element is not self-adjoint (residual {sa:.3e})")
    if not is_npotent(e, n, tol):
        raise NotNPotent(f"element is not an {n}-potent (residual {npotent_residual(e, n):.3e})")
    if n % 2 == 0:
        residuals = {"idempotency": float(np.linalg.norm(m @ m - m, 2)), "self_adjoint": sa}
        if residuals["idempotency"] > tol * scale ** 2:
            raise ToleranceExceeded("self-adjoint n-potent failed the projection certificate", residuals)
        return ProjectionResult(e, residuals)
    sq = m @ m
    p1, p2 = (sq + m) / 2, (sq - m) / 2
    residuals = {
        "p1_idempotency": float(np.linalg.norm(p1 @ p1 - p1, 2)),
        "p2_idempotency": float(np.linalg.norm(p2 @ p2 - p2, 2)),
        "p1_self_adjoint": float(np.linalg.norm(p1 - p1.conj().T, 2)),
        "p2_self_adjoint": float(np.linalg.norm(p2 - p2.conj().T, 2)),
        "orthogonality": float(np.linalg.norm(p1 @ p2, 2)),
        "reconstruction": float(np.linalg.norm(m - (p1 - p2), 2)),
        "tripotency": float(np.linalg.norm(sq @ m - m, 2)),
    }
    if max(residuals.values()) > tol * scale ** 3:
        raise ToleranceExceeded("self-adjoint n-potent failed the tripotent split", residuals)
    return TripotentSplit(_wrap(e.algebra, p1), _wrap(e.algebra, p2), residuals)
