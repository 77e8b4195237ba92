"""Finite-dimensional algebras of matrices and their elements.

Three algebra shapes are supported:

* ``direct_sum``: a block-diagonal direct sum of full matrix algebras
  M_{d_1} + ... + M_{d_r}, stored as one block-diagonal matrix. These are
  exactly the finite-dimensional C*-algebras; the unit is the identity.
* ``nilpotent``: strictly upper-triangular m x m matrices. Any product of
  m elements is zero. Not closed under the adjoint and not unital.
* ``unitized_nilpotent``: the unitization of the previous algebra, realised
  as upper-triangular matrices with constant diagonal (a + lambda*I).

Elements are immutable: the backing array is flagged read-only.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from .exceptions import (
    InvalidInput,
    NonUnitalAlgebra,
    ShapeMismatch,
    SupportViolation,
    UnsupportedStyle,
)

DIRECT_SUM = "direct_sum"
NILPOTENT = "nilpotent"
UNITIZED_NILPOTENT = "unitized_nilpotent"
KINDS = (DIRECT_SUM, NILPOTENT, UNITIZED_NILPOTENT)

DEFAULT_TOL = 1e-9
# off-support mass tolerated (relative) before an input is rejected
SUPPORT_TOL = 1e-9

STYLES = ("ginibre", "hermitian", "unitary", "positive", "npotent", "selfadjoint-npotent")


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Shape of a finite-dimensional matrix algebra."""

    kind: str
    blocks: tuple = ()
    size: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown algebra kind {self.kind!r}")
        if self.kind == DIRECT_SUM:
            blocks = tuple(int(b) for b in self.blocks)
            if not blocks or any(b < 1 for b in blocks):
                raise InvalidInput("direct-sum blocks must be a non-empty list of positive integers")
            object.__setattr__(self, "blocks", blocks)
            object.__setattr__(self, "size", 0)
        else:
            if int(self.size) < 1:
                raise InvalidInput("nilpotent algebra size must be a positive integer")
            object.__setattr__(self, "size", int(self.size))
            object.__setattr__(self, "blocks", ())

    @classmethod
    def direct_sum(cls, *blocks) -> "AlgebraDescriptor":
        if len(blocks) == 1 and not isinstance(blocks[0], (int, np.integer)):
            blocks = tuple(blocks[0])
        return cls(DIRECT_SUM, tuple(blocks))

    @classmethod
    def full(cls, d: int) -> "AlgebraDescriptor":
        """The full matrix algebra M_d."""
        return cls(DIRECT_SUM, (d,))

    @classmethod
    def nilpotent(cls, m: int) -> "AlgebraDescriptor":
        return cls(NILPOTENT, size=m)

    @classmethod
    def unitized_nilpotent(cls, m: int) -> "AlgebraDescriptor":
        return cls(UNITIZED_NILPOTENT, size=m)

    @property
    def dim(self) -> int:
        """Side length of the ambient square matrices."""
        return sum(self.blocks) if self.kind == DIRECT_SUM else self.size

    @property
    def is_unital(self) -> bool:
        return self.kind != NILPOTENT

    @property
    def is_involutive(self) -> bool:
        """True when the algebra is closed under the conjugate transpose."""
        return self.kind == DIRECT_SUM

    @property
    def offsets(self) -> tuple:
        out, acc = [], 0
        for b in self.blocks:
            out.append(acc)
            acc += b
        return tuple(out)

    def unit(self) -> np.ndarray:
        if not self.is_unital:
            raise NonUnitalAlgebra("the nilpotent algebra has no unit")
        return np.eye(self.dim, dtype=complex)

    @functools.cached_property
    def support_mask(self) -> np.ndarray:
        d = self.dim
        mask = np.zeros((d, d), dtype=bool)
        if self.kind == DIRECT_SUM:
            for off, b in zip(self.offsets, self.blocks):
                mask[off:off + b, off:off + b] = True
        elif self.kind == NILPOTENT:
            mask[np.triu_indices(d, 1)] = True
        else:
            mask[np.triu_indices(d, 0)] = True
        mask.setflags(write=False)
        return mask

    @functools.cached_property
    def _basis(self):
        d = self.dim
        labels, mats = [], []
        if self.kind == UNITIZED_NILPOTENT:
            labels.append("1")
            mats.append(np.eye(d, dtype=complex))
        rows, cols = np.nonzero(self.support_mask)
        for r, c in zip(rows, cols):
            if self.kind == UNITIZED_NILPOTENT and r == c:
                continue
            m = np.zeros((d, d), dtype=complex)
            m[r, c] = 1.0
            labels.append(f"E[{r},{c}]")
            mats.append(m)
        stack = np.array(mats).reshape(len(mats), d, d)
        stack.setflags(write=False)
        return tuple(labels), stack

    @property
    def basis_labels(self) -> tuple:
        return self._basis[0]

    @property
    def basis(self) -> np.ndarray:
        """Canonical linear basis as a read-only (b, dim, dim) stack.

        Matrix units inside the support; the unitized nilpotent algebra
        additionally starts with the identity. The basis is orthonormal for
        matrix units and orthogonal overall.
        """
        return self._basis[1]

    @property
    def basis_size(self) -> int:
        return len(self._basis[0])

    def project(self, m: np.ndarray) -> np.ndarray:
        """Orthogonal (Frobenius) projection of ``m`` onto the algebra."""
        m = np.asarray(m, dtype=complex)
        out = np.where(self.support_mask, m, 0)
        if self.kind == UNITIZED_NILPOTENT:
            idx = np.arange(self.dim)
            out[..., idx, idx] = np.mean(np.diagonal(m, axis1=-2, axis2=-1), axis=-1)[..., None]
        return out

    def support_defect(self, m: np.ndarray) -> float:
        return float(np.linalg.norm(np.asarray(m) - self.project(m)))

    @functools.cached_property
    def vec_projector(self) -> np.ndarray:
        """Projection onto the algebra acting on column-stacked coordinates."""
        d = self.dim
        basis = self.basis
        v = basis.transpose(0, 2, 1).reshape(len(basis), d * d).T
        norms = np.sum(np.abs(v) ** 2, axis=0)
        p = (v / norms) @ v.conj().T
        p.setflags(write=False)
        return p

    def to_dict(self) -> dict:
        if self.kind == DIRECT_SUM:
            return {"kind": DIRECT_SUM, "blocks": list(self.blocks)}
        return {"kind": self.kind, "size": self.size}

    @classmethod
    def from_dict(cls, data: dict) -> "AlgebraDescriptor":
        try:
            kind = data["kind"]
            if kind == DIRECT_SUM:
                return cls(DIRECT_SUM, tuple(data["blocks"]))
            if kind in (NILPOTENT, UNITIZED_NILPOTENT):
                return cls(kind, size=data["size"])
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed algebra descriptor: {data!r}") from exc
        raise InvalidInput(f"unknown algebra kind {data.get('kind')!r}")

    def __str__(self):
        if self.kind == DIRECT_SUM:
            return " + ".join(f"M{b}" for b in self.blocks)
        return f"{self.kind}({self.size})"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A matrix tagged with the algebra it lives in."""

    algebra: AlgebraDescriptor
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        d = self.algebra.dim
        if m.shape != (d, d):
            raise ShapeMismatch(f"expected a {d}x{d} matrix for {self.algebra}, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidInput("matrix entries must be finite")
        defect = self.algebra.support_defect(m)
        if defect > SUPPORT_TOL * max(1.0, float(np.linalg.norm(m))):
            raise SupportViolation(f"matrix leaves the support of {self.algebra} (off-support mass {defect:.3e})")
        m = self.algebra.project(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def H(self) -> "AlgebraElement":
        return adjoint(self)

    def __matmul__(self, other):
        other = as_element(other, self.algebra)
        return _wrap(self.algebra, self.matrix @ other.matrix)

    def __add__(self, other):
        other = as_element(other, self.algebra)
        return _wrap(self.algebra, self.matrix + other.matrix)

    def __sub__(self, other):
        other = as_element(other, self.algebra)
        return _wrap(self.algebra, self.matrix - other.matrix)

    def __neg__(self):
        return _wrap(self.algebra, -self.matrix)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return _wrap(self.algebra, scalar * self.matrix)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return _wrap(self.algebra, np.linalg.matrix_power(self.matrix, int(k)))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and np.array_equal(self.matrix, other.matrix)

    __hash__ = None

    def __repr__(self):
        return f"AlgebraElement({self.algebra}, norm={operator_norm(self):.4g})"


def _wrap(algebra: AlgebraDescriptor, m: np.ndarray) -> AlgebraElement:
    """Build an element without re-validating (internal results respect support)."""
    el = object.__new__(AlgebraElement)
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    object.__setattr__(el, "algebra", algebra)
    object.__setattr__(el, "matrix", m)
    return el


def as_element(x, algebra: AlgebraDescriptor | None = None) -> AlgebraElement:
    """Coerce an array or element into an :class:`AlgebraElement`.

    Bare arrays default to the full matrix algebra of their size.
    """
    if isinstance(x, AlgebraElement):
        if algebra is not None and x.algebra != algebra:
            raise ShapeMismatch(f"element lives in {x.algebra}, expected {algebra}")
        return x
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {m.shape}")
    if algebra is None:
        algebra = AlgebraDescriptor.full(m.shape[0])
    return AlgebraElement(algebra, m)


def _mat(x) -> np.ndarray:
    return x.matrix if isinstance(x, AlgebraElement) else np.asarray(x, dtype=complex)


def adjoint(a) -> AlgebraElement:
    """Conjugate transpose.

    The result is tagged with the same descriptor only when the algebra is
    closed under the involution; otherwise it is returned in the full
    matrix algebra.
    """
    a = as_element(a)
    target = a.algebra if a.algebra.is_involutive else AlgebraDescriptor.full(a.dim)
    return _wrap(target, a.matrix.conj().T)


def operator_norm(a) -> float:
    """Largest singular value."""
    m = _mat(a)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    m = _mat(a)
    return float(np.linalg.norm(m - m.conj().T, 2)) <= tol * max(1.0, operator_norm(m))


def spectrum(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues with algebraic multiplicity.

    Hermitian inputs are routed to the symmetric solver and come back real.
    Elements of the nilpotent algebra have spectrum {0} (computed in the
    unitization).
    """
    if isinstance(a, AlgebraElement) and a.algebra.kind == NILPOTENT:
        return np.zeros(a.dim, dtype=complex)
    m = _mat(a)
    if is_hermitian(m, tol):
        return np.linalg.eigvalsh((m + m.conj().T) / 2).astype(complex)
    return np.linalg.eigvals(m)


def match_multisets(x: Sequence[complex], y: Sequence[complex]) -> float:
    """Greedy minimal-distance matching of two equal-size multisets.

    Returns the largest distance among matched pairs. Ties are resolved by
    lexicographic (re, im) order of the candidates.
    """
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.size != y.size:
        raise ShapeMismatch("multisets of different sizes")
    if x.size == 0:
        return 0.0
    xs = x[np.lexsort((x.imag, x.real))]
    ys = y[np.lexsort((y.imag, y.real))]
    dist = np.abs(xs[:, None] - ys[None, :])
    order = np.argsort(dist, axis=None, kind="stable")
    used_x = np.zeros(xs.size, bool)
    used_y = np.zeros(ys.size, bool)
    worst, matched = 0.0, 0
    for flat in order:
        i, j = divmod(int(flat), ys.size)
        if used_x[i] or used_y[j]:
            continue
        used_x[i] = used_y[j] = True
        worst = max(worst, float(dist[i, j]))
        matched += 1
        if matched == xs.size:
            break
    return worst


def is_positive(a, tol: float = DEFAULT_TOL) -> bool:
    """Numerical positivity: near-Hermitian with spectrum above -tol*scale."""
    if tol < 0:
        raise InvalidInput("tol must be non-negative")
    m = _mat(a)
    scale = max(1.0, operator_norm(m))
    if float(np.linalg.norm(m - m.conj().T, 2)) > tol * scale:
        return False
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0]) >= -tol * scale


def psd_power(h: np.ndarray, p: float) -> np.ndarray:
    """h**p for Hermitian positive semidefinite h (negative round-off clipped)."""
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    return (v * w ** p) @ v.conj().T


def factor(a, k: int, mode: str = "trivial") -> list:
    """Factor ``a`` as a product of ``k`` elements of its (unital) algebra.

    ``trivial`` pads with the unit: (a, 1, ..., 1). ``balanced`` uses the
    polar decomposition a = u|a| and returns (u|a|^(1/k), |a|^(1/k), ...).
    """
    a = as_element(a)
    k = int(k)
    if k < 1:
        raise InvalidInput("k must be a positive integer")
    if not a.algebra.is_unital:
        raise NonUnitalAlgebra("factorization by padding needs a unit")
    if mode == "trivial" or k == 1:
        unit = _wrap(a.algebra, a.algebra.unit())
        return [a] + [unit] * (k - 1)
    if mode != "balanced":
        raise InvalidInput(f"unknown factor mode {mode!r}")
    if a.algebra.kind != DIRECT_SUM:
        raise InvalidInput("balanced factorization needs a direct-sum algebra")
    u, pos = scipy.linalg.polar(a.matrix, side="right")
    root = psd_power(pos, 1.0 / k)
    # polar factors of a block-diagonal matrix are block-diagonal
    first = a.algebra.project(u @ root)
    rest = a.algebra.project(root)
    return [_wrap(a.algebra, first)] + [_wrap(a.algebra, rest)] * (k - 1)


def product(elements) -> np.ndarray:
    elements = [_mat(e) for e in elements]
    out = elements[0]
    for e in elements[1:]:
        out = out @ e
    return out


# ---------------------------------------------------------------------------
# random elements

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, None]


def as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(d: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(d, rng))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def well_conditioned(d: int, rng: np.random.Generator, spread: float = 2.0) -> np.ndarray:
    """Random invertible matrix with singular values in [1/spread, spread]."""
    s = np.exp(rng.uniform(-np.log(spread), np.log(spread), d))
    return (haar_unitary(d, rng) * s) @ haar_unitary(d, rng)


def sigma_roots(n: int) -> np.ndarray:
    from .npotent import roots_sigma

    return np.array(roots_sigma(n).roots)


def _block(style: str, d: int, rng: np.random.Generator, n: int | None) -> np.ndarray:
    if style == "ginibre":
        return ginibre(d, rng)
    if style == "hermitian":
        g = ginibre(d, rng)
        return (g + g.conj().T) / 2
    if style == "unitary":
        return haar_unitary(d, rng)
    if style == "positive":
        b = ginibre(d, rng)
        return b.conj().T @ b
    if style == "npotent":
        values = rng.choice(sigma_roots(n), size=d)
        s = well_conditioned(d, rng)
        return (s * values) @ np.linalg.inv(s)
    if style == "selfadjoint-npotent":
        real = [w for w in sigma_roots(n) if abs(w.imag) < 1e-12]
        values = np.real(rng.choice(np.array(real), size=d))
        u = haar_unitary(d, rng)
        return (u * values) @ u.conj().T
    raise UnsupportedStyle(f"unknown style {style!r}")


def random_element(algebra: AlgebraDescriptor, style: str = "ginibre", seed: SeedLike = None,
                   n: int | None = None) -> AlgebraElement:
    """Deterministic random element of ``algebra`` drawn in the given style.

    The n-potent styles take the exponent ``n`` (or a style string such as
    ``"npotent(5)"``) and return exact n-potents built by similarity from a
    diagonal with entries in the root set.
    """
    if "(" in style:
        style, _, arg = style.partition("(")
        n = int(arg.rstrip(")"))
    if style not in STYLES:
        raise UnsupportedStyle(f"unknown style {style!r}")
    if style in ("npotent", "selfadjoint-npotent"):
        from .validation import check_n

        n = check_n(n)
    rng = as_rng(seed)
    if algebra.kind != DIRECT_SUM:
        if style != "ginibre":
            raise UnsupportedStyle(f"style {style!r} is not available on {algebra}")
        m = algebra.project(ginibre(algebra.dim, rng))
        return _wrap(algebra, m)
    blocks = [_block(style, d, rng, n) for d in algebra.blocks]
    return _wrap(algebra, scipy.linalg.block_diag(*blocks).astype(complex))
