"""Linear maps between finite-dimensional algebras and n-homomorphisms.

A linear map is stored as a dense matrix acting on column-stacked
coordinates of the ambient square matrices, so vec(phi(a)) = M @ vec(a).
The matrix is kept in canonical form M = P_cod @ M @ P_dom, where P_* are
the orthogonal projections onto the two algebras.

The n-homomorphism defect (a_1, ..., a_n) -> phi(a_1...a_n) - phi(a_1)...phi(a_n)
is multilinear, so it vanishes identically iff it vanishes on every n-tuple
of basis elements. That is what exhaustive verification checks. Batched
residuals are measured in the Frobenius norm, an upper bound for the
operator norm.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .algebra import (
    DEFAULT_TOL,
    DIRECT_SUM,
    NILPOTENT,
    UNITIZED_NILPOTENT,
    AlgebraDescriptor,
    AlgebraElement,
    _wrap,
    as_element,
    as_rng,
    factor,
    ginibre,
    haar_unitary,
    is_positive,
    operator_norm,
    product,
)
from .exceptions import (
    BudgetExceeded,
    InvalidInput,
    NonDirectSumDomain,
    NonUnitalDomain,
    NotHomomorphism,
    NotInvolutive,
    NotNHomomorphism,
    NotOrthogonal,
    ShapeMismatch,
    SupportViolation,
    VerificationFailed,
)
from .npotent import classify_selfadjoint_npotent, partition_of_unity, roots_sigma
from .validation import check_n as _check_n

DEFAULT_BUDGET = 10 ** 7
# rows of the batched defect computation handled at once
_CHUNK = 1 << 16


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacked vectorization; works on (..., d, d) stacks."""
    m = np.asarray(m)
    return np.swapaxes(m, -1, -2).reshape(*m.shape[:-2], -1)


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    v = np.asarray(v)
    return np.swapaxes(v.reshape(*v.shape[:-1], d, d), -1, -2)


def sandwich_operator(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Matrix of X -> left @ X @ right on column-stacked coordinates."""
    return np.kron(np.asarray(right).T, np.asarray(left))


def _project_rows(desc: AlgebraDescriptor, m: np.ndarray) -> np.ndarray:
    if desc.kind == UNITIZED_NILPOTENT:
        return desc.vec_projector @ m
    return m * vec(desc.support_mask)[:, None]


def _project_cols(desc: AlgebraDescriptor, m: np.ndarray) -> np.ndarray:
    if desc.kind == UNITIZED_NILPOTENT:
        return m @ desc.vec_projector
    return m * vec(desc.support_mask)[None, :]


@dataclass(frozen=True, eq=False)
class LinearMapRep:
    """A linear map between two algebras."""

    domain: AlgebraDescriptor
    codomain: AlgebraDescriptor
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dd, dc = self.domain.dim, self.codomain.dim
        if m.shape != (dc * dc, dd * dd):
            raise ShapeMismatch(f"map matrix must have shape {(dc * dc, dd * dd)}, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidInput("map matrix entries must be finite")
        m = _project_cols(self.domain, m)
        canon = _project_rows(self.codomain, m)
        leak = float(np.linalg.norm(m - canon))
        if leak > 1e-9 * max(1.0, float(np.linalg.norm(m))):
            raise SupportViolation(f"map sends the domain outside {self.codomain} (leak {leak:.3e})")
        canon.setflags(write=False)
        object.__setattr__(self, "matrix", canon)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_basis_images(cls, domain, codomain, images) -> "LinearMapRep":
        """Map determined by its values on ``domain.basis``."""
        images = np.asarray(images, dtype=complex)
        if images.shape != (domain.basis_size, codomain.dim, codomain.dim):
            raise ShapeMismatch("one image per basis element is required")
        v = vec(domain.basis).T
        pinv = (v / np.sum(np.abs(v) ** 2, axis=0)).conj().T
        images = codomain.project(images)
        return cls(domain, codomain, vec(images).T @ pinv)

    @classmethod
    def from_callable(cls, f: Callable[[np.ndarray], np.ndarray], domain, codomain) -> "LinearMapRep":
        """Tabulate ``f`` (matrix in, matrix out) on the domain basis."""
        images = np.array([np.asarray(f(b.copy()), dtype=complex) for b in domain.basis])
        return cls.from_basis_images(domain, codomain, images.reshape(len(images), codomain.dim, codomain.dim))

    @classmethod
    def identity(cls, algebra: AlgebraDescriptor) -> "LinearMapRep":
        return cls(algebra, algebra, np.eye(algebra.dim ** 2, dtype=complex))

    @classmethod
    def zero(cls, domain, codomain=None) -> "LinearMapRep":
        codomain = domain if codomain is None else codomain
        return cls(domain, codomain, np.zeros((codomain.dim ** 2, domain.dim ** 2), dtype=complex))

    @classmethod
    def conjugation(cls, u, domain, codomain=None) -> "LinearMapRep":
        """a -> u a u*; the codomain defaults to the full matrix algebra."""
        u = np.asarray(u, dtype=complex)
        codomain = AlgebraDescriptor.full(u.shape[0]) if codomain is None else codomain
        if u.shape[1] != domain.dim:
            raise ShapeMismatch("u must have as many columns as the domain dimension")
        return cls.from_callable(lambda a: u @ a @ u.conj().T, domain, codomain)

    @classmethod
    def left_multiplication(cls, left, algebra, codomain=None) -> "LinearMapRep":
        left = np.asarray(left, dtype=complex)
        codomain = AlgebraDescriptor.full(algebra.dim) if codomain is None else codomain
        return cls.from_callable(lambda a: left @ a, algebra, codomain)

    @classmethod
    def transpose(cls, algebra: AlgebraDescriptor) -> "LinearMapRep":
        if algebra.kind != DIRECT_SUM:
            raise NonDirectSumDomain("transpose is only an endomorphism of direct sums")
        return cls.from_callable(lambda a: a.T, algebra, algebra)

    # -- evaluation --------------------------------------------------------

    def apply_matrix(self, a: np.ndarray) -> np.ndarray:
        """Apply to a raw matrix or a (..., d, d) stack."""
        a = np.asarray(a, dtype=complex)
        if a.shape[-2:] != (self.domain.dim, self.domain.dim):
            raise ShapeMismatch(f"expected {self.domain.dim}x{self.domain.dim} inputs, got {a.shape}")
        return unvec(vec(a) @ self.matrix.T, self.codomain.dim)

    def __call__(self, a) -> AlgebraElement:
        return apply(self, a)

    @functools.cached_property
    def images(self) -> np.ndarray:
        """Values on ``domain.basis`` as a (b, d, d) stack."""
        out = self.apply_matrix(self.domain.basis)
        out.setflags(write=False)
        return out

    @functools.cached_property
    def norm_bound(self) -> float:
        """Operator norm of the matrix: bounds ||phi(a)||_F / ||a||_F."""
        return float(np.linalg.norm(self.matrix, 2)) if self.matrix.size else 0.0

    def residual_scale(self, n: int) -> float:
        return max(1.0, self.norm_bound) ** n

    # -- arithmetic --------------------------------------------------------

    def _same_shape(self, other: "LinearMapRep"):
        if not isinstance(other, LinearMapRep):
            raise TypeError("expected a LinearMapRep")
        if other.domain != self.domain or other.codomain != self.codomain:
            raise ShapeMismatch("maps have different domains or codomains")

    def __add__(self, other):
        self._same_shape(other)
        return LinearMapRep(self.domain, self.codomain, self.matrix + other.matrix)

    def __sub__(self, other):
        self._same_shape(other)
        return LinearMapRep(self.domain, self.codomain, self.matrix - other.matrix)

    def __neg__(self):
        return LinearMapRep(self.domain, self.codomain, -self.matrix)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return LinearMapRep(self.domain, self.codomain, scalar * self.matrix)

    __rmul__ = __mul__

    def compose(self, inner: "LinearMapRep") -> "LinearMapRep":
        """self o inner."""
        if inner.codomain != self.domain:
            raise ShapeMismatch("codomain of the inner map must equal the domain")
        return LinearMapRep(inner.domain, self.codomain, self.matrix @ inner.matrix)

    def sandwich(self, left, right) -> "LinearMapRep":
        """a -> left phi(a) right."""
        return LinearMapRep(self.domain, self.codomain,
                            sandwich_operator(left, right) @ self.matrix)

    def allclose(self, other: "LinearMapRep", atol: float = 1e-9) -> bool:
        self._same_shape(other)
        return float(np.max(np.abs(self.matrix - other.matrix), initial=0.0)) <= atol

    def to_dict(self) -> dict:
        from .io import map_to_dict

        return map_to_dict(self)

    def __repr__(self):
        return f"LinearMapRep({self.domain} -> {self.codomain})"


def apply(phi: LinearMapRep, a) -> AlgebraElement:
    """phi(a) as an element of the codomain."""
    if isinstance(a, AlgebraElement):
        if a.algebra != phi.domain:
            raise ShapeMismatch(f"element of {a.algebra} passed to a map on {phi.domain}")
    else:
        a = as_element(a, phi.domain)
    return _wrap(phi.codomain, phi.apply_matrix(a.matrix))


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerificationReport:
    """Outcome of a verification run.

    ``witness`` names the worst offending tuple (basis labels in exhaustive
    mode, sample index otherwise) and is None when the check passes.
    """

    passed: bool
    max_residual: float
    witness: Optional[list] = None
    mode: str = "exhaustive"
    checked: int = 0
    threshold: float = 0.0
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        out = {"pass": bool(self.passed), "max_residual": float(self.max_residual),
               "witness": self.witness, "mode": self.mode, "checked": int(self.checked),
               "threshold": float(self.threshold)}
        if self.details:
            out["details"] = self.details
        return out


def _chain_products(stack: np.ndarray, k: int) -> np.ndarray:
    """All k-fold products of a (b, d, d) stack, indexed in base b (first factor most significant)."""
    out = stack
    d = stack.shape[-1]
    for _ in range(k - 1):
        out = (out[:, None] @ stack[None]).reshape(-1, d, d)
    return out


def _digits(index: int, base: int, length: int) -> list:
    out = []
    for _ in range(length):
        index, r = divmod(index, base)
        out.append(r)
    return out[::-1]


def _exhaustive_defect(phi: LinearMapRep, n: int):
    basis, images = phi.domain.basis, phi.images
    b = len(basis)
    k1 = n // 2
    k2 = n - k1
    left_dom, left_cod = _chain_products(basis, k1), _chain_products(images, k1)
    right_dom, right_cod = _chain_products(basis, k2), _chain_products(images, k2)
    r = len(right_dom)
    step = max(1, _CHUNK // max(r, 1))
    worst, worst_idx = -1.0, 0
    dd, dc = phi.domain.dim, phi.codomain.dim
    for start in range(0, len(left_dom), step):
        stop = min(start + step, len(left_dom))
        dom = (left_dom[start:stop, None] @ right_dom[None]).reshape(-1, dd, dd)
        cod = (left_cod[start:stop, None] @ right_cod[None]).reshape(-1, dc, dc)
        res = np.linalg.norm((phi.apply_matrix(dom) - cod).reshape(len(dom), -1), axis=1)
        i = int(np.argmax(res))
        if res[i] > worst:
            worst, worst_idx = float(res[i]), start * r + i
    labels = phi.domain.basis_labels
    witness = [labels[j] for j in _digits(worst_idx, b, n)]
    return worst, witness, b ** n


def random_domain_elements(domain: AlgebraDescriptor, count: int, rng) -> np.ndarray:
    """Ginibre elements projected onto the algebra, unit Frobenius norm."""
    g = domain.project(np.stack([ginibre(domain.dim, rng) for _ in range(count)]))
    norms = np.linalg.norm(g.reshape(count, -1), axis=1)
    return g / np.where(norms > 0, norms, 1.0)[:, None, None]


def _randomized_defect(phi: LinearMapRep, n: int, trials: int, rng):
    tuples = [random_domain_elements(phi.domain, trials, rng) for _ in range(n)]
    dom = tuples[0]
    cod = phi.apply_matrix(tuples[0])
    for t in tuples[1:]:
        dom = dom @ t
        cod = cod @ phi.apply_matrix(t)
    res = np.linalg.norm((phi.apply_matrix(dom) - cod).reshape(trials, -1), axis=1)
    i = int(np.argmax(res))
    return float(res[i]), [f"sample[{i}]"], trials


def is_n_homomorphism(phi: LinearMapRep, n: int, tol: float = DEFAULT_TOL, mode: str = "auto",
                      trials: int = 200, seed=0, budget: int = DEFAULT_BUDGET) -> VerificationReport:
    """Check phi(a_1...a_n) = phi(a_1)...phi(a_n).

    ``mode`` is ``"exhaustive"`` (all basis n-tuples), ``"randomized"``
    (``trials`` Ginibre tuples) or ``"auto"`` (exhaustive within budget).
    """
    n = _check_n(n)
    tuples = phi.domain.basis_size ** n
    if mode == "auto":
        mode = "exhaustive" if tuples <= budget else "randomized"
    if mode == "exhaustive":
        if tuples > budget:
            raise BudgetExceeded(f"{tuples} basis tuples exceed the budget of {budget}; "
                                 "use mode='randomized'")
        worst, witness, checked = _exhaustive_defect(phi, n)
    elif mode == "randomized":
        worst, witness, checked = _randomized_defect(phi, n, int(trials), as_rng(seed))
    else:
        raise InvalidInput(f"unknown mode {mode!r}")
    threshold = tol * phi.residual_scale(n)
    passed = worst <= threshold
    return VerificationReport(passed, worst, None if passed else witness, mode, checked, threshold)


def star_defect(phi: LinearMapRep):
    """Largest ||phi(B*) - phi(B)*|| over the domain basis, with its label."""
    if not phi.domain.is_involutive:
        return float("inf"), None
    basis = phi.domain.basis
    lhs = phi.apply_matrix(np.swapaxes(basis.conj(), -1, -2))
    rhs = np.swapaxes(phi.images.conj(), -1, -2)
    res = np.linalg.norm((lhs - rhs).reshape(len(basis), -1), axis=1)
    if res.size == 0:
        return 0.0, None
    i = int(np.argmax(res))
    return float(res[i]), phi.domain.basis_labels[i]


def is_star_linear(phi: LinearMapRep, tol: float = DEFAULT_TOL) -> bool:
    """phi(B*) = phi(B)* for every canonical basis element.

    Always False when the domain is not closed under the adjoint.
    """
    worst, _ = star_defect(phi)
    return worst <= tol * max(1.0, phi.norm_bound)


def _cross_products(left: np.ndarray, right: np.ndarray) -> float:
    """max ||L_a R_b||_F over all pairs."""
    if len(left) == 0 or len(right) == 0:
        return 0.0
    prods = left[:, None] @ right[None]
    return float(np.max(np.linalg.norm(prods.reshape(-1, prods.shape[-1] ** 2), axis=1)))


def orthogonality_residual(psi_i: LinearMapRep, psi_j: LinearMapRep) -> float:
    """max over basis pairs of ||psi_i(a) psi_j(b)|| and ||psi_j(b) psi_i(a)||."""
    fi, fj = psi_i.images, psi_j.images
    return max(_cross_products(fi, fj), _cross_products(fj, fi))


def from_orthogonal_homs(parts, n: int, tol: float = DEFAULT_TOL) -> LinearMapRep:
    """sum_k w_k psi_k for mutually orthogonal homomorphisms psi_1..psi_{n-1}."""
    n = _check_n(n)
    parts = list(parts)
    if len(parts) != n - 1:
        raise InvalidInput(f"expected {n - 1} parts, got {len(parts)}")
    first = parts[0]
    for p in parts[1:]:
        first._same_shape(p)
    for i, p in enumerate(parts):
        rep = is_n_homomorphism(p, 2, tol, mode="exhaustive")
        if not rep.passed:
            raise NotHomomorphism(f"part {i + 1} is not a homomorphism "
                                  f"(residual {rep.max_residual:.3e})", index=i + 1, witness=rep.witness)
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            res = orthogonality_residual(parts[i], parts[j])
            scale = max(1.0, parts[i].norm_bound) * max(1.0, parts[j].norm_bound)
            if res > tol * scale:
                raise NotOrthogonal(f"parts {i + 1} and {j + 1} are not orthogonal (residual {res:.3e})",
                                    indices=(i + 1, j + 1), witness=res)
    roots = roots_sigma(n).roots
    total = np.zeros_like(first.matrix)
    for w, p in zip(roots[1:], parts):
        total = total + w * p.matrix
    return LinearMapRep(first.domain, first.codomain, total)


# ---------------------------------------------------------------------------
# decompositions


@dataclass(eq=False)
class DecompositionResult:
    """phi = e psi with e an n-potent, plus optional finer splittings."""

    n: int
    e: AlgebraElement
    psi: LinearMapRep
    parts: Optional[tuple] = None
    odd_split: Optional[tuple] = None
    residuals: dict = field(default_factory=dict)
    kind: str = "unital"

    def to_dict(self) -> dict:
        from .io import element_to_dict

        out = {"kind": self.kind, "n": self.n, "e": element_to_dict(self.e),
               "psi": self.psi.to_dict(), "residuals": dict(self.residuals)}
        if self.parts is not None:
            out["parts"] = [p.to_dict() for p in self.parts]
        if self.odd_split is not None:
            out["oddSplit"] = [p.to_dict() for p in self.odd_split]
        return out


def _max_diff(x: np.ndarray, y: np.ndarray) -> float:
    if len(x) == 0:
        return 0.0
    return float(np.max(np.linalg.norm((x - y).reshape(len(x), -1), axis=1)))


def _require(residuals: dict, threshold: float, what: str):
    bad = {k: v for k, v in residuals.items() if v > threshold}
    if bad:
        raise VerificationFailed(f"{what}: residuals above {threshold:.3e}: "
                                 + ", ".join(f"{k}={v:.3e}" for k, v in bad.items()), residuals)


def unital_decompose(phi: LinearMapRep, n: int, tol: float = DEFAULT_TOL) -> DecompositionResult:
    """e = phi(1) and psi(a) = e**(n-2) phi(a); verifies phi = e psi = psi e."""
    n = _check_n(n)
    if not phi.domain.is_unital:
        raise NonUnitalDomain(f"{phi.domain} has no unit")
    e = phi.apply_matrix(phi.domain.unit())
    power = np.linalg.matrix_power(e, n - 2)
    psi = LinearMapRep(phi.domain, phi.codomain, sandwich_operator(power, np.eye(len(e))) @ phi.matrix)
    f, g = phi.images, psi.images
    residuals = {
        "npotency": float(np.linalg.norm(np.linalg.matrix_power(e, n) - e, 2)),
        "homomorphism": is_n_homomorphism(psi, 2, tol, mode="exhaustive").max_residual,
        "factor_left": _max_diff(f, e @ g),
        "factor_right": _max_diff(f, g @ e),
        "commutation": _max_diff(e @ f, f @ e),
    }
    _require(residuals, tol * phi.residual_scale(n), "unital decomposition")
    return DecompositionResult(n, _wrap(phi.codomain, e), psi, residuals=residuals, kind="unital")


def _precheck(phi: LinearMapRep, n: int, tol: float, involutive: bool, **kwargs):
    if involutive and not is_star_linear(phi, tol):
        worst, label = star_defect(phi)
        raise NotInvolutive(f"map is not *-linear (residual {worst:.3e} at {label})")
    rep = is_n_homomorphism(phi, n, tol, **kwargs)
    if not rep.passed:
        raise NotNHomomorphism(f"map is not an {n}-homomorphism (residual {rep.max_residual:.3e}, "
                               f"witness {rep.witness})", rep)
    return rep


def split_involutive(phi: LinearMapRep, n: int, tol: float = DEFAULT_TOL, check: bool = True,
                     **verify_kwargs) -> DecompositionResult:
    """Split an involutive n-homomorphism on a unital domain.

    Even n: certifies that phi is a *-homomorphism and phi(1) a projection.
    Odd n: returns psi_1(a) = p1 psi(a) p1 and psi_2(a) = p2 psi(a) p2 with
    phi(1) = p1 - p2, so that phi = psi_1 - psi_2 and psi_1, psi_2 are
    orthogonal *-homomorphisms.
    """
    n = _check_n(n)
    if not phi.domain.is_unital:
        raise NonUnitalDomain(f"{phi.domain} has no unit")
    if check:
        _precheck(phi, n, tol, True, **verify_kwargs)
    base = unital_decompose(phi, n, tol)
    e = base.e.matrix
    residuals = dict(base.residuals)
    threshold = tol * phi.residual_scale(n)
    if n % 2 == 0:
        residuals.update({
            "idempotency": float(np.linalg.norm(e @ e - e, 2)),
            "self_adjoint": float(np.linalg.norm(e - e.conj().T, 2)),
            "two_multiplicativity": is_n_homomorphism(phi, 2, tol, mode="exhaustive").max_residual,
        })
        _require(residuals, threshold, "even-case certificate")
        return DecompositionResult(n, base.e, base.psi, residuals=residuals, kind="even")
    split = classify_selfadjoint_npotent(base.e, n, tol)
    p1, p2 = split.p1.matrix, split.p2.matrix
    psi1 = base.psi.sandwich(p1, p1)
    psi2 = base.psi.sandwich(p2, p2)
    residuals.update({
        "orthogonality": orthogonality_residual(psi1, psi2),
        "reconstruction": _max_diff(phi.images, psi1.images - psi2.images),
        "psi1_homomorphism": is_n_homomorphism(psi1, 2, tol, mode="exhaustive").max_residual,
        "psi2_homomorphism": is_n_homomorphism(psi2, 2, tol, mode="exhaustive").max_residual,
        "psi1_star": star_defect(psi1)[0],
        "psi2_star": star_defect(psi2)[0],
    })
    residuals.update({f"split_{k}": v for k, v in split.residuals.items()})
    _require(residuals, threshold, "odd-case split")
    return DecompositionResult(n, base.e, base.psi, odd_split=(psi1, psi2), residuals=residuals, kind="odd")


def decompose_full(phi: LinearMapRep, n: int, tol: float = DEFAULT_TOL, check: bool = True,
                   **verify_kwargs) -> DecompositionResult:
    """phi = sum_k w_k psi_k with psi_k(a) = e_k psi(a) e_k, e_k from the partition of phi(1)."""
    n = _check_n(n)
    if not phi.domain.is_unital:
        raise NonUnitalDomain(f"{phi.domain} has no unit; the orthogonal splitting needs one")
    if check:
        _precheck(phi, n, tol, False, **verify_kwargs)
    base = unital_decompose(phi, n, tol)
    partition = partition_of_unity(base.e, n, tol)
    parts = tuple(base.psi.sandwich(ek.matrix, ek.matrix) for ek in partition.idempotents[1:])
    roots = partition.roots.roots
    recon = sum(w * p.images for w, p in zip(roots[1:], parts))
    ortho = 0.0
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            ortho = max(ortho, orthogonality_residual(parts[i], parts[j]))
    residuals = dict(base.residuals)
    residuals.update({f"partition_{k}": v for k, v in partition.residuals.items()})
    residuals.update({
        "reconstruction": _max_diff(phi.images, recon),
        "orthogonality": ortho,
        "parts_homomorphism": max(is_n_homomorphism(p, 2, tol, mode="exhaustive").max_residual
                                  for p in parts),
    })
    _require(residuals, tol * phi.residual_scale(n), "orthogonal splitting")
    return DecompositionResult(n, base.e, base.psi, parts=parts, residuals=residuals, kind="full")


def orthogonal_split_full(phi: LinearMapRep, n: int, tol: float = DEFAULT_TOL, **kwargs) -> list:
    """The n-1 mutually orthogonal homomorphisms with phi = sum_k w_k psi_k."""
    return list(decompose_full(phi, n, tol, **kwargs).parts)


# ---------------------------------------------------------------------------
# positivity and factorization reports


@dataclass
class CertifiedResult:
    positive: bool
    star_homomorphism: bool
    agrees: bool
    involutive: bool
    unit_positive: Optional[bool]
    route_c_holds: bool
    residuals: dict = field(default_factory=dict)
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"positive": self.positive, "star_homomorphism": self.star_homomorphism,
                "agrees": self.agrees, "involutive": self.involutive,
                "unit_positive": self.unit_positive, "route_c_holds": self.route_c_holds,
                "residuals": dict(self.residuals), "witness": self.witness}


def positive_nhom_check(phi: LinearMapRep, n: int, tol: float = DEFAULT_TOL, trials: int = 100,
                        seed=0) -> CertifiedResult:
    """Compare positivity of phi with being a *-homomorphism.

    Positivity is probed on a = b*b for Ginibre b, on the diagonal matrix
    units and on the unit.
    """
    n = _check_n(n)
    if not phi.domain.is_involutive:
        raise NonDirectSumDomain("positivity needs a domain closed under the adjoint")
    rng = as_rng(seed)
    domain = phi.domain
    bs = list(random_domain_elements(domain, int(trials), rng))
    d = domain.dim
    probes = [b.conj().T @ b for b in bs]
    names = [f"b*b sample[{i}]" for i in range(len(bs))]
    for idx, label in enumerate(domain.basis_labels):
        r, c = label[2:-1].split(",")
        if r == c:
            probes.append(domain.basis[idx])
            names.append(label)
    probes.append(domain.unit())
    names.append("1")
    worst_eig, witness = np.inf, None
    positive = True
    for name, a in zip(names, probes):
        img = phi.apply_matrix(a)
        scale = max(1.0, operator_norm(img))
        herm = (img + img.conj().T) / 2
        low = float(np.linalg.eigvalsh(herm)[0]) / scale
        if low < worst_eig:
            worst_eig = low
        if not is_positive(img, tol):
            if positive:
                witness = {"probe": name, "min_eigenvalue": low}
            positive = False
    star_res, _ = star_defect(phi)
    involutive = is_star_linear(phi, tol)
    mult = is_n_homomorphism(phi, 2, tol, mode="auto")
    star_hom = involutive and mult.passed
    unit_img = phi.apply_matrix(domain.unit())
    unit_positive = bool(is_positive(unit_img, tol))
    route_c = (not (involutive and unit_positive)) or star_hom
    residuals = {"min_normalized_eigenvalue": float(worst_eig), "star_residual": star_res,
                 "two_multiplicativity": mult.max_residual}
    return CertifiedResult(positive, star_hom, (positive == star_hom) and route_c, involutive,
                           unit_positive, route_c, residuals, witness)


def coherent_factorization_check(phi: LinearMapRep, n: int, k: int, trials: int = 20,
                                 tol: float = DEFAULT_TOL, seed=0) -> VerificationReport:
    """Image products of two factorizations a = a_1...a_k = b_1...b_k agree.

    Each trial compares the padded factorization (a, 1, ..., 1) with the
    balanced polar one and with a random unitary-chain factorization.
    ``details["gap"]`` records max ||phi(a) - phi(a_1)...phi(a_k)||, which is
    generally nonzero for 1 < k < n.
    """
    n = _check_n(n)
    if not 1 <= int(k) <= n:
        raise InvalidInput(f"k must lie in 1..{n}")
    k = int(k)
    if phi.domain.kind != DIRECT_SUM:
        raise NonDirectSumDomain("factorizations are drawn in a direct-sum domain")
    rng = as_rng(seed)
    domain = phi.domain
    worst, gap, witness = 0.0, 0.0, None
    for t in range(int(trials)):
        a = _wrap(domain, random_domain_elements(domain, 1, rng)[0])
        routes = [factor(a, k, "trivial"), factor(a, k, "balanced"), _unitary_chain(a, k, rng)]
        mats = [[f.matrix if isinstance(f, AlgebraElement) else f for f in route] for route in routes]
        images = [product([phi.apply_matrix(x) for x in route]) for route in mats]
        for route, img in zip(mats[1:], images[1:]):
            scale = max(1.0, operator_norm(images[0]))
            res = float(np.linalg.norm(img - images[0], 2)) / scale
            if res > worst:
                worst, witness = res, [f"trial[{t}]"]
        gap = max(gap, float(np.linalg.norm(phi.apply_matrix(a.matrix) - images[0], 2)))
    passed = worst <= tol
    return VerificationReport(passed, worst, None if passed else witness, "randomized",
                              int(trials), tol, {"gap": gap, "k": k})


def _unitary_chain(a: AlgebraElement, k: int, rng) -> list:
    """a = u_1 u_2 ... u_{k-1} (u_{k-1}* ... u_1* a) with block unitaries u_i."""
    domain = a.algebra
    us = [scipy.linalg.block_diag(*[haar_unitary(d, rng) for d in domain.blocks]) for _ in range(k - 1)]
    last = a.matrix
    for u in us:
        last = u.conj().T @ last
    return us + [last]


# ---------------------------------------------------------------------------
# unitization


def _unitization(desc: AlgebraDescriptor):
    """Descriptor of A+ = A + C and the coordinate maps between (a, lambda) and A+."""
    if desc.kind == DIRECT_SUM:
        plus = AlgebraDescriptor.direct_sum(*desc.blocks, 1)
        d = desc.dim

        def pack(a, lam):
            out = np.zeros((d + 1, d + 1), dtype=complex)
            out[:d, :d] = a + lam * np.eye(d)
            out[d, d] = lam
            return out

        def unpack(x):
            lam = x[d, d]
            return x[:d, :d] - lam * np.eye(d), lam

        return plus, pack, unpack
    if desc.kind == NILPOTENT:
        plus = AlgebraDescriptor.unitized_nilpotent(desc.size)
        d = desc.dim

        def pack(a, lam):
            return a + lam * np.eye(d)

        def unpack(x):
            lam = x[0, 0]
            return x - lam * np.eye(d), lam

        return plus, pack, unpack
    raise InvalidInput(f"cannot unitize {desc}")


def unitize(phi: LinearMapRep) -> LinearMapRep:
    """phi+(a, lambda) = (phi(a), lambda) between the unitizations.

    For a direct sum A, A+ = A + C is realised as the direct sum with an
    extra 1x1 block via (a, lambda) -> (a + lambda*1, lambda).
    """
    dom_plus, _, dom_unpack = _unitization(phi.domain)
    cod_plus, cod_pack, _ = _unitization(phi.codomain)

    def f(x):
        a, lam = dom_unpack(x)
        return cod_pack(phi.apply_matrix(a), lam)

    return LinearMapRep.from_callable(f, dom_plus, cod_plus)
