"""Amplification, complete positivity, C*-norm identities, spectra and contractivity.

Complete positivity is decided with the Choi matrix: a map on a direct sum
of full matrix algebras is completely positive iff
sum_{(r,s) in support} E_rs (x) phi(E_rs) is positive semidefinite.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    DIRECT_SUM,
    AlgebraDescriptor,
    AlgebraElement,
    _wrap,
    as_element,
    as_rng,
    ginibre,
    haar_unitary,
    is_positive,
    operator_norm,
    spectrum,
)
from .exceptions import EvenN, InvalidInput, LambdaZero, NonDirectSumDomain
from .nhom import LinearMapRep, _check_n


def _require_direct_sum(*descs):
    for desc in descs:
        if desc.kind != DIRECT_SUM:
            raise NonDirectSumDomain(f"{desc} is not a direct sum of matrix algebras")


def amplified_descriptor(desc: AlgebraDescriptor, k: int) -> AlgebraDescriptor:
    """M_k(M_{d_1} + ... + M_{d_r}) = M_{k d_1} + ... + M_{k d_r}."""
    _require_direct_sum(desc)
    return AlgebraDescriptor.direct_sum(*[k * d for d in desc.blocks])


def amplification_permutation(desc: AlgebraDescriptor, k: int) -> np.ndarray:
    """perm[p] = naive index of packed index p.

    The naive layout of a k x k matrix over A puts entry (s, t) in the
    D x D tile (s, t). The packed layout is block-diagonal over the summands:
    summand i occupies a k*d_i square whose (s, t) tile of size d_i holds
    the i-th block of entry (s, t). Packed index k*o_i + s*d_i + r
    corresponds to naive index s*D + o_i + r.
    """
    _require_direct_sum(desc)
    big = desc.dim
    perm = []
    for off, d in zip(desc.offsets, desc.blocks):
        for s in range(k):
            for r in range(d):
                perm.append(s * big + off + r)
    return np.array(perm, dtype=int)


def pack_matrix_over(desc: AlgebraDescriptor, k: int, naive: np.ndarray) -> np.ndarray:
    perm = amplification_permutation(desc, k)
    return np.asarray(naive)[..., perm[:, None], perm[None, :]]


def unpack_matrix_over(desc: AlgebraDescriptor, k: int, packed: np.ndarray) -> np.ndarray:
    perm = amplification_permutation(desc, k)
    packed = np.asarray(packed)
    out = np.zeros(packed.shape, dtype=complex)
    out[..., perm[:, None], perm[None, :]] = packed
    return out


def amplify(phi: LinearMapRep, k: int) -> LinearMapRep:
    """The entrywise map phi_k : M_k(A) -> M_k(B)."""
    k = int(k)
    if k < 1:
        raise InvalidInput("k must be a positive integer")
    if k == 1:
        return phi
    _require_direct_sum(phi.domain, phi.codomain)
    dom_k = amplified_descriptor(phi.domain, k)
    cod_k = amplified_descriptor(phi.codomain, k)
    dd, dc = phi.domain.dim, phi.codomain.dim

    def f(packed):
        tiles = unpack_matrix_over(phi.domain, k, packed).reshape(k, dd, k, dd).transpose(0, 2, 1, 3)
        out = phi.apply_matrix(tiles).transpose(0, 2, 1, 3).reshape(k * dc, k * dc)
        return pack_matrix_over(phi.codomain, k, out)

    return LinearMapRep.from_callable(f, dom_k, cod_k)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    base: LinearMapRep
    k: int
    matrix: np.ndarray = field(repr=False)

    def min_eigenvalue(self) -> float:
        h = (self.matrix + self.matrix.conj().T) / 2
        return float(np.linalg.eigvalsh(h)[0])

    def hermitian_defect(self) -> float:
        return float(np.linalg.norm(self.matrix - self.matrix.conj().T, 2))

    def norm(self) -> float:
        return operator_norm(self.matrix)


def choi_matrix(phi: LinearMapRep) -> ChoiMatrix:
    """sum_{(r,s) in support} E_rs (x) phi(E_rs)."""
    _require_direct_sum(phi.domain)
    d, dc = phi.domain.dim, phi.codomain.dim
    out = np.zeros((d * dc, d * dc), dtype=complex)
    for label, img in zip(phi.domain.basis_labels, phi.images):
        r, s = (int(x) for x in label[2:-1].split(","))
        out[r * dc:(r + 1) * dc, s * dc:(s + 1) * dc] = img
    return ChoiMatrix(phi, d, out)


def is_completely_positive(phi: LinearMapRep, tol: float = DEFAULT_TOL) -> bool:
    return is_positive(choi_matrix(phi).matrix, tol)


def cstar_identity_check(x, k: int, tol: float = DEFAULT_TOL) -> dict:
    """Relative errors of ||x||^(2k) = ||(x*x)^k|| and ||x||^(2k+1) = ||x (x*x)^k||."""
    k = int(k)
    if k < 1:
        raise InvalidInput("k must be >= 1")
    m = x.matrix if isinstance(x, AlgebraElement) else np.asarray(x, dtype=complex)
    nx = operator_norm(m)
    power = np.linalg.matrix_power(m.conj().T @ m, k)
    even_lhs, even_rhs = nx ** (2 * k), operator_norm(power)
    odd_lhs, odd_rhs = nx ** (2 * k + 1), operator_norm(m @ power)

    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b), np.finfo(float).tiny) if (a or b) else 0.0

    even_err, odd_err = rel(even_lhs, even_rhs), rel(odd_lhs, odd_rhs)
    return {
        "k": k,
        "even": {"lhs": even_lhs, "rhs": even_rhs, "relative_error": even_err},
        "odd": {"lhs": odd_lhs, "rhs": odd_rhs, "relative_error": odd_err},
        "pass": max(even_err, odd_err) <= tol,
    }


@dataclass(eq=False)
class SolvabilityResult:
    """Outcome of solving c (lambda - (a*a)^k) = a for c."""

    solvable: bool
    c: Optional[AlgebraElement]
    residual: float
    distance: float
    lam: complex
    k: int

    def to_dict(self) -> dict:
        return {"solvable": self.solvable, "residual": self.residual, "distance": self.distance,
                "lambda": [self.lam.real, self.lam.imag], "k": self.k}


def harris_solvability(a, lam: complex, k: int, tol: float = DEFAULT_TOL) -> SolvabilityResult:
    """Decide whether c (lam - (a*a)^k) = a has a solution c.

    The system is solved with a truncated pseudo-inverse: singular values
    of lam - (a*a)^k at or below ``tol`` count as zero (for this normal
    matrix they are exactly the distances from lam to the spectrum). A
    candidate is accepted iff its residual is at most tol * max(1, ||a||).
    """
    lam = complex(lam)
    if lam == 0:
        raise LambdaZero("lambda must be nonzero")
    k = int(k)
    if k < 1:
        raise InvalidInput("k must be >= 1")
    a = as_element(a)
    m = a.matrix
    power = np.linalg.matrix_power(m.conj().T @ m, k)
    power = (power + power.conj().T) / 2
    shifted = lam * np.eye(len(m)) - power
    u, s, vh = np.linalg.svd(shifted)
    keep = s > tol
    inv = (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T
    c = m @ inv
    residual = float(np.linalg.norm(c @ shifted - m, 2))
    distance = float(np.min(np.abs(lam - np.linalg.eigvalsh(power))))
    solvable = residual <= tol * max(1.0, operator_norm(m))
    target = a.algebra if a.algebra.is_involutive else AlgebraDescriptor.full(a.dim)
    elem = _wrap(target, target.project(c)) if solvable else None
    return SolvabilityResult(solvable, elem, residual, distance, lam, k)


@dataclass
class SpectralReport:
    lhs_spectrum: np.ndarray
    rhs_spectrum: np.ndarray
    inclusion_holds: bool
    max_unmatched_distance: float
    threshold: float = 0.0

    def to_dict(self) -> dict:
        return {"lhs_spectrum": [[z.real, z.imag] for z in self.lhs_spectrum],
                "rhs_spectrum": [[z.real, z.imag] for z in self.rhs_spectrum],
                "inclusion_holds": self.inclusion_holds,
                "max_unmatched_distance": self.max_unmatched_distance,
                "threshold": self.threshold}


def spectral_inclusion_check(phi: LinearMapRep, a, n: int, tol: float = DEFAULT_TOL) -> SpectralReport:
    """sigma((phi(a)*phi(a))^k) inside sigma((a*a)^k) + {0}, for n = 2k + 1."""
    n = _check_n(n)
    if n % 2 == 0:
        raise EvenN("the spectral inclusion argument needs odd n")
    k = (n - 1) // 2
    a = as_element(a, phi.domain)
    img = phi.apply_matrix(a.matrix)
    lhs_mat = np.linalg.matrix_power(img.conj().T @ img, k)
    rhs_mat = np.linalg.matrix_power(a.matrix.conj().T @ a.matrix, k)
    lhs = spectrum(lhs_mat, tol)
    rhs = spectrum(rhs_mat, tol)
    cand = np.concatenate([rhs, [0.0]])
    dist = np.min(np.abs(lhs[:, None] - cand[None, :]), axis=1) if lhs.size else np.zeros(0)
    worst = float(np.max(dist, initial=0.0))
    threshold = tol * max(1.0, operator_norm(rhs_mat))
    return SpectralReport(lhs, rhs, worst <= threshold, worst, threshold)


CONTRACTIVITY_STYLES = ("ginibre", "hermitian", "unitary", "rank-one")


def contractivity_samples(domain: AlgebraDescriptor, trials: int, rng) -> np.ndarray:
    """Ginibre, Hermitian, unitary and rank-one elements, cycling through the styles."""
    _require_direct_sum(domain)
    out = np.zeros((trials, domain.dim, domain.dim), dtype=complex)
    for t in range(trials):
        style = CONTRACTIVITY_STYLES[t % len(CONTRACTIVITY_STYLES)]
        if style == "rank-one":
            i = int(rng.integers(len(domain.blocks)))
            off, d = domain.offsets[i], domain.blocks[i]
            u = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            out[t, off:off + d, off:off + d] = np.outer(u, v.conj())
            continue
        for off, d in zip(domain.offsets, domain.blocks):
            if style == "ginibre":
                blk = ginibre(d, rng)
            elif style == "hermitian":
                g = ginibre(d, rng)
                blk = (g + g.conj().T) / 2
            else:
                blk = haar_unitary(d, rng)
            out[t, off:off + d, off:off + d] = blk
    return out


@dataclass
class ContractivityReport:
    passed: bool
    max_ratio: float
    samples: int
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"pass": self.passed, "max_ratio": self.max_ratio, "samples": self.samples,
                "witness": self.witness}


def contractivity_check(phi: LinearMapRep, n: int, trials: int = 1000, tol: float = DEFAULT_TOL,
                        seed=0) -> ContractivityReport:
    """Sample ||phi(a)|| / ||a||; a ratio above 1 + tol falsifies ||phi|| <= 1."""
    _check_n(n)
    rng = as_rng(seed)
    samples = contractivity_samples(phi.domain, int(trials), rng)
    images = phi.apply_matrix(samples)
    num = np.linalg.norm(images, 2, axis=(1, 2))
    den = np.linalg.norm(samples, 2, axis=(1, 2))
    ratios = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    i = int(np.argmax(ratios))
    worst = float(ratios[i])
    passed = worst <= 1 + tol
    witness = None if passed else {"sample": i, "style": CONTRACTIVITY_STYLES[i % 4], "ratio": worst}
    return ContractivityReport(passed, worst, int(trials), witness)
