"""Random instances: homomorphisms, n-homomorphisms and plain linear maps.

Every *-homomorphism of a direct sum A = M_{d_1} + ... + M_{d_r} into M_N
is, up to unitary conjugation, a ↦ diag(a_1 (x) I_{m_1}, ..., a_r (x) I_{m_r}, 0).
Orthogonal families are built by giving each member its own slice of C^N.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .algebra import (
    DIRECT_SUM,
    AlgebraDescriptor,
    as_rng,
    ginibre,
    haar_unitary,
    well_conditioned,
)
from .exceptions import InvalidInput
from .nhom import LinearMapRep, from_orthogonal_homs
from .npotent import roots_sigma


def _require_direct_sum(domain: AlgebraDescriptor):
    if domain.kind != DIRECT_SUM:
        raise InvalidInput("homomorphism generators need a direct-sum domain")


def allocate_multiplicities(domain: AlgebraDescriptor, parts: int, size: int, rng,
                            stop: float = 0.25, nonzero=()) -> list:
    """Random multiplicity table m[k][i] with sum_{k,i} m[k][i] * d_i <= size.

    Parts listed in ``nonzero`` receive at least one copy of some block when
    room allows.
    """
    blocks = domain.blocks
    table = [[0] * len(blocks) for _ in range(parts)]
    room = size
    smallest = min(blocks)
    for k in nonzero:
        if room < smallest:
            break
        fits = [i for i, d in enumerate(blocks) if d <= room]
        i = int(rng.choice(fits))
        table[k][i] += 1
        room -= blocks[i]
    first = not nonzero
    while room >= smallest:
        if not first and rng.random() < stop:
            break
        first = False
        fits = [i for i, d in enumerate(blocks) if d <= room]
        k = int(rng.integers(parts))
        i = int(rng.choice(fits))
        table[k][i] += 1
        room -= blocks[i]
    return table


def _block_rep(domain: AlgebraDescriptor, multiplicities) -> list:
    """Per-basis-element images of a -> (+)_i a_i (x) I_{m_i}, unpadded."""
    offs = domain.offsets
    size = sum(m * d for m, d in zip(multiplicities, domain.blocks))
    out = []
    for b in domain.basis:
        pieces = []
        for off, d, m in zip(offs, domain.blocks, multiplicities):
            if m:
                pieces.append(np.kron(b[off:off + d, off:off + d], np.eye(m)))
        out.append(scipy.linalg.block_diag(*pieces) if pieces else np.zeros((0, 0)))
    return out, size


def orthogonal_homomorphisms(domain: AlgebraDescriptor, table, size: int, rng,
                             star: bool = True) -> list:
    """Mutually orthogonal homomorphisms domain -> M_size from a multiplicity table.

    With ``star`` the frame is a Haar unitary (giving *-homomorphisms);
    otherwise a random well-conditioned similarity (plain homomorphisms).
    """
    _require_direct_sum(domain)
    codomain = AlgebraDescriptor.full(size)
    frame = haar_unitary(size, rng) if star else well_conditioned(size, rng)
    inverse = frame.conj().T if star else np.linalg.inv(frame)
    maps, start = [], 0
    for row in table:
        images, width = _block_rep(domain, row)
        if start + width > size:
            raise InvalidInput("multiplicities exceed the codomain size")
        full = np.zeros((domain.basis_size, size, size), dtype=complex)
        for j, img in enumerate(images):
            full[j, start:start + width, start:start + width] = img
        full = frame @ full @ inverse
        maps.append(LinearMapRep.from_basis_images(domain, codomain, full))
        start += width
    return maps


def random_star_homomorphism(domain: AlgebraDescriptor, size: int, seed=None) -> LinearMapRep:
    rng = as_rng(seed)
    table = allocate_multiplicities(domain, 1, size, rng, nonzero=(0,))
    return orthogonal_homomorphisms(domain, table, size, rng)[0]


def unital_star_representation(domain: AlgebraDescriptor, seed=None) -> LinearMapRep:
    """A unital injective *-representation on C^dim (identity up to a unitary)."""
    rng = as_rng(seed)
    return orthogonal_homomorphisms(domain, [[1] * len(domain.blocks)], domain.dim, rng)[0]


def random_nhom_parts(domain: AlgebraDescriptor, size: int, n: int, seed=None,
                      involutive: bool = True, nonzero: str = "auto"):
    """Orthogonal parts psi_1..psi_{n-1} of a random n-homomorphism.

    For involutive maps only the real roots may carry a nonzero part
    (w = 1, and w = -1 when n is odd) and the parts are *-homomorphisms.
    ``nonzero="auto"`` forces those real-root parts to be nonzero when room
    allows.
    """
    _require_direct_sum(domain)
    rng = as_rng(seed)
    roots = roots_sigma(n).roots
    if involutive:
        allowed = [k for k in range(1, n) if roots[k].imag == 0]
    else:
        allowed = list(range(1, n))
    forced = tuple(range(len(allowed))) if nonzero == "auto" else ()
    table_allowed = allocate_multiplicities(domain, len(allowed), size, rng, nonzero=forced)
    table = [[0] * len(domain.blocks) for _ in range(n - 1)]
    for slot, k in enumerate(allowed):
        table[k - 1] = table_allowed[slot]
    return orthogonal_homomorphisms(domain, table, size, rng, star=involutive), table


def random_nhom(domain: AlgebraDescriptor, size: int, n: int, seed=None,
                involutive: bool = True) -> LinearMapRep:
    parts, _ = random_nhom_parts(domain, size, n, seed, involutive)
    return from_orthogonal_homs(parts, n)


def random_linear_map(domain: AlgebraDescriptor, codomain: AlgebraDescriptor, seed=None) -> LinearMapRep:
    """Ginibre matrix between the two algebras (canonicalised to their supports)."""
    rng = as_rng(seed)
    dd, dc = domain.dim, codomain.dim
    images = codomain.project(np.stack([ginibre(dc, rng) for _ in range(domain.basis_size)]))
    return LinearMapRep.from_basis_images(domain, codomain, images)
