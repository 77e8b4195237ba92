import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nhom_lab import generators as gen
from nhom_lab.algebra import AlgebraDescriptor, AlgebraElement, haar_unitary, random_element
from nhom_lab.exceptions import (
    BudgetExceeded,
    NonUnitalDomain,
    NotHomomorphism,
    NotInvolutive,
    NotNHomomorphism,
    NotOrthogonal,
    ShapeMismatch,
    SupportViolation,
)
from nhom_lab.nhom import (
    LinearMapRep,
    apply,
    coherent_factorization_check,
    decompose_full,
    from_orthogonal_homs,
    is_n_homomorphism,
    is_star_linear,
    orthogonal_split_full,
    positive_nhom_check,
    split_involutive,
    unital_decompose,
    unitize,
    vec,
    unvec,
)

M2 = AlgebraDescriptor.full(2)
A21 = AlgebraDescriptor.direct_sum(2, 1)
seeds = st.integers(0, 2**32 - 1)
domains = st.sampled_from([(1,), (2,), (1, 1), (2, 1), (1, 1, 1)])


def representation(domain, seed=0):
    return gen.unital_star_representation(domain, seed)


def block_embeddings(domain, size, count, seed=0):
    """Orthogonal block embeddings a -> U (0 + a + 0 ...) U* into M_size."""
    table = [[1] * len(domain.blocks) for _ in range(count)]
    return gen.orthogonal_homomorphisms(domain, table, size, np.random.default_rng(seed))


def test_vec_is_column_stacking():
    m = np.arange(4).reshape(2, 2)
    assert np.array_equal(vec(m), [0, 2, 1, 3])
    assert np.array_equal(unvec(vec(m), 2), m)


def test_apply_examples():
    a = random_element(A21, "ginibre", 0)
    assert apply(LinearMapRep.identity(A21), a) == a
    assert np.count_nonzero(apply(LinearMapRep.zero(A21), a).matrix) == 0
    u = haar_unitary(3, np.random.default_rng(1))
    phi = LinearMapRep.conjugation(u, A21)
    assert np.max(np.abs(apply(phi, a).matrix - u @ a.matrix @ u.conj().T)) <= 1e-12


def test_apply_rejects_wrong_algebra():
    with pytest.raises(ShapeMismatch):
        apply(LinearMapRep.identity(A21), random_element(M2, "ginibre", 0))


@settings(max_examples=30, deadline=None)
@given(domains, seeds)
def test_apply_is_linear(bl, seed):
    domain = AlgebraDescriptor.direct_sum(*bl)
    rng = np.random.default_rng(seed)
    phi = gen.random_linear_map(domain, AlgebraDescriptor.full(3), rng)
    a, b = (random_element(domain, "ginibre", rng).matrix for _ in range(2))
    z = complex(*rng.standard_normal(2))
    lhs = phi.apply_matrix(a + z * b)
    assert np.allclose(lhs, phi.apply_matrix(a) + z * phi.apply_matrix(b), atol=1e-12)


def test_map_support_is_enforced():
    bad = np.zeros((4, 4), dtype=complex)
    bad[vec(np.array([[0, 1], [0, 0]])).argmax(), 0] = 1.0
    with pytest.raises(SupportViolation):
        LinearMapRep(M2, AlgebraDescriptor.direct_sum(1, 1), bad)
    with pytest.raises(ShapeMismatch):
        LinearMapRep(M2, M2, np.zeros((4, 3)))


def test_star_linear_examples():
    u = haar_unitary(2, np.random.default_rng(2))
    assert is_star_linear(LinearMapRep.conjugation(u, M2))
    nmat = np.array([[1.0, 2.0], [0.0, 1.0]])
    assert not is_star_linear(LinearMapRep.left_multiplication(nmat, M2))
    assert is_star_linear(LinearMapRep.transpose(M2))


def test_star_linear_false_off_involutive_domain():
    nil = AlgebraDescriptor.nilpotent(3)
    assert not is_star_linear(LinearMapRep.zero(nil))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_star_homomorphism_is_n_hom(n):
    psi = gen.random_star_homomorphism(A21, 5, 3)
    assert is_n_homomorphism(psi, n).passed


def test_negated_representation():
    psi = representation(A21, 4)
    phi = -psi
    assert is_n_homomorphism(phi, 3, mode="exhaustive").passed
    rep = is_n_homomorphism(phi, 2, mode="exhaustive")
    assert not rep.passed and len(rep.witness) == 2
    assert is_star_linear(phi)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_nilpotent_maps_are_m_homs_exactly(m):
    nil = AlgebraDescriptor.nilpotent(m)
    phi = gen.random_linear_map(nil, AlgebraDescriptor.nilpotent(m), m)
    rep = is_n_homomorphism(phi, m, mode="exhaustive")
    assert rep.passed and rep.max_residual == 0.0


def test_non_multiplicative_map_has_witness():
    phi = gen.random_linear_map(M2, M2, 0)
    rep = is_n_homomorphism(phi, 3)
    assert not rep.passed
    assert len(rep.witness) == 3
    d = rep.to_dict()
    assert d["pass"] is False and d["witness"] == rep.witness


def test_budget():
    phi = LinearMapRep.identity(AlgebraDescriptor.full(3))
    with pytest.raises(BudgetExceeded):
        is_n_homomorphism(phi, 8, mode="exhaustive", budget=1000)
    rep = is_n_homomorphism(phi, 8, mode="auto", budget=1000, trials=20)
    assert rep.mode == "randomized" and rep.passed


@settings(max_examples=25, deadline=None)
@given(domains, st.integers(2, 5), st.booleans(), seeds)
def test_exhaustive_and_randomized_agree(bl, n, good, seed):
    domain = AlgebraDescriptor.direct_sum(*bl)
    rng = np.random.default_rng(seed)
    if good:
        phi = gen.random_nhom(domain, 4, n, rng, involutive=bool(seed % 2))
    else:
        phi = gen.random_linear_map(domain, AlgebraDescriptor.full(3), rng)
    ex = is_n_homomorphism(phi, n, mode="exhaustive")
    rnd = is_n_homomorphism(phi, n, mode="randomized", trials=50, seed=seed)
    assert ex.passed == rnd.passed


def test_from_orthogonal_homs_examples():
    psi = representation(A21, 5)
    zero = LinearMapRep.zero(A21, psi.codomain)
    assert from_orthogonal_homs([psi, zero], 3).allclose(psi)
    assert from_orthogonal_homs([zero, psi], 3).allclose(-psi)
    parts = block_embeddings(M2, 4, 2, seed=6) + [LinearMapRep.zero(M2, AlgebraDescriptor.full(4))] * 2
    phi = from_orthogonal_homs(parts, 5)
    assert is_n_homomorphism(phi, 5, 1e-10).passed


def test_from_orthogonal_homs_errors():
    psi = representation(M2, 0)
    with pytest.raises(NotOrthogonal) as info:
        from_orthogonal_homs([psi, psi], 3)
    assert info.value.indices == (1, 2)
    bad = gen.random_linear_map(M2, M2, 1)
    with pytest.raises(NotHomomorphism) as info:
        from_orthogonal_homs([LinearMapRep.zero(M2), bad], 3)
    assert info.value.index == 2


def test_unital_decompose_examples():
    psi = gen.random_star_homomorphism(A21, 5, 7)
    res = unital_decompose(psi, 2)
    e = res.e.matrix
    assert np.linalg.norm(e @ e - e, 2) <= 1e-12
    assert res.psi.allclose(psi)
    # phi = -psi, n = 3: e = -psi(1) and e^2 phi = psi
    base = representation(A21, 8)
    res = unital_decompose(-base, 3)
    assert np.allclose(res.e.matrix, -np.eye(3), atol=1e-12)
    assert res.psi.allclose(base)


def test_unital_decompose_partition_ranks():
    parts, table = gen.random_nhom_parts(A21, 6, 4, 9, involutive=False)
    phi = from_orthogonal_homs(parts, 4)
    res = unital_decompose(phi, 4)
    e = res.e.matrix
    assert np.linalg.norm(np.linalg.matrix_power(e, 4) - e, 2) <= 1e-9
    from nhom_lab.npotent import partition_of_unity

    ranks = partition_of_unity(res.e, 4, 1e-8).ranks()
    expected = [sum(m * d for m, d in zip(row, A21.blocks)) for row in table]
    assert ranks[1:] == expected


def test_unital_decompose_nonunital():
    nil = AlgebraDescriptor.nilpotent(3)
    with pytest.raises(NonUnitalDomain):
        unital_decompose(LinearMapRep.zero(nil), 3)


def test_split_even_compression():
    # phi(a) = p rho(a) with rho(a) = a (x) I_2 and p = I (x) diag(1, 0) commuting with rho
    p = np.kron(np.eye(2), np.diag([1.0, 0.0]))
    phi = LinearMapRep.from_callable(lambda a: p @ np.kron(a, np.eye(2)), M2, AlgebraDescriptor.full(4))
    res = split_involutive(phi, 4)
    assert res.kind == "even"
    assert res.residuals["two_multiplicativity"] <= 1e-12
    assert np.allclose(res.e.matrix, p)


def test_split_negated_representation():
    psi = representation(A21, 10)
    res = split_involutive(-psi, 3)
    psi1, psi2 = res.odd_split
    assert psi1.allclose(LinearMapRep.zero(A21, psi.codomain))
    assert psi2.allclose(psi)


def test_split_recovers_parts():
    psi1, psi2 = block_embeddings(A21, 6, 2, seed=11)
    res = split_involutive(psi1 - psi2, 3)
    assert res.odd_split[0].allclose(psi1) and res.odd_split[1].allclose(psi2)


def test_split_errors():
    nmat = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NotInvolutive):
        split_involutive(LinearMapRep.left_multiplication(nmat, M2), 3)
    with pytest.raises(NotNHomomorphism):
        split_involutive(LinearMapRep.transpose(M2), 3)


def test_zero_map_decomposes_to_zero():
    zero = LinearMapRep.zero(A21, AlgebraDescriptor.full(4))
    for n in (2, 3, 4):
        res = decompose_full(zero, n)
        assert np.count_nonzero(res.e.matrix) == 0
        assert all(np.count_nonzero(p.matrix) == 0 for p in res.parts)
    assert split_involutive(zero, 3).kind == "odd"


def test_orthogonal_split_full_examples():
    psi = representation(A21, 12)
    assert orthogonal_split_full(psi, 2)[0].allclose(psi)
    parts = orthogonal_split_full(-psi, 3)
    assert parts[0].allclose(LinearMapRep.zero(A21, psi.codomain)) and parts[1].allclose(psi)


def test_orthogonal_split_random_five_hom():
    rng = np.random.default_rng(13)
    parts, _ = gen.random_nhom_parts(A21, 6, 5, rng, involutive=False)
    phi = from_orthogonal_homs(parts, 5)
    found = orthogonal_split_full(phi, 5)
    assert len(found) == 4
    samples = [random_element(A21, "ginibre", rng).matrix for _ in range(200)]
    for i in range(4):
        for j in range(4):
            if i != j:
                for a, b in zip(samples[:100], samples[100:]):
                    assert np.linalg.norm(found[i].apply_matrix(a) @ found[j].apply_matrix(b), 2) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(domains, st.integers(2, 6), st.booleans(), seeds)
def test_round_trip(bl, n, involutive, seed):
    domain = AlgebraDescriptor.direct_sum(*bl)
    parts, _ = gen.random_nhom_parts(domain, 5, n, seed, involutive=involutive)
    phi = from_orthogonal_homs(parts, n)
    res = decompose_full(phi, n)
    for p, q in zip(res.parts, parts):
        assert np.max(np.abs(p.images - q.images)) <= 1e-8
    e = res.e.matrix
    assert np.max(np.abs(e @ phi.images - phi.images @ e)) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(domains, st.integers(2, 7), seeds)
def test_involutive_split_properties(bl, n, seed):
    domain = AlgebraDescriptor.direct_sum(*bl)
    phi = gen.random_nhom(domain, 5, n, seed, involutive=True)
    res = split_involutive(phi, n)
    if n % 2 == 0:
        assert res.residuals["two_multiplicativity"] <= 1e-8
    else:
        psi1, psi2 = res.odd_split
        assert np.max(np.abs(psi1.images[:, None] @ psi2.images[None])) <= 1e-9


def test_positive_nhom_examples():
    psi = gen.random_star_homomorphism(A21, 5, 14)
    r = positive_nhom_check(psi, 3)
    assert r.positive and r.star_homomorphism and r.agrees
    r = positive_nhom_check(-representation(A21, 15), 3)
    assert not r.positive and not r.star_homomorphism and r.agrees
    assert r.witness is not None
    psi1, psi2 = block_embeddings(M2, 4, 2, seed=16)
    r = positive_nhom_check(psi1 - psi2, 3)
    assert not r.positive and r.agrees and r.unit_positive is False


def test_coherent_factorization_examples():
    phi = gen.random_nhom(A21, 6, 3, 17, involutive=True)
    assert coherent_factorization_check(phi, 3, 1, trials=3).max_residual == 0.0
    rep = coherent_factorization_check(phi, 3, 3, trials=5)
    assert rep.passed and rep.details["gap"] <= 1e-9
    psi1, psi2 = block_embeddings(M2, 4, 2, seed=18)
    rep = coherent_factorization_check(psi1 - psi2, 3, 2, trials=10, tol=1e-9)
    assert rep.passed
    # phi(a) differs from phi(a_1) phi(a_2) for the padded factorization
    assert rep.details["gap"] > 1e-3


def test_unitization_examples():
    psi = gen.random_star_homomorphism(A21, 4, 19)
    assert is_n_homomorphism(unitize(psi), 2).passed
    plus = unitize(-representation(A21, 20))
    assert plus.domain == AlgebraDescriptor.direct_sum(2, 1, 1)
    rep = is_n_homomorphism(plus, 3, mode="exhaustive")
    assert not rep.passed and rep.witness is not None


@pytest.mark.parametrize("blocks", [(1,), (2,), (2, 1)])
def test_unitization_of_zero_map_is_homomorphism(blocks):
    # (a, l) -> (0, l) is multiplicative for every A
    domain = AlgebraDescriptor.direct_sum(*blocks)
    plus = unitize(LinearMapRep.zero(domain))
    assert is_n_homomorphism(plus, 2, mode="exhaustive").passed


def test_unitization_of_nilpotent_algebra():
    nil = AlgebraDescriptor.nilpotent(3)
    plus = unitize(LinearMapRep.zero(nil))
    assert plus.domain == AlgebraDescriptor.unitized_nilpotent(3)
    x = AlgebraElement(plus.domain, 2 * np.eye(3) + np.triu(np.ones((3, 3)), 1))
    assert np.allclose(plus.apply_matrix(x.matrix), 2 * np.eye(3))
