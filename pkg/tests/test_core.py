import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nhom_lab.algebra import (
    AlgebraDescriptor,
    AlgebraElement,
    adjoint,
    factor,
    is_positive,
    match_multisets,
    operator_norm,
    product,
    random_element,
)
from nhom_lab.algebra import spectrum
from nhom_lab.exceptions import (
    InvalidInput,
    InvalidN,
    NonUnitalAlgebra,
    ShapeMismatch,
    SupportViolation,
    UnsupportedStyle,
)
from nhom_lab.io import element_from_dict, element_to_dict, matrix_from_dict, matrix_to_dict

M2 = AlgebraDescriptor.full(2)
M3 = AlgebraDescriptor.full(3)
M4 = AlgebraDescriptor.full(4)

seeds = st.integers(0, 2**32 - 1)
blocks = st.lists(st.integers(1, 3), min_size=1, max_size=3)


def test_descriptor_basics():
    a = AlgebraDescriptor.direct_sum(2, 1)
    assert a.dim == 3 and a.is_unital and a.is_involutive
    assert a.basis_size == 5
    assert np.array_equal(a.unit(), np.eye(3))
    n = AlgebraDescriptor.nilpotent(3)
    assert not n.is_unital and not n.is_involutive
    assert n.basis_size == 3
    assert AlgebraDescriptor.from_dict(a.to_dict()) == a
    assert AlgebraDescriptor.from_dict({"kind": "nilpotent", "size": 4}) == AlgebraDescriptor.nilpotent(4)


def test_descriptor_rejects_bad_input():
    with pytest.raises(InvalidInput):
        AlgebraDescriptor.direct_sum(0)
    with pytest.raises(InvalidInput):
        AlgebraDescriptor.from_dict({"kind": "banach"})


def test_element_validation():
    with pytest.raises(ShapeMismatch):
        AlgebraElement(M2, np.eye(3))
    with pytest.raises(InvalidInput):
        AlgebraElement(M2, np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(SupportViolation):
        AlgebraElement(AlgebraDescriptor.direct_sum(1, 1), np.ones((2, 2)))
    with pytest.raises(SupportViolation):
        AlgebraElement(AlgebraDescriptor.nilpotent(2), np.eye(2))
    e = AlgebraElement(M2, np.eye(2))
    with pytest.raises(ValueError):
        e.matrix[0, 0] = 5


def test_adjoint_examples():
    i3 = AlgebraElement(M3, np.eye(3))
    assert np.array_equal(adjoint(i3).matrix, np.eye(3))
    x = AlgebraElement(M2, np.array([[0, 1], [0, 0]]))
    assert np.array_equal(adjoint(x).matrix, np.array([[0, 0], [1, 0]]))


def test_adjoint_of_ginibre_is_exact():
    g = random_element(M4, "ginibre", 11)
    gs = adjoint(g)
    assert np.array_equal(gs.matrix, g.matrix.conj().T)
    assert np.array_equal(adjoint(gs).matrix, g.matrix)


def test_adjoint_leaves_nilpotent_algebra():
    x = random_element(AlgebraDescriptor.nilpotent(3), "ginibre", 0)
    xs = adjoint(x)
    assert np.array_equal(xs.matrix, x.matrix.conj().T)
    assert xs.algebra == AlgebraDescriptor.full(3)


def test_operator_norm_examples():
    assert operator_norm(np.zeros((3, 3))) == 0.0
    assert operator_norm(AlgebraElement(M2, np.diag([3, -4j]))) == pytest.approx(4.0, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_cstar_identity_for_norm(seed):
    a = random_element(AlgebraDescriptor.full(5), "ginibre", seed)
    lhs = operator_norm(a.H @ a)
    assert abs(lhs - operator_norm(a) ** 2) <= 1e-12 * lhs


def test_spectrum_examples():
    s = spectrum(AlgebraElement(M3, np.diag([1.0, -1.0, 0.0])))
    assert match_multisets(s, [1, -1, 0]) <= 1e-15
    nil = spectrum(AlgebraElement(AlgebraDescriptor.nilpotent(2), np.array([[0, 1], [0, 0]])))
    assert np.array_equal(nil, np.zeros(2))


def test_hermitian_spectrum_matches_characteristic_polynomial():
    h = random_element(AlgebraDescriptor.full(6), "hermitian", 5)
    s = spectrum(h)
    assert np.all(s.imag == 0)
    # independent oracle: roots of the characteristic polynomial
    roots = np.roots(np.poly(h.matrix))
    assert match_multisets(s, roots) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(blocks, seeds)
def test_spectrum_of_adjoint_is_conjugate(bl, seed):
    a = random_element(AlgebraDescriptor.direct_sum(*bl), "ginibre", seed)
    assert match_multisets(spectrum(a.H), np.conj(spectrum(a))) <= 1e-8


def test_match_multisets():
    assert match_multisets([1, 2], [2, 1]) == 0.0
    assert match_multisets([0, 0], [0, 1]) == pytest.approx(1.0)
    assert match_multisets([], []) == 0.0


def test_is_positive_examples():
    b = random_element(M4, "ginibre", 2)
    assert is_positive(b.H @ b)
    assert not is_positive(np.diag([1.0, -1.0]))
    assert is_positive(np.diag([-1e-14, 1.0]), 1e-9)
    assert not is_positive(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_factor_trivial():
    a = random_element(M3, "ginibre", 3)
    f = factor(a, 3)
    assert np.array_equal(f[0].matrix, a.matrix)
    assert all(np.array_equal(x.matrix, np.eye(3)) for x in f[1:])
    i = AlgebraElement(M2, np.eye(2))
    assert all(np.array_equal(x.matrix, np.eye(2)) for x in factor(i, 4))


def test_factor_balanced_multiplies_back():
    a = random_element(M3, "ginibre", 8)
    b, c = factor(a, 2, "balanced")
    assert np.linalg.norm(b.matrix @ c.matrix - a.matrix, 2) <= 1e-9 * operator_norm(a)
    assert not np.allclose(c.matrix, np.eye(3))


@settings(max_examples=40, deadline=None)
@given(blocks, st.integers(1, 5), seeds)
def test_factor_property(bl, k, seed):
    a = random_element(AlgebraDescriptor.direct_sum(*bl), "ginibre", seed)
    for mode in ("trivial", "balanced"):
        f = factor(a, k, mode)
        assert len(f) == k
        err = np.linalg.norm(product(f) - a.matrix, 2)
        assert err <= 1e-9 * max(1.0, operator_norm(a))


def test_factor_nonunital_raises():
    x = random_element(AlgebraDescriptor.nilpotent(3), "ginibre", 0)
    with pytest.raises(NonUnitalAlgebra):
        factor(x, 2)


def test_random_element_styles():
    e = random_element(M3, "selfadjoint-npotent(3)", 4)
    m = e.matrix
    assert np.linalg.norm(m @ m @ m - m, 2) <= 1e-10
    assert np.array_equal(m, m.conj().T) or np.linalg.norm(m - m.conj().T) <= 1e-15
    u = random_element(M2, "unitary", 4).matrix
    assert np.linalg.norm(u.conj().T @ u - np.eye(2), 2) <= 1e-12
    assert is_positive(random_element(M2, "positive", 4))


def test_random_element_is_deterministic():
    a = random_element(AlgebraDescriptor.direct_sum(2, 1), "npotent(5)", 99)
    b = random_element(AlgebraDescriptor.direct_sum(2, 1), "npotent", 99, n=5)
    assert np.array_equal(a.matrix, b.matrix)


def test_random_element_errors():
    nil = AlgebraDescriptor.nilpotent(3)
    with pytest.raises(UnsupportedStyle):
        random_element(nil, "hermitian", 0)
    with pytest.raises(UnsupportedStyle):
        random_element(M2, "sparkly", 0)
    with pytest.raises(InvalidN):
        random_element(M2, "npotent(1)", 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), seeds)
def test_nilpotent_products_vanish_exactly(m, seed):
    nil = AlgebraDescriptor.nilpotent(m)
    rng = np.random.default_rng(seed)
    xs = [random_element(nil, "ginibre", rng) for _ in range(m)]
    assert np.count_nonzero(product(xs)) == 0


def test_matrix_json_round_trip():
    m = random_element(M3, "ginibre", 1).matrix
    d = matrix_to_dict(m)
    assert d["dim"] == 3 and len(d["entries"]) == 9
    assert d["entries"][1] == [m[0, 1].real, m[0, 1].imag]
    assert np.array_equal(matrix_from_dict(d), m)
    e = random_element(AlgebraDescriptor.direct_sum(2, 1), "ginibre", 1)
    assert element_from_dict(element_to_dict(e)) == e
    with pytest.raises(InvalidInput):
        matrix_from_dict({"dim": 2, "entries": [[0, 0]]})
