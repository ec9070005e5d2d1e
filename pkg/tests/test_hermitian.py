import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from chyp.group import build_group, gram, polar_vectors, symmetry_J
from chyp.hermitian import (
    HermForm,
    HVec,
    Signature,
    cross2,
    cross3,
    herm_inner,
    hvec,
    projective_equal,
    restricted_cross,
    restricted_form,
    signature,
)

from conftest import ROOT3, random_isometry

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cvec3 = arrays(np.complex128, 3, elements=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
cvec4 = arrays(np.complex128, 4, elements=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
thetas = st.floats(5 * np.pi / 6, np.pi)


def test_form_rejects_non_hermitian():
    with pytest.raises(ValueError):
        HermForm(np.array([[1, 1], [0, 1]]))


def test_hvec_dimension_checked():
    with pytest.raises(ValueError):
        HVec([1, 2, 3], HermForm.standard(4))


def test_inner_of_time_vector():
    e = hvec([0, 0, 0, 1])
    assert herm_inner(e, e) == -1


def test_inner_argument_order():
    x, y = hvec([1j, 0, 0, 0]), hvec([1, 0, 0, 0])
    # <x, y> = y^* H x is linear in x
    assert herm_inner(x, y) == 1j


def test_inner_dimension_mismatch():
    with pytest.raises(ValueError):
        herm_inner(hvec([1, 0, 0]), hvec([1, 0, 0, 0]))


@pytest.mark.parametrize("theta", [5 * np.pi / 6, 0.9 * np.pi, np.pi])
def test_polar_vector_inner_products(theta):
    n = polar_vectors(theta)
    assert abs(herm_inner(n[0], n[0]) - 1) < 1e-12
    assert abs(herm_inner(n[0], n[2])) < 1e-12


@given(cvec4, cvec4)
def test_conjugate_symmetry(x, y):
    a, b = hvec(x), hvec(y)
    assert abs(herm_inner(a, b) - np.conj(herm_inner(b, a))) < 1e-9


def test_signature_examples():
    assert signature(HermForm.standard(4)) == Signature(3, 1, 0)
    assert signature(gram(5 * np.pi / 6)) == Signature(2, 1, 1)
    # just below the interval the Gram matrix has split signature
    assert signature(gram(0.8 * np.pi)) == Signature(2, 2, 0)
    assert signature(gram(0.9 * np.pi)) == Signature(3, 1, 0)


def test_signature_sylvester(rng):
    H = np.diag([1.0, 1, 1, -1])
    for _ in range(50):
        P = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        assert signature(P.conj().T @ H @ P) == Signature(3, 1, 0)


def test_degenerate_flag():
    assert HermForm(gram(5 * np.pi / 6)).degenerate
    assert not HermForm.standard(3).degenerate


def test_cross2_basis():
    w = cross2(hvec([1, 0, 0]), hvec([0, 1, 0]))
    assert projective_equal(w.coords, [0, 0, 1])


def test_cross2_wrong_dimension():
    with pytest.raises(ValueError):
        cross2(hvec([1, 0, 0, 0]), hvec([0, 1, 0, 0]))


def test_cross2_group_points():
    from chyp.group import reduce_to_pu21

    g = reduce_to_pu21(build_group(5 * np.pi / 6))
    p, q = g.p0, g.lift("12")
    w = cross2(p, q)
    assert abs(herm_inner(w, p)) < 1e-10 and abs(herm_inner(w, q)) < 1e-10


@given(cvec3, cvec3)
def test_cross2_orthogonal(x, y):
    p, q = hvec(x), hvec(y)
    w = cross2(p, q)
    scale = max(1.0, np.linalg.norm(x) * np.linalg.norm(y))
    assert abs(herm_inner(w, p)) <= 1e-10 * scale * max(1.0, np.linalg.norm(x))
    assert abs(herm_inner(w, q)) <= 1e-10 * scale * max(1.0, np.linalg.norm(y))


def test_cross2_antisymmetric_projectively(rng):
    for _ in range(100):
        x = rng.normal(size=3) + 1j * rng.normal(size=3)
        y = rng.normal(size=3) + 1j * rng.normal(size=3)
        a, b = cross2(hvec(x), hvec(y)), cross2(hvec(y), hvec(x))
        assert projective_equal(a.coords, b.coords)


def test_cross3_basis():
    e = np.eye(4)
    w = cross3(hvec(e[0]), hvec(e[1]), hvec(e[2]))
    assert projective_equal(w.coords, [0, 0, 0, 1])


def test_cross3_group_points():
    g = build_group(0.95 * np.pi)
    a, b, c = g.lift("12"), g.lift("13"), g.lift("14")
    w = cross3(a, b, c)
    for v in (a, b, c):
        assert abs(herm_inner(w, v)) < 1e-10


def test_cross3_dependent_is_zero():
    a = hvec([1, 2j, 0, 1])
    b = hvec([0, 1, 1, 0])
    w = cross3(a, b, hvec(a.coords + 2 * b.coords))
    assert np.linalg.norm(w.coords) < 1e-10


def test_cross3_wrong_dimension():
    with pytest.raises(ValueError):
        cross3(hvec([1, 0, 0]), hvec([0, 1, 0]), hvec([0, 0, 1]))


@given(cvec4, cvec4, cvec4)
def test_cross3_orthogonal(x, y, z):
    a, b, c = hvec(x), hvec(y), hvec(z)
    w = cross3(a, b, c)
    scale = max(1.0, np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z)) * 4
    for v in (a, b, c):
        assert abs(herm_inner(w, v)) <= 1e-10 * scale * max(1.0, np.linalg.norm(v.coords))


def _c(theta):
    return np.cos(theta)


@given(thetas)
def test_restricted_form_det_p32(theta):
    g = build_group(theta)
    F = restricted_form(g.p0, g.lift("12"), g.lift("32"))
    c = _c(theta)
    expected = -(4 * c - 3) * (-1 + 2 * c) * (4 * c * c - 2 * c - 3) * (1 + 2 * c) ** 2
    assert abs(np.linalg.det(F.matrix) - expected) < 1e-9 * max(1.0, abs(expected))


@given(thetas)
def test_restricted_form_det_p34(theta):
    g = build_group(theta)
    F = restricted_form(g.p0, g.lift("12"), g.lift("34"))
    c = _c(theta)
    expected = 128 * c ** 5 - 96 * c ** 3 - 16 * c * c + 16 * c + 4
    assert abs(np.linalg.det(F.matrix) - expected) < 1e-9 * max(1.0, abs(expected))


def test_restricted_form_orthonormal_triple():
    e = np.eye(4)
    F = restricted_form(hvec(e[3]), hvec(e[0]), hvec(e[1]))
    assert np.allclose(F.matrix, np.diag([-1, 1, 1]))


def test_restricted_form_rejects_dependent():
    a, b = hvec([1, 0, 0, 1]), hvec([0, 1, 0, 0])
    with pytest.raises(ValueError):
        restricted_form(a, b, hvec(a.coords - b.coords))


def test_restricted_form_isometry_invariant(rng):
    g = build_group(0.93 * np.pi)
    es = (g.p0, g.lift("12"), g.lift("24"))
    F = restricted_form(*es).matrix
    for _ in range(10):
        M = random_isometry(rng)
        G = restricted_form(*(e.apply(M) for e in es)).matrix
        assert np.abs(F - G).max() < 1e-10 * max(1.0, np.abs(F).max())


def test_restricted_cross_diagonal_reduces_to_cross2(rng):
    F = np.diag([1.0, 1, -1])
    for _ in range(10):
        x = rng.normal(size=3) + 1j * rng.normal(size=3)
        y = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert projective_equal(restricted_cross(x, y, F), cross2(hvec(x), hvec(y)).coords)


def test_restricted_cross_displayed_component():
    for theta in (0.87 * np.pi, 0.95 * np.pi, np.pi):
        g = build_group(theta)
        F = restricted_form(g.p0, g.lift("12"), g.lift("32"))
        w = restricted_cross([1, 0, 0], [0, 1, 0], F)
        c = _c(theta)
        assert abs(w[2] - 4 * c * (c - 1) * (1 + 2 * c)) < 1e-9


def test_restricted_cross_orthogonal(rng):
    for _ in range(100):
        theta = rng.uniform(5 * np.pi / 6, np.pi)
        g = build_group(theta)
        F = restricted_form(g.p0, g.lift("12"), g.lift(rng.choice(["32", "34", "23", "43", "24"]))).matrix
        x = rng.normal(size=3) + 1j * rng.normal(size=3)
        y = rng.normal(size=3) + 1j * rng.normal(size=3)
        w = restricted_cross(x, y, F)
        s = np.linalg.norm(w) * np.abs(F).max() * max(np.linalg.norm(x), np.linalg.norm(y))
        assert abs(x.conj() @ F @ w) < 1e-10 * max(1.0, s)
        assert abs(y.conj() @ F @ w) < 1e-10 * max(1.0, s)


def test_projective_equal_examples():
    assert projective_equal([1, 0, 0, 0], [1j, 0, 0, 0])
    assert not projective_equal([1, 0, 0, 0], [1, 1e-3, 0, 0], tol=1e-6)
    with pytest.raises(ValueError):
        projective_equal([0, 0], [1, 0])


@given(cvec4.filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_projective_equal_J4(v):
    J = symmetry_J()
    assert projective_equal(np.linalg.matrix_power(J, 4) @ v, v)


@given(cvec4.filter(lambda v: np.linalg.norm(v) > 1e-3), cvec4.filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_projective_equal_symmetric(u, v):
    assert projective_equal(u, v) == projective_equal(v, u)
