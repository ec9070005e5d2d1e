"""Linear algebra over indefinite Hermitian forms.

The inner product follows the convention ``<z, w> = w^* H z``: it is linear
in the first slot and conjugate-linear in the second.  Everything here works
in double precision complex arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-12
SIGNATURE_REL_TOL = 1e-9
DEPENDENCE_TOL = 1e-9


class Signature(NamedTuple):
    pos: int
    neg: int
    zero: int


@dataclass(frozen=True, eq=False)
class HermForm:
    """A Hermitian form on C^dim given by its Gram matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"form matrix must be square, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL * max(1.0, np.abs(m).max()):
            raise ValueError("form matrix is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def standard(cls, dim: int) -> "HermForm":
        """diag(1, ..., 1, -1) of signature (dim - 1, 1)."""
        return cls(np.diag([1.0] * (dim - 1) + [-1.0]).astype(complex))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def degenerate(self) -> bool:
        return signature(self).zero > 0

    def inner(self, x, y) -> complex:
        return complex(np.asarray(y).conj() @ self.matrix @ np.asarray(x))

    def __repr__(self):
        return f"HermForm(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class HVec:
    """Coordinate vector tied to the Hermitian form it lives in."""

    coords: np.ndarray
    form: HermForm = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coords, dtype=complex).reshape(-1)
        if c.shape[0] != self.form.dim:
            raise ValueError(f"vector of length {c.shape[0]} does not match form of dim {self.form.dim}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return self.form.dim

    def norm2(self) -> float:
        """Self inner product; real up to rounding."""
        v = self.form.inner(self.coords, self.coords)
        if abs(v.imag) > HERMITIAN_TOL * max(1.0, np.abs(self.coords).max() ** 2 * np.abs(self.form.matrix).max()):
            raise ValueError(f"self inner product has imaginary part {v.imag:g}")
        return v.real

    def apply(self, M) -> "HVec":
        return HVec(np.asarray(M) @ self.coords, self.form)

    def scale(self, lam: complex) -> "HVec":
        return HVec(lam * self.coords, self.form)

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)


STANDARD_3 = HermForm.standard(3)
STANDARD_4 = HermForm.standard(4)


def hvec(coords, form: HermForm | None = None) -> HVec:
    coords = np.asarray(coords, dtype=complex).reshape(-1)
    if form is None:
        form = HermForm.standard(coords.shape[0])
    return HVec(coords, form)


def _same_space(*vecs: HVec) -> HermForm:
    form = vecs[0].form
    for v in vecs[1:]:
        if v.dim != form.dim:
            raise ValueError(f"dimension mismatch: {v.dim} vs {form.dim}")
        if v.form is not form and not np.array_equal(v.form.matrix, form.matrix):
            raise ValueError("vectors live in different Hermitian spaces")
    return form


def herm_inner(x: HVec, y: HVec) -> complex:
    """``<x, y> = y^* H x``."""
    form = _same_space(x, y)
    return form.inner(x.coords, y.coords)


def signature(F: HermForm | np.ndarray) -> Signature:
    m = F.matrix if isinstance(F, HermForm) else np.asarray(F, dtype=complex)
    ev = np.linalg.eigvalsh(m)
    radius = np.abs(ev).max(initial=0.0)
    thresh = SIGNATURE_REL_TOL * radius
    pos = int(np.sum(ev > thresh))
    neg = int(np.sum(ev < -thresh))
    return Signature(pos, neg, len(ev) - pos - neg)


def _cross2_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    p, q = np.conj(p), np.conj(q)
    return np.array([
        p[2] * q[1] - p[1] * q[2],
        p[0] * q[2] - p[2] * q[0],
        p[0] * q[1] - p[1] * q[0],
    ])


def cross2(p: HVec, q: HVec) -> HVec:
    """Hermitian cross product in C^{2,1} for the form diag(1, 1, -1)."""
    form = _same_space(p, q)
    if form.dim != 3:
        raise ValueError("cross2 needs ambient dimension 3")
    if not np.allclose(form.matrix, STANDARD_3.matrix):
        raise ValueError("cross2 is defined for the standard form diag(1,1,-1)")
    return HVec(_cross2_array(p.coords, q.coords), form)


def _cross3_array(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    m = np.conj(np.column_stack([a, b, c]))
    minors = [np.linalg.det(np.delete(m, i, axis=0)) for i in range(4)]
    return np.array([minors[0], -minors[1], minors[2], minors[3]])


def cross3(a: HVec, b: HVec, c: HVec) -> HVec:
    """Triple Hermitian cross product in C^{3,1} for diag(1, 1, 1, -1).

    Built from the signed 3x3 minors of the conjugated column matrix
    ``[a b c]``; the result is orthogonal to all three inputs and vanishes
    when they are linearly dependent.
    """
    form = _same_space(a, b, c)
    if form.dim != 4:
        raise ValueError("cross3 needs ambient dimension 4")
    if not np.allclose(form.matrix, STANDARD_4.matrix):
        raise ValueError("cross3 is defined for the standard form diag(1,1,1,-1)")
    return HVec(_cross3_array(a.coords, b.coords, c.coords), form)


def restricted_form(e1: HVec, e2: HVec, e3: HVec) -> HermForm:
    """Gram matrix ``(e_i^* H e_j)`` of the span of three vectors."""
    form = _same_space(e1, e2, e3)
    E = np.column_stack([e1.coords, e2.coords, e3.coords])
    sv = np.linalg.svd(E, compute_uv=False)
    if sv[-1] < DEPENDENCE_TOL * max(1.0, sv[0]):
        raise ValueError(f"vectors are linearly dependent (smallest singular value {sv[-1]:.3e})")
    return HermForm(E.conj().T @ form.matrix @ E)


def restricted_cross(x, y, F: HermForm | np.ndarray) -> np.ndarray:
    """Cross product on C^3 with respect to a general 3x3 Hermitian form.

    With ``u = x^* F`` and ``v = y^* F`` as row vectors this is the plain
    cross product ``u x v``; hence ``x^* F w = y^* F w = 0``.
    """
    m = F.matrix if isinstance(F, HermForm) else np.asarray(F, dtype=complex)
    u = np.conj(np.asarray(x, dtype=complex)) @ m
    v = np.conj(np.asarray(y, dtype=complex)) @ m
    return np.array([
        u[1] * v[2] - v[1] * u[2],
        u[2] * v[0] - v[2] * u[0],
        u[0] * v[1] - v[0] * u[1],
    ])


def projective_equal(u, v, tol: float = 1e-9) -> bool:
    """True iff ``u = lambda * v`` for some complex lambda.

    The scale is estimated with the Euclidean pairing, so null vectors of
    the Hermitian form are handled like any other.
    """
    u = np.asarray(u, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("projective comparison of a zero vector")
    if u.shape != v.shape:
        return False

    def one_way(a, b, na):
        lam = np.vdot(b, a) / np.vdot(b, b)
        return np.linalg.norm(a - lam * b) < tol * na

    return bool(one_way(u, v, nu) and one_way(v, u, nv))


def projective_equal_matrix(A, B, tol: float = 1e-9) -> bool:
    return projective_equal(np.asarray(A).ravel(), np.asarray(B).ravel(), tol)
