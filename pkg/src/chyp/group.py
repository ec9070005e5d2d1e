"""The reflection-group representation and its isometry bookkeeping.

For a parameter theta in [5pi/6, pi] four complex reflections I1..I4 of
order two act on complex hyperbolic 3-space.  They are conjugate under the
order-four map J = diag(-1, i, -i, 1), which fixes the centre p0 = e4.

>>> g = build_group(5 * np.pi / 6)
>>> g.lift("13").coords.round(6)   # doctest: +SKIP
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .hermitian import HermForm, HVec, projective_equal_matrix
from ._validation import THETA_MAX, THETA_MIN, check_theta

ISOMETRY_TOL = 1e-8
MODULUS_TOL = 1e-8
CLUSTER_RADIUS = 1e-4

# Each word of the finite set R and the pair of generator indices whose
# product sends p0 to its orbit point.  A_i = I_i I_{i+1}.
WORD_LIFT: dict[str, str] = {
    "A1": "12", "A1^-1": "21",
    "A2": "23", "A2^-1": "32",
    "A3": "34", "A3^-1": "43",
    "A4": "41", "A4^-1": "14",
    "A1A2": "13", "A2A3": "24",
}
LIFT_WORD = {v: k for k, v in WORD_LIFT.items()}
ORBIT_KEYS = tuple(WORD_LIFT.values())


def gram(theta: float) -> np.ndarray:
    """Gram matrix of the four polar vectors."""
    e = np.exp(1j * theta)
    return np.array([
        [1, e, 0, np.conj(e)],
        [np.conj(e), 1, e, 0],
        [0, np.conj(e), 1, e],
        [e, 0, np.conj(e), 1],
    ], dtype=complex)


def symmetry_J(dim: int = 4) -> np.ndarray:
    if dim == 4:
        return np.diag([-1, 1j, -1j, 1]).astype(complex)
    if dim == 3:
        return np.diag([-1, -1j, 1]).astype(complex)
    raise ValueError(f"unsupported dimension {dim}")


def polar_vectors(theta: float) -> list[HVec]:
    theta = check_theta(theta)
    c, s = np.cos(theta), np.sin(theta)
    rad = np.array([1 - 2 * c, 1 - 2 * s, 1 + 2 * s, -1 - 2 * c])
    if rad.min() < -1e-12:
        raise ValueError(f"negative radicand at theta={theta}")
    # two radicands vanish exactly at theta = 5pi/6; drop the rounding noise
    # there, since its square root (~1e-8) would otherwise leak into I_i
    rad[np.abs(rad) < 1e-12] = 0.0
    n1 = 0.5 * np.sqrt(rad)
    J = symmetry_J()
    form = HermForm.standard(4)
    out, v = [], n1.astype(complex)
    for _ in range(4):
        out.append(HVec(v, form))
        v = J @ v
    return out


def reflection(n: HVec, angle: float = np.pi) -> np.ndarray:
    """Complex reflection in the mirror polar to ``n``.

    Returns the matrix of ``z -> -z + (1 - e^{i angle}) <z,n>/<n,n> n``.
    """
    H = n.form.matrix
    v = n.coords
    nn = n.form.inner(v, v).real
    if nn <= 1e-12:
        raise ValueError(f"polar vector must be positive, got <n,n>={nn:g}")
    k = (1 - np.exp(1j * angle)) / nn
    return -np.eye(n.dim, dtype=complex) + k * np.outer(v, v.conj() @ H)


class IsometryClass(NamedTuple):
    kind: str  # "elliptic", "parabolic" or "loxodromic"
    regular: bool
    unipotent: bool
    eigenvalues: tuple


@dataclass(frozen=True, eq=False)
class GroupData:
    theta: float
    ambient_dim: int
    gens: tuple
    J: np.ndarray
    A: tuple
    p0: HVec
    orbit: Mapping[str, HVec]
    form: HermForm = field(repr=False)
    model: str = "standard"

    def I(self, i: int) -> np.ndarray:
        """Generator I_i with the index taken mod 4 (1-based)."""
        return self.gens[(i - 1) % 4]

    def lift(self, key: str) -> HVec:
        """Orbit lift p_ij for a two-digit key such as ``"13"``."""
        if key in self.orbit:
            return self.orbit[key]
        i, j = _parse_key(key)
        return self.p0.apply(self.I(i) @ self.I(j))

    def word(self, name: str) -> np.ndarray:
        """Matrix of a word in R, e.g. ``"A2^-1"`` or ``"A1A2"``."""
        key = word_to_lift(name)
        i, j = _parse_key(key)
        return self.I(i) @ self.I(j)

    def word_lift(self, name: str) -> HVec:
        return self.lift(word_to_lift(name))


def _parse_key(key: str) -> tuple[int, int]:
    if len(key) != 2 or not key.isdigit() or not set(key) <= set("1234"):
        raise ValueError(f"bad orbit key {key!r}")
    return int(key[0]), int(key[1])


def word_to_lift(name: str) -> str:
    name = name.strip().replace("inv", "^-1").replace("^{-1}", "^-1")
    if name in WORD_LIFT:
        return WORD_LIFT[name]
    if name in LIFT_WORD:
        return name
    raise ValueError(f"unknown word {name!r}; expected one of {sorted(WORD_LIFT)}")


def _assemble(theta, gens, J, p0, form, model) -> GroupData:
    gens = tuple(np.asarray(g) for g in gens)
    A = tuple(gens[i] @ gens[(i + 1) % 4] for i in range(4))
    orbit = {}
    for key in ORBIT_KEYS:
        i, j = _parse_key(key)
        orbit[key] = p0.apply(gens[i - 1] @ gens[j - 1])
    g = GroupData(theta, form.dim, gens, J, A, p0, orbit, form, model)
    _check_invariants(g)
    return g


def _check_invariants(g: GroupData, tol: float = 1e-9):
    H = g.form.matrix
    for k, M in enumerate(g.gens + (g.J,)):
        err = np.abs(M.conj().T @ H @ M - H).max()
        if err > tol:
            raise ArithmeticError(f"matrix {k} fails to preserve the form ({err:.2e})")
    for key, v in {"0": g.p0, **g.orbit}.items():
        nrm = v.norm2()
        if abs(nrm + 1) > tol:
            raise ArithmeticError(f"lift p{key} has norm {nrm}, expected -1")


def build_group(theta) -> GroupData:
    theta = check_theta(theta)
    n = polar_vectors(theta)
    form = n[0].form
    J = symmetry_J()
    Jinv = np.linalg.inv(J)
    gens = [reflection(n[0])]
    for _ in range(3):
        gens.append(J @ gens[-1] @ Jinv)
    p0 = HVec([0, 0, 0, 1], form)
    return _assemble(theta, gens, J, p0, form, "standard")


def reduce_to_pu21(g: GroupData) -> GroupData:
    """Drop the second coordinate at the degenerate endpoint theta = 5pi/6.

    There every polar vector has a vanishing second entry, so each I_i is
    block diagonal and the remaining 3x3 block acts on complex hyperbolic
    2-space.
    """
    if g.ambient_dim != 4 or abs(g.theta - THETA_MIN) > 1e-12:
        raise ValueError("reduction to dimension 3 only applies at theta = 5pi/6")
    keep = [0, 2, 3]
    sub = np.ix_(keep, keep)
    for M in g.gens:
        if np.abs(M[1, keep]).max() > 1e-12 or np.abs(M[keep, 1]).max() > 1e-12:
            raise ArithmeticError("generator does not split off the second coordinate")
    form = HermForm.standard(3)
    gens = [M[sub] for M in g.gens]
    p0 = HVec([0, 0, 1], form)
    return _assemble(g.theta, gens, g.J[sub], p0, form, "pu21")


# Basis change taking the Gram form at theta = pi to diag(1,1,1,-1).
_S3 = np.sqrt(3.0)
KLEIN_C = np.array([
    [1, 0, 0, 0],
    [0, 0, 1, 0],
    [-1 / _S3, -2 / _S3, -1 / _S3, 1 / _S3],
    [1, 1, 1, 0],
])


def klein_model(g: GroupData) -> GroupData:
    """Real (Klein) model of the representation at theta = pi.

    The polar vectors are taken as a basis, in which the form is the real
    Gram matrix and J permutes coordinates cyclically, and then the fixed
    real matrix ``KLEIN_C`` brings the form to the standard diagonal one.
    """
    if g.ambient_dim != 4 or abs(g.theta - THETA_MAX) > 1e-12:
        raise ValueError("the Klein model is only available at theta = pi")
    N = np.column_stack([v.coords for v in polar_vectors(g.theta)])
    Ninv = np.linalg.inv(N)
    Ct = KLEIN_C.T
    Ctinv = np.linalg.inv(Ct)
    to_klein = Ctinv @ Ninv

    def real(M, what):
        if np.abs(M.imag).max() > 1e-10:
            raise ArithmeticError(f"{what} is not real in the Klein model")
        return M.real.astype(complex)

    gens = [real(to_klein @ M @ np.linalg.inv(to_klein), f"I{k + 1}") for k, M in enumerate(g.gens)]
    J = real(to_klein @ g.J @ np.linalg.inv(to_klein), "J")
    p0 = to_klein @ g.p0.coords
    # fix the overall phase so p0 has a positive real last entry
    p0 = p0 * abs(p0[3]) / p0[3]
    p0 = real(p0[:, None], "p0")[:, 0]
    form = HermForm.standard(4)
    return _assemble(g.theta, gens, J, HVec(p0, form), form, "klein")


def polar_basis_matrices(theta: float = np.pi):
    """(N, H_L, J_L, I_L1): polar-vector basis data, used for the Klein model."""
    g = build_group(theta)
    N = np.column_stack([v.coords for v in polar_vectors(theta)])
    Ninv = np.linalg.inv(N)
    HL = N.conj().T @ g.form.matrix @ N
    return N, HL, Ninv @ g.J @ N, Ninv @ g.gens[0] @ N


def _clusters(ev: np.ndarray, radius: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, lam in enumerate(ev):
        for grp in groups:
            if abs(ev[grp[0]] - lam) < radius:
                grp.append(i)
                break
        else:
            groups.append([i])
    return groups


def classify(M, form: HermForm | None = None) -> IsometryClass:
    """Elliptic / parabolic / loxodromic type of an isometry.

    Eigenvalues are grouped into clusters first: a Jordan block of size k
    splits a repeated eigenvalue by about eps**(1/k) in floating point, far
    beyond the modulus tolerance, so the cluster means are used instead.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if form is None:
        form = HermForm.standard(n)
    H = form.matrix
    d = np.linalg.det(M)
    if abs(d) < 1e-300:
        raise ValueError("singular matrix")
    Mn = M / d ** (1.0 / n)
    scale = max(1.0, np.abs(Mn).max() ** 2)
    if np.abs(Mn.conj().T @ H @ Mn - H).max() > ISOMETRY_TOL * scale:
        raise ValueError("matrix does not preserve the Hermitian form")

    ev = np.linalg.eigvals(Mn)
    groups = _clusters(ev, CLUSTER_RADIUS)
    means = [ev[grp].mean() for grp in groups]
    if any(abs(m) > 1 + MODULUS_TOL for m in means):
        return IsometryClass("loxodromic", len(groups) == n, False, tuple(ev))

    diagonalizable = True
    negative_eigvec = False
    for grp, lam in zip(groups, means):
        A = Mn - lam * np.eye(n)
        U, sv, Vh = np.linalg.svd(A)
        null = int(np.sum(sv < 1e-6 * max(1.0, sv[0])))
        if null < len(grp):
            diagonalizable = False
        basis = Vh[n - null:].conj().T if null else np.zeros((n, 0))
        if basis.shape[1]:
            G = basis.conj().T @ H @ basis
            if np.linalg.eigvalsh((G + G.conj().T) / 2).min() < -1e-8:
                negative_eigvec = True

    regular = len(groups) == n and min(
        (abs(a - b) for i, a in enumerate(ev) for b in ev[i + 1:]), default=1.0) > MODULUS_TOL
    unipotent = len(groups) == 1
    kind = "elliptic" if diagonalizable and negative_eigvec else "parabolic"
    return IsometryClass(kind, regular, unipotent, tuple(ev))


def is_projective_identity(M, tol: float = 1e-9) -> bool:
    return projective_equal_matrix(M, np.eye(np.asarray(M).shape[0]), tol)


def relation_checks(g: GroupData, tol: float = 1e-9) -> dict[str, bool]:
    """Defining relations of the reflection group plus the J-symmetry."""
    I = g.I
    Jinv = np.linalg.inv(g.J)
    out = {}
    for i in range(1, 5):
        out[f"I{i}^2"] = is_projective_identity(I(i) @ I(i), tol)
    out["(I1I3)^2"] = is_projective_identity(np.linalg.matrix_power(I(1) @ I(3), 2), tol)
    out["(I2I4)^2"] = is_projective_identity(np.linalg.matrix_power(I(2) @ I(4), 2), tol)
    out["A1A2A3A4"] = is_projective_identity(g.A[0] @ g.A[1] @ g.A[2] @ g.A[3], tol)
    out["J^4"] = is_projective_identity(np.linalg.matrix_power(g.J, 4), tol)
    out["J I_i J^-1 = I_i+1"] = all(
        np.abs(g.J @ I(i) @ Jinv - I(i + 1)).max() < tol for i in range(1, 5))
    return out


def parabolic_fixed_point(g: GroupData) -> HVec:
    """Null eigenvector of A1, the boundary point fixed by I1 I2."""
    M = g.A[0]
    n = g.ambient_dim
    H = g.form.matrix
    cls = classify(M, g.form)
    if cls.kind != "parabolic":
        raise ValueError(f"A1 is {cls.kind}, not parabolic")
    # cluster means are accurate even where a Jordan block scatters the
    # individual eigenvalues
    ev = np.linalg.eigvals(M)
    means = [ev[grp].mean() for grp in _clusters(ev, CLUSTER_RADIUS)]
    best = None
    for lam in means:
        U, sv, Vh = np.linalg.svd(M - lam * np.eye(n))
        null = max(1, int(np.sum(sv < 1e-6 * sv[0])))
        B = Vh[n - null:].conj().T
        G = B.conj().T @ H @ B
        w, X = np.linalg.eigh((G + G.conj().T) / 2)
        for k in range(len(w)):
            v = B @ X[:, k]
            v = v / np.linalg.norm(v)
            score = abs(v.conj() @ H @ v) + np.linalg.norm(M @ v - lam * v)
            if best is None or score < best[0]:
                best = (score, v)
    v = best[1]
    # normalise the phase so the largest entry is real positive
    k = int(np.argmax(np.abs(v)))
    return HVec(v * abs(v[k]) / v[k], g.form)
