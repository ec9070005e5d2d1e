"""Torus charts of bisector intersections.

A chart writes the points of a k-fold bisector intersection as

    V(z) = c0 + z1 c1 + ... + zk ck,   |zm| = 1,

with coefficient vectors built from Hermitian cross products of the lifts
of the defining centres.  Writing ``z = (1, z1, ..., zk)``, both the norm
``<V, V>`` and a squared distance ``|<V, u>|^2`` are Hermitian quadratics
``z^* G z`` in the phases; :class:`PhaseQuadratic` holds such a ``G`` and
evaluates it on whole grids at once.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hermitian import (
    DEPENDENCE_TOL,
    HermForm,
    HVec,
    _cross2_array,
    _cross3_array,
    restricted_cross,
    restricted_form,
    signature,
)
from ._validation import check_angles

EQUAL_NORM_TOL = 1e-10
DISC_TOL = 1e-12


class DegenerateChartError(ValueError):
    """Raised when the defining lifts do not span enough dimensions."""

    def __init__(self, message, det_s=None):
        super().__init__(message)
        self.det_s = det_s


@dataclass(frozen=True)
class Bisector:
    """Points equidistant from the centres with lifts ``a`` and ``b``."""

    a: HVec
    b: HVec

    def __post_init__(self):
        if abs(self.a.norm2() - self.b.norm2()) > EQUAL_NORM_TOL:
            raise ValueError("bisector lifts must have equal norms")

    def contains(self, x, tol: float = 1e-8) -> bool:
        x = np.asarray(x)
        F = self.a.form
        da, db = abs(F.inner(x, self.a.coords)), abs(F.inner(x, self.b.coords))
        return abs(da - db) <= tol * max(1.0, da, db)


class PhaseQuadratic:
    """Real function ``x -> z^* G z`` with ``z = (1, e^{i x_1}, ..., e^{i x_k})``.

    Parameters
    ----------
    G : (k+1, k+1) Hermitian matrix.
    """

    def __init__(self, G):
        G = np.array(G, dtype=complex)
        G = (G + G.conj().T) / 2
        G.setflags(write=False)
        self.G = G

    @property
    def dims(self) -> int:
        return self.G.shape[0] - 1

    def __call__(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dims:
            raise ValueError(f"expected {self.dims} angles, got shape {x.shape}")
        out = self.evaluate(*np.moveaxis(x, -1, 0))
        return float(out) if np.ndim(out) == 0 else out

    def evaluate(self, *angles) -> np.ndarray:
        """Evaluate on broadcastable angle arrays, one per dimension."""
        G = self.G
        z = [np.ones_like(np.asarray(angles[0], dtype=float))] + [np.exp(1j * np.asarray(a)) for a in angles]
        val = np.real(np.trace(G)) * z[0]
        for a in range(len(z)):
            for b in range(a + 1, len(z)):
                if G[a, b] != 0:
                    val = val + 2 * np.real(G[a, b] * np.conj(z[a]) * z[b])
        return val

    def __add__(self, other):
        return PhaseQuadratic(self.G + other.G)

    def __sub__(self, other):
        return PhaseQuadratic(self.G - other.G)

    def __mul__(self, k: float):
        return PhaseQuadratic(self.G * float(k))

    __rmul__ = __mul__

    def slice_coefficients(self, free: int, fixed: np.ndarray):
        """Write the function as ``c + 2 Re(e^{i t} gamma)`` in angle ``free``.

        ``fixed`` has shape (..., k) (the entry at ``free`` is ignored).
        Returns ``(c, gamma)`` with the leading shape of ``fixed``.
        """
        G = self.G
        j = free + 1
        fixed = np.asarray(fixed, dtype=float)
        z = np.concatenate([np.ones(fixed.shape[:-1] + (1,)), np.exp(1j * fixed)], axis=-1).astype(complex)
        z[..., j] = 0.0
        # sum over a, b != j of conj(z_a) G_ab z_b, plus the |z_j|^2 G_jj term
        c = np.real(np.einsum("...a,ab,...b->...", z.conj(), G, z)) + G[j, j].real
        gamma = np.einsum("...a,a->...", z.conj(), G[:, j])
        return c, gamma


@dataclass(frozen=True, eq=False)
class Chart:
    """Affine-in-phases parameterisation of a bisector intersection.

    ``coeffs[0]`` is the base vector and ``coeffs[m]`` the direction
    multiplied by ``z_m``.  Vectors live in a coefficient space with form
    ``F``; ``embed`` maps them to ambient coordinates (identity for charts
    built directly in the ambient space).
    """

    coeffs: np.ndarray
    F: np.ndarray
    embed: np.ndarray
    form: HermForm = field(repr=False)
    centers: tuple = field(repr=False, default=())
    kind: str = "ambient"

    @property
    def arity(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def base(self) -> np.ndarray:
        return self.coeffs[0]

    @property
    def directions(self) -> np.ndarray:
        return self.coeffs[1:]

    def phases(self, angles) -> np.ndarray:
        a = check_angles(angles, self.arity)
        return np.concatenate([np.ones(a.shape[:-1] + (1,)), np.exp(1j * a)], axis=-1)

    def vector(self, angles) -> np.ndarray:
        """V(z) in coefficient coordinates."""
        return self.phases(angles) @ self.coeffs

    def ambient(self, angles) -> np.ndarray:
        """W = embed . V(z) in ambient coordinates."""
        return self.vector(angles) @ self.embed.T

    def norm_quadratic(self) -> PhaseQuadratic:
        C = self.coeffs
        return PhaseQuadratic(C.conj() @ self.F @ C.T)

    def dist_quadratic(self, u) -> PhaseQuadratic:
        """|<W, u>|^2 as a phase quadratic."""
        u = np.asarray(u.coords if isinstance(u, HVec) else u, dtype=complex)
        if u.shape[0] != self.form.dim:
            raise ValueError("point does not live in the ambient space of the chart")
        d = (u.conj() @ self.form.matrix @ self.embed) @ self.coeffs.T
        return PhaseQuadratic(np.outer(d.conj(), d))


def _lift_matrix(vecs: Sequence[HVec]) -> np.ndarray:
    form = vecs[0].form
    for v in vecs:
        if v.dim != form.dim:
            raise ValueError("lifts have different dimensions")
    norms = [v.norm2() for v in vecs]
    if max(norms) - min(norms) > EQUAL_NORM_TOL * max(1.0, abs(norms[0])):
        raise ValueError(f"lifts must have equal norms, got {norms}")
    return np.column_stack([v.coords for v in vecs])


def giraud_chart(p: HVec, q: HVec, r: HVec) -> Chart:
    """Giraud torus through three centres in complex hyperbolic 2-space."""
    S = _lift_matrix([p, q, r])
    if p.dim != 3:
        raise ValueError("giraud_chart needs ambient dimension 3")
    sv = np.linalg.svd(S, compute_uv=False)
    if sv[-1] < DEPENDENCE_TOL * sv[0]:
        raise DegenerateChartError("lifts are linearly dependent", np.linalg.det(S))
    a, b, c = p.coords, q.coords, r.coords
    coeffs = np.array([_cross2_array(b, c), _cross2_array(c, a), _cross2_array(a, b)])
    return Chart(coeffs, p.form.matrix, np.eye(3, dtype=complex), p.form, (p, q, r), "giraud")


def triple_chart(q0: HVec, q1: HVec, q2: HVec, q3: HVec) -> Chart:
    """Triple intersection chart in complex hyperbolic 3-space."""
    S = _lift_matrix([q0, q1, q2, q3])
    if q0.dim != 4:
        raise ValueError("triple_chart needs ambient dimension 4")
    sv = np.linalg.svd(S, compute_uv=False)
    if sv[-1] < DEPENDENCE_TOL * sv[0]:
        det = np.linalg.det(S)
        raise DegenerateChartError(f"lifts are linearly dependent (det S = {det:.3e})", det)
    a, b, c, d = (v.coords for v in (q0, q1, q2, q3))
    coeffs = np.array([
        _cross3_array(b, c, d),
        _cross3_array(a, c, d),
        _cross3_array(a, b, d),
        _cross3_array(a, b, c),
    ])
    return Chart(coeffs, q0.form.matrix, np.eye(4, dtype=complex), q0.form, (q0, q1, q2, q3), "triple")


def subspace_chart(p: HVec, q: HVec, r: HVec) -> Chart:
    """Giraud torus inside the complex hyperbolic plane spanned by p, q, r.

    Coordinates are taken in the basis (p, q, r) with the restricted form
    ``H_L``; the chart vector ``V`` re-embeds as ``W = V1 p + V2 q + V3 r``.
    """
    _lift_matrix([p, q, r])
    if p.dim != 4:
        raise ValueError("subspace_chart needs ambient dimension 4")
    HL = restricted_form(p, q, r)
    sig = signature(HL)
    if sig != (2, 1, 0):
        raise DegenerateChartError(f"restricted form has signature {tuple(sig)}, expected (2, 1, 0)")
    F = HL.matrix
    E = np.eye(3, dtype=complex)
    coeffs = np.array([
        restricted_cross(E[1], E[2], F),
        restricted_cross(E[0], E[2], F),
        restricted_cross(E[0], E[1], F),
    ])
    embed = np.column_stack([p.coords, q.coords, r.coords])
    return Chart(coeffs, F, embed, p.form, (p, q, r), "subspace")


def norm_at(c: Chart, angles) -> float:
    """<V, V> at the given angles (real)."""
    V = c.vector(angles)
    val = np.einsum("...i,ij,...j->...", V.conj(), c.F, V)
    if np.any(np.abs(val.imag) > 1e-9 * np.abs(val.real) + 1e-12 * max(1.0, np.abs(V).max() ** 2)):
        raise ArithmeticError("norm has a non-negligible imaginary part")
    val = val.real
    return float(val) if np.ndim(val) == 0 else val


def dist2_to(c: Chart, angles, u) -> float:
    """|<W, u>|^2 for the re-embedded chart point W."""
    u = np.asarray(u.coords if isinstance(u, HVec) else u, dtype=complex)
    W = c.ambient(angles)
    val = np.abs(W @ (c.form.matrix.T @ u.conj())) ** 2
    return float(val) if np.ndim(val) == 0 else val


def _roots_of_slice(c_term, gamma):
    """Solve ``c + 2 Re(e^{it} gamma) = 0``; arrays of (t1, t2, count)."""
    # c + a cos t + b sin t with a = 2 Re gamma, b = -2 Im gamma
    a = 2 * gamma.real
    b = -2 * gamma.imag
    R = np.hypot(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(R > 0, -c_term / np.where(R > 0, R, 1.0), np.inf)
    count = np.where(np.abs(ratio) < 1 - DISC_TOL, 2, np.where(np.abs(ratio) <= 1 + DISC_TOL, 1, 0))
    phi = np.arctan2(b, a)
    delta = np.arccos(np.clip(ratio, -1.0, 1.0))
    t1 = _wrap(phi - delta)
    t2 = _wrap(phi + delta)
    return t1, t2, count


def _wrap(t):
    return (np.asarray(t) + np.pi) % (2 * np.pi) - np.pi


def solve_on_slices(f: PhaseQuadratic, free: int, fixed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised zero finder of ``f`` in angle ``free`` along many slices."""
    c, gamma = f.slice_coefficients(free, fixed)
    return _roots_of_slice(c, gamma)


def boundary_slice(c: Chart, fixed: int, value: float) -> list[float]:
    """Angles of the other coordinate where <V,V> = 0 with angle ``fixed``
    (0 or 1) held at ``value``; a quadratic in the remaining phase."""
    if c.arity != 2:
        raise ValueError("boundary_slice needs a chart of arity 2")
    if fixed not in (0, 1):
        raise ValueError("fixed must be 0 or 1")
    free = 1 - fixed
    x = np.zeros(2)
    x[fixed] = value
    t1, t2, n = solve_on_slices(c.norm_quadratic(), free, x)
    n = int(n)
    if n == 0:
        return []
    if n == 1:
        return [float(t1)]
    return sorted([float(t1), float(t2)])


def sample_locus(c: Chart, n_slices: int = 360, fixed: int = 0):
    """Points of the zero locus of <V,V>, as an (m, arity) array of angles.

    For arity 3 the third angle is sliced on the same grid as the first.
    """
    f = c.norm_quadratic()
    grid = np.linspace(-np.pi, np.pi, n_slices, endpoint=False)
    if c.arity == 2:
        fixed_pts = np.zeros((n_slices, 2))
        fixed_pts[:, fixed] = grid
        free = 1 - fixed
    elif c.arity == 3:
        A, B = np.meshgrid(grid, grid, indexing="ij")
        fixed_pts = np.zeros((n_slices * n_slices, 3))
        fixed_pts[:, 0] = A.ravel()
        fixed_pts[:, 2] = B.ravel()
        free = 1
    else:
        raise ValueError("locus sampling needs arity 2 or 3")
    t1, t2, cnt = solve_on_slices(f, free, fixed_pts)
    out = []
    for t, mask in ((t1, cnt >= 1), (t2, cnt == 2)):
        pts = fixed_pts[mask].copy()
        pts[:, free] = t[mask]
        out.append(pts)
    pts = np.concatenate(out)
    order = np.lexsort(pts.T[::-1])
    return pts[order]


LOCUS_ANGLE_NAMES = ("r", "s", "t")


def locus_csv(c: Chart, n_slices: int = 360, lift=None) -> str:
    """CSV rows ``r,s[,t],re1,im1,...`` for the boundary locus of a chart;
    the trailing columns are the ambient coordinates of W, optionally
    mapped by the matrix ``lift`` first."""
    pts = sample_locus(c, n_slices)
    W = c.ambient(pts) if len(pts) else np.zeros((0, c.form.dim), dtype=complex)
    if lift is not None:
        W = W @ np.asarray(lift).T
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = list(LOCUS_ANGLE_NAMES[: c.arity])
    for k in range(1, W.shape[1] + 1):
        header += [f"re{k}", f"im{k}"]
    w.writerow(header)
    for x, v in zip(pts, W):
        row = [f"{a:.12g}" for a in x]
        for z in v:
            row += [f"{z.real:.12g}", f"{z.imag:.12g}"]
        w.writerow(row)
    return buf.getvalue()
