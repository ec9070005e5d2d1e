"""Verification of the partial Dirichlet domain centred at p0.

The finite word set R has ten elements; a word w contributes the bisector
B_w of p0 and w(p0), labelled by the lift key of w (``"12"`` for A1 and so
on).  Pairwise intersections are decided on torus charts: Giraud charts in
complex hyperbolic 2-space at theta = 5pi/6, and charts inside the complex
plane spanned by three centres for larger theta.  At theta = pi the real
(Klein) model gives a second, independent route.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np
from scipy.optimize import brentq

from .charts import (
    Chart,
    DegenerateChartError,
    PhaseQuadratic,
    giraud_chart,
    norm_at,
    solve_on_slices,
    subspace_chart,
    triple_chart,
)
from .group import (
    LIFT_WORD,
    ORBIT_KEYS,
    GroupData,
    build_group,
    classify,
    is_projective_identity,
    klein_model,
    parabolic_fixed_point,
    reduce_to_pu21,
    relation_checks,
    word_to_lift,
)
from .hermitian import HVec, projective_equal
from .torus import constrained_extrema, expand, global_min, parallel_map
from ._validation import THETA_MAX, THETA_MIN, check_theta

NEGATIVE_TOL = 1e-8
TANGENCY_TOL = 1e-8
ENDPOINT_TOL = 1e-12

# Intersections to decide, up to the Z4 symmetry, with the expected outcome
# in complex hyperbolic 2-space.  ("12", "34") is the one pair whose outcome
# may change with theta; it is always covered by the half-space of "13".
PAIRS: tuple[tuple[str, str], ...] = (
    ("12", "21"), ("12", "23"), ("12", "32"), ("12", "34"), ("12", "43"),
    ("12", "24"), ("12", "41"), ("12", "14"), ("12", "13"), ("13", "24"),
    ("13", "21"), ("13", "43"), ("13", "23"), ("13", "41"), ("13", "14"),
)
EXPECTED = {
    ("12", "21"): "tangent", ("12", "23"): "empty", ("12", "32"): "empty",
    ("12", "34"): "nonempty", ("12", "43"): "empty", ("12", "24"): "empty",
    ("12", "41"): "empty", ("12", "14"): "nonempty", ("12", "13"): "nonempty",
    ("13", "24"): "empty", ("13", "21"): "empty", ("13", "43"): "empty",
    ("13", "23"): "empty", ("13", "41"): "empty", ("13", "14"): "nonempty",
}
VARIABLE = {("12", "34")}
COVERED_BY = {("12", "34"): "13"}
TANGENT = {("12", "21")}
COAXIAL = {("13", "24")}
SYMMETRY_SPOT_CHECKS = (("12", "23"), ("12", "24"), ("13", "21"))

# key -> canonical key; I1I3 and I2I4 are involutions up to scale
_CANON = {"31": "13", "42": "24"}


def canonical_key(key: str) -> str:
    return _CANON.get(key, key)


def shift_key(key: str, m: int = 1) -> str:
    """Image of a lift key under conjugation by J^m (indices shift by m)."""
    return canonical_key("".join(str((int(d) - 1 + m) % 4 + 1) for d in key))


def _canonical_pair(a: str, b: str) -> tuple[str, str]:
    a, b = canonical_key(a), canonical_key(b)
    return (a, b) if (a, b) in EXPECTED or (b, a) not in EXPECTED else (b, a)


@dataclass
class Verdict:
    pair: tuple[str, str]
    outcome: str  # "empty" | "nonempty" | "tangent"
    theta: float
    route: str
    value: float | None = None
    witness: tuple | None = None
    mode: str = "numeric"
    covered_by: str | None = None
    margin: float | None = None
    detail: dict = field(default_factory=dict)

    @property
    def words(self) -> tuple[str, str]:
        return LIFT_WORD.get(self.pair[0], self.pair[0]), LIFT_WORD.get(self.pair[1], self.pair[1])

    def matches_expected(self) -> bool:
        key = _canonical_pair(*self.pair)
        exp = EXPECTED.get(key)
        if exp is None:
            return True
        if key in COVERED_BY and not (self.margin is None or self.margin > 0):
            return False
        if key in VARIABLE and self.theta > THETA_MIN + ENDPOINT_TOL:
            return self.outcome in ("empty", "nonempty")
        return self.outcome == exp

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pair"] = list(self.pair)
        d["words"] = list(self.words)
        d["witness"] = None if self.witness is None else list(self.witness)
        d["ok"] = self.matches_expected()
        return d


def _at_endpoint(theta: float) -> bool:
    return abs(theta - THETA_MIN) <= ENDPOINT_TOL


def group_for(theta: float, route: str = "auto") -> GroupData:
    """Group data in the model used by ``route``."""
    theta = check_theta(theta)
    g = build_group(theta)
    if route == "auto":
        route = "pu21" if _at_endpoint(theta) else "subspace"
    if route == "pu21":
        return reduce_to_pu21(g)
    if route == "klein":
        return klein_model(g)
    if route == "subspace":
        return g
    raise ValueError(f"unknown route {route!r}")


def pair_chart(g: GroupData, a: str, b: str) -> Chart:
    if g.ambient_dim == 3:
        return giraud_chart(g.p0, g.lift(a), g.lift(b))
    return subspace_chart(g.p0, g.lift(a), g.lift(b))


def gap_quadratic(c: Chart, g: GroupData, key: str) -> PhaseQuadratic:
    """dist^2-proxy to p0 minus that to p_key: |<W,p0>|^2 - |<W,p_key>|^2."""
    return c.dist_quadratic(g.p0) - c.dist_quadratic(g.lift(key))


def pair_verdict(w1: str, w2: str, theta, route: str = "auto", grid: int | None = None,
                 mode: str = "numeric") -> Verdict:
    """Decide whether the bisectors of two words of R intersect."""
    theta = check_theta(theta)
    a, b = canonical_key(word_to_lift(w1)), canonical_key(word_to_lift(w2))
    if a == b:
        raise ValueError("a bisector is not compared with itself")
    key = _canonical_pair(a, b)
    g = group_for(theta, route)
    rname = g.model if route == "auto" or route == "klein" else route
    if g.model == "klein":
        return real_pair_verdict(g, a, b)
    if key in TANGENT or tuple(reversed(key)) in TANGENT:
        v = tangency_check(g)
        v.pair = (a, b)
        return v
    if key in COAXIAL:
        v = coaxial_separation(theta)
        v.pair = (a, b)
        return v
    c = pair_chart(g, a, b)
    f = c.norm_quadratic()
    if mode == "certified":
        r = global_min(expand(f), 2, mode="certified", grid=grid)
    else:
        r = global_min(f, 2, grid=grid)
    detail = {"grid_min": r.grid_value}
    if r.certificate is not None:
        detail["lower_bound"] = r.certificate.lower_bound
        detail["lipschitz"] = r.certificate.lipschitz
    if r.value > 0:
        if mode == "certified" and not r.certified_positive:
            detail["certified"] = False
        v = Verdict((a, b), "empty", theta, rname, r.value, None, r.mode, detail=detail)
    else:
        wv = norm_at(c, r.argmin)
        if wv >= -NEGATIVE_TOL:
            raise ArithmeticError(f"minimum {r.value:g} is not strictly negative")
        v = Verdict((a, b), "nonempty", theta, rname, r.value, r.argmin, r.mode, detail=detail)
    cover = COVERED_BY.get(key)
    if cover is not None:
        v.covered_by = cover
        if v.outcome == "nonempty":
            gap = gap_quadratic(c, g, cover)
            lo, hi = constrained_extrema(gap, f, c, grid=grid)
            v.margin = lo
            v.detail["gap_range"] = [lo, hi]
            d13 = constrained_extrema(c.dist_quadratic(g.lift(cover)), f, c, grid=grid)
            v.detail[f"dist2_p{cover}_range"] = list(d13)
        else:
            # nothing to cover: the intersection itself is empty
            v.detail["cover"] = "vacuous"
    return v


def real_pair_verdict(g: GroupData, a: str, b: str, tol: float = 1e-9) -> Verdict:
    """Intersection of two bisectors in real hyperbolic 3-space.

    In the Klein model a bisector is the hyperplane orthogonal to
    ``p0 - p`` (real lifts on the same sheet), and two hyperplanes meet
    inside the ball iff their normals span a positive definite plane.
    """
    if g.model != "klein":
        raise ValueError("real verdicts need the Klein model")
    H = g.form.matrix.real
    p0 = g.p0.coords.real

    def lift(k):
        v = g.lift(k).coords
        if np.abs(v.imag).max() > 1e-10:
            raise ArithmeticError(f"lift p{k} is not real")
        v = v.real
        return -v if v @ H @ p0 > 0 else v

    u, w = p0 - lift(a), p0 - lift(b)
    G = np.array([[u @ H @ u, u @ H @ w], [w @ H @ u, w @ H @ w]])
    det = float(np.linalg.det(G))
    scale = max(1.0, abs(G).max() ** 2)
    if abs(det) <= tol * scale:
        outcome = "tangent"
    else:
        outcome = "nonempty" if det > 0 else "empty"
    return Verdict((a, b), outcome, g.theta, "klein", det, None, "exact", detail={"gram_det": det})


def tangency_check(g: GroupData) -> Verdict:
    """B12 and B21 touch exactly at the parabolic fixed point q12 of A1."""
    q = parabolic_fixed_point(g)
    vals = [abs(g.form.inner(q.coords, v.coords)) for v in (g.p0, g.lift("12"), g.lift("21"))]
    null = abs(g.form.inner(q.coords, q.coords))
    spread = (max(vals) - min(vals)) / max(vals)
    cls = classify(g.A[0], g.form)
    ok = spread < TANGENCY_TOL and null < 1e-9 and cls.kind == "parabolic"
    detail = {
        "q12": [[z.real, z.imag] for z in q.coords],
        "null_norm": null,
        "distance_spread": spread,
        "unipotent": cls.unipotent,
        "ok": ok,
    }
    route = g.model if g.model != "standard" else "subspace"
    return Verdict(("12", "21"), "tangent" if ok else "nonempty", g.theta, route,
                   spread, None, "exact", detail=detail)


def _line_basis(p0: np.ndarray, p: np.ndarray, H: np.ndarray):
    """Orthogonal basis (p0, v) of the complex line through p0 and p with
    <p0,p0> = -1 and <v,v> = 1."""
    inner = lambda x, y: y.conj() @ H @ x
    v = p + inner(p, p0) * p0 / (-inner(p0, p0))
    v = v / np.sqrt(inner(v, v).real)
    return v


def _trace_gap(p0, v, pa, pb, H, n):
    """Along B(p0, pa) in the line, |<x,pb>|^2 - |<x,p0>|^2 with x = p0 + w v.

    With <x,p0> = -1 the trace is the circle |<p0,pa> + w <v,pa>| = 1 in
    the w-plane; only the arc with |w| < 1 lies in the ball.
    """
    inner = lambda x, y: y.conj() @ H @ x
    alpha, beta = inner(p0, pa), inner(v, pa)
    phi = np.linspace(-np.pi, np.pi, n, endpoint=False)
    w = (np.exp(1j * phi) - alpha) / beta
    inside = np.abs(w) < 1
    if not inside.any():
        return np.inf
    x = p0[None, :] + w[inside, None] * v[None, :]
    gap = np.abs(x @ H.T @ pb.conj()) ** 2 - 1.0
    return float(gap.min())


def coaxial_separation(theta, n: int = 20000) -> Verdict:
    """B13 and B24 are separated inside the complex line through p0, p13, p24."""
    theta = check_theta(theta)
    g = build_group(theta)
    H = g.form.matrix
    p0, p13, p24 = g.p0.coords, g.lift("13").coords, g.lift("24").coords
    E = np.column_stack([p0, p13])
    coef, *_ = np.linalg.lstsq(E, p24, rcond=None)
    resid = float(np.linalg.norm(E @ coef - p24))
    if resid > 1e-10 * max(1.0, np.linalg.norm(p24)):
        raise ArithmeticError(f"p24 is not in the complex line of p0 and p13 (residual {resid:.2e})")
    v = _line_basis(p0, p13, H)
    m1 = _trace_gap(p0, v, p13, p24, H, n)
    m2 = _trace_gap(p0, v, p24, p13, H, n)
    margin = min(m1, m2)
    outcome = "empty" if margin > 0 else "nonempty"
    return Verdict(("13", "24"), outcome, theta, "line", margin, None, "numeric",
                   detail={"span_residual": resid, "gap_on_B13": m1, "gap_on_B24": m2})


def det_s_closed_form(theta: float) -> complex:
    c = np.cos(theta)
    rad = 4 * np.cos(2 * theta) ** 2 - 1
    # the radicand vanishes at 5pi/6; keep its rounding noise out of the root
    rad = 0.0 if rad < 1e-12 else rad
    return (-2j * c - 2j * np.cos(3 * theta) - 2 * np.sin(3 * theta) + 1j) * np.sqrt(rad)


@dataclass
class IndependenceRecord:
    theta: float
    det_s: complex
    det_s_closed_form: complex
    det_s_p41: complex
    coplanar_residual: float

    @property
    def independent(self) -> bool:
        return abs(self.det_s) > 1e-9

    @property
    def closed_form_match(self) -> bool:
        return abs(self.det_s - self.det_s_closed_form) <= 1e-9 * max(1.0, abs(self.det_s_closed_form))

    def as_dict(self) -> dict:
        cz = lambda z: [z.real, z.imag]
        return {
            "theta": self.theta,
            "det_s": cz(self.det_s),
            "abs_det_s": abs(self.det_s),
            "det_s_closed_form": cz(self.det_s_closed_form),
            "det_s_p41": cz(self.det_s_p41),
            "closed_form_match": self.closed_form_match,
            "independent": self.independent,
            "coplanar_residual": self.coplanar_residual,
        }


def independence_tests(theta) -> IndependenceRecord:
    """Determinant of the lift matrix (p0, p12, p13, p14) and the linear
    relation among p0, p12, p34, p13."""
    theta = check_theta(theta)
    g = build_group(theta)
    cols = lambda keys: np.column_stack([g.p0.coords] + [g.lift(k).coords for k in keys])
    det = complex(np.linalg.det(cols(("12", "13", "14"))))
    det41 = complex(np.linalg.det(cols(("12", "13", "41"))))
    e = np.exp(1j * theta)
    resid = 2 * e * g.p0.coords + g.lift("12").coords + g.lift("34").coords + 2 * np.conj(e) * g.lift("13").coords
    return IndependenceRecord(theta, det, complex(det_s_closed_form(theta)), det41, float(np.linalg.norm(resid)))


# Side pairings: map, then pairs of (source centre keys, target centre keys).
SIDE_PAIRINGS: tuple[tuple[str, tuple[int, int], tuple], ...] = (
    ("I2I1", (2, 1), ((("0", "12", "14"), ("21", "0", "24")), (("0", "12", "13"), ("21", "0", "23")))),
    ("I1I3", (1, 3), ((("0", "13", "12"), ("0", "13", "32")), (("0", "13", "14"), ("0", "13", "34")))),
    ("I3I2", (3, 2), ((("0", "23", "24"), ("0", "32", "34")), (("0", "21", "23"), ("0", "31", "32")))),
    ("I4I3", (4, 3), ((("0", "34", "32"), ("0", "24", "43")), (("0", "34", "13"), ("0", "43", "41")))),
    ("I1I4", (1, 4), ((("0", "41", "24"), ("0", "14", "12")), (("0", "41", "43"), ("0", "14", "13")))),
    ("I2I4", (2, 4), ((("0", "24", "21"), ("0", "24", "41")), (("0", "24", "23"), ("0", "24", "43")))),
)


def _center(g: GroupData, key: str) -> np.ndarray:
    return g.p0.coords if key == "0" else g.lift(key).coords


def maps_set(M, g: GroupData, src: Iterable[str], dst: Iterable[str], tol: float = 1e-9) -> bool:
    """True iff M sends the centres ``src`` onto the centres ``dst``
    (as an unordered set of projective points)."""
    images = [M @ _center(g, k) for k in src]
    targets = [_center(g, k) for k in dst]
    if len(images) != len(targets):
        return False
    remaining = list(range(len(targets)))
    for im in images:
        hit = next((j for j in remaining if projective_equal(im, targets[j], tol)), None)
        if hit is None:
            return False
        remaining.remove(hit)
    return True


def side_pairing_check(g: GroupData) -> list[dict]:
    out = []
    for name, (i, j), ridges in SIDE_PAIRINGS:
        M = g.I(i) @ g.I(j)
        side = maps_set(M, g, ("0", f"{j}{i}"), (f"{i}{j}", "0"))
        for src, dst in ridges:
            out.append({"map": name, "source": list(src), "target": list(dst),
                        "ok": bool(side and maps_set(M, g, src, dst))})
    return out


def _inv(M):
    return np.linalg.inv(M)


def _cycle_defs(g: GroupData):
    A1, A2, A3, A4 = g.A
    A1A2, A2A3 = A1 @ A2, A2 @ A3
    return (
        ("A4^-1.(A2A3)^-1.A1^-1",
         [(_inv(A1), ("0", "14", "12"), ("0", "21", "24")),
          (_inv(A2A3), ("0", "21", "24"), ("0", "24", "41")),
          (_inv(A4), ("0", "24", "41"), ("0", "14", "12"))]),
        ("A1A2.A3.A4",
         [(A4, ("0", "13", "14"), ("0", "41", "43")),
          (A3, ("0", "41", "43"), ("0", "34", "31")),
          (A1A2, ("0", "34", "31"), ("0", "13", "14"))]),
        ("A1A2.A2^-1.A1^-1",
         [(_inv(A1), ("0", "13", "12"), ("0", "21", "23")),
          (_inv(A2), ("0", "21", "23"), ("0", "32", "31")),
          (A1A2, ("0", "32", "31"), ("0", "13", "12"))]),
        ("A2A3.A3^-1.A2^-1",
         [(_inv(A2), ("0", "24", "23"), ("0", "32", "34")),
          (_inv(A3), ("0", "32", "34"), ("0", "43", "42")),
          (A2A3, ("0", "43", "42"), ("0", "24", "23"))]),
    )


TRIPLE_WITNESS = (-np.pi, 0.0, np.pi)


def triple_chart_at(theta: float) -> Chart:
    g = build_group(theta)
    return triple_chart(g.p0, g.lift("12"), g.lift("13"), g.lift("14"))


def ridge_cycles(g: GroupData) -> list[dict]:
    """The four ridge cycles: every step maps its ridge to the next and the
    composite is projectively the identity."""
    witness = None
    if g.model == "standard" and g.theta > THETA_MIN + ENDPOINT_TOL:
        c = triple_chart_at(g.theta)
        witness = norm_at(c, TRIPLE_WITNESS)
    out = []
    for name, steps in _cycle_defs(g):
        prod = np.eye(g.ambient_dim, dtype=complex)
        steps_ok = []
        for M, src, dst in steps:
            steps_ok.append(maps_set(M, g, src, dst))
            prod = M @ prod
        rec = {"cycle": name, "steps_ok": steps_ok, "product_identity": is_projective_identity(prod)}
        if witness is not None:
            rec["triple_witness_norm"] = witness
        rec["ok"] = bool(all(steps_ok) and rec["product_identity"] and (witness is None or witness < -NEGATIVE_TOL))
        out.append(rec)
    return out


def presentation_checks(g: GroupData) -> dict[str, bool]:
    A1, A2, A3, A4 = g.A
    sq = lambda M: is_projective_identity(M @ M)
    return {
        "A1A2A3A4=id": is_projective_identity(A1 @ A2 @ A3 @ A4),
        "(A1A2)^2=id": sq(A1 @ A2),
        "(A2A3)^2=id": sq(A2 @ A3),
        "(A3A4)^2=id": sq(A3 @ A4),
        "(A4A1)^2=id": sq(A4 @ A1),
        "A1 unipotent": classify(A1, g.form).unipotent,
    }


def dirichlet_margin(g: GroupData, W: np.ndarray, exclude: Iterable[str]) -> np.ndarray:
    """Relative amount by which points W are closer to p0 than to every
    centre not in ``exclude``; positive means strictly closer."""
    H = g.form.matrix
    W = np.atleast_2d(W)
    d0 = np.abs(W @ H.T @ g.p0.coords.conj()) ** 2
    m = np.full(len(W), np.inf)
    for k in ORBIT_KEYS:
        if k in exclude:
            continue
        dk = np.abs(W @ H.T @ g.lift(k).coords.conj()) ** 2
        m = np.minimum(m, (dk - d0) / d0)
    return m


def _best_on_chart(g: GroupData, c: Chart, exclude, n: int):
    ax = np.linspace(-np.pi, np.pi, n, endpoint=False)
    pts = np.stack(np.meshgrid(*([ax] * c.arity), indexing="ij"), -1).reshape(-1, c.arity)
    nv = norm_at(c, pts)
    m = dirichlet_margin(g, c.ambient(pts), exclude)
    m[nv >= -NEGATIVE_TOL] = -np.inf
    i = int(np.argmax(m))
    return float(m[i]), tuple(float(x) for x in pts[i])


def _random_center(g: GroupData, rng) -> HVec:
    while True:
        v = g.p0.coords + 0.8 * (rng.normal(size=g.ambient_dim) + 1j * rng.normal(size=g.ambient_dim))
        nv = g.form.inner(v, v).real
        if nv < -1e-3:
            return HVec(v / np.sqrt(-nv), g.form)


def facet_witnesses(g: GroupData, n: int = 180, seed: int = 0) -> dict[str, dict]:
    """Points of the sides s12, s13, the ridge s12 n s14 and the edge
    s12 n s13 n s14 strictly closer to p0 than to all remaining centres."""
    rng = np.random.default_rng(seed)
    out = {}
    for side in ("12", "13"):
        best = (-np.inf, None)
        for _ in range(6):
            c = pair_chart_with(g, g.lift(side), _random_center(g, rng))
            best = max(best, _best_on_chart(g, c, {side}, n), key=lambda t: t[0])
        out[f"s{side}"] = {"margin": best[0], "angles": best[1]}
    m, x = _best_on_chart(g, pair_chart(g, "12", "14"), {"12", "14"}, n)
    out["s12^s14"] = {"margin": m, "angles": x}
    if g.model == "standard" and g.theta > THETA_MIN + ENDPOINT_TOL:
        m, x = _best_on_chart(g, triple_chart_at(g.theta), {"12", "13", "14"}, max(32, n // 4))
    else:
        m, x = _edge_on_giraud(g, n)
    out["s12^s13^s14"] = {"margin": m, "angles": x}
    for rec in out.values():
        rec["ok"] = rec["margin"] > 0
    return out


def pair_chart_with(g: GroupData, q: HVec, r: HVec) -> Chart:
    if g.ambient_dim == 3:
        return giraud_chart(g.p0, q, r)
    return subspace_chart(g.p0, q, r)


def _edge_on_giraud(g: GroupData, n: int):
    """Points of B12 n B13 n B14 as the zero set of a gap inside B12 n B13."""
    c = pair_chart(g, "12", "13")
    gap = gap_quadratic(c, g, "14")
    ax = np.linspace(-np.pi, np.pi, n, endpoint=False)
    fixed = np.zeros((n, 2))
    fixed[:, 0] = ax
    t1, t2, cnt = solve_on_slices(gap, 1, fixed)
    pts = []
    for t, ok in ((t1, cnt >= 1), (t2, cnt == 2)):
        p = fixed[ok].copy()
        p[:, 1] = t[ok]
        pts.append(p)
    pts = np.concatenate(pts)
    if not len(pts):
        return -np.inf, None
    nv = norm_at(c, pts)
    m = dirichlet_margin(g, c.ambient(pts), {"12", "13", "14"})
    m[nv >= -NEGATIVE_TOL] = -np.inf
    i = int(np.argmax(m))
    return float(m[i]), tuple(float(x) for x in pts[i])


# Orbit of p0 in the Klein model at theta = pi, in units with sqrt(3) = s:
# entries are (a, b, c, d) -> [a/2, b/2, c*s/2, d/2].
KLEIN_ORBIT = {
    "0": (-1, -1, 1, 3),
    "12": (3, -3, 1, 5), "21": (-5, -7, 1, 9),
    "23": (-7, -5, 1, 9), "32": (-3, 3, 1, 5),
    "34": (-3, 3, 3, 7), "43": (-7, -5, 7, 15),
    "41": (-5, -7, 7, 15), "14": (3, -3, 3, 7),
    "13": (1, 1, 1, 3), "24": (-5, -5, 3, 9),
}


def klein_orbit_expected(key: str) -> np.ndarray:
    a, b, c, d = KLEIN_ORBIT[key]
    return np.array([a / 2, b / 2, c * np.sqrt(3) / 2, d / 2])


def klein_orbit_check(tol: float = 1e-12) -> dict[str, float]:
    """Max deviation of each Klein-model orbit point from the fixed list."""
    g = klein_model(build_group(np.pi))
    out = {}
    for key in KLEIN_ORBIT:
        v = g.p0.coords if key == "0" else g.lift(key).coords
        out[key] = float(np.abs(v - klein_orbit_expected(key)).max())
    return out


@dataclass
class DirichletReport:
    theta: float
    route: str
    relations: dict
    presentation: dict
    verdicts: list
    symmetry: list
    tangency: Verdict
    coaxial: Verdict
    independence: IndependenceRecord | None
    side_pairings: list
    ridge_cycles: list
    facets: dict
    klein: dict | None = None

    @property
    def presentation_ok(self) -> bool:
        return all(self.presentation.values())

    def checks(self) -> dict[str, bool]:
        c = {
            "relations": all(self.relations.values()),
            "presentation": self.presentation_ok,
            "verdicts": all(v.matches_expected() for v in self.verdicts),
            "symmetry": all(s["ok"] for s in self.symmetry),
            "tangency": self.tangency.outcome == "tangent",
            "coaxial": self.coaxial.outcome == "empty",
            "side_pairings": all(s["ok"] for s in self.side_pairings),
            "ridge_cycles": all(r["ok"] for r in self.ridge_cycles),
            "facets": all(f["ok"] for f in self.facets.values()),
        }
        if self.independence is not None:
            ind = self.independence
            expect_zero = _at_endpoint(self.theta)
            c["independence"] = (ind.independent != expect_zero) and ind.coplanar_residual < 1e-9
        if self.klein is not None:
            c["klein"] = self.klein["ok"]
        return c

    @property
    def ok(self) -> bool:
        return all(self.checks().values())

    def as_dict(self) -> dict:
        return {
            "theta": self.theta,
            "route": self.route,
            "ok": self.ok,
            "checks": self.checks(),
            "relations": [{"name": k, "ok": v} for k, v in self.relations.items()],
            "presentation": [{"name": k, "ok": v} for k, v in self.presentation.items()],
            "verdicts": [v.as_dict() for v in self.verdicts],
            "symmetry": self.symmetry,
            "tangency": self.tangency.as_dict(),
            "coaxial": self.coaxial.as_dict(),
            "independence": None if self.independence is None else self.independence.as_dict(),
            "side_pairings": self.side_pairings,
            "ridge_cycles": self.ridge_cycles,
            "facets": self.facets,
            "klein": self.klein,
        }


def _symmetry_checks(theta, route, grid) -> list[dict]:
    out = []
    for a, b in SYMMETRY_SPOT_CHECKS:
        sa, sb = shift_key(a), shift_key(b)
        v1 = pair_verdict(a, b, theta, route, grid)
        v2 = pair_verdict(sa, sb, theta, route, grid)
        same = v1.outcome == v2.outcome and abs(v1.value - v2.value) <= 1e-6 * max(1.0, abs(v1.value))
        out.append({"pair": [a, b], "image": [sa, sb], "values": [v1.value, v2.value], "ok": bool(same)})
    return out


def klein_cross_check(complex_verdicts: list[Verdict]) -> dict:
    """Real-model verdicts at theta = pi against the complex ones."""
    gk = group_for(THETA_MAX, "klein")
    orbit = klein_orbit_check()
    rows, ok = [], max(orbit.values()) < 1e-12
    for v in complex_verdicts:
        r = real_pair_verdict(gk, *v.pair)
        same = r.outcome == v.outcome
        ok = ok and same
        rows.append({"pair": list(v.pair), "real": r.outcome, "complex": v.outcome,
                     "gram_det": r.value, "ok": same})
    return {"orbit_max_error": max(orbit.values()), "verdicts": rows, "ok": bool(ok)}


def full_report(theta, grid: int | None = None, mode: str = "numeric") -> DirichletReport:
    theta = check_theta(theta)
    route = "pu21" if _at_endpoint(theta) else "subspace"
    g = group_for(theta, route)
    g4 = build_group(theta)
    verdicts = parallel_map(lambda p: pair_verdict(p[0], p[1], theta, route, grid, mode), PAIRS)
    klein = klein_cross_check(verdicts) if abs(theta - THETA_MAX) <= ENDPOINT_TOL else None
    return DirichletReport(
        theta=theta,
        route=route,
        relations=relation_checks(g),
        presentation=presentation_checks(g),
        verdicts=verdicts,
        symmetry=_symmetry_checks(theta, route, grid),
        tangency=tangency_check(g),
        coaxial=coaxial_separation(theta),
        independence=independence_tests(theta),
        side_pairings=side_pairing_check(g),
        ridge_cycles=ridge_cycles(g4),
        facets=facet_witnesses(g),
        klein=klein,
    )


def b12_b34_min(theta: float, grid: int = 360) -> float:
    """Minimum of the norm over the B12 n B34 chart; negative iff nonempty."""
    g = group_for(theta, "subspace")
    return global_min(pair_chart(g, "12", "34").norm_quadratic(), 2, grid=grid).value


@dataclass
class Transition:
    theta_star: float
    bracket: tuple[float, float]
    values: tuple[float, float]


def transition_bracket(lo: float = THETA_MIN + 1e-3, hi: float = 0.99 * np.pi, grid: int = 360,
                       xtol: float = 1e-8) -> Transition:
    """Angle where B12 n B34 becomes empty, by bracketing the sign change of
    its chart minimum."""
    flo, fhi = b12_b34_min(lo, grid), b12_b34_min(hi, grid)
    if not (flo < 0 < fhi):
        raise ValueError(f"no sign change on [{lo}, {hi}]: minima {flo:g}, {fhi:g}")
    t = brentq(lambda x: b12_b34_min(x, grid), lo, hi, xtol=xtol)
    return Transition(float(t), (float(t - xtol), float(t + xtol)), (flo, fhi))


def sign_changes(thetas, values) -> list[tuple[float, float]]:
    out = []
    for i in range(len(thetas) - 1):
        if (values[i] < 0) != (values[i + 1] < 0):
            out.append((float(thetas[i]), float(thetas[i + 1])))
    return out
