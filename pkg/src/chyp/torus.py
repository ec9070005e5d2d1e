"""Global minimisation of chart objectives over small tori.

Objectives are pure callables mapping an array of shape (..., dims) of
angles to an array of shape (...).  :class:`~chyp.charts.PhaseQuadratic`
and :class:`TrigPoly` both qualify.  The numeric pipeline is a dense grid
followed by derivative-free pattern search; the certified mode adds a
Lipschitz lower bound for trigonometric polynomials.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .charts import Chart, PhaseQuadratic, solve_on_slices
from ._validation import check_resolution

DEFAULT_GRID = {1: 720, 2: 720, 3: 256}
REFINE_START = np.pi / 720
REFINE_STOP = 1e-10
N_CANDIDATES = 6

Objective = Callable[[np.ndarray], np.ndarray]


def max_workers() -> int:
    """Worker cap from ``CHYP_THREADS`` (default: CPU count, at most 8)."""
    env = os.environ.get("CHYP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"CHYP_THREADS must be an integer, got {env!r}") from None
    return min(8, os.cpu_count() or 1)


def parallel_map(fn, items: Sequence) -> list:
    """Order-preserving map; threads only when there is more than one item."""
    items = list(items)
    n = min(max_workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


@dataclass(frozen=True)
class Certificate:
    grid_step: float
    lipschitz: float
    lower_bound: float

    @property
    def positive(self) -> bool:
        return self.lower_bound > 0


@dataclass(frozen=True)
class MinResult:
    value: float
    argmin: tuple
    mode: str = "numeric"
    theta: float | None = None
    grid_value: float | None = None
    certificate: Certificate | None = None

    @property
    def certified_positive(self) -> bool:
        return self.certificate is not None and self.certificate.positive

    def as_dict(self) -> dict:
        d = {"value": self.value, "argmin": list(self.argmin), "mode": self.mode}
        if self.theta is not None:
            d["theta"] = self.theta
        if self.certificate is not None:
            d["certificate"] = {
                "grid_step": self.certificate.grid_step,
                "lipschitz": self.certificate.lipschitz,
                "lower_bound": self.certificate.lower_bound,
                "positive": self.certificate.positive,
            }
        return d


class TrigPoly:
    """``sum_k a_k cos(k.x) + b_k sin(k.x)`` with integer frequency vectors."""

    def __init__(self, terms, dims: int):
        merged: dict[tuple, list[float]] = {}
        for k, a, b in terms:
            k = tuple(int(v) for v in k)
            if len(k) != dims:
                raise ValueError(f"frequency {k} does not have {dims} entries")
            # normalise so that the first nonzero entry is positive
            nz = next((v for v in k if v), 0)
            if nz < 0:
                k, b = tuple(-v for v in k), -b
            if not any(k):
                b = 0.0
            acc = merged.setdefault(k, [0.0, 0.0])
            acc[0] += float(a)
            acc[1] += float(b)
        self.dims = dims
        self.terms = tuple((k, a, b) for k, (a, b) in sorted(merged.items()))

    @classmethod
    def from_quadratic(cls, q: PhaseQuadratic) -> "TrigPoly":
        G = q.G
        k = q.dims
        terms = [((0,) * k, float(np.trace(G).real), 0.0)]
        for a in range(k + 1):
            for b in range(a + 1, k + 1):
                g = G[a, b]
                if g == 0:
                    continue
                freq = [0] * k
                freq[b - 1] += 1
                if a:
                    freq[a - 1] -= 1
                # 2 Re(g e^{i(x_b - x_a)})
                terms.append((tuple(freq), 2 * g.real, -2 * g.imag))
        return cls(terms, k)

    def coefficient(self, k) -> tuple[float, float]:
        k = tuple(k)
        for kk, a, b in self.terms:
            if kk == k:
                return a, b
            if kk == tuple(-v for v in k):
                return a, -b
        return 0.0, 0.0

    @property
    def constant(self) -> float:
        return self.coefficient((0,) * self.dims)[0]

    def lipschitz(self) -> float:
        """Bound on the Euclidean norm of the gradient."""
        return float(sum(np.hypot(a, b) * np.linalg.norm(k) for k, a, b in self.terms))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dims:
            raise ValueError(f"expected {self.dims} angles, got shape {x.shape}")
        out = np.zeros(x.shape[:-1])
        for k, a, b in self.terms:
            phase = x @ np.asarray(k, dtype=float)
            out = out + a * np.cos(phase) + b * np.sin(phase)
        return float(out) if out.ndim == 0 else out

    def scale(self, s: float) -> "TrigPoly":
        return TrigPoly([(k, s * a, s * b) for k, a, b in self.terms], self.dims)

    def __repr__(self):
        return f"TrigPoly(dims={self.dims}, terms={len(self.terms)})"


def expand(c: Chart | PhaseQuadratic, include_theta: bool = False) -> TrigPoly:
    """Trigonometric expansion of the norm objective of a chart."""
    if include_theta:
        # entries involve square roots of trigonometric radicands in theta,
        # which have no finite trigonometric expansion
        raise NotImplementedError("expansion in theta is not available; sweep theta instead")
    q = c.norm_quadratic() if isinstance(c, Chart) else c
    if q.dims > 3:
        raise ValueError("expansion supports at most three angles")
    return TrigPoly.from_quadratic(q)


def _evaluate(f: Objective, pts: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(f(pts), dtype=float), pts.shape[:-1])


def _grid_axis(n: int) -> np.ndarray:
    return np.linspace(-np.pi, np.pi, n, endpoint=False)


def grid_values(f: Objective, dims: int, n: int) -> np.ndarray:
    """f on the full n**dims grid, evaluated in parallel along the first axis."""
    ax = _grid_axis(n)
    if dims == 1:
        return _evaluate(f, ax[:, None]).copy()
    rest = np.stack(np.meshgrid(*([ax] * (dims - 1)), indexing="ij"), axis=-1)

    def block(x0):
        pts = np.concatenate([np.full(rest.shape[:-1] + (1,), x0), rest], axis=-1)
        return _evaluate(f, pts)

    return np.stack(parallel_map(block, ax))


def _candidates(vals: np.ndarray, n: int, count: int) -> list[tuple]:
    flat = vals.ravel()
    count = min(count, flat.size)
    idx = np.argpartition(flat, count - 1)[:count]
    # deterministic order: by value, ties broken by index (lexicographic angles)
    idx = sorted(idx.tolist(), key=lambda i: (flat[i], i))
    ax = _grid_axis(n)
    return [tuple(ax[j] for j in np.unravel_index(i, vals.shape)) for i in idx]


def pattern_search(f: Objective, x0, step: float = REFINE_START, stop: float = REFINE_STOP,
                   lower=None, upper=None, max_iter: int = 20000):
    """Compass search: try +-step along each axis, halve on failure.

    Optional box bounds clip the trial points.  Returns ``(x, f(x))``.
    """
    x = np.asarray(x0, dtype=float).copy()
    d = x.size
    fx = float(_evaluate(f, x[None])[0])
    moves = np.concatenate([np.eye(d), -np.eye(d)])
    it = 0
    while step >= stop and it < max_iter:
        it += 1
        trial = x + step * moves
        if lower is not None or upper is not None:
            trial = np.clip(trial, lower, upper)
        vals = _evaluate(f, trial)
        k = int(np.argmin(vals))
        if vals[k] < fx:
            x, fx = trial[k], float(vals[k])
        else:
            step /= 2
    return x, fx


def _wrap(x):
    return (np.asarray(x) + np.pi) % (2 * np.pi) - np.pi


def global_min(f: Objective, dims: int, mode: str = "numeric", grid: int | None = None,
               refine: bool = True) -> MinResult:
    """Global minimum of ``f`` over the ``dims``-torus."""
    if mode not in ("numeric", "certified"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "certified" and not isinstance(f, TrigPoly):
        raise TypeError("certified mode needs a TrigPoly objective")
    if dims < 1:
        raise ValueError("dims must be positive")
    n = check_resolution(grid if grid is not None else DEFAULT_GRID.get(dims, 128))
    vals = grid_values(f, dims, n)
    grid_min = float(vals.min())
    best_x = np.array(_candidates(vals, n, 1)[0])
    best_v = grid_min
    if refine:
        for x0 in _candidates(vals, n, N_CANDIDATES):
            x, v = pattern_search(f, x0)
            if v < best_v:
                best_x, best_v = x, v
    best_x = _wrap(best_x)
    value = float(_evaluate(f, best_x[None])[0])
    cert = None
    if mode == "certified":
        h = 2 * np.pi / n
        L = f.lipschitz()
        cert = Certificate(float(h), float(L), float(grid_min - L * h * np.sqrt(dims) / 2))
    return MinResult(value, tuple(float(v) for v in best_x), mode, None, grid_min, cert)


def _locus_check(f: PhaseQuadratic, grid: int):
    vals = grid_values(f, f.dims, min(grid, 256) if f.dims > 2 else grid)
    lo = global_min(f, f.dims, grid=min(grid, 256) if f.dims > 2 else grid).value
    if not (lo < 0 < vals.max()):
        raise ValueError(f"zero locus is empty (min {lo:.6g}, max {vals.max():.6g})")


def constrained_extrema(g: Objective, f: PhaseQuadratic, chart: Chart | None = None,
                        grid: int | None = None, refine: bool = True) -> tuple[float, float]:
    """Extrema of ``g`` over the zero set of the phase quadratic ``f``.

    Every angle in turn is solved for exactly while the others range over a
    grid; the extremal slices are then refined by pattern search on the
    root branch.
    """
    if chart is not None and chart.arity != f.dims:
        raise ValueError("constraint does not match the chart arity")
    d = f.dims
    if d not in (2, 3):
        raise ValueError("constrained extrema need two or three angles")
    n = check_resolution(grid if grid is not None else DEFAULT_GRID[d])
    _locus_check(f, n)
    ax = _grid_axis(n)

    def branch(free, which, sign):
        def fn(y):
            y = np.atleast_2d(np.asarray(y, dtype=float))
            pts = np.insert(y, free, 0.0, axis=-1)
            t1, t2, cnt = solve_on_slices(f, free, pts)
            t = t1 if which == 0 else t2
            ok = cnt >= (1 if which == 0 else 2)
            pts[:, free] = t
            out = np.full(len(y), np.inf)
            if ok.any():
                out[ok] = sign * _evaluate(g, pts[ok])
            return out
        return fn

    extremes = {}
    for sign in (1.0, -1.0):
        best = np.inf
        for free in range(d):
            others = np.stack(np.meshgrid(*([ax] * (d - 1)), indexing="ij"), -1).reshape(-1, d - 1)
            for which in (0, 1):
                fn = branch(free, which, sign)
                vals = fn(others)
                if not np.isfinite(vals).any():
                    continue
                order = np.argsort(vals, kind="stable")[:N_CANDIDATES if refine else 1]
                for i in order:
                    if not np.isfinite(vals[i]):
                        continue
                    v = vals[i]
                    if refine:
                        _, v = pattern_search(fn, others[i], step=2 * np.pi / n)
                    best = min(best, v)
        if not np.isfinite(best):
            raise ValueError("zero locus is empty")
        extremes[sign] = sign * best
    return float(extremes[1.0]), float(extremes[-1.0])


@dataclass(frozen=True)
class SweepResult:
    thetas: np.ndarray
    per_theta: list
    overall: MinResult = field(repr=True)


def sweep_min(family: Callable[[float], Objective], theta_range: tuple[float, float], steps: int = 200,
              dims: int = 2, grid: int | None = None, refine: bool = True) -> SweepResult:
    """Minimise a one-parameter family over angles and theta.

    Grid minima are taken at ``steps`` equally spaced values of theta; the
    best few are refined jointly in (angles, theta) with theta kept inside
    the range.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    lo, hi = map(float, theta_range)
    if not lo <= hi:
        raise ValueError("empty theta range")
    thetas = np.linspace(lo, hi, steps)
    n = grid if grid is not None else DEFAULT_GRID.get(dims, 128)

    def one(t):
        r = global_min(family(t), dims, grid=n, refine=False)
        return MinResult(r.value, r.argmin, r.mode, float(t), r.grid_value)

    per = parallel_map(one, thetas)
    order = sorted(range(steps), key=lambda i: (per[i].value, i))
    best = per[order[0]]
    if refine:
        cache: dict[float, Objective] = {}

        def fam(t):
            if t not in cache:
                cache[t] = family(t)
            return cache[t]

        def joint(x):
            x = np.atleast_2d(x)
            out = np.empty(len(x))
            for i, row in enumerate(x):
                out[i] = _evaluate(fam(float(row[-1])), row[None, :-1])[0]
            return out

        span = max(hi - lo, 1e-300)
        lower = np.r_[np.full(dims, -np.inf), lo]
        upper = np.r_[np.full(dims, np.inf), hi]
        for i in order[:3]:
            r = per[i]
            # refine the angles at fixed theta first, then jointly
            x, _ = pattern_search(family(r.theta), np.array(r.argmin))
            x0 = np.r_[x, r.theta]
            xj, vj = pattern_search(joint, x0, step=min(REFINE_START, span / 4), lower=lower, upper=upper)
            if vj < best.value:
                ang = _wrap(xj[:-1])
                t = float(xj[-1])
                best = MinResult(float(_evaluate(family(t), ang[None])[0]), tuple(map(float, ang)),
                                 "numeric", t, r.grid_value)
    return SweepResult(thetas, per, best)


@dataclass(frozen=True)
class ExtremaSweep:
    thetas: np.ndarray
    per_theta: list  # (min, max) or None where the locus is empty
    minimum: tuple[float, float]  # (value, theta)
    maximum: tuple[float, float]


def sweep_extrema(family: Callable[[float], tuple[Objective, PhaseQuadratic]], theta_range,
                  steps: int = 60, grid: int = 360, refine: bool = True) -> ExtremaSweep:
    """Constrained extrema over theta: ``family(theta)`` returns ``(g, f)``.

    Angles where the zero locus of ``f`` is empty are skipped.  The best
    sampled angles are refined by bounded scalar minimisation in theta.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    lo, hi = map(float, theta_range)
    thetas = np.linspace(lo, hi, steps)

    def one(t, which=None):
        g, f = family(t)
        try:
            ext = constrained_extrema(g, f, grid=grid, refine=refine)
        except ValueError:
            return None
        return ext if which is None else ext[which]

    per = parallel_map(one, thetas)
    valid = [i for i, e in enumerate(per) if e is not None]
    if not valid:
        raise ValueError("zero locus is empty for every theta")
    out = {}
    for which, sign in ((0, 1.0), (1, -1.0)):
        i = min(valid, key=lambda k: (sign * per[k][which], k))
        best = (per[i][which], float(thetas[i]))
        if refine:

            def obj(t):
                v = one(t, which)
                return np.inf if v is None else sign * v

            # resample the neighbourhood first: the objective is undefined
            # past a transition, which a bracketing method cannot see
            local = np.linspace(thetas[max(i - 1, 0)], thetas[min(i + 1, steps - 1)], 17)
            vals = [obj(t) for t in local]
            j = int(np.argmin(vals))
            if vals[j] < sign * best[0]:
                best = (float(sign * vals[j]), float(local[j]))
            a, b = local[max(j - 1, 0)], local[min(j + 1, len(local) - 1)]
            res = minimize_scalar(obj, bounds=(a, b), method="bounded", options={"xatol": 1e-6})
            if np.isfinite(res.fun) and res.fun < sign * best[0]:
                best = (float(sign * res.fun), float(res.x))
        out[which] = best
    return ExtremaSweep(thetas, per, out[0], out[1])
