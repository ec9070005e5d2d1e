"""Command line interface: ``chyp verify | sweep | export-locus | golden``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import charts, dirichlet, golden
from .group import WORD_LIFT, word_to_lift
from ._validation import THETA_MAX, THETA_MIN, check_resolution, check_theta

SIG_DIGITS = 12

LOCUS_HELP = """\
CSV columns (fixed): r,s,re1,im1,re2,im2,re3,im3,re4,im4
  r, s        spinal angles in [-pi, pi) of a boundary point of the chart
  reK, imK    real and imaginary parts of coordinate K of the lift W in
              C^{3,1} (at theta = 5pi/6 the second coordinate is 0)
"""


@dataclass
class RunConfig:
    command: str
    theta: float | None = None
    theta_range: tuple[float, float] | None = None
    steps: int = 100
    grid: int | None = None
    mode: str = "numeric"
    fmt: str = "json"
    output: str | None = None
    pair: tuple[str, str] | None = None
    slices: int = 360
    expect_bracket: tuple[float, float] | None = (2.70, 2.78)


def _clean(x):
    """JSON-ready copy with floats fixed at 12 significant digits."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(x.real), _clean(x.imag)]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def _g(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _table(rows: list[list], header: list[str]) -> str:
    cells = [header] + [[_g(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


# --- commands -------------------------------------------------------------


def verify(cfg: RunConfig) -> tuple[dict, str, bool]:
    rep = dirichlet.full_report(cfg.theta, grid=cfg.grid, mode=cfg.mode)
    d = rep.as_dict()
    d["golden"] = []
    if abs(cfg.theta - THETA_MIN) < 1e-12:
        d["golden"] = [r.as_dict() for r in golden.run_golden(
            names=[e.name for e in golden.golden_table() if e.name.startswith("2d")], grid2=cfg.grid)]
    rows = [[f"{v['words'][0]},{v['words'][1]}", f"B{v['pair'][0]}^B{v['pair'][1]}", v["outcome"],
             v["value"], v["margin"], "ok" if v["ok"] else "FAIL"] for v in d["verdicts"]]
    text = [f"theta = {cfg.theta:.12g}  route = {rep.route}\n\n"]
    text.append(_table(rows, ["words", "pair", "outcome", "value", "margin", "status"]))
    text.append("\n")
    text.append(_table([[k, "ok" if v else "FAIL"] for k, v in rep.checks().items()], ["check", "status"]))
    for r in d["golden"]:
        text.append(f"golden {r['name']}: {r['value']:.6g} (reference {r['reference']}) "
                    f"{'ok' if r['passed'] else 'FAIL'}\n")
    ok = rep.ok and all(r["passed"] for r in d["golden"])
    text.append(f"\nresult: {'PASS' if ok else 'FAIL'}\n")
    d["ok"] = ok
    return d, "".join(text), ok


def sweep(cfg: RunConfig) -> tuple[dict, str, bool]:
    lo, hi = cfg.theta_range
    thetas = np.linspace(lo, hi, cfg.steps)
    grid = cfg.grid or 360
    rows, mins, ok = [], [], True
    for t in thetas:
        v = dirichlet.pair_verdict("12", "34", float(t), grid=grid)
        mins.append(v.value)
        good = v.matches_expected()
        ok = ok and good
        rows.append({"theta": float(t), "route": v.route, "b12_b34_min": v.value, "outcome": v.outcome,
                     "cover_margin": v.margin, "ok": good})
    brackets = dirichlet.sign_changes(thetas, mins)
    transitions = []
    for a, b in brackets:
        t = dirichlet.transition_bracket(max(a, THETA_MIN), b, grid=grid)
        inside = None
        if cfg.expect_bracket is not None:
            inside = cfg.expect_bracket[0] < t.theta_star < cfg.expect_bracket[1]
            ok = ok and inside
        transitions.append({"grid_bracket": [a, b], "theta_star": t.theta_star,
                            "expected_bracket": cfg.expect_bracket, "inside_expected": inside})
    if cfg.expect_bracket is not None and not transitions:
        ok = False
    d = {"theta_range": [lo, hi], "steps": cfg.steps, "per_theta": rows, "transitions": transitions, "ok": ok}
    text = _table([[r["theta"], r["outcome"], r["b12_b34_min"], r["cover_margin"], "ok" if r["ok"] else "FAIL"]
                   for r in rows], ["theta", "B12^B34", "min", "cover margin", "status"])
    for tr in transitions:
        text += (f"\ntransition in {tr['grid_bracket'][0]:.6f}..{tr['grid_bracket'][1]:.6f}: "
                 f"theta* = {tr['theta_star']:.10f}")
        if tr["inside_expected"] is not None:
            text += f"  expected in {tr['expected_bracket']}: {'ok' if tr['inside_expected'] else 'FAIL'}"
        text += "\n"
    text += f"\nresult: {'PASS' if ok else 'FAIL'}\n"
    return d, text, ok


def export_locus(cfg: RunConfig) -> str:
    a, b = (dirichlet.canonical_key(word_to_lift(w)) for w in cfg.pair)
    g = dirichlet.group_for(cfg.theta)
    c = dirichlet.pair_chart(g, a, b)
    lift = None
    if g.ambient_dim == 3:
        lift = np.zeros((4, 3))
        lift[[0, 2, 3], [0, 1, 2]] = 1.0
    return charts.locus_csv(c, cfg.slices, lift=lift)


def run_golden(cfg: RunConfig) -> tuple[dict, str, bool]:
    res = golden.run_golden(steps=cfg.steps, grid2=cfg.grid)
    ok = all(r.passed for r in res)
    rows = [[r.name, str(r.reference), r.value, r.theta, f"{r.kind} {r.tol:g}", "ok" if r.passed else "FAIL"]
            for r in res]
    text = _table(rows, ["entry", "reference", "value", "theta", "tol", "status"])
    text += f"\n{sum(r.passed for r in res)}/{len(res)} passed\n"
    return {"golden": [r.as_dict() for r in res], "ok": ok}, text, ok


def run(cfg: RunConfig) -> int:
    if cfg.command == "export-locus":
        out = export_locus(cfg)
        _emit(out, cfg.output)
        return 0
    fn = {"verify": verify, "sweep": sweep, "golden": run_golden}[cfg.command]
    d, text, ok = fn(cfg)
    if cfg.command == "verify":
        # schema keys first, the remaining sub-checks after them
        lead = ("theta", "relations", "verdicts", "ridge_cycles", "golden")
        d = {**{k: d[k] for k in lead}, **{k: v for k, v in d.items() if k not in lead}}
    _emit(dumps(d) if cfg.fmt == "json" else text, cfg.output)
    return 0 if ok else 1


def _emit(s: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(s)
    else:
        sys.stdout.write(s)


# --- argument parsing -----------------------------------------------------


def _theta_arg(s: str) -> float:
    try:
        return check_theta(s)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _grid_arg(s: str) -> int:
    try:
        return check_resolution(int(s))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _pair_arg(s: str) -> tuple[str, str]:
    parts = [p.strip() for p in s.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("pair must look like A1,A3")
    try:
        a, b = (dirichlet.canonical_key(word_to_lift(p)) for p in parts)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    if a == b:
        raise argparse.ArgumentTypeError("pair needs two different words")
    return tuple(parts)


def _bracket_arg(s: str):
    if s.lower() == "none":
        return None
    try:
        lo, hi = (float(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("bracket must look like 2.70,2.78 or none") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="chyp",
        description="Dirichlet domain verification for the (2,2,inf) reflection-group family, "
                    "theta in [5pi/6, pi].  Angles accept radians or forms like 5pi/6.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("--grid", type=_grid_arg, default=None,
                        help="points per angle for 2-torus grids (>= 64; default 720, sweep 360)")
        if fmt:
            sp.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
        sp.add_argument("-o", "--output", default=None, help="write to a file instead of stdout")

    v = sub.add_parser("verify", help="full verification at one theta")
    v.add_argument("--theta", type=_theta_arg, required=True)
    v.add_argument("--mode", choices=("numeric", "certified"), default="numeric")
    common(v)

    s = sub.add_parser("sweep", help="B12^B34 emptiness over a theta range and its transition")
    s.add_argument("--from", dest="lo", type=_theta_arg, default=THETA_MIN)
    s.add_argument("--to", dest="hi", type=_theta_arg, default=THETA_MAX)
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--expect-bracket", type=_bracket_arg, default=(2.70, 2.78),
                   help="pass condition for the transition angle (default 2.70,2.78; 'none' to skip)")
    common(s)

    e = sub.add_parser("export-locus", help="CSV of the boundary locus of a bisector intersection",
                       epilog=LOCUS_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    e.add_argument("--pair", type=_pair_arg, required=True,
                   help=f"two words of R, e.g. A1,A3 (words: {', '.join(WORD_LIFT)})")
    e.add_argument("--theta", type=_theta_arg, required=True)
    e.add_argument("--slices", type=int, default=360)
    e.add_argument("-o", "--output", default=None)

    gp = sub.add_parser("golden", help="regression against the published minima")
    gp.add_argument("--steps", type=int, default=200, help="theta samples for the 3D sweeps")
    common(gp)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, grid=getattr(ns, "grid", None), fmt=getattr(ns, "fmt", "json"),
                    output=ns.output)
    if ns.command in ("verify", "export-locus"):
        cfg.theta = ns.theta
    if ns.command == "verify":
        cfg.mode = ns.mode
    if ns.command == "sweep":
        if ns.steps < 2:
            raise ValueError("--steps must be at least 2")
        if ns.lo > ns.hi:
            raise ValueError("--from must not exceed --to")
        cfg.theta_range = (ns.lo, ns.hi)
        cfg.steps = ns.steps
        cfg.expect_bracket = ns.expect_bracket
    if ns.command == "export-locus":
        cfg.pair = ns.pair
        if ns.slices < 8:
            raise ValueError("--slices must be at least 8")
        cfg.slices = ns.slices
    if ns.command == "golden":
        if ns.steps < 2:
            raise ValueError("--steps must be at least 2")
        cfg.steps = ns.steps
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except ValueError as e:
        parser.error(str(e))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
