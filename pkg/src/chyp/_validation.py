"""Input validation helpers shared by the library and the CLI."""
from __future__ import annotations

import re
from fractions import Fraction

import numpy as np

THETA_MIN = 5 * np.pi / 6
THETA_MAX = np.pi
# slack for decimal input of the endpoints, e.g. 2.61799 or 3.1415926
THETA_SLACK = 1e-5

_FRACTION_PI = re.compile(r"^\s*([+-]?\d*(?:\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$")


def parse_theta(value) -> float:
    """Parse radians from a number or a string such as ``"5pi/6"``."""
    if isinstance(value, (int, float, np.floating, np.integer)):
        return float(value)
    s = str(value).strip().lower().replace("π", "pi")
    m = _FRACTION_PI.match(s)
    if m:
        num, den = m.group(1), m.group(2)
        coef = Fraction(1) if num in ("", "+") else Fraction(-1) if num == "-" else Fraction(num)
        if den is not None:
            coef /= Fraction(den)
        return float(coef.numerator * np.pi / coef.denominator)
    try:
        return float(s)
    except ValueError:
        raise ValueError(f"cannot parse angle {value!r}") from None


def check_theta(value, lo: float = THETA_MIN, hi: float = THETA_MAX) -> float:
    """Parse and range-check theta; values just outside the interval (within
    a small slack, e.g. a rounded decimal endpoint) snap onto it."""
    t = parse_theta(value)
    if not np.isfinite(t):
        raise ValueError(f"theta must be finite, got {t}")
    if t < lo - THETA_SLACK or t > hi + THETA_SLACK:
        raise ValueError(f"theta={t} outside [{lo:.12g}, {hi:.12g}]")
    return float(min(max(t, lo), hi))


def check_angles(angles, arity: int) -> np.ndarray:
    a = np.asarray(angles, dtype=float)
    if a.shape[-1:] != (arity,):
        raise ValueError(f"expected {arity} angles, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("angles must be finite")
    return a


def check_resolution(n: int, minimum: int = 64) -> int:
    n = int(n)
    if n < minimum:
        raise ValueError(f"grid resolution must be >= {minimum}, got {n}")
    return n
