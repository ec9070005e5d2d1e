import numpy as np
import pytest
from hypothesis import given, strategies as st

from chyp._validation import THETA_MAX, THETA_MIN
from chyp.charts import PhaseQuadratic, norm_at
from chyp.dirichlet import group_for, pair_chart
from chyp.torus import (
    TrigPoly,
    constrained_extrema,
    expand,
    global_min,
    grid_values,
    pattern_search,
    sweep_min,
)

from conftest import ROOT3

KEYS_2D = ["23", "32", "43", "24", "41", "21"]


@pytest.fixture(scope="module")
def g2():
    return group_for(THETA_MIN, "pu21")


@pytest.fixture(scope="module")
def charts2(g2):
    return {k: pair_chart(g2, "12", k) for k in ["23", "32", "43", "24", "34", "14", "41"]}


def test_expansion_b23(charts2):
    T = expand(charts2["23"])
    assert abs(T.constant - (16 * ROOT3 + 48)) < 1e-9
    assert abs(T.coefficient((1, 0))[0] + (8 * ROOT3 + 20)) < 1e-9
    assert abs(T.coefficient((0, 1))[1] - (8 * ROOT3 + 4)) < 1e-9


def test_expansion_b32(charts2):
    T = expand(charts2["32"])
    assert abs(T.constant - (14 * ROOT3 + 36)) < 1e-9
    a, b = T.coefficient((1, -1))
    assert abs(a - 2 * ROOT3) < 1e-9 and abs(b - 2 * ROOT3) < 1e-9


def test_expansion_frequencies_bounded(charts2):
    for c in charts2.values():
        for k, _, _ in expand(c).terms:
            assert max(abs(v) for v in k) <= 1


@pytest.mark.parametrize("key", ["23", "34", "14"])
def test_expansion_agrees_with_chart(charts2, key, rng):
    c = charts2[key]
    T = expand(c)
    pts = rng.uniform(-np.pi, np.pi, (100, 2))
    assert np.abs(T(pts) - norm_at(c, pts)).max() < 1e-9


def test_expansion_agrees_with_triple_chart(rng):
    from chyp.dirichlet import triple_chart_at

    c = triple_chart_at(0.93 * np.pi)
    T = expand(c)
    pts = rng.uniform(-np.pi, np.pi, (100, 3))
    ref = norm_at(c, pts)
    assert np.abs(T(pts) - ref).max() < 1e-9 * max(1.0, np.abs(ref).max())


def test_expand_in_theta_not_available(charts2):
    with pytest.raises(NotImplementedError):
        expand(charts2["23"], include_theta=True)


def test_trigpoly_merges_and_normalises():
    T = TrigPoly([((1, -1), 1.0, 2.0), ((-1, 1), 1.0, 2.0), ((0, 0), 3.0, 5.0)], 2)
    assert T.coefficient((1, -1)) == (2.0, 0.0)
    assert T.constant == 3.0
    with pytest.raises(ValueError):
        TrigPoly([((1,), 1.0, 0.0)], 2)


def test_constant_minimum():
    f = TrigPoly([((0, 0), 7.0, 0.0)], 2)
    r = global_min(f, 2)
    assert r.value == 7.0


@pytest.mark.parametrize("key,ref", [("23", 12.752), ("32", 4.78), ("43", 20.51), ("24", 4.58)])
def test_published_2d_minima(charts2, key, ref):
    r = global_min(charts2[key].norm_quadratic(), 2)
    assert abs(r.value - ref) < 0.05


@pytest.mark.parametrize("key", ["23", "32", "43", "24", "34", "14"])
def test_refinement_monotone(charts2, key):
    r = global_min(charts2[key].norm_quadratic(), 2)
    assert r.value <= r.grid_value
    assert abs(charts2[key].norm_quadratic()(np.array(r.argmin)) - r.value) < 1e-12


@pytest.mark.parametrize("key", ["23", "32", "43", "24", "34", "14"])
def test_oracle_agreement(charts2, key):
    q = charts2[key].norm_quadratic()
    n = 2880
    ax = np.linspace(-np.pi, np.pi, n, endpoint=False)
    oracle = min(float(q(np.stack([np.full(n, a), ax], axis=-1)).min()) for a in ax)
    assert abs(global_min(q, 2).value - oracle) < 1e-3


@pytest.mark.parametrize("key", KEYS_2D)
def test_certified_soundness(g2, key):
    c = pair_chart(g2, "12", key) if key != "21" else pair_chart(g2, "12", "41")
    T = expand(c)
    cert = global_min(T, 2, mode="certified")
    num = global_min(c.norm_quadratic(), 2)
    assert cert.certificate.lower_bound <= num.value + 1e-9
    if cert.certified_positive:
        assert num.value > 0


def test_certified_positive_examples(charts2):
    for key in ("23", "32", "43", "24"):
        r = global_min(expand(charts2[key]), 2, mode="certified")
        assert r.certified_positive
    r = global_min(expand(charts2["34"]), 2, mode="certified")
    assert not r.certified_positive


def test_certified_requires_trigpoly(charts2):
    with pytest.raises(TypeError):
        global_min(charts2["23"].norm_quadratic(), 2, mode="certified")


@pytest.mark.parametrize("key", ["23", "34", "24", "43"])
def test_J_symmetric_minima(key):
    from chyp.dirichlet import shift_key

    g = group_for(0.9 * np.pi, "subspace")
    m1 = global_min(pair_chart(g, "12", key).norm_quadratic(), 2).value
    for m in (1, 2, 3):
        c = pair_chart(g, shift_key("12", m), shift_key(key, m))
        assert abs(global_min(c.norm_quadratic(), 2).value - m1) < 1e-6 * max(1.0, abs(m1))


def test_resolution_floor(charts2):
    with pytest.raises(ValueError):
        global_min(charts2["23"].norm_quadratic(), 2, grid=16)


def test_grid_values_shape():
    f = TrigPoly([((1, 0), 1.0, 0.0)], 2)
    v = grid_values(f, 2, 64)
    assert v.shape == (64, 64)
    assert np.isclose(v.min(), -1.0)


def test_pattern_search_quadratic():
    x, v = pattern_search(lambda p: np.sum((np.atleast_2d(p) - 0.3) ** 2, axis=-1), np.array([0.0, 0.0]))
    assert np.allclose(x, 0.3, atol=1e-8) and v < 1e-15


def test_constrained_extrema_b34(g2, charts2):
    c = charts2["34"]
    f = c.norm_quadratic()
    lo, hi = constrained_extrema(c.dist_quadratic(g2.lift("13")), f, c)
    assert abs(lo - 5.85) < 0.05 and abs(hi - 14.23) < 0.05
    lo, hi = constrained_extrema(c.dist_quadratic(g2.p0), f, c)
    assert abs(lo - (8 + 8 * ROOT3)) < 1e-9 and abs(hi - (8 + 8 * ROOT3)) < 1e-9


@pytest.mark.parametrize("key", ["34", "14"])
def test_constrained_extrema_of_constraint(charts2, key):
    f = charts2[key].norm_quadratic()
    lo, hi = constrained_extrema(f, f)
    assert abs(lo) < 1e-7 and abs(hi) < 1e-7


def test_constrained_extrema_empty_locus(charts2):
    f = charts2["23"].norm_quadratic()
    with pytest.raises(ValueError):
        constrained_extrema(f, f)


def test_sweep_constant_family():
    f = TrigPoly([((0, 0), 2.5, 0.0)], 2)
    s = sweep_min(lambda t: f, (THETA_MIN, THETA_MAX), steps=5, grid=64)
    assert all(r.value == 2.5 for r in s.per_theta)
    assert s.overall.value == 2.5


def test_sweep_b32_endpoint():
    from chyp.golden import subspace_objective

    s = sweep_min(lambda t: subspace_objective(t, "32"), (THETA_MIN, THETA_MAX), steps=40, grid=360)
    assert abs(s.overall.value - 6.5305) < 6.5305e-3
    assert abs(s.overall.theta - THETA_MIN) < 1e-6
    # the joint refinement never beats the brute per-theta minima by much
    assert s.overall.value <= min(r.value for r in s.per_theta) + 1e-12
