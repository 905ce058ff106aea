import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from raysep.maps import Box, exponential, iterate, orbit, quadratic
from raysep.periodic import (
    ATTRACTING,
    IRRATIONAL,
    PARABOLIC,
    REPELLING,
    PointIndex,
    classify,
    continued_fraction_convergents,
    dedupe,
    estimate_siegel_boundary,
    find_periodic_points,
    group_cycles,
    minimal_period,
    multiplier,
)

from . import oracles

BOX3 = Box(-3, -3, 3, 3)


def _near(records, z, tol=1e-9):
    return [r for r in records if abs(r.point - z) < tol]


def test_classify_examples():
    assert classify(0.3679).kind == ATTRACTING
    par = classify(1)
    assert par.kind == PARABOLIC and par.rotation == Fraction(0) and par.label() == "parabolic(0/1)"
    gold = classify(oracles.MU_GOLDEN)
    assert gold.kind == IRRATIONAL
    assert gold.rotation == pytest.approx(0.618034, abs=1e-6)
    assert classify(2).kind == REPELLING
    assert classify(cmath.exp(2j * math.pi / 3)).rotation == Fraction(1, 3)


def test_convergents_of_golden_mean_are_fibonacci_ratios():
    conv = continued_fraction_convergents(oracles.GOLDEN, 8)
    assert [str(f) for f in conv[:6]] == ["0", "1", "1/2", "2/3", "3/5", "5/8"]


@given(st.floats(0.0, 3.0), st.floats(0, 1))
def test_classification_stable_off_shells(r, theta):
    mu = r * cmath.exp(2j * math.pi * theta)
    assume(abs(abs(mu) - 1) > 1e-5 or abs(abs(mu) - 1) < 1e-7)
    frac = Fraction(theta).limit_denominator(64)
    assume(abs(abs(mu - cmath.exp(2j * math.pi * frac)) - 1e-6) > 1e-9)
    base = classify(mu)
    for d in (1e-12, -1e-12, 1e-12j):
        other = classify(mu + d)
        assert other.kind == base.kind
        if base.kind == PARABOLIC:
            assert other.rotation == base.rotation
        elif base.kind == IRRATIONAL:
            assert abs(other.rotation - base.rotation) < 1e-9


def test_multiplier_examples():
    assert multiplier(exponential(oracles.C_ATTRACT), -1, 1) == pytest.approx(math.exp(-1), abs=1e-15)
    assert multiplier(quadratic(0), 1, 1) == 2
    assert multiplier(quadratic(-1), 0, 2) == 0
    assert multiplier(quadratic(-1), -1, 2) == 0
    with pytest.raises(ValueError):
        multiplier(quadratic(0), 0.5, 1)


def test_find_exp_attracting():
    m = exponential(oracles.C_ATTRACT)
    recs = find_periodic_points(m, 1, BOX3)
    a = _near(recs, -1)
    r = _near(recs, oracles.X_STAR)
    assert len(a) == 1 and a[0].kind == ATTRACTING
    assert a[0].multiplier == pytest.approx(math.exp(-1))
    assert len(r) == 1 and r[0].kind == REPELLING
    bis = oracles.exp_real_fixed_point(oracles.C_ATTRACT, -1.5, -0.5)
    assert abs(a[0].point - bis) < 1e-12


def test_find_quadratic_c0():
    recs = find_periodic_points(quadratic(0), 1, Box(-2, -2, 2, 2))
    assert [(r.point, r.kind) for r in recs] == [(0, ATTRACTING), (1, REPELLING)]
    assert recs[0].multiplier == 0 and recs[1].multiplier == 2


def test_find_parabolic():
    recs = find_periodic_points(exponential(-1), 1, BOX3)
    z = _near(recs, 0, 1e-6)
    assert len(z) == 1 and z[0].kind == PARABOLIC
    assert abs(z[0].multiplier - 1) < 1e-6


@pytest.mark.parametrize("family,c,p", [("exp", oracles.C_ATTRACT, 2), ("exp", -1 + 0j, 3),
                                        ("quad", -1 + 0j, 3), ("quad", 0.3 + 0.5j, 2)])
def test_record_invariants(family, c, p):
    from raysep.maps import MapSpec

    m = MapSpec(family, c)
    box = Box(-4, -8, 4, 8) if family == "exp" else Box(-2, -2, 2, 2)
    recs = find_periodic_points(m, p, box)
    assert recs
    for r in recs:
        assert abs(iterate(m, r.point, p) - r.point) < 1e-10
        assert p % r.period == 0 and minimal_period(m, r.point, p) == r.period
        assert r.classification == classify(r.multiplier)
    pts = np.array([r.point for r in recs])
    d = np.abs(pts[:, None] - pts[None, :]) + np.eye(pts.size)
    assert d.min() > 1e-6
    assert sorted(recs[0].to_json()) == ["class", "multiplier", "period", "point", "rotation", "siegel_candidate"]


def test_dedupe_and_index():
    pts = np.array([0, 1e-8, 1, 1 + 2e-7j, 2])
    assert dedupe(pts).size == 3
    idx = PointIndex(1e-3)
    idx.add(0.5 + 0.5j)
    assert idx.near(0.5 + 0.5004j) and not idx.near(0.6)


def test_group_cycles_basilica():
    m = quadratic(-1)
    recs = find_periodic_points(m, 2, Box(-2, -2, 2, 2))
    cycles = group_cycles(m, recs)
    two = [c for c in cycles if c.period == 2 and c.non_repelling]
    assert len(two) == 1
    assert sorted(z.real for z in two[0].points) == pytest.approx([-1, 0])
    assert sum(len(c.points) for c in cycles) == len(recs)


def test_siegel_quadratic(quad_siegel_estimate):
    est = quad_siegel_estimate
    assert not est.no_disk_detected
    assert est.inner_radius > 0.05
    assert est.cloud.size > 0 and not est.unbounded.any()
    assert {"return_mean", "return_variance", "bracket_width"} <= set(est.quality)


def test_siegel_exponential(exp_siegel, exp_siegel_estimate):
    est = exp_siegel_estimate
    assert abs(est.center - oracles.SIEGEL_CENTER_EXP) < 1e-12
    assert multiplier(exp_siegel, est.center, 1) == pytest.approx(oracles.MU_GOLDEN, abs=1e-12)
    assert not est.no_disk_detected and est.inner_radius > 0.05


def test_siegel_rejects_attracting_center():
    with pytest.raises(ValueError):
        estimate_siegel_boundary(exponential(oracles.C_ATTRACT), -1, 1)


@pytest.mark.parametrize("which", ["quad", "exp"])
def test_inner_circle_avoids_boundary(which, quad_siegel_estimate, exp_siegel_estimate):
    est = quad_siegel_estimate if which == "quad" else exp_siegel_estimate
    m = quadratic(oracles.C_SIEGEL_QUAD) if which == "quad" else exponential(oracles.C_SIEGEL_EXP)
    for k in range(8):
        z0 = est.center + 0.5 * est.inner_radius * cmath.exp(2j * math.pi * k / 8)
        orb = orbit(m, z0, 10_000)
        assert orb.escaped_at is None
        gap = np.abs(orb.points[:, None] - est.cloud[None, :]).min()
        assert gap > 1e-3
