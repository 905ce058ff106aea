import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raysep.address import ExternalAddress, enumerate_periodic
from raysep.maps import evaluate, exponential, quadratic, strip_index
from raysep.periodic import multiplier
from raysep.rays import (
    FAILED,
    HIT_SINGULAR,
    LANDED,
    PARABOLIC_SLOW,
    REACHED_T_MIN,
    LandingConfig,
    TraceConfig,
    land_ray,
    t_grid,
    trace_ray,
)

from . import oracles

P = ExternalAddress.periodic
M_ATT = exponential(oracles.C_ATTRACT)


def test_t_grid_geometric():
    ts = t_grid(20, 1)
    assert ts[0] == 20 and ts[-1] == 1
    assert np.all(np.diff(ts) < 0)
    with pytest.raises(ValueError):
        TraceConfig(t_max=1, t_min=2)
    with pytest.raises(ValueError):
        TraceConfig(depth=0)


def test_tail_of_zero_ray_is_real():
    tr = trace_ray(M_ATT, P(0))
    t0, z0 = tr.samples[0]
    assert t0 == 20
    # asymptotic form t + 2 pi i s; the correction is of order |c| e^-t
    assert abs(z0 - 20) < 1e-6
    assert np.all(np.abs(tr.z.imag) < 1e-12)


def test_tail_of_one_ray_in_strip_one():
    tr = trace_ray(M_ATT, P(1))
    assert abs(tr.z[0].imag - 2 * math.pi) < math.pi


def test_depth_monotonicity():
    r6 = trace_ray(M_ATT, P(1, -1), depth=6)
    r12 = trace_ray(M_ATT, P(1, -1), depth=12)
    assert r12.residual <= r6.residual
    assert r12.residual < 1e-8


def test_trace_invariants():
    tr = trace_ray(M_ATT, P(2, 0, -1))
    assert tr.truncation == REACHED_T_MIN
    assert tr.t.size > 0 and np.all(np.diff(tr.t) < 0)
    assert tr.t[0] <= 20 and tr.t[-1] >= 1
    assert math.isfinite(tr.residual) and tr.residual == tr.sample_residuals.max()
    d = np.abs(tr.z[:, None] - tr.z[None, :]) + np.eye(tr.z.size)
    assert d.min() > 1e-12
    js = tr.to_json()
    assert js["address"] == "|2,0,-1" and len(js["samples"][0]) == 3


def test_fixed_rays_disjoint():
    traces = [trace_ray(M_ATT, P(n)) for n in (-1, 0, 1)]
    for i in range(3):
        for j in range(i + 1, 3):
            gap = np.abs(traces[i].z[:, None] - traces[j].z[None, :]).min()
            assert gap > 1


@settings(max_examples=10)
@given(st.sampled_from(enumerate_periodic(2, 2) + enumerate_periodic(3, 1)))
def test_functional_equation_and_first_strip(a):
    tr = trace_ray(M_ATT, a)
    assert tr.truncation == REACHED_T_MIN
    assert tr.residual < 1e-8
    assert strip_index(tr.z[0]) == a.symbol(0)


def test_itinerary_follows_address():
    a = ExternalAddress((1,), (-2,))
    tr = trace_ray(M_ATT, a, t_max=12, t_min=8)
    for z in tr.z:
        assert strip_index(z) == 1
        assert strip_index(evaluate(M_ATT, z)) == -2


def test_guard_truncation_reported():
    tr = trace_ray(M_ATT, P(0), config=TraceConfig(guard=1e3))
    assert tr.truncation == HIT_SINGULAR
    # samples up to the refusal are kept; the trace stops short of t_min
    assert tr.t.size >= 1 and tr.t[-1] > 1 and math.isfinite(tr.residual)
    res = land_ray(M_ATT, P(0), trace=tr)
    assert res.status == FAILED and res.landing_point is None


def test_quadratic_and_preperiodic_rejected():
    with pytest.raises(ValueError):
        trace_ray(quadratic(0), P(0))
    with pytest.raises(ValueError):
        land_ray(M_ATT, ExternalAddress((1,), (0,)))


def test_zero_ray_lands_at_bisection_root():
    r = land_ray(M_ATT, P(0))
    assert r.status == LANDED and r.ok
    assert abs(r.landing_point - oracles.X_STAR) < 1e-8
    assert r.polish_residual < 1e-10
    assert abs(multiplier(M_ATT, r.landing_point, 1)) == pytest.approx(math.exp(oracles.X_STAR), rel=1e-9)
    assert abs(r.path[-1] - r.landing_point) == 0
    js = r.to_json()
    assert js["status"] == LANDED and js["landing_point"][1] == 0


def test_parabolic_zero_ray():
    r = land_ray(exponential(-1), P(0))
    assert r.status in (LANDED, PARABOLIC_SLOW)
    assert abs(r.landing_point) < 1e-6


def test_landing_failure_never_fabricates():
    r = land_ray(M_ATT, P(0), landing_config=LandingConfig(max_steps=2))
    assert r.status == FAILED and r.landing_point is None
    assert "endpoint" in r.diagnostics and r.diagnostics["outcome"] == "stalled"


def test_strip_fixed_rays():
    for n, z in oracles.STRIP_FIXED_POINTS.items():
        r = land_ray(M_ATT, P(n))
        assert r.ok and abs(r.landing_point - z) < 1e-8


def test_landing_equivariant():
    a = P(1, -1)
    ra, rb = land_ray(M_ATT, a), land_ray(M_ATT, a.shift())
    assert ra.ok and rb.ok
    assert abs(evaluate(M_ATT, ra.landing_point) - rb.landing_point) < 1e-5
