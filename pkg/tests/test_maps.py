import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from raysep.maps import (
    ESCAPED,
    Box,
    MapSpec,
    deriv,
    evaluate,
    exponential,
    fundamental_domain_index,
    in_tract,
    is_escaped,
    itinerary,
    orbit,
    quadratic,
    singular_values,
    strip_index,
    tract_geometry,
)

from . import oracles

params = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)
disk10 = st.tuples(st.floats(0, 10), st.floats(0, 2 * math.pi)).map(lambda rt: cmath.rect(*rt))
families = st.sampled_from(["exp", "quad"])


def test_eval_examples():
    assert evaluate(exponential(-1), 0) == 0
    assert abs(evaluate(exponential(oracles.C_ATTRACT), -1) - (-1)) < 1e-15
    assert evaluate(quadratic(0), 2) == 4


def test_deriv_examples():
    for c in (0, -1, 2 + 1j):
        assert deriv(exponential(c), 0) == 1
    assert abs(deriv(exponential(3), -1) - math.exp(-1)) < 1e-15
    assert deriv(quadratic(0.3), 1) == 2


def test_overflow_is_escape_not_nan():
    m = exponential(0)
    assert evaluate(m, 800) == ESCAPED
    assert is_escaped(evaluate(m, 800 + 3j))
    assert is_escaped(deriv(m, 800))
    assert not any(math.isnan(v) for v in (ESCAPED.real, ESCAPED.imag))


def test_orbit_examples():
    m = exponential(oracles.C_ATTRACT)
    orb = orbit(m, m.parameter, 100)
    assert orb.escaped_at is None and orb.points.size == 101
    assert abs(orb.points[-1] + 1) < 1e-12
    esc = orbit(exponential(1), 1, 20)
    assert esc.escaped_at is not None and esc.escaped_at < 10
    zero = orbit(quadratic(0.25), 0.1, 0)
    assert zero.points.tolist() == [0.1] and zero.escaped_at is None


def test_orbit_errors_and_outside_start():
    with pytest.raises(ValueError):
        orbit(quadratic(0), 0, -1)
    with pytest.raises(ValueError):
        orbit(quadratic(0), 0, 3, escape_radius=0)
    o = orbit(quadratic(0), 10, 5, escape_radius=2)
    assert o.escaped_at == 0 and o.points.size == 0


def test_fundamental_domain_examples():
    m = exponential(0)
    g = tract_geometry(m)
    assert fundamental_domain_index(m, 10, g) == 0
    assert fundamental_domain_index(m, 10 + 6.5j, g) == 1
    assert fundamental_domain_index(m, -5, g) is None
    with pytest.raises(ValueError):
        fundamental_domain_index(quadratic(0), 1, g)


def test_singular_values_examples():
    assert singular_values(exponential(2 + 1j)) == [(2 + 1j, "asymptotic")]
    assert singular_values(quadratic(-1)) == [(-1, "critical")]
    assert singular_values(exponential(0)) == [(0, "asymptotic")]


def test_mapspec_text():
    m = MapSpec.parse("exp:-1.3679,0")
    assert m.family == "exp" and m.parameter == -1.3679
    assert MapSpec.parse(str(m)) == m
    assert MapSpec.parse("quad:-1,0.5") == quadratic(-1 + 0.5j)
    for bad in ("exp", "exp:1", "sin:0,0", "quad:a,b"):
        with pytest.raises(ValueError):
            MapSpec.parse(bad)
    assert exponential(0).escape_radius == 1e10 and quadratic(0).escape_radius == 1e5


def test_box():
    b = Box.parse("-1,-2,3,4")
    assert b.as_list() == [-1, -2, 3, 4] and Box.parse(str(b)) == b
    assert b.contains(0) and not b.contains(5) and b.contains(3.5, pad=1)
    assert b.grid(3, 2).size == 6
    for bad in ("0,0,0,1", "0,0,1", "a,b,c,d"):
        with pytest.raises(ValueError):
            Box.parse(bad)


@given(families, params, disk10)
def test_finite_difference_matches_deriv(family, c, z):
    m = MapSpec(family, c)
    h = 1e-7
    fd = (evaluate(m, z + h) - evaluate(m, z)) / h
    d = deriv(m, z)
    assert abs(fd - d) < 1e-6 * max(1.0, abs(d))


@given(params, st.integers(-3, 3), st.floats(0, 5))
def test_tract_half_plane(c, n, x):
    m = exponential(c)
    g = tract_geometry(m)
    z = complex(g.R + 1e-9 + x, 2 * math.pi * n)
    assert in_tract(m, z, g)
    assert fundamental_domain_index(m, z, g) == n


@given(params, st.integers(-3, 3))
def test_strip_covering_injective(c, n):
    m = exponential(c)
    g = tract_geometry(m)
    xs = np.linspace(g.R + 0.1, g.R + 6, 25)
    ys = 2 * math.pi * n + np.linspace(-math.pi, math.pi, 40, endpoint=False)
    pts = (xs[:, None] + 1j * ys[None, :]).ravel()
    assert all(strip_index(z) == n for z in pts)
    w = np.array([evaluate(m, z) for z in pts])
    diff = np.abs(w[:, None] - w[None, :]) + np.eye(w.size)
    assert diff.min() > 1e-9


def test_strip_index_boundaries():
    assert strip_index(complex(0, -math.pi)) == 0
    assert strip_index(complex(0, math.pi)) == 1
    assert strip_index(complex(5, -7)) == -1


def test_itinerary_of_strip_fixed_points():
    m = exponential(oracles.C_ATTRACT)
    for n, z in oracles.STRIP_FIXED_POINTS.items():
        assert itinerary(m, z, 4) == (n,) * 4
