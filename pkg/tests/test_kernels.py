import os
import subprocess
import sys

import numpy as np
import pytest

from raysep import kernels

from . import oracles

BACKENDS = list(kernels.backends().items())


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "numpy")
    assert "numpy" in kernels.backends()


def test_pure_env_forces_numpy():
    env = dict(os.environ, RAYSEP_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import raysep.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_escape_time(name, impl):
    z = np.array([0.0, 1.0, 3 + 0j, -1.0])
    counts = impl.escape_time(kernels.QUAD, 0.0, z, 50, 10.0)
    assert counts[0] == 50 and counts[3] == 50
    assert counts[1] == 50
    assert counts[2] == 1  # 9, 81
    e = impl.escape_time(kernels.EXP, 1.0, np.array([1.0 + 0j]), 50, 50.0)
    assert e[0] < 5


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_newton_finds_attracting_fixed_point(name, impl):
    z, res = impl.newton(kernels.EXP, oracles.C_ATTRACT, 1, np.array([-0.8 + 0.1j, 0.7 + 0j]), 100, 1e-15)
    assert abs(z[0] + 1) < 1e-12 and res[0] < 1e-12
    assert abs(z[1] - oracles.X_STAR) < 1e-12


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_recurrence(name, impl):
    # z -> z^2 from 0.5 shrinks to 0, so the closest return is the first iterate
    alive, ret = impl.recurrence(kernels.QUAD, 0.0, 1, np.array([0.5 + 0j, 2.0 + 0j]), 100, 1e5)
    assert alive[0] and not alive[1]
    assert ret[0] == pytest.approx(0.25)


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_crossing_parity_square(name, impl):
    vx, vy = np.array([0, 1, 1, 0.0]), np.array([0, 0, 1, 1.0])
    px, py = np.array([0.5, 1.5, -0.2, 0.9]), np.array([0.5, 0.5, 0.5, 0.1])
    assert impl.crossing_parity(vx, vy, px, py).tolist() == [True, False, False, True]


@pytest.mark.parametrize("name,impl", BACKENDS)
def test_polyline_distance_against_brute_force(name, impl):
    rng = np.random.default_rng(3)
    v = rng.normal(size=12) + 1j * rng.normal(size=12)
    p = rng.normal(size=50) * 2 + 1j * rng.normal(size=50) * 2
    got = impl.polyline_distance(v.real, v.imag, p.real, p.imag)
    ts = np.linspace(0, 1, 20001)
    dense = np.concatenate([a + (b - a) * ts for a, b in zip(v[:-1], v[1:])])
    want = np.abs(p[:, None] - dense[None, :]).min(axis=1)
    assert np.allclose(got, want, atol=1e-3)
    assert np.all(got <= want + 1e-12)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    (_, a), (_, b) = BACKENDS
    rng = np.random.default_rng(0)
    z = rng.uniform(-2, 2, 400) + 1j * rng.uniform(-2, 2, 400)
    for fam, c in ((kernels.QUAD, -1.0), (kernels.EXP, oracles.C_ATTRACT)):
        assert np.array_equal(a.escape_time(fam, c, z, 60, 50.0), b.escape_time(fam, c, z, 60, 50.0))
        za, ra = a.newton(fam, c, 2, z, 50, 1e-15)
        zb, rb = b.newton(fam, c, 2, z, 50, 1e-15)
        good = (ra < 1e-10) & (rb < 1e-10)
        assert np.allclose(za[good], zb[good], atol=1e-9)
        al, ma = a.recurrence(fam, c, 1, z[:50], 200, 1e5)
        bl, mb = b.recurrence(fam, c, 1, z[:50], 200, 1e5)
        assert np.array_equal(al, bl)
        assert np.allclose(ma[al], mb[bl], rtol=1e-9)
    vx, vy = rng.normal(size=30), rng.normal(size=30)
    assert np.array_equal(a.crossing_parity(vx, vy, z.real, z.imag), b.crossing_parity(vx, vy, z.real, z.imag))
    assert np.allclose(a.polyline_distance(vx, vy, z.real, z.imag), b.polyline_distance(vx, vy, z.real, z.imag))
