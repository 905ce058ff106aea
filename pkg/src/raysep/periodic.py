"""Periodic points: Newton search, multipliers, classification, Siegel disks."""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .maps import EXP, Box, MapSpec, evaluate, iterate, iterate_with_derivative, strip_index

ATTRACTING = "attracting"
REPELLING = "repelling"
PARABOLIC = "parabolic"
IRRATIONAL = "irrationally_indifferent"

TOL_IND = 1e-6
R_MAX = 64
ACCEPT_RESIDUAL = 1e-10
DEDUPE = 1e-6


@dataclass(frozen=True)
class Classification:
    kind: str
    rotation: Fraction | float | None = None
    convergents: tuple[Fraction, ...] = ()

    @property
    def non_repelling(self) -> bool:
        return self.kind != REPELLING

    def label(self) -> str:
        if self.kind == PARABOLIC:
            return f"parabolic({self.rotation.numerator}/{self.rotation.denominator})"
        return self.kind


def continued_fraction_convergents(x: float, n: int = 12) -> tuple[Fraction, ...]:
    out = []
    h0, h1, k0, k1 = 0, 1, 1, 0
    for _ in range(n):
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        out.append(Fraction(h1, k1))
        frac = x - a
        if frac < 1e-12:
            break
        x = 1.0 / frac
    return tuple(out)


def classify(mu: complex, tol_ind: float = TOL_IND, r_max: int = R_MAX) -> Classification:
    mu = complex(mu)
    r = abs(mu)
    if r < 1 - tol_ind:
        return Classification(ATTRACTING)
    if r > 1 + tol_ind:
        return Classification(REPELLING)
    theta = (cmath.phase(mu) / (2 * math.pi)) % 1.0
    frac = Fraction(theta).limit_denominator(r_max)
    if abs(mu - cmath.exp(2j * math.pi * frac)) < tol_ind:
        return Classification(PARABOLIC, frac % 1)
    return Classification(IRRATIONAL, theta, continued_fraction_convergents(theta))


@dataclass
class PeriodicPointRecord:
    point: complex
    period: int
    multiplier: complex
    classification: Classification
    residual: float = 0.0
    siegel_candidate: bool = False

    @property
    def kind(self) -> str:
        return self.classification.kind

    @property
    def rotation(self):
        return self.classification.rotation

    def to_json(self) -> dict:
        rot = self.rotation
        if isinstance(rot, Fraction):
            rot = f"{rot.numerator}/{rot.denominator}"
        return {
            "point": [self.point.real, self.point.imag],
            "period": self.period,
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "class": self.classification.label(),
            "rotation": rot,
            "siegel_candidate": self.siegel_candidate,
        }


def multiplier(m: MapSpec, z: complex, p: int) -> complex:
    """``(f**p)'(z)`` along the cycle; ``z`` must be ``f**p``-fixed to 1e-8."""
    w, d = iterate_with_derivative(m, z, p)
    if not cmath.isfinite(w) or abs(w - z) >= 1e-8:
        raise ValueError(f"{z} is not a period-{p} point (|f^p(z) - z| = {abs(w - z):.3g})")
    return d


def newton_polish(m: MapSpec, z: complex, p: int, max_iter: int = 100) -> tuple[complex, float]:
    """Newton on ``f**p(z) - z`` from ``z``; returns ``(root, |f**p(root) - root|)``."""
    zz, res = kernels.newton(m.code, m.parameter, p, np.array([z]), max_iter, 1e-15)
    return complex(zz[0]), float(res[0])


def minimal_period(m: MapSpec, z: complex, p: int, tol: float = 1e-8) -> int:
    for d in range(1, p + 1):
        if p % d == 0:
            w = iterate(m, z, d)
            if cmath.isfinite(w) and abs(w - z) < tol * (1 + abs(z)):
                return d
    return p


def _grid_shape(box: Box, grid) -> tuple[int, int]:
    if grid is None:
        nx = int(min(400, math.ceil((box.x1 - box.x0) / 0.1) + 1))
        ny = int(min(400, math.ceil((box.y1 - box.y0) / 0.1) + 1))
        return nx, ny
    if isinstance(grid, int):
        return grid, grid
    return int(grid[0]), int(grid[1])


def itinerary_seeds(m: MapSpec, p: int, box: Box, K: int = 12, max_seeds: int = 200_000,
                    n_iter: int = 40) -> np.ndarray:
    """Approximate fixed points of the inverse branches ``L_{s0} o ... o L_{s_{p-1}}``.

    Every repelling period-``p`` point with itinerary ``s`` is attracting for
    that branch composition, so a few iterations land next to it.
    """
    first = range(strip_index(complex(0, box.y0)), strip_index(complex(0, box.y1)) + 1)
    if p > 1:
        per = (max_seeds / len(first)) ** (1.0 / (p - 1))
        K = max(0, min(K, int((per - 1) // 2)))
    rest = list(itertools.product(range(-K, K + 1), repeat=p - 1))
    syms = np.array([(s0,) + r for s0 in first for r in rest], dtype=float)
    c = m.parameter
    w = 2.0 + 2j * math.pi * syms[:, 0]
    with np.errstate(all="ignore"):
        for _ in range(n_iter):
            for j in range(p - 1, -1, -1):
                w = np.log(w - c) + 2j * math.pi * syms[:, j]
    w = w[np.isfinite(w)]
    return w[box.contains(w, pad=0.5)]


def polynomial_seeds(m: MapSpec, p: int) -> np.ndarray:
    """All roots of ``Q_c^p(z) - z`` (degree ``2**p``)."""
    poly = np.poly1d([1.0, 0.0, m.parameter])
    q = np.poly1d([1.0, 0.0])
    for _ in range(p):
        q = poly(q)
    return np.roots((q - np.poly1d([1.0, 0.0])).coeffs)


class PointIndex:
    """Hash grid answering "is there a stored point within ``tol``"."""

    def __init__(self, tol: float = DEDUPE):
        self.tol = tol
        self.cells: dict[tuple[int, int], list[complex]] = {}

    def _key(self, z: complex) -> tuple[int, int]:
        return math.floor(z.real / self.tol), math.floor(z.imag / self.tol)

    def near(self, z: complex) -> bool:
        i, j = self._key(z)
        return any(abs(w - z) < self.tol
                   for di in (-1, 0, 1) for dj in (-1, 0, 1) for w in self.cells.get((i + di, j + dj), ()))

    def add(self, z: complex):
        self.cells.setdefault(self._key(z), []).append(z)


def dedupe(points: np.ndarray, tol: float = DEDUPE) -> np.ndarray:
    """Greedy first-come deduplication at distance ``tol``."""
    index = PointIndex(tol)
    keep = []
    for z in np.asarray(points, dtype=complex).tolist():
        if not index.near(z):
            index.add(z)
            keep.append(z)
    return np.array(keep, dtype=complex)


def find_periodic_points(m: MapSpec, p: int, box: Box, grid=None, *, tol_ind: float = TOL_IND,
                         r_max: int = R_MAX, itinerary_K: int = 12, extra_seeds=None,
                         max_iter: int = 100) -> list[PeriodicPointRecord]:
    """Points of period dividing ``p`` in ``box``, found by Newton from a seed set.

    Complete only relative to the seeds: a uniform grid over the box, plus
    inverse-branch seeds (exponential) or polynomial roots (quadratic).
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    nx, ny = _grid_shape(box, grid)
    seeds = [box.grid(nx, ny)]
    if m.family == EXP:
        seeds.append(itinerary_seeds(m, p, box, K=itinerary_K))
    else:
        seeds.append(polynomial_seeds(m, p))
    if extra_seeds is not None:
        seeds.append(np.asarray(extra_seeds, dtype=complex).ravel())
    seeds = np.concatenate(seeds)
    z, res = kernels.newton(m.code, m.parameter, p, seeds, max_iter, 1e-15)
    ok = (res < ACCEPT_RESIDUAL) & box.contains(z)
    z = z[ok]
    z = dedupe(z)
    records = []
    for pt in z:
        pt = complex(pt)
        d = minimal_period(m, pt, p)
        mu = multiplier(m, pt, d)
        w = iterate(m, pt, p)
        records.append(PeriodicPointRecord(pt, d, mu, classify(mu, tol_ind, r_max), abs(w - pt)))
    records.sort(key=lambda r: (r.period, r.point.real, r.point.imag))
    return records


def cycle_points(m: MapSpec, z: complex, period: int) -> list[complex]:
    pts = [complex(z)]
    for _ in range(period - 1):
        pts.append(evaluate(m, pts[-1]))
    return pts


@dataclass
class Cycle:
    points: list[complex]
    period: int
    multiplier: complex
    classification: Classification

    @property
    def non_repelling(self) -> bool:
        return self.classification.non_repelling

    def to_json(self) -> dict:
        return {
            "points": [[z.real, z.imag] for z in self.points],
            "period": self.period,
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "class": self.classification.label(),
        }


def group_cycles(m: MapSpec, records: list[PeriodicPointRecord], tol: float = DEDUPE) -> list[Cycle]:
    """Merge records lying on a common cycle (orbits may leave the search box)."""
    cycles: list[Cycle] = []
    seen: dict[int, PointIndex] = {}
    for r in sorted(records, key=lambda r: (r.period, -abs(r.multiplier))):
        index = seen.setdefault(r.period, PointIndex(tol))
        if index.near(r.point):
            continue
        pts = cycle_points(m, r.point, r.period)
        for z in pts:
            if cmath.isfinite(z):
                index.add(z)
        cycles.append(Cycle(pts, r.period, r.multiplier, r.classification))
    return cycles


@dataclass
class SiegelEstimate:
    center: complex
    period: int
    cloud: np.ndarray
    radii: np.ndarray
    directions: np.ndarray
    unbounded: np.ndarray
    inner_radius: float
    no_disk_detected: bool
    quality: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "period": self.period,
            "inner_radius": self.inner_radius,
            "no_disk_detected": self.no_disk_detected,
            "n_directions": int(self.radii.size),
            "n_unbounded": int(self.unbounded.sum()),
            "cloud": [[z.real, z.imag] for z in self.cloud.tolist()],
            "quality": self.quality,
        }


def _recurrent(m: MapSpec, center: complex, p: int, pts: np.ndarray, n_iter: int, rel: float):
    alive, ret = kernels.recurrence(m.code, m.parameter, p, pts, n_iter, m.escape_radius)
    return alive & (ret < rel * np.abs(pts - center)), ret


def estimate_siegel_boundary(m: MapSpec, center: complex, p: int = 1, n_rays: int = 64,
                             n_iter: int = 10_000, rho_max: float | None = None,
                             n_scan: int = 64, n_bisect: int = 25,
                             rel_return: float = 1e-2) -> SiegelEstimate:
    """Largest radius per direction at which ``f**p`` orbits stay bounded and recur.

    A start point passes when its orbit never escapes and returns within
    ``rel_return * |z0 - center|`` of itself.  Directions passing all the way
    to ``rho_max`` are marked unbounded and left out of the cloud.
    """
    mu = multiplier(m, center, p)
    if classify(mu).kind != IRRATIONAL:
        raise ValueError(f"center {center} is {classify(mu).label()}, not irrationally indifferent")
    if rho_max is None:
        rho_max = 20.0 if m.family == EXP else 2.0
    dirs = np.exp(2j * math.pi * np.arange(n_rays) / n_rays)
    rs = np.linspace(rho_max / n_scan, rho_max, n_scan)
    pts = (center + rs[None, :] * dirs[:, None]).ravel()
    ok, _ = _recurrent(m, center, p, pts, n_iter, rel_return)
    ok = ok.reshape(n_rays, n_scan)
    lo = np.zeros(n_rays)
    hi = np.full(n_rays, np.inf)
    for i in range(n_rays):
        bad = np.nonzero(~ok[i])[0]
        if bad.size == 0:
            lo[i] = rho_max
            continue
        j = bad[0]
        lo[i] = rs[j - 1] if j > 0 else 0.0
        hi[i] = rs[j]
    bounded = np.isfinite(hi)
    idx = np.nonzero(bounded)[0]
    for _ in range(n_bisect):
        if idx.size == 0:
            break
        mid = 0.5 * (lo[idx] + hi[idx])
        good, _ = _recurrent(m, center, p, center + mid * dirs[idx], n_iter, rel_return)
        lo[idx] = np.where(good, mid, lo[idx])
        hi[idx] = np.where(good, hi[idx], mid)
    cloud = center + lo[bounded] * dirs[bounded]
    quality = {"bracket_width": float(np.max(hi[idx] - lo[idx])) if idx.size else 0.0}
    if cloud.size:
        _, ret = _recurrent(m, center, p, cloud, n_iter, rel_return)
        rel = ret / np.maximum(lo[bounded], 1e-300)
        quality["return_mean"] = float(np.mean(rel))
        quality["return_variance"] = float(np.var(rel))
    return SiegelEstimate(
        center=complex(center), period=p, cloud=cloud, radii=lo, directions=dirs,
        unbounded=~bounded, inner_radius=float(lo.min()),
        no_disk_detected=bool(np.all(lo < 1e-6)), quality=quality,
    )
