"""Co-landing periodic rays, the basic regions they cut out, and the fixed-point census."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .address import ExternalAddress, enumerate_periodic
from .maps import EXP, QUAD, Box, MapSpec, TractGeometry, in_tract, iterate, itinerary, tract_geometry
from .periodic import PARABOLIC, REPELLING, PeriodicPointRecord
from .rays import LANDED, PARABOLIC_SLOW, LandingConfig, LandingResult, TraceConfig, land_ray

TOL_MATCH = 1e-5
TOL_BOUNDARY = 1e-6
ON_BOUNDARY = "on_boundary"
ESCAPED = "escaped"

# closure of separators far beyond anything probed
X_FAR = 1e6
R_FAR = 1e6


class SeparatorCrossingError(ValueError):
    def __init__(self, a, b):
        super().__init__(f"separators through rays {a} and {b} cross")
        self.pair = (a, b)


@dataclass
class RayPairGroup:
    rays: list[LandingResult]
    landing_point: complex

    @property
    def size(self) -> int:
        return len(self.rays)

    def to_json(self) -> dict:
        return {
            "addresses": [str(r.address) for r in self.rays],
            "landing_point": [self.landing_point.real, self.landing_point.imag],
        }


def group_landings(landings: list[LandingResult], tol_match: float = TOL_MATCH,
                   keep_singletons: bool = False) -> list[RayPairGroup]:
    """Cluster landing points; rays are sorted in their cyclic order at infinity."""
    usable = [r for r in landings if r.landing_point is not None and r.status in (LANDED, PARABOLIC_SLOW)]
    clusters: list[list[LandingResult]] = []
    for r in usable:
        for cl in clusters:
            if abs(cl[0].landing_point - r.landing_point) < tol_match:
                cl.append(r)
                break
        else:
            clusters.append([r])
    groups = []
    for cl in clusters:
        if len(cl) >= 2 or keep_singletons:
            cl.sort(key=lambda r: r.address)
            groups.append(RayPairGroup(cl, complex(np.mean([r.landing_point for r in cl]))))
    groups.sort(key=lambda g: (g.landing_point.real, g.landing_point.imag))
    return groups


@dataclass
class GammaResult:
    """Output of ``build_gamma``; iterates over the co-landing groups."""

    p: int
    M: int | None
    groups: list[RayPairGroup]
    landings: list[LandingResult]
    failures: list[LandingResult]

    def __iter__(self):
        return iter(self.groups)

    def __len__(self):
        return len(self.groups)

    def to_json(self) -> dict:
        return {
            "groups": [g.to_json() for g in self.groups],
            "failures": [{"address": str(f.address), "status": f.status,
                          "outcome": f.diagnostics.get("outcome")} for f in self.failures],
            "n_rays": len(self.landings),
        }


def build_gamma(m: MapSpec, p: int, M: int, trace_config: TraceConfig | None = None,
                landing_config: LandingConfig | None = None, tol_match: float = TOL_MATCH) -> GammaResult:
    """Land every ray fixed by ``f**p`` with symbols in ``[-M, M]`` and keep co-landing clusters."""
    if m.family != EXP:
        raise ValueError("build_gamma enumerates exponential addresses; quadratics go through polyoracle")
    landings, failures = [], []
    for a in enumerate_periodic(p, M):
        r = land_ray(m, a, trace_config, landing_config)
        (landings if r.landing_point is not None else failures).append(r)
    return GammaResult(p, M, group_landings(landings, tol_match), landings, failures)


@dataclass
class Separator:
    rays: tuple[LandingResult, LandingResult]
    landing_point: complex
    polyline: np.ndarray  # open curve: far end of ray 0, landing point, far end of ray 1
    polygon: np.ndarray  # closed through infinity
    at_infinity: tuple

    def to_json(self, max_points: int = 400) -> dict:
        pl = self.polyline
        if pl.size > max_points:
            pl = pl[np.linspace(0, pl.size - 1, max_points).astype(int)]
        return {
            "addresses": [str(r.address) for r in self.rays],
            "landing_point": [self.landing_point.real, self.landing_point.imag],
            "at_infinity": list(self.at_infinity),
            "polyline": [[z.real, z.imag] for z in pl.tolist()],
        }


def _ray_polyline(r: LandingResult, landing: complex) -> np.ndarray:
    path = np.asarray(r.path, dtype=complex)
    if abs(path[-1] - landing) > 0:
        path = np.append(path, landing)
    return path


def _close_exp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ya, yb = a[0].imag, b[0].imag
    tail = np.array([complex(X_FAR, yb), complex(X_FAR, ya)])
    return np.concatenate([np.array([complex(X_FAR, ya)]), a, b[::-1], tail[:1]])


def _close_quad(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ta, tb = cmath.phase(a[0]), cmath.phase(b[0])
    if tb < ta:
        tb += 2 * math.pi
    arc = R_FAR * np.exp(1j * np.linspace(tb, ta, 64))
    return np.concatenate([a, b[::-1], arc])


def _make_separator(family: str, r0: LandingResult, r1: LandingResult, landing: complex) -> Separator:
    a = _ray_polyline(r0, landing)
    b = _ray_polyline(r1, landing)
    if family == EXP:
        poly = _close_exp(a, b)
        at_inf = (r0.address.symbol(0), r1.address.symbol(0))
    else:
        poly = _close_quad(a, b)
        at_inf = (str(r0.address), str(r1.address))
    return Separator((r0, r1), landing, np.concatenate([a, b[::-1]]), poly, at_inf)


def _segments_cross(p: np.ndarray, q: np.ndarray, exclude: list[complex], radius: float) -> bool:
    """Proper intersection between two polylines, ignoring segments near ``exclude``."""
    def keep(seg_a, seg_b):
        mask = np.ones(seg_a.size, dtype=bool)
        for e in exclude:
            mask &= (np.abs(seg_a - e) > radius) & (np.abs(seg_b - e) > radius)
        return mask

    a0, a1 = p[:-1], p[1:]
    b0, b1 = q[:-1], q[1:]
    ka, kb = keep(a0, a1), keep(b0, b1)
    a0, a1, b0, b1 = a0[ka], a1[ka], b0[kb], b1[kb]
    if a0.size == 0 or b0.size == 0:
        return False

    def orient(u, v, w):
        return np.sign((v.real - u.real) * (w.imag - u.imag) - (v.imag - u.imag) * (w.real - u.real))

    chunk = max(1, 2_000_000 // b0.size)
    for s in range(0, a0.size, chunk):
        u0, u1 = a0[s:s + chunk, None], a1[s:s + chunk, None]
        o1 = orient(u0, u1, b0[None, :])
        o2 = orient(u0, u1, b1[None, :])
        o3 = orient(b0[None, :], b1[None, :], u0)
        o4 = orient(b0[None, :], b1[None, :], u1)
        if np.any((o1 * o2 < 0) & (o3 * o4 < 0)):
            return True
    return False


def region_id(bits) -> str:
    return "R" + "".join("1" if b else "0" for b in bits)


@dataclass
class RegionDecomposition:
    family: str | None
    p: int | None
    M: int | None
    groups: list[RayPairGroup]
    separators: list[Separator]
    region_ids: list[str]
    expected_count: int
    tol_boundary: float = TOL_BOUNDARY
    map: MapSpec | None = None
    parity: dict = field(default_factory=dict, repr=False)

    @property
    def n_regions(self) -> int:
        return len(self.region_ids)

    def locate(self, z: complex) -> str:
        return locate(self, z)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "M": self.M,
            "groups": [g.to_json() for g in self.groups],
            "separators": [s.to_json() for s in self.separators],
            "region_ids": list(self.region_ids),
            "expected_count": self.expected_count,
        }


def basic_regions(groups: list[RayPairGroup], *, m: MapSpec | None = None, p: int | None = None,
                  M: int | None = None, tol_boundary: float = TOL_BOUNDARY,
                  probe_box: Box | None = None) -> RegionDecomposition:
    """Separators from co-landing groups and the canonical ids of the regions they bound.

    A group of two rays gives one separator; ``k >= 3`` rays give the ``k``
    separators between neighbours in the cyclic order at infinity.
    """
    family = m.family if m is not None else (EXP if groups and isinstance(groups[0].rays[0].address, ExternalAddress) else QUAD)
    seps: list[Separator] = []
    for g in groups:
        rays = g.rays
        pairs = [(0, 1)] if len(rays) == 2 else [(i, (i + 1) % len(rays)) for i in range(len(rays))]
        for i, j in pairs:
            seps.append(_make_separator(family, rays[i], rays[j], g.landing_point))
    # rays of different groups must not cross; rays sharing a landing point may touch there
    all_rays = [(g, r) for g in groups for r in g.rays]
    for i in range(len(all_rays)):
        for j in range(i + 1, len(all_rays)):
            (g1, r1), (g2, r2) = all_rays[i], all_rays[j]
            shared = [g1.landing_point]
            if g2 is not g1:
                shared.append(g2.landing_point)
            p1 = _ray_polyline(r1, g1.landing_point)
            p2 = _ray_polyline(r2, g2.landing_point)
            if _segments_cross(p1, p2, shared, 1e-3):
                raise SeparatorCrossingError(str(r1.address), str(r2.address))
    expected = 1 + sum(g.size - 1 for g in groups)
    d = RegionDecomposition(family, p, M, groups, seps, [], expected, tol_boundary, m)
    d.region_ids = _enumerate_regions(d, probe_box)
    return d


def _enumerate_regions(d: RegionDecomposition, probe_box: Box | None) -> list[str]:
    if not d.separators:
        return ["R"]
    probes = []
    for g in d.groups:
        for r in (3e-2, 1e-2, 3e-3):
            probes.append(g.landing_point + r * np.exp(2j * math.pi * (np.arange(720) + 0.5) / 720))
    if d.family == EXP:
        ys = np.linspace(-50, 50, 201)
        probes.append(-1e3 + 1j * ys)
        probes.append(40 + 1j * ys)
    else:
        probes.append(1e3 * np.exp(2j * math.pi * (np.arange(720) + 0.5) / 720))
    if probe_box is not None:
        probes.append(probe_box.grid(120, 120))
    labels = locate_many(d, np.concatenate(probes))
    return sorted({lab for lab in labels if lab != ON_BOUNDARY})


def locate_many(d: RegionDecomposition, zs) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex).ravel()
    if not d.separators:
        return np.full(zs.size, "R", dtype=object)
    bits = np.zeros((len(d.separators), zs.size), dtype=bool)
    near = np.zeros(zs.size, dtype=bool)
    for k, s in enumerate(d.separators):
        # the closure through infinity counts as separator too
        ring = np.append(s.polygon, s.polygon[0])
        near |= kernels.polyline_distance(ring.real, ring.imag, zs.real, zs.imag) <= d.tol_boundary
        bits[k] = kernels.crossing_parity(s.polygon.real, s.polygon.imag, zs.real, zs.imag)
    out = np.empty(zs.size, dtype=object)
    for i in range(zs.size):
        out[i] = ON_BOUNDARY if near[i] else region_id(bits[:, i])
    return out


def locate(d: RegionDecomposition, z: complex) -> str:
    """Region id of ``z``, or ``"on_boundary"`` within ``tol_boundary`` of a separator."""
    return str(locate_many(d, [z])[0])


@dataclass(frozen=True)
class RegionType:
    kind: str  # "polynomial_type" or "transcendental_type"
    hull_radius: float
    confidence_decades: float
    low_confidence: bool

    def to_json(self) -> dict:
        return {"kind": self.kind, "hull_radius": self.hull_radius,
                "confidence_decades": self.confidence_decades, "low_confidence": self.low_confidence}


POLYNOMIAL_TYPE = "polynomial_type"
TRANSCENDENTAL_TYPE = "transcendental_type"


def classify_region_type(d: RegionDecomposition, rid: str, g: TractGeometry | None = None,
                         m: MapSpec | None = None, decades: int = 5, n_probe: int = 401,
                         view: Box | None = None) -> RegionType:
    """Is the part of the region outside the tract bounded?

    Probes the lines ``Re z = -r`` for ``r = 10**k`` plus a grid over the
    central disk, keeping only points outside the tract.  Regions still met at
    the largest scale are transcendental; otherwise the largest modulus met is
    reported as the hull radius, with the number of empty decades as confidence.
    """
    m = m or d.map
    if m is None:
        raise ValueError("classify_region_type needs the map")
    if rid not in d.region_ids:
        raise ValueError(f"unknown region {rid!r}")
    g = g or tract_geometry(m)
    scales = 10.0 ** np.arange(0, decades + 1)
    view = view or (Box(-10, -50, 10, 50) if m.family == EXP else Box(-3, -3, 3, 3))
    ys = np.linspace(view.y0, view.y1, n_probe)
    met_scale = np.zeros(scales.size, dtype=bool)
    hull = 0.0
    for k, r in enumerate(scales):
        pts = np.concatenate([-r + 1j * ys, r * np.exp(2j * math.pi * np.arange(n_probe) / n_probe)])
        pts = pts[~in_tract(m, pts, g)]
        if pts.size == 0:
            continue
        hit = locate_many(d, pts) == rid
        if hit.any():
            met_scale[k] = True
            hull = max(hull, float(np.abs(pts[hit]).max()))
    core_r = g.R + 2.0 if m.family == QUAD else 10.0
    core = Box(-core_r, -core_r, core_r, core_r).grid(161, 161)
    core = core[~in_tract(m, core, g)]
    hit = locate_many(d, core) == rid
    if hit.any():
        hull = max(hull, float(np.abs(core[hit]).max()))
    if met_scale[-1]:
        return RegionType(TRANSCENDENTAL_TYPE, math.inf, float(decades), False)
    last = np.nonzero(met_scale)[0]
    top = scales[last[-1]] if last.size else max(hull, 1.0)
    conf = float(np.log10(scales[-1] / max(top, 1.0)))
    return RegionType(POLYNOMIAL_TYPE, hull, conf, conf < 2)


@dataclass
class RegionEntry:
    region: str
    interior: list[PeriodicPointRecord]
    virtual: list[complex]
    verdict: str

    @property
    def count(self) -> int:
        return len(self.interior) + len(self.virtual)

    def to_json(self) -> dict:
        return {
            "region": self.region,
            "interior": [r.to_json() for r in self.interior],
            "virtual": [[z.real, z.imag] for z in self.virtual],
            "verdict": self.verdict,
        }


@dataclass
class RegionCensus:
    entries: list[RegionEntry]
    visible: list[PeriodicPointRecord]
    invisible: list[PeriodicPointRecord]
    boundary: list[PeriodicPointRecord]
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.verdict == "pass" for e in self.entries)

    @property
    def overfull(self) -> bool:
        return any(e.verdict == "overfull" for e in self.entries)

    def entry(self, rid: str) -> RegionEntry:
        return next(e for e in self.entries if e.region == rid)

    def to_json(self) -> dict:
        return {
            "regions": [e.to_json() for e in self.entries],
            "n_visible": len(self.visible),
            "invisible": [r.to_json() for r in self.invisible],
            "notes": self.notes,
        }


def _virtual_regions(m: MapSpec, d: RegionDecomposition, z0: complex, p: int,
                     radius: float = 1e-3, n_dirs: int = 16, n_iter: int = 200) -> set[str]:
    """Regions near a parabolic point whose probes are pulled toward it under ``f**p``."""
    found = set()
    for k in range(n_dirs):
        w0 = z0 + radius * cmath.exp(2j * math.pi * (k + 0.5) / n_dirs)
        w = iterate(m, w0, p * n_iter)
        if cmath.isfinite(w) and abs(w - z0) < 0.99 * radius:
            lab = locate(d, w0)
            if lab != ON_BOUNDARY:
                found.add(lab)
    return found


def census(m: MapSpec, d: RegionDecomposition, cycles: list[PeriodicPointRecord], box: Box,
           landings: list[LandingResult] = (), *, tol_match: float = TOL_MATCH,
           itinerary_rays: bool = True, trace_config: TraceConfig | None = None,
           virtual_radius: float = 1e-3, virtual_iter: int = 200) -> RegionCensus:
    """Count interior and virtual fixed points of ``f**p`` per basic region.

    A repelling point is visible when some traced ``f**p``-fixed ray lands on it.
    For the exponential family unmatched points are also tried against the ray
    whose address is their own itinerary, which may lie outside the window.
    """
    p = d.p or max((r.period for r in cycles), default=1)
    landed = np.array([r.landing_point for r in landings if r.landing_point is not None], dtype=complex)
    notes = []
    visible, invisible, boundary = [], [], []
    per_region: dict[str, list[PeriodicPointRecord]] = {rid: [] for rid in d.region_ids}
    virtual: dict[str, list[complex]] = {rid: [] for rid in d.region_ids}
    extra_tried = 0
    for rec in cycles:
        if p % rec.period or not box.contains(rec.point):
            continue
        if rec.kind == PARABOLIC:
            for rid in _virtual_regions(m, d, rec.point, p, virtual_radius, n_iter=virtual_iter):
                virtual.setdefault(rid, []).append(rec.point)
            boundary.append(rec)
            continue
        if rec.kind == REPELLING:
            hit = landed.size and np.min(np.abs(landed - rec.point)) < tol_match
            if not hit and itinerary_rays and m.family == EXP:
                addr = ExternalAddress((), itinerary(m, rec.point, rec.period))
                extra_tried += 1
                lr = land_ray(m, addr, trace_config)
                hit = lr.landing_point is not None and abs(lr.landing_point - rec.point) < tol_match
            if hit:
                visible.append(rec)
                continue
            invisible.append(rec)
        lab = locate(d, rec.point)
        if lab == ON_BOUNDARY:
            boundary.append(rec)
            continue
        per_region.setdefault(lab, []).append(rec)
    if extra_tried:
        notes.append(f"{extra_tried} repelling points checked against their itinerary rays beyond the window")
    entries = []
    for rid in sorted(set(per_region) | set(virtual)):
        interior = per_region.get(rid, [])
        virt = virtual.get(rid, [])
        n = len(interior) + len(virt)
        verdict = "pass" if n == 1 else ("overfull" if n > 1 else "empty-within-box")
        entries.append(RegionEntry(rid, interior, virt, verdict))
    return RegionCensus(entries, visible, invisible, boundary, notes)
