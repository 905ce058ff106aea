"""Singular orbits against the region decomposition: trapping and the cycle count."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .maps import Box, MapSpec, orbit, singular_values
from .periodic import (
    IRRATIONAL,
    Cycle,
    PeriodicPointRecord,
    SiegelEstimate,
    classify,
    cycle_points,
    estimate_siegel_boundary,
    find_periodic_points,
    group_cycles,
    multiplier,
)
from .regions import ESCAPED, ON_BOUNDARY, RegionDecomposition, basic_regions, locate_many

ACCUMULATION_THRESHOLD = 1e-2
AVOIDANCE_FACTOR = 10.0


@dataclass
class OrbitTrace:
    start: complex
    points: np.ndarray
    region_labels: list[str]
    escaped_at: int | None

    @property
    def n_boundary(self) -> int:
        return sum(1 for lab in self.region_labels if lab == ON_BOUNDARY)

    def to_json(self, max_labels: int = 64) -> dict:
        return {
            "start": [self.start.real, self.start.imag],
            "n_points": int(self.points.size),
            "escaped_at": self.escaped_at,
            "n_boundary": self.n_boundary,
            "labels_head": self.region_labels[:max_labels],
        }


def trace_singular_orbit(m: MapSpec, d: RegionDecomposition, N: int, value: complex | None = None) -> OrbitTrace:
    """Orbit of the singular value (both families have exactly one), labeled by region."""
    v = singular_values(m)[0].value if value is None else complex(value)
    orb = orbit(m, v, N)
    labels = list(locate_many(d, orb.points)) if orb.points.size else []
    if orb.escaped_at is not None:
        labels.append(ESCAPED)
    return OrbitTrace(v, orb.points, labels, orb.escaped_at)


def _tail(points: np.ndarray, N: int) -> np.ndarray:
    return points[N // 2:N]


def _min_dist(tail: np.ndarray, targets: np.ndarray) -> float:
    if tail.size == 0 or targets.size == 0:
        return math.inf
    best = math.inf
    for s in range(0, tail.size, 4096):
        best = min(best, float(np.abs(tail[s:s + 4096, None] - targets[None, :]).min()))
    return best


@dataclass
class TrappingReport:
    cycle: list[complex]
    cycle_class: str
    q: int
    p: int
    pattern_ok: bool
    regions: list[str]
    accumulation: list[dict]
    avoidance: list[dict]
    improves: bool
    threshold: float
    escaped_at: int | None
    n_boundary: int
    notes: list[str] = field(default_factory=list)

    @property
    def accumulation_distance(self) -> float:
        return min((a["distance"] for a in self.accumulation), default=math.inf)

    @property
    def avoidance_distance(self) -> float:
        return min((a["distance"] for a in self.avoidance), default=math.inf)

    @property
    def passed(self) -> bool:
        return (self.pattern_ok and self.escaped_at is None and self.improves
                and self.accumulation_distance < self.threshold
                and self.avoidance_distance > AVOIDANCE_FACTOR * self.threshold)

    def to_json(self) -> dict:
        return {
            "cycle": [[z.real, z.imag] for z in self.cycle],
            "class": self.cycle_class,
            "q": self.q,
            "p": self.p,
            "pattern_ok": self.pattern_ok,
            "regions": self.regions,
            "accumulation": self.accumulation,
            "avoidance": self.avoidance,
            "improves": self.improves,
            "threshold": self.threshold,
            "escaped_at": self.escaped_at,
            "n_boundary": self.n_boundary,
            "passed": self.passed,
            "notes": self.notes,
        }


def verify_trapping(m: MapSpec, cycle, q: int, p: int, d: RegionDecomposition, N: int = 10_000, *,
                    siegel: SiegelEstimate | None = None, other_cycles=(), invisible=(),
                    landing_points=(), threshold: float = ACCUMULATION_THRESHOLD) -> TrappingReport:
    """Check that the singular orbit follows the regions of a non-repelling cycle and accumulates on it.

    ``cycle`` is a Cycle, a PeriodicPointRecord or a representative point.
    Accumulation is measured on the second half of the orbit, at ``N`` and
    ``2N`` iterates; with ``siegel`` given, the target is its boundary cloud.
    """
    if q < 1 or p % q:
        raise ValueError(f"p={p} must be a positive multiple of q={q}")
    if isinstance(cycle, Cycle):
        pts = list(cycle.points)
    elif isinstance(cycle, PeriodicPointRecord):
        pts = cycle_points(m, cycle.point, q)
    else:
        pts = cycle_points(m, complex(cycle), q)
    mu = multiplier(m, pts[0], q)
    cls = classify(mu)
    if not cls.non_repelling:
        raise ValueError("verify_trapping needs a non-repelling cycle")
    notes = []
    tr = trace_singular_orbit(m, d, 2 * N)
    labels = tr.region_labels
    # relabel so that the singular value sits in B_0
    B: list[str | None] = [None] * q
    pattern_ok = tr.escaped_at is None
    for n, lab in enumerate(labels[:N]):
        if lab == ON_BOUNDARY:
            continue
        if lab == ESCAPED:
            pattern_ok = False
            break
        i = n % q
        if B[i] is None:
            B[i] = lab
        elif B[i] != lab:
            pattern_ok = False
            break
    if labels and labels[0] == ON_BOUNDARY:
        notes.append("singular value lies on a separator; B_0 taken from later iterates")
    cycle_regions = sorted(set(locate_many(d, np.array(pts))))
    if pattern_ok and not set(cycle_regions) <= set(b for b in B if b is not None) | {ON_BOUNDARY}:
        notes.append("cycle points lie outside the regions visited by the singular orbit")
    if siegel is not None and cls.kind == IRRATIONAL:
        targets = [("siegel_boundary", siegel.cloud)]
    else:
        if siegel is not None:
            notes.append("Siegel estimate ignored: cycle is not irrationally indifferent")
        targets = [(f"cycle_point_{j}", np.array([z])) for j, z in enumerate(pts)]
    accumulation = []
    improves = True
    for name, tgt in targets:
        dN = _min_dist(_tail(tr.points, N), tgt)
        d2N = _min_dist(_tail(tr.points, 2 * N), tgt)
        accumulation.append({"target": name, "distance": dN, "distance_2N": d2N, "improves": d2N <= dN})
        improves &= d2N <= dN
    if siegel is not None and cls.kind == IRRATIONAL and siegel.cloud.size:
        tail = _tail(tr.points, N)
        cover = max(float(np.abs(tail - z).min()) for z in siegel.cloud) if tail.size else math.inf
        accumulation[0]["coverage"] = cover
    tail = _tail(tr.points, N)
    avoidance = []
    for kind, group in (("cycle", other_cycles), ("invisible", invisible), ("landing_point", landing_points)):
        for obj in group:
            zs = obj.points if isinstance(obj, Cycle) else [getattr(obj, "point", obj)]
            for z in zs:
                z = complex(z)
                if min(abs(z - w) for w in pts) < 1e-6:
                    continue
                avoidance.append({"kind": kind, "point": [z.real, z.imag],
                                  "distance": _min_dist(tail, np.array([z]))})
    return TrappingReport(
        cycle=pts, cycle_class=cls.label(), q=q, p=p, pattern_ok=pattern_ok,
        regions=[b if b is not None else "" for b in B], accumulation=accumulation,
        avoidance=avoidance, improves=improves, threshold=threshold,
        escaped_at=tr.escaped_at, n_boundary=tr.n_boundary, notes=notes,
    )


@dataclass
class FSReport:
    cycles: list[Cycle]
    non_repelling: list[Cycle]
    singular_count: int
    verdict: str
    assignment: list[dict]
    P: int
    notes: list[str] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.non_repelling)

    def to_json(self) -> dict:
        return {
            "P": self.P,
            "cycles_found": len(self.cycles),
            "non_repelling": [c.to_json() for c in self.non_repelling],
            "singular_count": self.singular_count,
            "verdict": self.verdict,
            "assignment": self.assignment,
            "notes": self.notes,
        }


def fatou_shishikura_report(m: MapSpec, P: int, box: Box, M: int | None = None, *, N: int = 10_000,
                            d: RegionDecomposition | None = None, grid=None,
                            siegel_kwargs: dict | None = None, trapping: bool = True) -> FSReport:
    """Count non-repelling cycles of period at most ``P`` in ``box`` against the singular values.

    With one singular value at most one non-repelling cycle may exist.  Each
    one found is matched to the singular orbit through ``verify_trapping``.
    """
    records = []
    for p in range(1, P + 1):
        records += find_periodic_points(m, p, box, grid)
    cycles = group_cycles(m, records)
    nonrep = [c for c in cycles if c.non_repelling]
    n_sing = len(singular_values(m))
    notes = []
    if len(nonrep) <= n_sing:
        verdict = "pass"
    else:
        verdict = "fail"
        notes.append("more non-repelling cycles than singular values: a numerical artifact or a bug, "
                     "since the bound is a theorem; inspect multipliers near the indifference shell")
    assignment = []
    if trapping:
        d = d if d is not None else basic_regions([], m=m)
        for cyc in nonrep:
            siegel = None
            if cyc.classification.kind == IRRATIONAL:
                siegel = estimate_siegel_boundary(m, cyc.points[0], cyc.period, **(siegel_kwargs or {}))
                if siegel.no_disk_detected:
                    siegel = None
            rep = verify_trapping(m, cyc, cyc.period, cyc.period if d.p is None else _lcm(d.p, cyc.period),
                                  d, N, siegel=siegel)
            assignment.append({
                "singular_value": [singular_values(m)[0].value.real, singular_values(m)[0].value.imag],
                "cycle": cyc.to_json(),
                "accumulation": rep.accumulation_distance,
                "accumulates": rep.accumulation_distance < rep.threshold,
            })
    return FSReport(cycles, nonrep, n_sing, verdict, assignment, P, notes)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)
