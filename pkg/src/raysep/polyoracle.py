"""External rays of ``z**2 + c`` by inverse iteration, and the classical cross-check.

The quadratic family runs through the same grouping, region, census and
trapping code as the exponential family, against facts known in closed form.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .maps import Box, orbit, quadratic
from .periodic import IRRATIONAL, estimate_siegel_boundary, find_periodic_points, group_cycles
from .rays import FAILED, LandingConfig, LandingResult, RayTrace, conclude_landing
from .regions import (
    RegionDecomposition,
    basic_regions,
    census,
    classify_region_type,
    group_landings,
)
from .singular import verify_trapping

BRANCH_AMBIGUOUS = "branch_ambiguity"
AMBIGUITY_RATIO = 1.5


@dataclass(frozen=True, order=True)
class ExternalAngle:
    """Rational angle in turns, ``0 <= value < 1``."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value) % 1)

    @classmethod
    def parse(cls, text: str) -> ExternalAngle:
        try:
            return cls(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"malformed angle {text!r}; expected q/r") from None

    def __str__(self):
        return f"{self.value.numerator}/{self.value.denominator}"

    def double(self) -> ExternalAngle:
        return ExternalAngle(2 * self.value)

    def orbit(self) -> tuple[list[ExternalAngle], int]:
        """Doubling orbit until it repeats; returns ``(angles, preperiod)``."""
        seen: dict[Fraction, int] = {}
        out = []
        a = self
        while a.value not in seen:
            seen[a.value] = len(out)
            out.append(a)
            a = a.double()
        return out, seen[a.value]

    @property
    def preperiod(self) -> int:
        return self.orbit()[1]

    @property
    def period(self) -> int:
        angles, pre = self.orbit()
        return len(angles) - pre

    @property
    def is_periodic(self) -> bool:
        return self.preperiod == 0


def periodic_angles(p: int) -> list[ExternalAngle]:
    """Angles fixed by ``p``-fold doubling: ``k / (2**p - 1)``."""
    n = 2 ** p - 1
    return [ExternalAngle(Fraction(k, n)) for k in range(n)]


@dataclass(frozen=True)
class QuadRayConfig:
    R: float = 1e4
    depth: int = 60
    sublevels: int = 8
    max_cycles: int = 4000


class _RayFamily:
    """Level-by-level inverse iteration for every angle on a doubling orbit.

    Level ``m`` sits at Green potential ``log(R) * 2**(-m / S)``; the point of
    angle ``a`` at level ``m`` is the square-root preimage of the point of
    ``2a`` at level ``m - S``, taking the root nearest the level ``m - 1`` point.
    """

    def __init__(self, c: complex, angle: ExternalAngle, cfg: QuadRayConfig):
        self.c = complex(c)
        self.cfg = cfg
        self.angles, self.pre = angle.orbit()
        n = len(self.angles)
        self.succ = [j + 1 if j + 1 < n else self.pre for j in range(n)]
        self.phase = np.array([cmath.exp(2j * math.pi * float(a.value)) for a in self.angles])
        self.levels = [[] for _ in range(n)]
        self.min_separation = math.inf
        self.u0 = math.log(cfg.R)

    def potential(self, m: int) -> float:
        return self.u0 * 2.0 ** (-m / self.cfg.sublevels)

    def _far(self, j: int, m: int) -> complex:
        # inverse Boettcher map to first order: w - c / (2 w)
        w = math.exp(self.potential(m)) * self.phase[j]
        return w - self.c / (2 * w)

    def advance(self):
        S = self.cfg.sublevels
        m = len(self.levels[0])
        new = []
        for j in range(len(self.angles)):
            k = self.succ[j]
            src = self.levels[k][m - S] if m >= S else self._far(k, m - S)
            s = cmath.sqrt(src - self.c)
            prev = self.levels[j][m - 1] if m > 0 else self._far(j, m)
            d1, d2 = abs(s - prev), abs(-s - prev)
            pick = s if d1 <= d2 else -s
            # the two roots are antipodal; near-equal distances mean no clear branch
            if min(d1, d2) > 0:
                self.min_separation = min(self.min_separation, max(d1, d2) / min(d1, d2))
            new.append(pick)
        for j, z in enumerate(new):
            self.levels[j].append(z)

    def run(self, n_levels: int):
        for _ in range(n_levels):
            self.advance()

    def trace(self, j: int = 0) -> RayTrace:
        z = np.array(self.levels[j], dtype=complex)
        t = np.array([self.potential(m) for m in range(z.size)])
        S = self.cfg.sublevels
        k = self.succ[j]
        res = 0.0
        for m in range(S, z.size):
            res = max(res, abs(z[m] * z[m] + self.c - self.levels[k][m - S]))
        trunc = BRANCH_AMBIGUOUS if self.min_separation < AMBIGUITY_RATIO else "reached_t_min"
        return RayTrace(self.angles[j], t, z, res, trunc, self.cfg.depth)


def external_ray_quadratic(c: complex, angle: ExternalAngle, depth: int = 60, n_steps: int = 8,
                           R: float = 1e4) -> RayTrace:
    """Ray of ``angle`` for ``z**2 + c`` from potential ``log R`` down ``depth`` halvings."""
    if abs(c) > 2:
        raise ValueError("parameter outside |c| <= 2")
    cfg = QuadRayConfig(R=R, depth=depth, sublevels=n_steps)
    fam = _RayFamily(c, angle, cfg)
    fam.run(depth * n_steps)
    return fam.trace(0)


def land_quadratic_ray(c: complex, angle: ExternalAngle, cfg: QuadRayConfig | None = None,
                       landing: LandingConfig | None = None) -> LandingResult:
    """Land a rational ray: periodic angles directly, preperiodic ones through their periodic image."""
    cfg = cfg or QuadRayConfig()
    lc = landing or LandingConfig()
    m = quadratic(c)
    fam = _RayFamily(c, angle, cfg)
    S = cfg.sublevels
    fam.run(cfg.depth * S)
    q = len(fam.angles) - fam.pre
    j_cyc = fam.pre
    block = q * S
    disp = []
    kind = "stalled"
    small = 0
    for _ in range(cfg.max_cycles):
        pts = fam.levels[j_cyc]
        d = abs(pts[-1] - pts[-1 - block])
        disp.append(d)
        small = small + 1 if d < lc.tol_cluster else 0
        if small >= lc.n_consecutive:
            kind = "candidate"
            break
        W = lc.parabolic_window
        if len(disp) > W + 1 and d > lc.tol_cluster:
            r = np.array(disp[-W - 1:])
            ratios = r[1:] / r[:-1]
            if ratios.min() >= lc.parabolic_ratio and ratios[-1] > ratios[0] + 1e-4 and ratios.max() < 1.0:
                kind = "parabolic"
                break
        fam.run(block)
    if fam.min_separation < AMBIGUITY_RATIO:
        kind = "guard"
    settled = {
        "kind": kind,
        "point": fam.levels[j_cyc][-1],
        "steps": len(disp),
        "last_displacement": disp[-1] if disp else math.nan,
        "decay_ratio": disp[-1] / disp[-2] if len(disp) > 1 and disp[-2] > 0 else math.nan,
        "path": np.array(fam.levels[j_cyc], dtype=complex),
    }
    res = conclude_landing(m, fam.angles[j_cyc], q, settled, lc)
    if fam.pre == 0 or res.landing_point is None:
        res.address = angle
        res.preperiod = fam.pre
        if fam.pre:
            res.status = FAILED
        return res
    # pull the periodic landing point back along the preperiodic chain
    z = res.landing_point
    for j in range(fam.pre - 1, -1, -1):
        s = cmath.sqrt(z - c)
        last = fam.levels[j][-1]
        z = s if abs(s - last) <= abs(-s - last) else -s
    path = np.append(np.array(fam.levels[0], dtype=complex), z)
    diag = dict(res.diagnostics)
    diag["periodic_image"] = str(fam.angles[j_cyc])
    return LandingResult(angle, z, q, res.polish_residual, res.status, path, diag, fam.pre)


def bottcher_angle(c: complex, z: complex, escape: float = 1e8, max_iter: int = 200) -> float | None:
    """External angle of an escaping point, in turns; None if ``z`` does not escape.

    Iterates to large modulus, then halves the angle back, picking at each
    step the candidate nearest to ``arg z_n``.
    """
    pts = [complex(z)]
    for _ in range(max_iter):
        if abs(pts[-1]) > escape:
            break
        pts.append(pts[-1] * pts[-1] + c)
    else:
        return None
    theta = (cmath.phase(pts[-1]) / (2 * math.pi)) % 1.0
    for w in reversed(pts[:-1]):
        target = (cmath.phase(w) / (2 * math.pi)) % 1.0
        cands = (theta / 2, theta / 2 + 0.5)
        theta = min(cands, key=lambda a: min(abs(a - target), 1 - abs(a - target)))
    return theta


def sector_oracle(groups, theta: float) -> tuple:
    """Side vector of an external angle against each co-landing pair, by angle intervals.

    For the pair ``(a, b)`` with ``a < b`` the bit says whether ``a < theta < b``.
    Side vectors agree for two angles exactly when they lie in the same sectors.
    """
    bits = []
    for g in groups:
        angs = [float(r.address.value) for r in g.rays]
        pairs = [(0, 1)] if len(angs) == 2 else [(i, (i + 1) % len(angs)) for i in range(len(angs))]
        for i, j in pairs:
            a, b = sorted((angs[i], angs[j]))
            bits.append(a < theta < b)
    return tuple(bits)


class DisconnectedJuliaError(ValueError):
    pass


@dataclass
class GMReport:
    c: complex
    p: int
    landings: list[LandingResult]
    decomposition: RegionDecomposition
    census: object
    region_types: dict
    trapping: object | None
    siegel: object | None
    verdict: str
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "map": str(quadratic(self.c)),
            "p": self.p,
            "gamma": {"groups": [g.to_json() for g in self.decomposition.groups],
                      "failures": [str(r.address) for r in self.landings if r.landing_point is None]},
            "regions": self.decomposition.region_ids,
            "region_types": {k: v.to_json() for k, v in self.region_types.items()},
            "census": self.census.to_json(),
            "trapping": None if self.trapping is None else self.trapping.to_json(),
            "verdict": self.verdict,
            "notes": self.notes,
        }


def gm_cross_check(c: complex, p: int, box: Box | None = None, N: int = 10_000,
                   siegel_kwargs: dict | None = None) -> GMReport:
    """Run the shared pipeline on ``z**2 + c`` with all ``p``-periodic angles."""
    m = quadratic(c)
    orb = orbit(m, c, N, escape_radius=2.0)
    if orb.escaped_at is not None:
        raise DisconnectedJuliaError(
            f"critical orbit of c={c} leaves |z| <= 2 at iterate {orb.escaped_at}: the Julia set is disconnected")
    box = box or Box(-2, -2, 2, 2)
    landings = [land_quadratic_ray(c, a) for a in periodic_angles(p)]
    groups = group_landings(landings)
    d = basic_regions(groups, m=m, p=p, probe_box=box)
    records = find_periodic_points(m, p, box)
    cen = census(m, d, records, box, landings)
    types = {rid: classify_region_type(d, rid) for rid in d.region_ids}
    notes = []
    cycles = group_cycles(m, records)
    nonrep = [cy for cy in cycles if cy.non_repelling]
    trap, siegel = None, None
    if nonrep:
        target = nonrep[0]
        if target.classification.kind == IRRATIONAL:
            siegel = estimate_siegel_boundary(m, target.points[0], target.period, **(siegel_kwargs or {}))
            if not siegel.no_disk_detected:
                for rec in records:
                    if abs(rec.point - target.points[0]) < 1e-6:
                        rec.siegel_candidate = True
            else:
                siegel = None
        others = [cy for cy in nonrep[1:]]
        trap = verify_trapping(m, target, target.period, p, d, N, siegel=siegel,
                               other_cycles=others, invisible=cen.invisible,
                               landing_points=[r.landing_point for r in landings if r.landing_point is not None])
    else:
        notes.append("no non-repelling cycle of period dividing p in the box")
    ok = cen.passed and len(d.region_ids) == d.expected_count and (trap is None or trap.passed)
    return GMReport(complex(c), p, landings, d, cen, types, trap, siegel, "pass" if ok else "fail", notes)


def alpha_fixed_point(c: complex) -> complex:
    return (1 - cmath.sqrt(1 - 4 * complex(c))) / 2


def beta_fixed_point(c: complex) -> complex:
    return (1 + cmath.sqrt(1 - 4 * complex(c))) / 2
