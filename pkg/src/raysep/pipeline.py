"""The full verification run behind ``raysep verify``."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, kernels
from .maps import EXP, Box, MapSpec
from .periodic import IRRATIONAL, REPELLING, estimate_siegel_boundary, find_periodic_points
from .polyoracle import land_quadratic_ray, periodic_angles
from .rays import LandingConfig, TraceConfig
from .regions import basic_regions, build_gamma, census, classify_region_type, group_landings
from .singular import ACCUMULATION_THRESHOLD, fatou_shishikura_report, verify_trapping

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class RunConfig:
    map: str
    p: int = 1
    q: int | None = None
    M: int = 2
    box: str | None = None
    P: int = 3
    iters: int = 10_000
    t_max: float = 20.0
    t_min: float = 1.0
    depth: int = 12
    tol_match: float = 1e-5
    tol_boundary: float = 1e-6
    tol_cluster: float = 1e-7
    accumulation_threshold: float = ACCUMULATION_THRESHOLD
    siegel_rays: int = 64
    deterministic: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.p < 1 or self.P < 1 or self.M < 0 or self.iters < 1:
            raise ValueError("need p >= 1, P >= 1, M >= 0 and iters >= 1")
        if self.q is not None and self.q < 1:
            raise ValueError("q must be >= 1")
        for name in ("tol_match", "tol_boundary", "tol_cluster", "accumulation_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def map_spec(self) -> MapSpec:
        return MapSpec.parse(self.map)

    @property
    def search_box(self) -> Box:
        if self.box is not None:
            return Box.parse(self.box)
        return Box(-4, -8, 4, 8) if self.map_spec.family == EXP else Box(-2, -2, 2, 2)

    def effective(self) -> dict:
        out = asdict(self)
        out["box"] = str(self.search_box)
        out.pop("extra")
        out.pop("deterministic")
        return out


def clean_json(obj):
    """Recursively replace non-finite floats and numpy scalars with JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): clean_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean_json(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [clean_json(obj.real), clean_json(obj.imag)]
    return obj


def verify(cfg: RunConfig) -> dict:
    """Cycles, Gamma_p, regions, census, trapping and the cycle count in one report."""
    m = cfg.map_spec
    box = cfg.search_box
    p = cfg.p
    notes = []

    if m.family == EXP:
        tc = TraceConfig(t_max=cfg.t_max, t_min=cfg.t_min, depth=cfg.depth)
        lc = LandingConfig(tol_cluster=cfg.tol_cluster, tol_match=cfg.tol_match)
        gamma = build_gamma(m, p, cfg.M, tc, lc, cfg.tol_match)
        landings, groups, failures = gamma.landings, gamma.groups, gamma.failures
    else:
        tc = None
        lc = LandingConfig(tol_cluster=cfg.tol_cluster, tol_match=cfg.tol_match)
        results = [land_quadratic_ray(m.parameter, a, landing=lc) for a in periodic_angles(p)]
        landings = [r for r in results if r.landing_point is not None]
        failures = [r for r in results if r.landing_point is None]
        groups = group_landings(landings, cfg.tol_match)
    if failures:
        notes.append(f"{len(failures)} rays failed to land and were left out of Gamma_p")

    d = basic_regions(groups, m=m, p=p, M=cfg.M if m.family == EXP else None,
                      tol_boundary=cfg.tol_boundary, probe_box=box)
    records = find_periodic_points(m, p, box)
    cen = census(m, d, records, box, landings, tol_match=cfg.tol_match, trace_config=tc)
    types = {rid: classify_region_type(d, rid) for rid in d.region_ids}

    fs = fatou_shishikura_report(m, cfg.P, box, N=cfg.iters, trapping=False)
    trap = None
    siegel = None
    trap_status = INCONCLUSIVE
    if fs.non_repelling:
        target = fs.non_repelling[0]
        q = cfg.q or target.period
        if p % q:
            notes.append(f"trapping skipped: p={p} is not a multiple of the cycle period q={q}")
        else:
            if target.classification.kind == IRRATIONAL:
                siegel = estimate_siegel_boundary(m, target.points[0], target.period, n_rays=cfg.siegel_rays)
                if siegel.no_disk_detected:
                    notes.append("no linearization disk detected: Cremer-like behaviour, targeting the point")
                    siegel = None
                else:
                    for rec in records:
                        if abs(rec.point - target.points[0]) < 1e-6:
                            rec.siegel_candidate = True
            traced = [r.landing_point for r in landings
                      if r.landing_point is not None and r.diagnostics.get("multiplier_abs", 2.0) > 1]
            trap = verify_trapping(m, target, q, p, d, cfg.iters, siegel=siegel,
                                   other_cycles=fs.non_repelling[1:], invisible=cen.invisible,
                                   landing_points=traced, threshold=cfg.accumulation_threshold)
            if trap.passed:
                trap_status = PASS
            elif not trap.pattern_ok or trap.escaped_at is not None:
                trap_status = FAIL
            elif trap.avoidance_distance < trap.threshold:
                trap_status = FAIL
            else:
                trap_status = INCONCLUSIVE
            for rep in fs.non_repelling[:1]:
                fs.assignment.append({"cycle": rep.to_json(), "accumulation": trap.accumulation_distance,
                                      "accumulates": trap.accumulation_distance < trap.threshold})
    else:
        q = cfg.q
        notes.append("no non-repelling cycle found; trapping not applicable")
        trap_status = PASS if fs.verdict == PASS else FAIL

    if cen.overfull or fs.verdict == FAIL or trap_status == FAIL:
        verdict = FAIL
    elif cen.passed and trap_status == PASS and not failures:
        verdict = PASS
    else:
        verdict = INCONCLUSIVE

    report = {
        "tool": "raysep",
        "version": __version__,
        "backend": kernels.BACKEND,
        "config": cfg.effective(),
        "map": str(m),
        "p": p,
        "q": q,
        "window": {"M": cfg.M if m.family == EXP else None, "box": box.as_list(), "P": cfg.P},
        "gamma": {
            "groups": [g.to_json() for g in groups],
            "failures": [{"address": str(f.address), "outcome": f.diagnostics.get("outcome")} for f in failures],
            "n_rays": len(landings) + len(failures),
        },
        "regions": {
            "ids": d.region_ids,
            "expected_count": d.expected_count,
            "types": {k: v.to_json() for k, v in types.items()},
        },
        "census": [e.to_json() for e in cen.entries],
        "census_notes": cen.notes,
        "cycles": [r.to_json() for r in records if r.kind != REPELLING],
        "siegel": None if siegel is None else siegel.to_json(),
        "trapping": None if trap is None else trap.to_json(),
        "fs": {
            "cycles_found": len(fs.cycles),
            "non_repelling": [c.to_json() for c in fs.non_repelling],
            "singular_count": fs.singular_count,
            "verdict": fs.verdict,
            "assignment": fs.assignment,
        },
        "verdicts": {"census": PASS if cen.passed else (FAIL if cen.overfull else INCONCLUSIVE),
                     "trapping": trap_status, "fs": fs.verdict},
        "verdict": verdict,
        "notes": notes,
    }
    return clean_json(report)
