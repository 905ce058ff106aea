"""Dynamic rays of ``exp(z) + c`` by pullback, and landing of periodic rays.

A ray with address ``a`` is parametrized by a potential ``t`` with
``f(g_a(t)) = g_{shift a}(exp(t))``.  Far out the ray is close to the line
``t + 2 pi i a_0``, so ``g_a(t)`` is computed by pushing the potential forward
until that approximation is exact to working precision and pulling the seed
back through the logarithm branches ``Log_n(w) = Log(w) + 2 pi i n``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .address import ExternalAddress
from .maps import EXP, MapSpec, iterate_with_derivative
from .periodic import newton_polish

TWO_PI = 2.0 * math.pi

REACHED_T_MIN = "reached_t_min"
NONCONVERGENT = "nonconvergent"
HIT_SINGULAR = "hit_singular_neighborhood"

LANDED = "landed"
PARABOLIC_SLOW = "parabolic_slow"
FAILED = "failed"


@dataclass(frozen=True)
class TraceConfig:
    t_max: float = 20.0
    t_min: float = 1.0
    depth: int = 12
    ratio: float = 0.9
    guard: float = 1e-4
    dps: int = 30

    def __post_init__(self):
        if not self.t_max > self.t_min >= 0:
            raise ValueError("need t_max > t_min >= 0")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if not 0 < self.ratio < 1:
            raise ValueError("grid ratio must lie in (0, 1)")
        if self.guard <= 0 or self.dps < 15:
            raise ValueError("guard must be positive and dps >= 15")


@dataclass(frozen=True)
class LandingConfig:
    tol_cluster: float = 1e-7
    n_consecutive: int = 3
    parabolic_ratio: float = 0.97
    parabolic_window: int = 20
    max_steps: int = 20000
    newton_tol: float = 1e-10
    newton_max_iter: int = 100
    tol_match: float = 1e-5
    guard: float = 1e-4
    # landing path keeps whole pulled-back segments for this many steps
    path_segments: int = 60


@dataclass
class RayTrace:
    address: ExternalAddress
    t: np.ndarray
    z: np.ndarray
    residual: float
    truncation: str
    depth: int
    sample_residuals: np.ndarray = field(default=None, repr=False)

    @property
    def samples(self) -> list[tuple[float, complex]]:
        return list(zip(self.t.tolist(), self.z.tolist()))

    @property
    def endpoint(self) -> complex:
        return complex(self.z[-1])

    def to_json(self) -> dict:
        return {
            "address": str(self.address),
            "residual": float(self.residual),
            "truncation": self.truncation,
            "depth": self.depth,
            "samples": [[float(t), float(z.real), float(z.imag)] for t, z in zip(self.t, self.z)],
        }


@dataclass
class LandingResult:
    address: ExternalAddress
    landing_point: complex | None
    period: int
    polish_residual: float
    status: str
    # far-to-near polyline along the ray, ending near the landing point
    path: np.ndarray = field(default=None, repr=False)
    diagnostics: dict = field(default_factory=dict)
    preperiod: int = 0

    @property
    def ok(self) -> bool:
        return self.status == LANDED

    def to_json(self) -> dict:
        lp = self.landing_point
        return {
            "address": str(self.address),
            "landing_point": None if lp is None else [lp.real, lp.imag],
            "period": self.period,
            "polish_residual": _finite_or_none(self.polish_residual),
            "status": self.status,
            "diagnostics": {k: _jsonable(v) for k, v in self.diagnostics.items()},
        }


def _finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float):
        return _finite_or_none(v)
    return v


def t_grid(t_max: float, t_min: float, ratio: float = 0.9) -> np.ndarray:
    """Geometric grid from ``t_max`` down to ``t_min`` (both included)."""
    n = int(math.floor(math.log(t_min / t_max) / math.log(ratio))) if t_min > 0 else 60
    ts = t_max * ratio ** np.arange(n + 1)
    ts = ts[ts > t_min * (1 + 1e-12)]
    return np.append(ts, t_min)


class _Pullback:
    """Evaluates ``g_a(t)`` in mpmath at a fixed precision."""

    def __init__(self, m: MapSpec, depth: int, dps: int, guard: float):
        self.ctx = mpmath.MPContext()
        self.ctx.dps = dps
        self.c = self.ctx.mpc(m.parameter.real, m.parameter.imag)
        self.depth = depth
        self.guard = guard
        # beyond this potential the seed t + 2 pi i s is exact to working precision
        self.cap = dps * math.log(10) + 10
        self.two_pi_i = self.ctx.mpc(0, 2) * self.ctx.pi

    def levels(self, t, depth):
        ctx = self.ctx
        ts = [ctx.mpf(t)]
        while len(ts) <= depth and ts[-1] <= self.cap:
            ts.append(ctx.exp(ts[-1]))
        return ts

    def value(self, a: ExternalAddress, t, depth=None):
        """``(g_a(t), hit_guard, cauchy_diffs)`` pulled back ``depth`` times."""
        ctx = self.ctx
        depth = self.depth if depth is None else depth
        ts = self.levels(t, depth)
        K = len(ts) - 1
        approx = []
        hit = False
        # approximations seeded at every level; the last is the answer
        for k in range(max(K - 3, 0), K + 1):
            w = ts[k] + self.two_pi_i * a.symbol(k)
            for j in range(k - 1, -1, -1):
                u = w - self.c
                if abs(u) < self.guard:
                    hit = True
                w = ctx.log(u) + self.two_pi_i * a.symbol(j)
            approx.append(w)
        diffs = [float(abs(approx[i + 1] - approx[i])) for i in range(len(approx) - 1)]
        return approx[-1], hit, diffs

    def forward(self, w):
        return self.ctx.exp(w) + self.c


def trace_ray(m: MapSpec, a: ExternalAddress, t_max: float = 20.0, t_min: float = 1.0,
              depth: int = 12, config: TraceConfig | None = None) -> RayTrace:
    """Sample the ray ``G_a`` on a geometric potential grid from ``t_max`` down to ``t_min``."""
    if m.family != EXP:
        raise ValueError("trace_ray handles the exponential family; use polyoracle for quadratics")
    if config is None:
        config = TraceConfig(t_max=t_max, t_min=t_min, depth=depth)
    pb = _Pullback(m, config.depth, config.dps, config.guard)
    sa = a.shift()
    ts = t_grid(config.t_max, config.t_min, config.ratio)
    out_t, out_z, res = [], [], []
    truncation = REACHED_T_MIN
    for t in ts:
        w, hit, diffs = pb.value(a, t)
        if hit:
            truncation = HIT_SINGULAR
            break
        # Cauchy test on successive depth refinements
        if len(diffs) >= 2 and diffs[-1] > diffs[-2] and diffs[-1] > 1e-12:
            truncation = NONCONVERGENT
            break
        target, _, _ = pb.value(sa, pb.ctx.exp(pb.ctx.mpf(t)))
        res.append(float(abs(pb.forward(w) - target)))
        out_t.append(float(t))
        out_z.append(complex(w))
    if not out_t:
        # keep the invariant that traces are nonempty: report the far seed
        out_t = [float(ts[0])]
        out_z = [complex(ts[0], TWO_PI * a.symbol(0))]
        res = [math.inf]
    return RayTrace(
        address=a,
        t=np.array(out_t),
        z=np.array(out_z, dtype=complex),
        residual=max(res),
        truncation=truncation,
        depth=config.depth,
        sample_residuals=np.array(res),
    )


def inverse_branch(c: complex, n: int, w):
    """``Log_n(w - c)``: the inverse of ``exp(z) + c`` onto strip ``n``; vectorized."""
    return np.log(np.asarray(w, dtype=complex) - c) + 1j * TWO_PI * n


def _cycle_pullback(c: complex, block: tuple[int, ...], w, guard: float):
    """Apply ``L_{b0} o ... o L_{b_{p-1}}``; returns ``(w, hit_guard)``."""
    w = np.asarray(w, dtype=complex)
    hit = False
    for s in reversed(block):
        if np.any(np.abs(w - c) < guard):
            hit = True
        w = np.log(w - c) + 1j * TWO_PI * s
    return w, hit


def settle(step, z0: complex, cfg: LandingConfig, segment=None):
    """Iterate a contracting map until the displacements cluster.

    ``step(w) -> (w', hit_guard)`` must accept arrays.  Returns a dict with the
    outcome ``kind`` in {"candidate", "parabolic", "guard", "stalled"}, the last
    point, displacement history summary and the polyline of pulled-back segments.
    """
    z = complex(z0)
    seg = np.array([z] if segment is None else segment, dtype=complex)
    path = [seg]
    disp = []
    small = 0
    kind = "stalled"
    for k in range(cfg.max_steps):
        if k < cfg.path_segments:
            seg, hit = step(seg)
            z_new = complex(seg[-1])
            path.append(seg)
        else:
            w, hit = step(np.array([z]))
            z_new = complex(w[0])
            if k % 8 == 0:
                path.append(w)
        if hit or not cmath.isfinite(z_new):
            kind = "guard"
            break
        d = abs(z_new - z)
        disp.append(d)
        z = z_new
        small = small + 1 if d < cfg.tol_cluster else 0
        if small >= cfg.n_consecutive:
            kind = "candidate"
            break
        W = cfg.parabolic_window
        if len(disp) > W + 1 and d > cfg.tol_cluster:
            r = np.array(disp[-W - 1:])
            ratios = r[1:] / r[:-1]
            # subgeometric decay: ratios near 1 and still creeping upward
            if ratios.min() >= cfg.parabolic_ratio and ratios[-1] > ratios[0] + 1e-4 and ratios.max() < 1.0:
                kind = "parabolic"
                break
    if path[-1].size == 0 or complex(path[-1][-1]) != z:
        path.append(np.array([z]))
    ratio = disp[-1] / disp[-2] if len(disp) >= 2 and disp[-2] > 0 else math.nan
    return {
        "kind": kind,
        "point": z,
        "steps": len(disp),
        "last_displacement": disp[-1] if disp else math.nan,
        "decay_ratio": ratio,
        "path": np.concatenate(path),
    }


def conclude_landing(m: MapSpec, a, p: int, settled: dict, cfg: LandingConfig,
                     prefix: np.ndarray | None = None, preperiod: int = 0) -> LandingResult:
    """Turn a ``settle`` outcome into a LandingResult, polishing by Newton."""
    kind = settled["kind"]
    diag = {k: settled[k] for k in ("steps", "last_displacement", "decay_ratio")}
    diag["endpoint"] = settled["point"]
    diag["outcome"] = kind
    path = settled["path"]
    if prefix is not None:
        path = np.concatenate([prefix, path])
    if kind not in ("candidate", "parabolic"):
        return LandingResult(a, None, p, math.inf, FAILED, path, diag, preperiod)
    cand = settled["point"]
    root, res = newton_polish(m, cand, p, cfg.newton_max_iter)
    diag["newton_shift"] = abs(root - cand)
    if not (res < cfg.newton_tol and cmath.isfinite(root)):
        diag["outcome"] = kind + "_newton_failed"
        return LandingResult(a, None, p, res, FAILED, path, diag, preperiod)
    _, mult = iterate_with_derivative(m, root, p)
    diag["multiplier_abs"] = abs(mult)
    if kind == "parabolic":
        # the candidate is still far from a parabolic point; Newton locates it
        return LandingResult(a, root, p, res, PARABOLIC_SLOW, np.append(path, root), diag, preperiod)
    if abs(root - cand) >= cfg.tol_match:
        diag["outcome"] = "newton_moved"
        return LandingResult(a, None, p, res, FAILED, path, diag, preperiod)
    return LandingResult(a, root, p, res, LANDED, np.append(path, root), diag, preperiod)


def land_ray(m: MapSpec, a: ExternalAddress, trace_config: TraceConfig | None = None,
             landing_config: LandingConfig | None = None, trace: RayTrace | None = None) -> LandingResult:
    """Follow the periodic ray ``a`` toward potential 0 and certify its landing point."""
    if not a.is_periodic:
        raise ValueError("land_ray needs a purely periodic address")
    tc = trace_config or TraceConfig()
    lc = landing_config or LandingConfig(guard=tc.guard)
    if trace is None:
        trace = trace_ray(m, a, config=tc)
    p = a.period_length
    if trace.truncation != REACHED_T_MIN:
        diag = {"outcome": "trace_" + trace.truncation, "endpoint": trace.endpoint}
        return LandingResult(a, None, p, math.inf, FAILED, trace.z, diag)
    c = m.parameter
    block = a.period
    # one fundamental segment of the ray: from z_end out to f**p(z_end)
    t_hi = _forward_potential(trace.t[-1], p)
    seg = trace.z[trace.t <= t_hi]
    settled = settle(lambda w: _cycle_pullback(c, block, w, lc.guard), trace.endpoint, lc, seg)
    return conclude_landing(m, a, p, settled, lc, prefix=trace.z)


def _forward_potential(t: float, p: int) -> float:
    for _ in range(p):
        if t > 700:
            return math.inf
        t = math.exp(t)
    return t
