"""Map families, evaluation, orbits and tract geometry.

Two families ship: the exponential family ``E_c(z) = exp(z) + c`` and the
quadratic family ``Q_c(z) = z**2 + c`` used as a classical cross-check.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels

EXP = "exp"
QUAD = "quad"
FAMILIES = (EXP, QUAD)

# returned by evaluate/deriv instead of overflowing
ESCAPED = complex(math.inf, 0.0)

EXP_OVERFLOW = 700.0
_QUAD_OVERFLOW = 1e150


@dataclass(frozen=True)
class MapSpec:
    family: str
    parameter: complex

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "parameter", complex(self.parameter))

    @classmethod
    def parse(cls, text: str) -> MapSpec:
        """Parse ``"exp:re,im"`` or ``"quad:re,im"``."""
        try:
            family, rest = text.split(":", 1)
            re_s, im_s = rest.split(",")
            value = complex(float(re_s), float(im_s))
        except ValueError:
            raise ValueError(f"malformed map {text!r}; expected 'exp:re,im' or 'quad:re,im'") from None
        return cls(family.strip(), value)

    def __str__(self):
        return f"{self.family}:{self.parameter.real!r},{self.parameter.imag!r}"

    @property
    def code(self) -> int:
        return kernels.EXP if self.family == EXP else kernels.QUAD

    @property
    def escape_radius(self) -> float:
        return 1e10 if self.family == EXP else 1e5

    def __call__(self, z):
        return evaluate(self, z)


def exponential(c) -> MapSpec:
    return MapSpec(EXP, c)


def quadratic(c) -> MapSpec:
    return MapSpec(QUAD, c)


def evaluate(m: MapSpec, z: complex) -> complex:
    """``f(z)``, or ``ESCAPED`` where double precision would overflow."""
    z = complex(z)
    if m.family == EXP:
        if z.real > EXP_OVERFLOW:
            return ESCAPED
        # expm1 keeps relative accuracy near the origin
        return _expm1(z) + (1.0 + m.parameter)
    if abs(z) > _QUAD_OVERFLOW:
        return ESCAPED
    return z * z + m.parameter


def deriv(m: MapSpec, z: complex) -> complex:
    z = complex(z)
    if m.family == EXP:
        if z.real > EXP_OVERFLOW:
            return ESCAPED
        return cmath.exp(z)
    if abs(z) > _QUAD_OVERFLOW:
        return ESCAPED
    return 2.0 * z


def _expm1(z: complex) -> complex:
    x, y = z.real, z.imag
    s = math.sin(0.5 * y)
    return complex(math.expm1(x) * math.cos(y) - 2.0 * s * s, math.exp(x) * math.sin(y))


def is_escaped(w: complex) -> bool:
    return not cmath.isfinite(w)


def iterate(m: MapSpec, z: complex, n: int) -> complex:
    for _ in range(n):
        z = evaluate(m, z)
        if is_escaped(z):
            return ESCAPED
    return z


def iterate_with_derivative(m: MapSpec, z: complex, n: int) -> tuple[complex, complex]:
    """``(f**n(z), (f**n)'(z))`` by the chain rule."""
    d = 1.0 + 0j
    for _ in range(n):
        d *= deriv(m, z)
        z = evaluate(m, z)
        if is_escaped(z) or not cmath.isfinite(d):
            return ESCAPED, ESCAPED
    return z, d


class Orbit(NamedTuple):
    points: np.ndarray
    escaped_at: int | None


def orbit(m: MapSpec, z0: complex, n: int, escape_radius: float | None = None) -> Orbit:
    """``z0, f(z0), ...`` for ``n`` steps or until the first iterate beyond the radius.

    ``points`` holds the non-escaped prefix; ``escaped_at`` is the index of
    the first iterate past ``escape_radius`` (or that overflowed), else None.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    R = m.escape_radius if escape_radius is None else escape_radius
    if R <= 0:
        raise ValueError("escape_radius must be positive")
    z = complex(z0)
    pts = [z]
    escaped_at = None
    if abs(z) > R:
        return Orbit(np.array([], dtype=complex), 0)
    for k in range(1, n + 1):
        z = evaluate(m, z)
        if is_escaped(z) or abs(z) > R:
            escaped_at = k
            break
        pts.append(z)
    return Orbit(np.array(pts, dtype=complex), escaped_at)


class SingularValue(NamedTuple):
    value: complex
    kind: str  # "asymptotic" or "critical"


def singular_values(m: MapSpec) -> list[SingularValue]:
    """Both families have exactly one singular value, the parameter itself."""
    kind = "asymptotic" if m.family == EXP else "critical"
    return [SingularValue(m.parameter, kind)]


@dataclass(frozen=True)
class TractGeometry:
    """Disk around the singular values and the tract boundary.

    ``D_radius`` is the radius of the disk D centred at 0.  ``R`` is the
    exponential tract threshold (the half-plane ``Re z > R`` lies inside the
    tract) or, for the quadratic family, the radius beyond which every point
    is in the tract.
    """

    R: float
    D_radius: float


def tract_geometry(m: MapSpec, margin: float = 1.0) -> TractGeometry:
    c = abs(m.parameter)
    D = c + margin
    if m.family == EXP:
        return TractGeometry(R=math.log(D + c), D_radius=D)
    return TractGeometry(R=math.sqrt(D + c), D_radius=D)


def in_tract(m: MapSpec, z, g: TractGeometry):
    """Exact tract membership ``|f(z)| > D_radius``; accepts arrays."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        if m.family == EXP:
            w = np.exp(np.minimum(z.real, EXP_OVERFLOW) + 1j * z.imag) + m.parameter
        else:
            w = z * z + m.parameter
        return (np.abs(w) > g.D_radius) | (m.family == EXP) & (z.real >= EXP_OVERFLOW)


def strip_index(z: complex) -> int:
    """Strip symbol ``n`` with ``Im z`` in ``[2 pi n - pi, 2 pi n + pi)``.

    The cut is the horizontal half-line from ``c`` to the left; its preimages
    under ``exp(z) + c`` are the lines ``Im z = pi (mod 2 pi)``, whatever c is.
    """
    return math.floor((complex(z).imag + math.pi) / (2 * math.pi))


def fundamental_domain_index(m: MapSpec, z: complex, g: TractGeometry) -> int | None:
    """Fundamental-domain symbol of ``z`` if it lies in ``Re z > g.R``, else None."""
    if m.family != EXP:
        raise ValueError("fundamental domains are only tabulated for the exponential family")
    z = complex(z)
    if z.real <= g.R:
        return None
    return strip_index(z)


def itinerary(m: MapSpec, z: complex, n: int) -> tuple[int, ...]:
    """Strip symbols of ``z, f(z), ..., f**(n-1)(z)``."""
    out = []
    for _ in range(n):
        out.append(strip_index(z))
        z = evaluate(m, z)
    return tuple(out)


@dataclass(frozen=True)
class Box:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        for name in ("x0", "y0", "x1", "y1"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError(f"box {self} has zero or negative area")

    @classmethod
    def parse(cls, text: str) -> Box:
        try:
            vals = [float(v) for v in text.split(",")]
        except ValueError:
            raise ValueError(f"malformed box {text!r}") from None
        if len(vals) != 4:
            raise ValueError(f"box {text!r} needs four numbers x0,y0,x1,y1")
        return cls(*vals)

    def __str__(self):
        return f"{self.x0!r},{self.y0!r},{self.x1!r},{self.y1!r}"

    def contains(self, z, pad: float = 0.0):
        z = np.asarray(z, dtype=complex)
        return ((z.real >= self.x0 - pad) & (z.real <= self.x1 + pad)
                & (z.imag >= self.y0 - pad) & (z.imag <= self.y1 + pad))

    def grid(self, nx: int, ny: int) -> np.ndarray:
        xs = np.linspace(self.x0, self.x1, nx)
        ys = np.linspace(self.y0, self.y1, ny)
        return (xs[None, :] + 1j * ys[:, None]).ravel()

    def as_list(self):
        return [self.x0, self.y0, self.x1, self.y1]
