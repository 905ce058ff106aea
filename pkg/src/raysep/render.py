"""Binary PPM (P6) renderings of the plane with separators, landing points and orbits."""
from __future__ import annotations

import numpy as np

from . import kernels
from .maps import Box, MapSpec
from .regions import ON_BOUNDARY, POLYNOMIAL_TYPE, TRANSCENDENTAL_TYPE, RegionDecomposition, locate_many

TINTS = {
    POLYNOMIAL_TYPE: np.array([235, 140, 40], dtype=float),
    TRANSCENDENTAL_TYPE: np.array([60, 115, 210], dtype=float),
    None: np.array([90, 90, 90], dtype=float),
}
SEPARATOR = (255, 255, 255)
LANDING = (220, 30, 30)
ORBIT = (255, 230, 0)


def _pixel_grid(box: Box, width: int, height: int) -> np.ndarray:
    xs = box.x0 + (np.arange(width) + 0.5) * (box.x1 - box.x0) / width
    ys = box.y1 - (np.arange(height) + 0.5) * (box.y1 - box.y0) / height
    return xs[None, :] + 1j * ys[:, None]


def _to_pixels(box: Box, width: int, height: int, z: np.ndarray):
    z = np.asarray(z, dtype=complex)
    col = np.floor((z.real - box.x0) / (box.x1 - box.x0) * width).astype(np.int64)
    row = np.floor((box.y1 - z.imag) / (box.y1 - box.y0) * height).astype(np.int64)
    ok = (col >= 0) & (col < width) & (row >= 0) & (row < height)
    return row[ok], col[ok]


def _densify(poly: np.ndarray, step: float) -> np.ndarray:
    out = [poly[:1]]
    for a, b in zip(poly[:-1], poly[1:]):
        n = int(min(4000, np.ceil(abs(b - a) / step))) + 1
        out.append(a + (b - a) * np.linspace(0, 1, n)[1:])
    return np.concatenate(out)


def render(m: MapSpec, box: Box, width: int, height: int, *, decomposition: RegionDecomposition | None = None,
           region_types: dict | None = None, orbit=None, landing_points=(), max_iter: int = 200) -> bytes:
    """Escape-time shading tinted by region type, with overlays; returns the P6 file contents."""
    if width < 1 or height < 1:
        raise ValueError("image size must be positive")
    z = _pixel_grid(box, width, height)
    radius = 50.0 if m.family == "exp" else 1e3
    counts = kernels.escape_time(m.code, m.parameter, z.ravel(), max_iter, radius).reshape(height, width)
    # fast escape is bright; the Julia set and bounded orbits are dark
    shade = 1.0 - 0.8 * (counts / max_iter) ** 0.35
    if decomposition is not None and decomposition.separators:
        labels = locate_many(decomposition, z.ravel()).reshape(height, width)
    else:
        labels = np.full((height, width), "R", dtype=object)
    types = region_types or {}
    tint = np.empty((height, width, 3))
    for k, lab in enumerate(sorted(set(labels.ravel().tolist()))):
        mask = labels == lab
        kind = None if lab == ON_BOUNDARY else getattr(types.get(lab), "kind", None)
        # neighbouring regions of one type differ in brightness
        tint[mask] = TINTS[kind] * (1.0 - 0.3 * (k % 2))
    img = tint * shade[..., None]
    img[counts == max_iter] = tint[counts == max_iter] * 0.3
    img = np.clip(img, 0, 255).astype(np.uint8)
    step = 0.5 * min((box.x1 - box.x0) / width, (box.y1 - box.y0) / height)
    if decomposition is not None:
        for s in decomposition.separators:
            pl = s.polyline[box.contains(s.polyline, pad=(box.x1 - box.x0))]
            if pl.size >= 2:
                r, c = _to_pixels(box, width, height, _densify(pl, step))
                img[r, c] = SEPARATOR
    if orbit is not None and len(orbit):
        r, c = _to_pixels(box, width, height, np.asarray(orbit))
        img[r, c] = ORBIT
    for lp in landing_points:
        r, c = _to_pixels(box, width, height, np.array([lp]))
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                rr, cc = r + dr, c + dc
                ok = (rr >= 0) & (rr < height) & (cc >= 0) & (cc < width)
                img[rr[ok], cc[ok]] = LANDING
    return b"P6\n%d %d\n255\n" % (width, height) + img.tobytes()
