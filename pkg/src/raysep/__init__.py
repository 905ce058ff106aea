"""Dynamic rays, basic regions and singular-orbit checks for exp(z) + c and z**2 + c."""
__version__ = "0.1.0"

from .address import ExternalAddress, compare, enumerate_periodic, shift
from .kernels import BACKEND
from .maps import Box, MapSpec, TractGeometry, exponential, quadratic, tract_geometry

__all__ = [
    "BACKEND",
    "Box",
    "ExternalAddress",
    "MapSpec",
    "TractGeometry",
    "compare",
    "enumerate_periodic",
    "exponential",
    "quadratic",
    "shift",
    "tract_geometry",
    "__version__",
]
