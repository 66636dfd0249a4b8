"""Numerical and exact verification of a theta-divisor surface in an abelian
threefold, its canonical map and a bidouble-plane model."""

from .theta import PeriodMatrix, ThetaCharacteristic, theta_batch, theta_jet, theta_value
from .abelian import SurfaceSpec, TorusPoint
from .config import RunConfig

__all__ = ["PeriodMatrix", "ThetaCharacteristic", "theta_batch", "theta_jet", "theta_value",
           "SurfaceSpec", "TorusPoint", "RunConfig"]
__version__ = "0.1.0"
