"""Ball-model geometry: interior points, the hyperbolic distance

    cosh(2 d(x,y)) = 1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2)),

sphere areas and the angle cosine used as Gegenbauer argument."""

import math
from dataclasses import dataclass

import numpy as np

from .specfun import Dimension


@dataclass(frozen=True)
class Point:
    """Point of the open unit ball, stored as a dense coordinate vector."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coords, dtype=float))
        if c.ndim != 1:
            raise ValueError("coords must be a flat vector")
        if not np.linalg.norm(c) < 1:
            raise ValueError("point must lie strictly inside the unit ball")
        object.__setattr__(self, "coords", c)

    @property
    def norm(self):
        return float(np.linalg.norm(self.coords))


@dataclass(frozen=True)
class BallDomain:
    """Ball of Euclidean radius r centered at the origin, 0 < r < 1."""

    dim: Dimension
    r: float

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise ValueError("ball radius must satisfy 0 < r < 1")


def unit_sphere_area(j):
    """Area of the unit sphere S^j in R^(j+1): 2 pi^((j+1)/2) / Gamma((j+1)/2)."""
    if j < 1:
        raise ValueError("needs j >= 1")
    return 2 * math.pi ** ((j + 1) / 2) / math.gamma((j + 1) / 2)


def sphere_area(dim, R):
    """Surface area of the sphere of radius R in R^n: omega_{n-1} R^(n-1)."""
    if R <= 0:
        raise ValueError("needs R > 0")
    return unit_sphere_area(dim.n - 1) * R ** (dim.n - 1)


def hyperbolic_distance(x, y):
    """Hyperbolic distance between interior points of the ball model."""
    dx = x.coords - y.coords
    arg = 1 + 2 * float(dx @ dx) / ((1 - x.norm**2) * (1 - y.norm**2))
    return 0.5 * math.acosh(arg)


def hyperbolic_radius(D):
    """Hyperbolic radius of the ball of Euclidean radius r:
    (1/2) log((1+r)/(1-r))."""
    return 0.5 * math.log((1 + D.r) / (1 - D.r))


def cos_angle(x, y):
    """cos of the angle at the origin between x and y, clamped to [-1, 1]
    so downstream Gegenbauer arguments stay in range."""
    nx = x.norm
    ny = y.norm
    if nx == 0 or ny == 0:
        raise ValueError("angle at the origin undefined for the zero vector")
    c = float(x.coords @ y.coords) / (nx * ny)
    return min(1.0, max(-1.0, c))
