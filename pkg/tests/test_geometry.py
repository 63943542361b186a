import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypball.geometry import (
    BallDomain,
    Point,
    cos_angle,
    hyperbolic_distance,
    hyperbolic_radius,
    sphere_area,
    unit_sphere_area,
)
from hypball.specfun import Dimension


def interior_points(dim_n):
    return (
        st.lists(
            st.floats(-0.6, 0.6, allow_nan=False), min_size=dim_n, max_size=dim_n
        )
        .map(np.array)
        .filter(lambda c: 1e-6 < np.linalg.norm(c) < 0.95)
        .map(Point)
    )


def test_point_validation():
    with pytest.raises(ValueError):
        Point(np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        Point(np.zeros((2, 2)))
    p = Point([0.25, 0.0, 0.0])
    assert p.norm == 0.25


def test_ball_domain_validation():
    dim = Dimension(4)
    with pytest.raises(ValueError):
        BallDomain(dim, 0.0)
    with pytest.raises(ValueError):
        BallDomain(dim, 1.0)
    assert BallDomain(dim, 0.6).r == 0.6


@pytest.mark.parametrize(
    "j, area",
    [
        (1, 2 * math.pi),
        (2, 4 * math.pi),
        (3, 2 * math.pi**2),
        (5, math.pi**3),
    ],
)
def test_unit_sphere_areas(j, area):
    assert unit_sphere_area(j) == pytest.approx(area, rel=1e-14)


def test_unit_sphere_area_rejects_j0():
    with pytest.raises(ValueError):
        unit_sphere_area(0)


def test_sphere_area_scaling():
    dim = Dimension(4)
    assert sphere_area(dim, 0.5) == pytest.approx(
        unit_sphere_area(3) * 0.5**3, rel=1e-14
    )
    with pytest.raises(ValueError):
        sphere_area(dim, 0.0)


def test_distance_from_origin_is_atanh():
    for t in (0.1, 0.3, 0.6, 0.9):
        x = Point([t, 0.0, 0.0])
        o = Point([0.0, 0.0, 0.0])
        assert hyperbolic_distance(o, x) == pytest.approx(math.atanh(t), rel=1e-13)


def test_hyperbolic_radius_matches_center_distance():
    dim = Dimension(5)
    D = BallDomain(dim, 0.7)
    o = Point(np.zeros(5))
    edge = Point([0.7 - 1e-15, 0, 0, 0, 0])
    assert hyperbolic_radius(D) == pytest.approx(
        hyperbolic_distance(o, edge), abs=1e-12
    )
    # atanh(r) in another guise
    assert hyperbolic_radius(D) == pytest.approx(math.atanh(0.7), rel=1e-14)


@given(interior_points(3), interior_points(3), st.integers(0, 2**31 - 1))
def test_distance_rotation_invariant(x, y, seed):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    xr, yr = Point(Q @ x.coords), Point(Q @ y.coords)
    d = hyperbolic_distance(x, y)
    assert hyperbolic_distance(xr, yr) == pytest.approx(d, abs=1e-12)


@given(interior_points(4), interior_points(4), interior_points(4))
def test_triangle_inequality(x, y, z):
    dxz = hyperbolic_distance(x, z)
    dxy = hyperbolic_distance(x, y)
    dyz = hyperbolic_distance(y, z)
    assert dxz <= dxy + dyz + 1e-12


def test_distance_additive_along_ray():
    # points on a common ray through the origin: distances add
    o = Point([0.0, 0.0])
    a = Point([0.3, 0.0])
    b = Point([0.8, 0.0])
    assert hyperbolic_distance(o, a) + hyperbolic_distance(a, b) == pytest.approx(
        hyperbolic_distance(o, b), rel=1e-13
    )


def test_cos_angle():
    x = Point([0.5, 0.0])
    y = Point([0.0, 0.25])
    assert cos_angle(x, y) == 0.0
    assert cos_angle(x, x) == 1.0
    assert cos_angle(x, Point([-0.1, 0.0])) == -1.0
    with pytest.raises(ValueError):
        cos_angle(x, Point([0.0, 0.0]))
