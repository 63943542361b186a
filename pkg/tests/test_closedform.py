import math

import numpy as np
import pytest
import scipy.integrate

from hypball.closedform import (
    H_function,
    L_factor,
    QuadratureControl,
    conjecture1_residual,
    conjecture2_zero_count,
    f_entire,
    green_closed_n4,
    green_closed_n6,
    h_factor,
    laplace_weight,
    poisson_integral,
)
from hypball.geometry import BallDomain, Point
from hypball.kernels import SeriesControl, green_function, poisson_kernel
from hypball.specfun import Dimension, F_k

R2_CRIT = 7 - 4 * math.sqrt(3)


def ball(n, r=0.6):
    return BallDomain(Dimension(n), r)


def on_sphere(r, theta, n):
    c = np.zeros(n)
    c[0] = r * math.cos(theta)
    c[1] = r * math.sin(theta)
    return Point(c * (1 - 1e-15))


def test_quadrature_control_validation():
    with pytest.raises(ValueError):
        QuadratureControl(abs_tol=0.0)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 8])
def test_f_entire_matches_F_k_at_integers(n):
    dim = Dimension(n)
    for k in (0, 1, 3, 10):
        for z in (0.0, 0.3, 0.8):
            expect = F_k(dim, k, z) / math.gamma(k + n / 2)
            assert f_entire(dim, z, k) == pytest.approx(expect, rel=1e-12)


def test_f_entire_complex_symmetry():
    dim = Dimension(5)
    k = 1.3 + 0.7j
    val = f_entire(dim, 0.45, k)
    conj = f_entire(dim, 0.45, k.conjugate())
    assert conj == pytest.approx(val.conjugate(), rel=1e-12)
    # real argument comes back as a plain float
    assert isinstance(f_entire(dim, 0.45, 1.5), float)
    with pytest.raises(ValueError):
        f_entire(dim, 1.0, 2)


def test_H_n4_closed_form_and_x_independence():
    dim = Dimension(4)
    r2 = 0.36
    closed = lambda k: 2 * (1 + r2) / (1 - r2) / (k + 2 / (1 - r2))
    for k in (0.0, 0.5, 1.0, 3.7, 10.0):
        vals = [H_function(dim, x2, r2, k) for x2 in (0.0, 0.09, 0.2, 0.3)]
        for v in vals:
            assert v == pytest.approx(closed(k), abs=1e-12 * abs(closed(k)) + 1e-12)
        assert max(vals) - min(vals) < 1e-12


def test_H_rejects_zero_of_radial_solution():
    # F_k(0.5) at n=4 vanishes at k = -4
    with pytest.raises(ValueError, match="zero"):
        H_function(Dimension(4), 0.2, 0.5, -4.0)


def test_H_validation():
    with pytest.raises(ValueError):
        H_function(Dimension(4), 0.5, 0.3, 1.0)


@pytest.mark.parametrize(
    "n, r2",
    [(4, 0.36), (6, 0.04), (6, R2_CRIT), (6, 0.36)],
)
def test_weight_transforms_back_to_H(n, r2):
    # int_0^inf w(v) e^{-k v} dv = H(k), all four regimes
    dim = Dimension(n)
    x2 = r2 / 4
    w = laplace_weight(dim, x2, r2)
    for k in (0, 1, 2, 3, 5, 10):
        val, _ = scipy.integrate.quad(
            lambda v: w(v) * math.exp(-k * v), 0, 200, limit=200
        )
        assert val == pytest.approx(H_function(dim, x2, r2, k), abs=1e-8)


@pytest.mark.parametrize(
    "n, r2",
    [(4, 0.36), (4, 0.81), (6, 0.04), (6, R2_CRIT), (6, 0.36)],
)
def test_weight_moments(n, r2):
    # first moment = H(-rho) with value (n/2)(1-x2)^(rho-1)(1-r2)^(rho-1);
    # the h-weighted moment integrates to (1-x2)^rho (1-r2)^rho / rho
    dim = Dimension(n)
    rho = dim.rho
    x2 = r2 / 4
    w = laplace_weight(dim, x2, r2)
    m0, _ = scipy.integrate.quad(lambda v: w(v) * math.exp(rho * v), 0, 200, limit=200)
    expect0 = (n / 2) * ((1 - x2) * (1 - r2)) ** (rho - 1)
    assert m0 == pytest.approx(expect0, abs=1e-9 * max(1, expect0))
    assert m0 == pytest.approx(H_function(dim, x2, r2, -rho), abs=1e-9 * max(1, m0))

    def h(v):
        return x2 * math.expm1(-v) + r2 * math.expm1(v)

    m1, _ = scipy.integrate.quad(
        lambda v: w(v) * h(v) * math.exp(rho * v), 0, 200, limit=200
    )
    expect1 = ((1 - x2) * (1 - r2)) ** rho / rho
    assert m1 == pytest.approx(expect1, abs=1e-9 * max(1, expect1))


def test_weight_regimes_and_decay():
    dim = Dimension(6)
    assert laplace_weight(dim, 0.0, 0.04).regime == "cosh-sinh"
    assert laplace_weight(dim, 0.0, R2_CRIT).regime == "critical"
    assert laplace_weight(dim, 0.0, 0.36).regime == "oscillatory"
    assert laplace_weight(Dimension(4), 0.0, 0.36).regime == "single-exponential"
    for n in (4, 6):
        d = Dimension(n)
        for r2 in (0.01, 0.04, R2_CRIT, 0.36, 0.81, 0.95):
            w = laplace_weight(d, 0.0, r2)
            assert w.decay_rate > d.rho + 1


def test_weight_continuous_across_critical_radius():
    dim = Dimension(6)
    lo = laplace_weight(dim, 0.02, R2_CRIT - 1e-9)
    hi = laplace_weight(dim, 0.02, R2_CRIT + 1e-9)
    mid = laplace_weight(dim, 0.02, R2_CRIT)
    assert {lo.regime, mid.regime, hi.regime} == {
        "cosh-sinh",
        "critical",
        "oscillatory",
    }
    for v in (0.0, 0.3, 1.0, 4.0):
        assert lo(v) == pytest.approx(mid(v), rel=1e-6)
        assert hi(v) == pytest.approx(mid(v), rel=1e-6)


def test_weight_validation():
    with pytest.raises(ValueError):
        laplace_weight(Dimension(5), 0.0, 0.36)
    with pytest.raises(ValueError):
        laplace_weight(Dimension(4), 0.4, 0.36)


def test_h_and_L_reductions():
    x = Point([0.2, 0.1, 0.0, 0.0])
    y = Point([0.0, 0.5, 0.1, 0.0])
    for v in (0.0, 0.7, 2.5):
        h = h_factor(x, y, v)
        radial = x.norm**2 * math.expm1(-v) + y.norm**2 * math.expm1(v)
        assert h == pytest.approx(radial, rel=1e-14)
        assert L_factor(Dimension(4), x, y, v) == pytest.approx(h * h, rel=1e-12)
    x6 = Point([0.2, 0.1, 0, 0, 0, 0])
    y6 = Point([0.0, 0.5, 0.1, 0, 0, 0])
    for v in (0.4, 1.7):
        h = h_factor(x6, y6, v)
        xy = float(x6.coords @ y6.coords)
        a_half = x6.norm**2 * math.exp(-v) + y6.norm**2 * math.exp(v) - 2 * xy
        d2 = x6.norm**2 + y6.norm**2 - 2 * xy
        expect = h * h * (2 * a_half + d2)
        assert L_factor(Dimension(6), x6, y6, v) == pytest.approx(expect, rel=1e-11)
    with pytest.raises(ValueError):
        h_factor(x, y, -0.1)


@pytest.mark.parametrize("n", [4, 6])
def test_poisson_integral_matches_series(n):
    D = ball(n)
    for ax, theta in ((0.15, 0.5), (0.3, 1.9), (0.5, 2.9)):
        x = Point([ax] + [0.0] * (n - 1))
        y = on_sphere(0.6, theta, n)
        assert poisson_integral(D, x, y) == pytest.approx(
            poisson_kernel(D, x, y), abs=1e-9
        )


def test_poisson_integral_validation():
    with pytest.raises(ValueError):
        poisson_integral(ball(5), Point([0.1] * 5), on_sphere(0.6, 1.0, 5))
    D = ball(4)
    with pytest.raises(ValueError):
        poisson_integral(D, Point([0.3, 0, 0, 0]), Point([0.3, 0, 0, 0]))


def test_green_closed_n4_matches_series():
    D = ball(4)
    ctl = SeriesControl(k_max=4000, tol=1e-9)
    pairs = [
        ((0.1, 0.0), (0.0, 0.4)),
        ((0.3, 0.1), (-0.2, 0.35)),
        ((0.05, 0.02), (0.45, 0.1)),
    ]
    for (x1, x2), (y1, y2) in pairs:
        x = Point([x1, x2, 0.0, 0.0])
        y = Point([y1, y2, 0.0, 0.0])
        assert green_closed_n4(D, x, y) == pytest.approx(
            green_function(D, x, y, ctl), abs=1e-9
        )
    with pytest.raises(ValueError):
        green_closed_n4(ball(6), Point([0.1] * 6), Point([0.2] * 6))


@pytest.mark.parametrize("r", [0.2, math.sqrt(R2_CRIT), 0.6])
def test_green_closed_n6_matches_series_all_regimes(r):
    D = ball(6, r)
    ctl = SeriesControl(k_max=4000, tol=1e-9)
    scale = r / 0.6
    pairs = [
        ((0.1, 0.0), (0.0, 0.4)),
        ((0.3, 0.1), (-0.2, 0.35)),
    ]
    for (x1, x2), (y1, y2) in pairs:
        x = Point([x1 * scale, x2 * scale, 0, 0, 0, 0])
        y = Point([y1 * scale, y2 * scale, 0, 0, 0, 0])
        assert green_closed_n6(D, x, y) == pytest.approx(
            green_function(D, x, y, ctl), abs=1e-9
        )


def test_green_closed_singularity_guard():
    x = Point([0.1, 0.2, 0, 0])
    with pytest.raises(ValueError):
        green_closed_n4(ball(4), x, x)
    x6 = Point([0.1, 0.2, 0, 0, 0, 0])
    with pytest.raises(ValueError):
        green_closed_n6(ball(6), x6, x6)


def test_conjecture1_residual_n4_vanishes():
    dim = Dimension(4)
    for k in (1, 2, 7, 25, 50):
        for z in (0.05, 0.4, 0.95):
            assert abs(conjecture1_residual(dim, z, k)) < 1e-12


@pytest.mark.parametrize("n", [6, 8])
def test_conjecture1_residual_bounded(n):
    # not an identity beyond n=4; observed sup ~ 10.7 over this range
    dim = Dimension(n)
    worst = max(
        abs(conjecture1_residual(dim, z, k))
        for k in (1, 2, 5, 20, 100, 500)
        for z in (0.05, 0.3, 0.6, 0.9)
    )
    assert worst < 16


def test_conjecture1_validation():
    with pytest.raises(ValueError):
        conjecture1_residual(Dimension(4), 0.0, 3)
    with pytest.raises(ValueError):
        conjecture1_residual(Dimension(4), 0.5, 0)


# root layout fixed by independent Newton scans of the radial solutions
@pytest.mark.parametrize(
    "n, z, rect, count",
    [
        (4, 0.5, (-5.0, -3.0, -1.0, 1.0), 1),
        (4, 0.5, (-3.0, -0.1, -1.0, 1.0), 0),
        (4, 0.5, (-2.1, 5.0, -2.0, 2.0), 0),
        (6, 0.25, (-6.2, -3.0, -2.0, 2.0), 2),
        (6, 0.25, (-3.0, -0.1, -2.0, 2.0), 0),
        (6, 0.04, (-5.0, -3.2, -1.0, 1.0), 2),
        (6, 0.04, (-3.2, -0.1, -1.0, 1.0), 0),
        (6, R2_CRIT, (-4.5, -3.0, -1.0, 1.0), 2),
        (6, R2_CRIT, (-3.0, -0.1, -1.0, 1.0), 0),
    ],
)
def test_conjecture2_zero_counts(n, z, rect, count):
    assert conjecture2_zero_count(Dimension(n), z, rect) == count


def test_conjecture2_zero_on_contour():
    # k = -4 is a root of F_k(0.5) at n=4; the contour must refuse it
    with pytest.raises(RuntimeError, match="perturb"):
        conjecture2_zero_count(Dimension(4), 0.5, (-4.0, -3.0, -1.0, 1.0))


def test_conjecture2_validation():
    with pytest.raises(ValueError):
        conjecture2_zero_count(Dimension(4), 0.5, (-1.0, -2.0, -1.0, 1.0))
    with pytest.raises(ValueError):
        conjecture2_zero_count(Dimension(4), 1.5, (-2.0, -1.0, -1.0, 1.0))
