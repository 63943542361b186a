"""Closed-form route to the kernels for n in {4, 6}: the entire function
f_z(k) = F_k(z)/Gamma(k+n/2), the H-function remainder of the spectral
coefficient, its inverse Laplace weight w(v), integral representations of
the Poisson kernel and the Green functions (via the Kelvin point
y* = r^2 y/|y|^2), and numerical probes of the two hypotheses behind the
construction (the large-k expansion of F_k and zero-freeness of F_k in a
complex-k half-plane).
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import loggamma, rgamma

from .geometry import BallDomain, Point, sphere_area
from .specfun import Dimension, HypParams, hyp2f1

# dead band on r^4 - 14 r^2 + 1 inside which the critical-regime formula
# is used; sinh(cv)/c with tiny c is numerically the critical limit anyway
_CRITICAL_BAND = 1e-12


@dataclass(frozen=True)
class QuadratureControl:
    """Policy for the semi-infinite v-integrals: substitute u = exp(-v)
    onto (0, 1], then adaptive Gauss-Kronrod panels to abs_tol."""

    scheme: str = "log-substitution"
    abs_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")


def _integrate_decaying(f, ctl):
    """integral of f over (0, infinity) for exponentially decaying f, via
    u = exp(-v)."""
    val, err = quad(
        lambda u: f(-math.log(u)) / u,
        0.0,
        1.0,
        epsabs=ctl.abs_tol,
        epsrel=1e-12,
        limit=ctl.max_subdivisions,
    )
    if err > 10 * max(ctl.abs_tol, 1e-13 * abs(val)):
        raise RuntimeError(
            f"quadrature error estimate {err:.3e} above requested {ctl.abs_tol:.3e}"
        )
    return val


def f_entire(dim, z, k):
    """f_z(k) = F_k(z)/Gamma(k+n/2) as an entire function of complex k:

        sum_i (k)_i (-rho)_i z^i / (i! Gamma(k + n/2 + i)),

    each reciprocal gamma factor is entire, so no pole is ever divided by.
    Terminates at i = rho for even n; for odd n the prefactor of each term
    is carried in log space (the pochhammer and factorial factors overflow
    separately near i ~ 170 even though the terms themselves keep
    shrinking) and the series is summed to roundoff.
    """
    if not 0 <= z < 1:
        raise ValueError("needs z in [0, 1)")
    rho = dim.rho
    half_n = dim.n / 2
    if dim.is_even:
        total = 0j
        poch_k = 1.0 + 0j
        poch_rho = 1.0
        zi = 1.0
        fact = 1.0
        for i in range(int(rho) + 1):
            total += poch_k * poch_rho * zi / fact * complex(rgamma(k + half_n + i))
            poch_k *= k + i
            poch_rho *= -rho + i
            zi *= z
            fact *= i + 1
    else:
        kc = complex(k)
        total = complex(rgamma(kc + half_n))
        # compare terms against the largest seen, not against the sum: the
        # sum can be arbitrarily small (near a zero in k, or at large k
        # where every term carries a tiny reciprocal gamma)
        peak = abs(total)
        log_pref = 0j
        i = 0
        while z > 0:
            if kc + i == 0:
                break
            log_pref += (
                cmath.log(kc + i)
                + cmath.log(complex(i - rho))
                + math.log(z)
                - math.log(i + 1)
            )
            i += 1
            if i > 10000:
                raise RuntimeError("f_z series did not converge")
            w = kc + half_n + i
            if w.imag == 0 and w.real <= 0 and w.real.is_integer():
                continue
            term = cmath.exp(log_pref - loggamma(w))
            total += term
            peak = max(peak, abs(term))
            if i > 3 and abs(term) < 1e-17 * peak:
                break
    if isinstance(k, complex):
        return total
    return total.real


def H_function(dim, x2, r2, k):
    """H_{|x|^2, r^2}(k): the O(1/k) remainder defined by

        (k+rho)/rho f_{x2}(k)/f_{r2}(k)
          = ((1-x2)/(1-r2))^rho ((k+rho)/rho - (n/2)(r2-x2)/((1-r2)(1-x2)))
            + (r2-x2)/(1-r2)^(n-2) H(k),

    solved for H. For n=4 this collapses to
    [2(1+r2)/(1-r2)] / (k + 2/(1-r2)), independent of x2.
    """
    if not 0 <= x2 < r2 < 1:
        raise ValueError("needs 0 <= x2 < r2 < 1")
    rho = dim.rho
    n = dim.n
    fr = f_entire(dim, r2, k)
    if abs(fr) < 1e-15:
        raise ValueError("k is at (or too near) a zero of f_{r^2}")
    lhs = (k + rho) / rho * f_entire(dim, x2, k) / fr
    leading = ((1 - x2) / (1 - r2)) ** rho * (
        (k + rho) / rho - (n / 2) * (r2 - x2) / ((1 - r2) * (1 - x2))
    )
    return (lhs - leading) * (1 - r2) ** (n - 2) / (r2 - x2)


@dataclass(frozen=True)
class LaplaceWeight:
    """Inverse Laplace transform w(v) of H(k), in one of four shapes:

    single-exponential (n=4):  amp1 exp(-b v)
    cosh-sinh (n=6):           exp(-b v) (amp1 cosh(c v) + amp2 sinh(c v)/c)
    critical (n=6, c=0):       exp(-b v) (amp1 + amp2 v)
    oscillatory (n=6):         exp(-b v) (amp1 cos(c~ v) + amp2 sin(c~ v)/c~)

    b exceeds |Re c|, so w always decays; c_or_ctilde stores c (or c~).
    """

    dim: Dimension
    x2: float
    r2: float
    regime: str
    b: float
    c_or_ctilde: float
    amp1: float
    amp2: float

    def __call__(self, v):
        b = self.b
        c = self.c_or_ctilde
        if self.regime == "single-exponential":
            return self.amp1 * math.exp(-b * v)
        if self.regime == "cosh-sinh":
            # combined exponentials: cosh/sinh against exp(-bv) overflow
            # separately for large v even though the product decays
            p = 0.5 * (self.amp1 + self.amp2 / c) * math.exp((c - b) * v)
            q = 0.5 * (self.amp1 - self.amp2 / c) * math.exp(-(b + c) * v)
            return p + q
        if self.regime == "critical":
            return (self.amp1 + self.amp2 * v) * math.exp(-b * v)
        return (
            self.amp1 * math.cos(c * v) + self.amp2 * math.sin(c * v) / c
        ) * math.exp(-b * v)

    @property
    def decay_rate(self):
        """Slowest exponential decay rate of w."""
        if self.regime == "cosh-sinh":
            return self.b - self.c_or_ctilde
        return self.b


def laplace_weight(dim, x2, r2):
    """Build w_{|x|^2, r^2} for n in {4, 6}.

    n=4: amplitude 2(1+r^2)/(1-r^2), rate 2/(1-r^2). n=6: rate
    b = (7-r^2)/(2(1-r^2)) with c = sqrt(r^4-14r^2+1)/(2(1-r^2)) switching
    between real (cosh-sinh), zero (critical) and imaginary (oscillatory)
    as r^2 crosses 7-4 sqrt(3); amplitudes

        amp1 = 3 (1 - r^2 x^2 + 3(r^2 - x^2))
        amp2 = (3/2) (1 + x^2 r^2 + 5(x^2 + r^2))

    fixed by the residues of H at its two poles. Laplace-transforming back
    reproduces H(k) (a tested identity).
    """
    if dim.n not in (4, 6):
        raise ValueError("weights are only available for n in {4, 6}")
    if not 0 <= x2 < r2 < 1:
        raise ValueError("needs 0 <= x2 < r2 < 1")
    if dim.n == 4:
        return LaplaceWeight(
            dim,
            x2,
            r2,
            "single-exponential",
            2 / (1 - r2),
            0.0,
            2 * (1 + r2) / (1 - r2),
            0.0,
        )
    b = (7 - r2) / (2 * (1 - r2))
    disc = r2 * r2 - 14 * r2 + 1
    amp1 = 3 * (1 - r2 * x2 + 3 * (r2 - x2))
    amp2 = 1.5 * (1 + x2 * r2 + 5 * (x2 + r2))
    if abs(disc) < _CRITICAL_BAND:
        return LaplaceWeight(dim, x2, r2, "critical", b, 0.0, amp1, amp2)
    c = math.sqrt(abs(disc)) / (2 * (1 - r2))
    if disc > 0:
        return LaplaceWeight(dim, x2, r2, "cosh-sinh", b, c, amp1, amp2)
    return LaplaceWeight(dim, x2, r2, "oscillatory", b, c, amp1, amp2)


def h_factor(x, y, v):
    """h(x,y,v) = |x e^{-v/2} - y e^{v/2}|^2 - |x-y|^2, which collapses to
    the radial form |x|^2 (e^{-v} - 1) + |y|^2 (e^v - 1)."""
    if v < 0:
        raise ValueError("needs v >= 0")
    x2 = x.norm**2
    r2 = y.norm**2
    return x2 * (math.expm1(-v)) + r2 * math.expm1(v)


def L_factor(dim, x, y, v):
    """L(x,y,v) = A^rho rho h - |x-y|^2 (A^rho - |x-y|^(2 rho)) with
    A = |x e^{-v/2} - y e^{v/2}|^2. Reduces to h^2 for n=4 and to
    h^2 (2A + |x-y|^2) for n=6."""
    rho = dim.rho
    x2 = x.norm**2
    r2 = y.norm**2
    xy = float(x.coords @ y.coords)
    a_half = x2 * math.exp(-v) + r2 * math.exp(v) - 2 * xy
    d2 = x2 + r2 - 2 * xy
    h = h_factor(x, y, v)
    return a_half**rho * rho * h - d2 * (a_half**rho - d2**rho)


def poisson_integral(D, x, y, qctl=QuadratureControl()):
    """Poisson kernel via the integral representation

        Gamma(n/2)/(2 pi^(n/2) r (1-r^2)^(n-2)) (r^2-|x|^2)/|x-y|^n
            * int_0^inf w(v) L(x,y,v) / |x e^{-v} - y|^(n-2) dv,

    for n in {4, 6}. The weight regime guarantees a positive net decay
    exponent, checked before integrating.
    """
    dim = D.dim
    n = dim.n
    if n not in (4, 6):
        raise ValueError("integral representation only for n in {4, 6}")
    r = D.r
    ax = x.norm
    if ax >= r:
        raise ValueError("x must lie inside the ball")
    if abs(y.norm - r) > 1e-12:
        raise ValueError("y must lie on the sphere |y| = r")
    x2 = ax**2
    r2 = r**2
    xy = float(x.coords @ y.coords)
    d2 = x2 + r2 - 2 * xy
    w = laplace_weight(dim, x2, r2)
    if not w.decay_rate > dim.rho + 1:
        raise RuntimeError("integrand does not decay; weight regime corrupt")

    def integrand(v):
        ev = math.exp(v)
        emv = 1.0 / ev
        h = x2 * (emv - 1) + r2 * (ev - 1)
        if n == 4:
            L = h * h
        else:
            a_half = x2 * emv + r2 * ev - 2 * xy
            L = h * h * (2 * a_half + d2)
        denom = x2 * emv * emv - 2 * emv * xy + r2
        return w(v) * L / denom ** (n // 2 - 1)

    pref = (
        math.gamma(n / 2)
        / (2 * math.pi ** (n / 2) * r * (1 - r2) ** (n - 2))
        * (r2 - x2)
        / d2 ** (n / 2)
    )
    return pref * _integrate_decaying(integrand, qctl)


def _kelvin_quadratic(x2, y2, xy, r2, v):
    """|y|^2 |x e^{-v} - y*|^2 with y* = r^2 y / |y|^2, in the symmetric
    form x^2 y^2 e^{-2v} - 2 r^2 e^{-v} (x.y) + r^4 (positive definite)."""
    emv = math.exp(-v)
    return x2 * y2 * emv * emv - 2 * r2 * emv * xy + r2 * r2


def green_closed_n4(D, x, y, qctl=QuadratureControl()):
    """Green function of the ball for n=4:

        (1/(4 pi^2)) [ (1-|x|^2)(1-|y|^2) (1/d^2 - r^2/(|y|^2 D^2))
                       - 4 log(|y| D / (r d))
                       + (r^2-|x|^2)(r^2-|y|^2)
                         int_0^inf w(v) / (|y|^2 |x e^{-v} - y*|^2) dv ]

    with d = |x-y|, D = |x-y*|, y* = r^2 y/|y|^2 and the n=4 weight w.
    The Kelvin combination |y|^2 |x e^{-v} - y*|^2 is evaluated in its
    symmetric quadratic form, so the expression is symmetric in (x, y)
    by construction.
    """
    if D.dim.n != 4:
        raise ValueError("needs n = 4")
    r2 = D.r**2
    x2 = x.norm**2
    y2 = y.norm**2
    if x2 >= r2 or y2 >= r2:
        raise ValueError("both points must lie inside the ball")
    xy = float(x.coords @ y.coords)
    d2 = x2 + y2 - 2 * xy
    if d2 == 0.0:
        raise ValueError("green function is singular at x = y")
    k0 = x2 * y2 - 2 * r2 * xy + r2 * r2
    w = laplace_weight(D.dim, 0.0, r2)  # n=4 weight is x-independent
    integral = _integrate_decaying(
        lambda v: w(v) / _kelvin_quadratic(x2, y2, xy, r2, v), qctl
    )
    direct = (1 - x2) * (1 - y2) * (1 / d2 - r2 / k0)
    logterm = -2 * math.log(k0 / (r2 * d2))
    tail = (r2 - x2) * (r2 - y2) * integral
    return (direct + logterm + tail) / (4 * math.pi**2)


def _green6_weight(x2, y2, r2):
    """Amplitudes (f1, f2) of the W-weight in the n=6 Green formula:

        W(v) = f1 e^{-bv} cosh(cv) + f2 e^{-bv} sinh(cv)/(2 (1-r^2) c),

    with the critical/oscillatory analogues as in laplace_weight."""
    f1 = (
        r2 * (1 + r2) / (1 - r2) * (1 - x2) * (1 - y2)
        + 2 * (1 - x2 * y2)
        - 2 * (1 - r2 * r2)
    )
    f2 = (
        -3 * r2 * (1 + r2) ** 2 / (1 - r2) * (1 - x2) * (1 - y2)
        - 2 * (1 - 5 * r2 - 2 * r2 * r2) * (1 - x2 * y2)
        + 2 * (1 - r2) ** 3
    )
    return f1, f2


def green_closed_n6(D, x, y, qctl=QuadratureControl()):
    """Green function of the ball for n=6:

        (1/(4 pi^3)) [ (1-X)^2 (1-Y)^2 (1/d^4 - r^4/K0^2)
                       - 6 (1-X)(1-Y) (1/d^2 - r^2/K0)
                       + 12 log(K0/(r^2 d^2))
                       - 12 (r^2-X)(r^2-Y)/K0
                       + 6 (r^2-X)(r^2-Y) int_0^inf W(v)/K(v)^2 dv ]

    where X = |x|^2, Y = |y|^2, d = |x-y|, K(v) = X Y e^{-2v}
    - 2 r^2 e^{-v} (x.y) + r^4 (the symmetric Kelvin quadratic, K0 = K(0))
    and W carries the same b, c regimes as the Poisson weight.
    """
    if D.dim.n != 6:
        raise ValueError("needs n = 6")
    r2 = D.r**2
    x2 = x.norm**2
    y2 = y.norm**2
    if x2 >= r2 or y2 >= r2:
        raise ValueError("both points must lie inside the ball")
    xy = float(x.coords @ y.coords)
    d2 = x2 + y2 - 2 * xy
    if d2 == 0.0:
        raise ValueError("green function is singular at x = y")
    k0 = x2 * y2 - 2 * r2 * xy + r2 * r2
    b = (7 - r2) / (2 * (1 - r2))
    disc = r2 * r2 - 14 * r2 + 1
    f1, f2 = _green6_weight(x2, y2, r2)
    s = 2 * (1 - r2)
    if abs(disc) < _CRITICAL_BAND:

        def W(v):
            return (f1 + f2 * v / s) * math.exp(-b * v)

    elif disc > 0:
        c = math.sqrt(disc) / s

        def W(v):
            p = 0.5 * (f1 + f2 / (s * c)) * math.exp((c - b) * v)
            q = 0.5 * (f1 - f2 / (s * c)) * math.exp(-(b + c) * v)
            return p + q

    else:
        ct = math.sqrt(-disc) / s

        def W(v):
            return (
                f1 * math.cos(ct * v) + f2 * math.sin(ct * v) / (s * ct)
            ) * math.exp(-b * v)

    integral = _integrate_decaying(
        lambda v: W(v) / _kelvin_quadratic(x2, y2, xy, r2, v) ** 2, qctl
    )
    parts = (
        (1 - x2) ** 2 * (1 - y2) ** 2 * (1 / d2**2 - r2 * r2 / k0**2)
        - 6 * (1 - x2) * (1 - y2) * (1 / d2 - r2 / k0)
        + 12 * math.log(k0 / (r2 * d2))
        - 12 * (r2 - x2) * (r2 - y2) / k0
        + 6 * (r2 - x2) * (r2 - y2) * integral
    )
    return parts / (4 * math.pi**3)


def conjecture1_residual(dim, z, k):
    """k^2 |F_k(z) - (1-z)^rho - (n/2) rho z (1-z)^(rho-1)/(k+n/2)|: the
    scaled residual of the large-k expansion of F_k. Identically zero for
    n=4 (the expansion is exact there); bounded in k for even n."""
    if not 0 < z < 1:
        raise ValueError("needs z in (0, 1)")
    if k <= 0:
        raise ValueError("needs k > 0")
    rho = dim.rho
    n = dim.n
    f = hyp2f1(HypParams(k, -rho, k + n / 2, z), 1e-16)
    expansion = (1 - z) ** rho + (n / 2) * rho / (k + n / 2) * z * (1 - z) ** (
        rho - 1
    )
    return k * k * abs(f - expansion)


def _cleared_polynomial(dim, z, k):
    """F_k(z) with its k-denominators cleared: f_z(k) Gamma(k+n/2+rho) =
    sum_i (k)_i (-rho)_i z^i/i! (k+n/2+i)_(rho-i), a polynomial in k of
    degree rho whose roots are exactly the meaningful zeros of F_k(z)
    (the reciprocal-gamma zeros of f_z drop out). Even n only."""
    rho = int(dim.rho)
    half_n = dim.n / 2
    k = np.asarray(k, dtype=complex)
    total = np.zeros_like(k)
    for i in range(rho + 1):
        term = np.ones_like(k)
        for j in range(i):
            term = term * (k + j)
        coef = 1.0
        for j in range(i):
            coef *= (-rho + j) / (j + 1)
        term = term * (coef * z**i)
        for j in range(i, rho):
            term = term * (k + half_n + j)
        total = total + term
    return total


def conjecture2_zero_count(dim, z, rect, nodes=4096):
    """Count zeros of F_k(z), as a function of complex k, inside the
    rectangle rect = (re_lo, re_hi, im_lo, im_hi) by the argument
    principle (phase winding along the boundary, node count doubled until
    the winding number stabilizes near an integer).

    For even n the Gamma-cleared polynomial form is used, so the trivial
    zeros that 1/Gamma factors contribute to f_z are not counted; they are
    not zeros of F_k(z). The zero-freeness hypothesis concerns
    Re k >= -n/2 - eps (probing convention eps = 0.1).
    """
    if not 0 < z < 1:
        raise ValueError("needs z in (0, 1)")
    re_lo, re_hi, im_lo, im_hi = rect
    if not (re_lo < re_hi and im_lo < im_hi):
        raise ValueError("degenerate rectangle")

    def boundary(m):
        per_edge = max(m // 4, 8)
        t = np.arange(per_edge) / per_edge
        bottom = re_lo + (re_hi - re_lo) * t + 1j * im_lo
        right = re_hi + 1j * (im_lo + (im_hi - im_lo) * t)
        top = re_hi - (re_hi - re_lo) * t + 1j * im_hi
        left = re_lo + 1j * (im_hi - (im_hi - im_lo) * t)
        loop = np.concatenate([bottom, right, top, left])
        return np.append(loop, loop[0])

    def values(ks):
        if dim.is_even:
            return _cleared_polynomial(dim, z, ks)
        return np.array([f_entire(dim, z, complex(kk)) for kk in ks])

    m = nodes
    prev = None
    while m <= 2**20:
        vals = values(boundary(m))
        mags = np.abs(vals)
        if mags.min() < 1e-12 * mags.max():
            raise RuntimeError(
                "contour passes too near a zero; perturb the rectangle "
                "edges (e.g. shift by 1e-3)"
            )
        phase = np.unwrap(np.angle(vals))
        winding = (phase[-1] - phase[0]) / (2 * math.pi)
        rounded = round(winding)
        if abs(winding - rounded) < 0.25 and prev == rounded:
            return int(rounded)
        prev = rounded
        m *= 2
    raise RuntimeError("winding number did not stabilize")
