"""Euler-Maclaurin machinery and numeric checks of the discretized Gaussian sum bounds.

A lattice of size n is the n+1 points ``h*(k - n/2)``, ``h = 2/sqrt(n)``: the
standardized support of a Binomial(n, 1/2) variable. Summing a Gaussian over
such a lattice (times ``h``) exceeds the matching integral by at most a factor
``1 + eta*s^2/n``; the 2D and 3D versions sum over one or two lattice axes and
integrate the rest exactly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from ._search import golden_section
from .bernoulli_bounds import ETA, is_positive_definite
from .errors import DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Lattice:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"lattice size must be at least 1, got {self.n}")

    @property
    def h(self) -> float:
        return 2.0 / math.sqrt(self.n)

    @property
    def points(self) -> np.ndarray:
        return self.h * (np.arange(self.n + 1) - self.n / 2.0)


@dataclass(frozen=True)
class SumBound:
    I_d: float
    I_c: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.I_d / self.I_c

    @property
    def bound_ok(self) -> bool:
        return self.I_d <= self.bound


def discretized_gauss_1d(n: int, mu: float, s: float, eta: float = ETA) -> SumBound:
    if not s > 0:
        raise DomainError(f"s must be positive, got {s!r}")
    lat = Lattice(n)
    I_d = lat.h * float(np.exp(-0.5 * s**2 * (lat.points - mu) ** 2).sum())
    I_c = SQRT_2PI / s
    return SumBound(I_d=I_d, I_c=I_c, bound=(1.0 + eta * s**2 / n) * I_c)


def normalized_margin(res: SumBound, n: int, s: float, eta: float = ETA) -> float:
    """(I_d/I_c - 1) * n / (eta s^2); at most 1 exactly when the 1D bound holds."""
    return (res.ratio - 1.0) * n / (eta * s**2)


def _check_pd(A: np.ndarray, size: int) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.shape != (size, size):
        raise DomainError(f"expected a {size}x{size} matrix, got shape {A.shape}")
    if not is_positive_definite(A):
        raise DomainError("matrix is not symmetric positive definite")
    return 0.5 * (A + A.T)


def _quadform(A: np.ndarray, pts: np.ndarray) -> np.ndarray:
    return np.einsum("...i,ij,...j->...", pts, A, pts)


def _inner_closed(A: np.ndarray, summed: np.ndarray) -> np.ndarray:
    """Integral over the last coordinate of exp(-x'Ax/2), closed form, at each summed point."""
    k = A.shape[0] - 1
    a = A[:k, k]
    schur = A[:k, :k] - np.outer(a, a) / A[k, k]
    return math.sqrt(2.0 * math.pi / A[k, k]) * np.exp(-0.5 * _quadform(schur, summed))


def _inner_quad(A: np.ndarray, summed: np.ndarray) -> np.ndarray:
    """Same integrals by adaptive quadrature over the full quadratic form.

    The free coordinate is centred on its conditional mean and scaled by its
    conditional spread so one window covers every point.
    """
    k = A.shape[0] - 1
    sd = 1.0 / math.sqrt(A[k, k])
    centre = -(summed @ A[:k, k]) / A[k, k]

    def f(u):
        pts = np.concatenate([summed, (centre + u * sd)[:, None]], axis=1)
        return np.exp(-0.5 * _quadform(A, pts))

    val, _ = integrate.quad_vec(f, -40.0, 40.0, epsabs=0.0, epsrel=1e-13, norm="max")
    return sd * val


def discretized_gauss_2d(n: int, A, eta: float = ETA, method: str = "closed") -> SumBound:
    """Lattice sum over x1 of the integral over x2 of exp(-x'Ax/2), against the full integral."""
    A = _check_pd(A, 2)
    lat = Lattice(n)
    pts = lat.points[:, None]
    inner = _inner_closed(A, pts) if method == "closed" else _inner_quad(A, pts)
    I_d = lat.h * float(inner.sum())
    I_c = 2.0 * math.pi / math.sqrt(np.linalg.det(A))
    return SumBound(I_d=I_d, I_c=I_c, bound=(1.0 + eta * A[0, 0] / n) * I_c)


def discretized_gauss_3d(n: int, n2: int, A, eta: float = ETA, method: str = "closed") -> SumBound:
    """Double lattice sum over (x1, x2) of the integral over x3 of exp(-x'Ax/2)."""
    A = _check_pd(A, 3)
    l1, l2 = Lattice(n), Lattice(n2)
    g1, g2 = np.meshgrid(l1.points, l2.points, indexing="ij")
    pts = np.stack([g1.ravel(), g2.ravel()], axis=1)
    inner = _inner_closed(A, pts) if method == "closed" else _inner_quad(A, pts)
    I_d = l1.h * l2.h * float(inner.sum())
    I_c = (2.0 * math.pi) ** 1.5 / math.sqrt(np.linalg.det(A))
    bound = (1.0 + eta * A[0, 0] / n) * (1.0 + eta * A[1, 1] / n2) * I_c
    return SumBound(I_d=I_d, I_c=I_c, bound=bound)


class GaussianBump:
    """exp(-s^2 (x - mu)^2 / 2) with analytic derivatives and integral."""

    def __init__(self, s: float, mu: float = 0.0):
        if not s > 0:
            raise DomainError(f"s must be positive, got {s!r}")
        self.s, self.mu = s, mu

    def __repr__(self):
        return f"GaussianBump(s={self.s!r}, mu={self.mu!r})"

    def f(self, x):
        return np.exp(-0.5 * self.s**2 * (np.asarray(x) - self.mu) ** 2)

    def d1(self, x):
        return -(self.s**2) * (np.asarray(x) - self.mu) * self.f(x)

    def d2(self, x):
        u = np.asarray(x) - self.mu
        return (self.s**4 * u**2 - self.s**2) * self.f(x)

    def integral(self, a: float, b: float) -> float:
        r = self.s / math.sqrt(2.0)
        return math.sqrt(math.pi / 2.0) / self.s * (math.erf(r * (b - self.mu)) - math.erf(r * (a - self.mu)))


class PolynomialFn:
    def __init__(self, coef):
        self.p = np.polynomial.Polynomial(coef)

    def __repr__(self):
        return f"PolynomialFn({self.p.coef.tolist()!r})"

    def f(self, x):
        return self.p(x)

    def d1(self, x):
        return self.p.deriv(1)(x)

    def d2(self, x):
        return self.p.deriv(2)(x)

    def integral(self, a: float, b: float) -> float:
        P = self.p.integ()
        return float(P(b) - P(a))


@dataclass(frozen=True)
class EMIdentity:
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def _nodes(a: float, b: float, n: int) -> tuple[float, np.ndarray]:
    delta = (b - a) / (n + 2)
    return delta, a + (np.arange(-1, n + 2) + 1) * delta  # y_{-1} = a ... y_{n+1} = b


def trapezoid_gap(fn, a: float, b: float, n: int) -> float:
    """delta*(f(a)/2 + sum_{k=0}^{n} f(y_k) + f(b)/2) minus the exact integral."""
    delta, y = _nodes(a, b, n)
    fy = fn.f(y)
    return delta * (0.5 * fy[0] + float(np.sum(fy[1:-1])) + 0.5 * fy[-1]) - fn.integral(a, b)


def _residual_sum(fn, y: np.ndarray, delta: float, kernel) -> float:
    total = 0.0
    # the 1e-14 absolute target sits at the roundoff floor; quad warns but the cells are still accurate
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for yk in y[:-1]:
            val, _ = integrate.quad(lambda t: kernel(t / delta) * fn.d2(yk + t), 0.0, delta, epsabs=1e-14, epsrel=1e-13, limit=200)
            total += val
    return total


def extended_em_identity(fn, a: float, b: float, n: int, b2bar: float) -> EMIdentity:
    """Both sides of the m=0 Euler-Maclaurin identity with a free constant ``b2bar``.

    The right side is b2bar*delta^2/2 (f'(b) - f'(a)) - delta^2 * sum_k Jbar_k with
    Jbar_k = 1/2 * int_0^delta (b2bar - t/delta + t^2/delta^2) f''(y_k + t) dt.
    """
    if n < 0 or not b > a:
        raise DomainError("need n >= 0 and b > a")
    delta, y = _nodes(a, b, n)
    jbar = 0.5 * _residual_sum(fn, y, delta, lambda u: b2bar - u + u * u)
    rhs = 0.5 * b2bar * delta**2 * (float(fn.d1(b)) - float(fn.d1(a))) - delta**2 * jbar
    return EMIdentity(lhs=trapezoid_gap(fn, a, b, n), rhs=rhs)


def bernoulli_polynomial(k: int) -> np.polynomial.Polynomial:
    """B_k(x) = sum_j binom(k, j) b_{k-j} x^j with b_1 = -1/2."""
    b = special.bernoulli(k)
    return np.polynomial.Polynomial([math.comb(k, j) * b[k - j] for j in range(k + 1)])


def em_classical_rhs_m0(fn, a: float, b: float, n: int) -> float:
    """Right side of the classical Euler-Maclaurin formula truncated at m=0."""
    delta, y = _nodes(a, b, n)
    b2 = special.bernoulli(2)[2]
    B2 = bernoulli_polynomial(2)
    J = _residual_sum(fn, y, delta, B2) / math.factorial(2)
    return b2 * delta**2 / math.factorial(2) * (float(fn.d1(b)) - float(fn.d1(a))) - delta**2 * J


@dataclass(frozen=True)
class EMConstants:
    minmax_value: float
    b2bar_star: float
    max_abs_derivative: dict
    derivative_variation: dict
    assembled_constant: float
    eta: float

    @property
    def ok(self) -> bool:
        slope_ok = all(abs(v - s / math.sqrt(math.e)) < 1e-8 for s, v in self.max_abs_derivative.items())
        tv_ok = all(abs(v - 4 * s / math.sqrt(math.e)) < 1e-8 for s, v in self.derivative_variation.items())
        return (
            abs(self.minmax_value - 0.125) < 1e-9
            and slope_ok
            and tv_ok
            and abs(self.assembled_constant - 3.0 / (8.0 * math.sqrt(math.e))) < 1e-9
            and abs(self.eta - ETA) < 1e-9
        )


def _sup_bbar(b2bar: float, xs: np.ndarray) -> float:
    return float(np.max(np.abs(xs * xs - xs + b2bar)))


def em_bound_constant_check(s_values=(0.5, 1.0, 2.0, 4.0)) -> EMConstants:
    """Recompute numerically the constants that make up eta."""
    xs = np.linspace(0.0, 1.0, 100_001)
    b_star, v_star = golden_section(lambda b: _sup_bbar(b, xs), 0.0, 0.25, 1e-13)

    slopes, variation = {}, {}
    for s in s_values:
        g = GaussianBump(s)
        res = optimize.minimize_scalar(lambda x: -abs(float(g.d1(x))), bounds=(0.0, 5.0 / s), method="bounded", options={"xatol": 1e-12})
        slopes[s] = -float(res.fun)
        # |f''| changes sign at mu +- 1/s; integrate piecewise to infinity
        parts = [(-np.inf, -1 / s), (-1 / s, 1 / s), (1 / s, np.inf)]
        variation[s] = sum(integrate.quad(lambda x: abs(float(g.d2(x))), lo, hi, epsabs=1e-13, epsrel=1e-13)[0] for lo, hi in parts)

    # (h^2/16) * (slope + slope + variation) per unit s, with the measured values
    s0 = s_values[0]
    assembled = (slopes[s0] + slopes[s0] + variation[s0]) / (16.0 * s0)
    # I_d - I_c <= assembled * s * h^2, I_c = sqrt(2 pi)/s, h^2 = 4/n
    eta = assembled * 4.0 / SQRT_2PI
    return EMConstants(
        minmax_value=v_star,
        b2bar_star=b_star,
        max_abs_derivative=slopes,
        derivative_variation=variation,
        assembled_constant=assembled,
        eta=eta,
    )
