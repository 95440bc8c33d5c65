"""Error exponent machinery for least squares decoding with a Gaussian dictionary.

All probabilities are handled as natural logs; :class:`ErrBound` carries the
raw log value next to the value clipped to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from ._search import golden_section
from .errors import DomainError
from .params import c_alpha, capacity

T_GRID_POINTS = 1024
T_REL_TOL = 1e-9


def g_fn(x):
    return np.sqrt(1.0 + 4.0 * np.square(x)) - 1.0


def w_v(v: float) -> float:
    if not v > 0:
        raise DomainError(f"SNR must be positive, got {v!r}")
    return v / (4.0 * (1.0 + v) ** 2 * math.sqrt(1.0 + 0.25 * v**3 / (1.0 + v)))


def h_fn(alpha: float, delta: float, v: float) -> float:
    """min{alpha*w_v*delta, g(delta/(2*sqrt(v)))/4}, the exponent floor at rate gap ``delta``."""
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    if delta < 0:
        raise DomainError(f"rate gap must be non-negative, got {delta!r}")
    return float(min(alpha * w_v(v) * delta, 0.25 * g_fn(delta / (2.0 * math.sqrt(v)))))


@dataclass(frozen=True)
class RhoTerms:
    one_minus_rho1sq: float
    one_minus_rho2sq: float


def rho_terms(alpha: float, v: float) -> RhoTerms:
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    if not v > 0:
        raise DomainError(f"SNR must be positive, got {v!r}")
    return RhoTerms(
        one_minus_rho1sq=alpha * (1 - alpha) * v / (1 + alpha * v),
        one_minus_rho2sq=alpha**2 * v / (1 + alpha**2 * v),
    )


def _check_c(c: float) -> None:
    if not 0 <= c < 1:
        raise DomainError(f"1 - rho^2 must lie in [0, 1), got {c!r}")


def _lambda_star(delta, c):
    # stationary point of lam*delta + 0.5*ln(1 - lam^2 c), written to avoid
    # cancellation at small delta: 2*delta / (c * (1 + sqrt(1 + 4 delta^2 / c)))
    delta = np.asarray(delta, dtype=float)
    return 2.0 * delta / (c * (1.0 + np.sqrt(1.0 + 4.0 * delta**2 / c)))


def _objective(lam, delta, c):
    return lam * delta + 0.5 * np.log1p(-(lam**2) * c)


def d_max(delta: float, c: float) -> tuple[float, float]:
    """D(delta, c) = max over lam >= 0 of lam*delta + 0.5*ln(1 - lam^2 c); returns (value, maximizer)."""
    _check_c(c)
    if delta < 0:
        raise DomainError(f"delta must be non-negative, got {delta!r}")
    if delta == 0:
        return 0.0, 0.0
    if c == 0:
        raise DomainError("degenerate c=0: the objective is linear in lambda and the supremum is infinite")
    lam = float(_lambda_star(delta, c))
    return float(_objective(lam, delta, c)), lam


def d1_max(delta: float, c: float) -> tuple[float, float]:
    """D1: the same maximum restricted to 0 <= lam <= 1."""
    _check_c(c)
    if delta < 0:
        raise DomainError(f"delta must be non-negative, got {delta!r}")
    if delta == 0:
        return 0.0, 0.0
    lam = 1.0 if c == 0 else min(1.0, float(_lambda_star(delta, c)))
    return float(_objective(lam, delta, c)), lam


def _d_values(delta: np.ndarray, c: float, clamp: bool) -> np.ndarray:
    delta = np.maximum(np.asarray(delta, dtype=float), 0.0)
    if c == 0:
        if clamp:
            return delta.copy()
        return np.where(delta > 0, np.inf, 0.0)
    lam = _lambda_star(delta, c)
    if clamp:
        lam = np.minimum(lam, 1.0)
    return _objective(lam, delta, c)


def ln_binom(L, k):
    return gammaln(L + 1.0) - gammaln(k + 1.0) - gammaln(L - k + 1.0)


def a_vL(v: float, L: int, R: float) -> float:
    """Smallest section size rate for which the Gaussian bound decays, maximized over alpha = k/L."""
    if L < 3:
        raise DomainError(f"need L >= 3 for a nonempty alpha grid, got {L}")
    if not R > 0:
        raise DomainError(f"rate must be positive, got {R!r}")
    C = capacity(v)
    best = -math.inf
    for k in range(1, L):
        alpha = k / L
        d1, _ = d1_max(c_alpha(alpha, v) - alpha * C, rho_terms(alpha, v).one_minus_rho1sq)
        if d1 <= 0:
            raise ArithmeticError(f"D1 vanished at interior alpha={alpha}")
        best = max(best, R * float(ln_binom(L, k)) / (d1 * L * math.log(L)))
    return best


@dataclass(frozen=True)
class ExponentQuery:
    alpha: float
    v: float
    R: float
    L: int
    n: int
    t_alpha: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not self.R < capacity(self.v):
            raise DomainError(f"rate {self.R!r} is not below capacity {capacity(self.v)!r}")
        if not 0 <= self.t_alpha <= self.slack * (1 + 1e-12) + 1e-15:
            raise DomainError(f"t_alpha={self.t_alpha!r} outside [0, {self.slack!r}]")

    @property
    def l(self) -> float:
        return self.alpha * self.L

    @property
    def slack(self) -> float:
        return c_alpha(self.alpha, self.v) - self.alpha * self.R

    @property
    def delta_alpha(self) -> float:
        return self.slack - self.t_alpha


@dataclass(frozen=True)
class ErrBound:
    log_value: float
    log_terms: tuple[float, float]

    @property
    def value(self) -> float:
        return math.exp(min(self.log_value, 0.0))

    @property
    def vacuous(self) -> bool:
        return self.log_value >= 0.0


def log_err(alpha, v, R, L, n, t, iota1: float = 0.0, iota2: float = 0.0):
    """Log of binom(L, alpha L) e^{-n(D1(Delta)-iota1)} + e^{-n(D(t)-iota2)}, elementwise in ``t``.

    Returns ``(total, first, second)``; with zero penalties this is the
    Gaussian-dictionary bound on Pr[mistakes = alpha L].
    """
    rho = rho_terms(alpha, v)
    t = np.asarray(t, dtype=float)
    delta = c_alpha(alpha, v) - alpha * R - t
    first = ln_binom(L, alpha * L) - n * (_d_values(delta, rho.one_minus_rho1sq, clamp=True) - iota1)
    second = -n * (_d_values(t, rho.one_minus_rho2sq, clamp=False) - iota2)
    return np.logaddexp(first, second), first, second


def err_gauss(query: ExponentQuery) -> ErrBound:
    if query.delta_alpha < -1e-15:
        raise DomainError(f"Delta_alpha = {query.delta_alpha!r} is negative")
    total, a, b = log_err(query.alpha, query.v, query.R, query.L, query.n, query.t_alpha)
    return ErrBound(float(total), (float(a), float(b)))


@dataclass(frozen=True)
class TMin:
    t: float
    bound: ErrBound
    has_slack: bool = True


def minimize_over_t(alpha: float, v: float, R: float, L: int, n: int, err_fn=None) -> TMin:
    """Minimize a log error bound over t in [0, C_alpha - alpha R].

    ``err_fn(t)`` must return ``(total, first, second)`` logs elementwise in
    ``t`` (default: the Gaussian bound). With no slack the bound is vacuous
    and reported as log 0.
    """
    if err_fn is None:

        def err_fn(t):
            return log_err(alpha, v, R, L, n, t)

    slack = c_alpha(alpha, v) - alpha * R
    if slack < 0:
        return TMin(t=0.0, bound=ErrBound(0.0, (0.0, -math.inf)), has_slack=False)
    if slack == 0:
        total, a, b = err_fn(0.0)
        return TMin(t=0.0, bound=ErrBound(float(total), (float(a), float(b))))

    def scalar(t):
        return float(err_fn(t)[0])

    grid = np.linspace(0.0, slack, T_GRID_POINTS)
    vals = err_fn(grid)[0]
    i = int(np.argmin(vals))
    lo, hi = float(grid[max(i - 1, 0)]), float(grid[min(i + 1, grid.size - 1)])
    t_best, f_best = golden_section(scalar, lo, hi, T_REL_TOL * slack)
    if vals[i] <= f_best:
        t_best = float(grid[i])
    total, a, b = err_fn(t_best)
    return TMin(t=t_best, bound=ErrBound(float(total), (float(a), float(b))))


def first_section_count(alpha0: float, L: int) -> int:
    """Smallest integer l with l >= alpha0 * L."""
    return max(1, math.ceil(alpha0 * L - 1e-9))


@dataclass(frozen=True)
class PerSection:
    l: int
    t: float
    log_bound: float


@dataclass(frozen=True)
class ExponentBound:
    E_lower: float
    log_prob_bound: float
    summed_log_bound: float
    per_l: tuple[PerSection, ...] = field(repr=False)

    @property
    def prob_bound(self) -> float:
        return math.exp(min(self.log_prob_bound, 0.0))

    @property
    def summed_bound(self) -> float:
        return math.exp(min(self.summed_log_bound, 0.0))


def summed_bound(alpha0: float, v: float, R: float, L: int, n: int, make_err_fn=None):
    """Sum over l >= alpha0 L of the t-minimized per-l bound, as a log plus the per-l table."""
    rows = []
    for l in range(first_section_count(alpha0, L), L + 1):
        alpha = l / L
        fn = make_err_fn(alpha) if make_err_fn is not None else None
        tm = minimize_over_t(alpha, v, R, L, n, fn)
        rows.append(PerSection(l=l, t=tm.t, log_bound=min(tm.bound.log_value, 0.0)))
    total = float(np.logaddexp.reduce([r.log_bound for r in rows]))
    return total, tuple(rows)


def _check_bound_args(alpha0, v, R):
    C = capacity(v)
    if not R < C:
        raise DomainError(f"rate {R!r} nats must be below capacity {C!r} nats")
    if not 0 < alpha0 <= 1:
        raise DomainError(f"alpha0 must lie in (0, 1], got {alpha0!r}")
    return C


def gauss_exponent_bound(alpha0: float, v: float, R: float, L: int, n: int) -> ExponentBound:
    """Exponent lower bound h(alpha0, C-R) - ln(2L)/n and the per-l summed bound."""
    C = _check_bound_args(alpha0, v, R)
    E = h_fn(alpha0, C - R, v) - math.log(2 * L) / n
    total, rows = summed_bound(alpha0, v, R, L, n)
    return ExponentBound(E_lower=E, log_prob_bound=-n * E, summed_log_bound=total, per_l=rows)
