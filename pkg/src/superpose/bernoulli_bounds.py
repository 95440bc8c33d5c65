"""Penalties that turn the Gaussian-dictionary bound into a Bernoulli-dictionary bound.

The binomial-vs-Gaussian log ratio bound ``phi(l)``, the penalty terms
iota_1..iota_5, the resulting per-l bound and exponent, and the 2x2 / 3x3
quadratic-form matrices whose discretized Gaussian integrals the penalties
control.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln

from ._search import golden_section_vec
from .errors import DomainError, FeasibilityError
from .exponents import (
    ErrBound,
    ExponentQuery,
    ExponentBound,
    _check_bound_args,
    first_section_count,
    h_fn,
    log_err,
    summed_bound,
)

ETA = math.sqrt(9.0 / (8.0 * math.pi * math.e))

ZETA_LO, ZETA_HI = 0.001, 0.499
ZETA_GRID = 2048
ZETA_TOL = 1e-10
BRANCH_NAMES = ("curvature", "central", "tail")


def _c_zeta(zeta):
    return 1.0 / (1.0 + 2.0 * zeta) ** 2 + 1.0 / (1.0 - 2.0 * zeta) ** 2


def _branches(l, zeta):
    l = np.asarray(l, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    b1 = (3.0 / 16.0 * _c_zeta(zeta) ** 2 + 1.0 / 12.0) / l
    b2 = -4.0 * zeta**4 / 3.0 * l + np.log(l / 2.0) + 1.0 / (12.0 * l)
    b3 = -(math.log(2.0) - 0.5) * l + 0.5 * np.log(math.pi * l / 2.0)
    return np.broadcast_arrays(b1, b2, b3)


def phi_zeta(l: int, zeta: float) -> float:
    if l < 1:
        raise DomainError(f"l must be a positive integer, got {l!r}")
    if not 0 < zeta < 0.5:
        raise DomainError(f"zeta must lie in (0, 1/2), got {zeta!r}")
    return float(max(b.item() for b in _branches(l, zeta)))


@dataclass(frozen=True)
class PhiResult:
    l: int
    zeta_star: float
    phi: float
    branch: str


def _phi_vec(ls: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(phi, zeta*) for an array of l, minimizing over zeta by grid then golden section."""
    ls = np.asarray(ls, dtype=float)
    grid = np.linspace(ZETA_LO, ZETA_HI, ZETA_GRID)
    step = grid[1] - grid[0]
    phis = np.empty(ls.size)
    zetas = np.empty(ls.size)
    chunk = max(1, 2**22 // ZETA_GRID)
    for s in range(0, ls.size, chunk):
        lc = ls[s : s + chunk]
        vals = np.maximum.reduce(_branches(lc[:, None], grid[None, :]))
        i = np.argmin(vals, axis=1)
        lo = np.maximum(grid[i] - step, ZETA_LO)
        hi = np.minimum(grid[i] + step, ZETA_HI)

        def f(z, lc=lc):
            return np.maximum.reduce(_branches(lc, z))

        z, fz = golden_section_vec(f, lo, hi, ZETA_TOL)
        gbest = vals[np.arange(lc.size), i]
        use_grid = gbest <= fz
        phis[s : s + lc.size] = np.where(use_grid, gbest, fz)
        zetas[s : s + lc.size] = np.where(use_grid, grid[i], z)
    return phis, zetas


_phi_cache = np.full(1, np.nan)


def phi_table(lmax: int) -> np.ndarray:
    """Array whose entry ``l`` is phi(l) for 1 <= l <= lmax (entry 0 is NaN); memoized."""
    global _phi_cache
    if lmax >= _phi_cache.size:
        start = _phi_cache.size
        new, _ = _phi_vec(np.arange(start, lmax + 1))
        _phi_cache = np.concatenate([_phi_cache, new])
    return _phi_cache[: lmax + 1]


def phi_many(ls) -> list[PhiResult]:
    """phi(l) with its minimizing zeta and binding branch for each l in ``ls``."""
    ls = np.asarray(ls, dtype=np.int64).ravel()
    if ls.size and ls.min() < 1:
        raise DomainError("l must be a positive integer")
    p, z = _phi_vec(ls)
    binding = np.argmax(np.stack(_branches(ls, z)), axis=0)
    return [PhiResult(int(l), float(zz), float(pp), BRANCH_NAMES[b]) for l, zz, pp, b in zip(ls, z, p, binding)]


def phi(l: int) -> PhiResult:
    """Minimum over zeta of the three-branch bound on the binomial/Gaussian log ratio at size ``l``."""
    if l < 1:
        raise DomainError(f"l must be a positive integer, got {l!r}")
    return phi_many([l])[0]


def log_binom_gauss_ratio(l: int) -> tuple[np.ndarray, np.ndarray]:
    """ln of Binomial(l, 1/2) pmf over the N(l/2, l/4) density, for k = 0..l."""
    k = np.arange(l + 1, dtype=float)
    log_pmf = gammaln(l + 1.0) - gammaln(k + 1.0) - gammaln(l - k + 1.0) - l * math.log(2.0)
    log_density = -0.5 * math.log(2.0 * math.pi * l / 4.0) - (k - l / 2.0) ** 2 / (l / 2.0)
    return k.astype(np.int64), log_pmf - log_density


def binom_gauss_ratio(l: int) -> tuple[float, int]:
    """Largest pmf/density ratio over k and the smallest k attaining it."""
    if not 1 <= l <= 10**6:
        raise DomainError(f"l must lie in [1, 1e6], got {l!r}")
    k, r = log_binom_gauss_ratio(l)
    i = int(np.argmax(r))
    return math.exp(r[i]), int(k[i])


@dataclass(frozen=True)
class IotaBreakdown:
    L: int
    alpha0: float
    v: float
    iota3: float
    iota4: float
    iota5: float
    iota1: float
    iota2: float
    iota4_range_empty: bool = False
    eta: float = ETA

    @property
    def iota(self) -> float:
        return max(self.iota1, self.iota2)


def _floor_L_minus_sqrt(L: int) -> int:
    r = math.isqrt(L)
    return L - r if r * r == L else math.floor(L - math.sqrt(L))


def _ceil_L_minus_sqrt(L: int) -> int:
    r = math.isqrt(L)
    return L - r if r * r == L else math.ceil(L - math.sqrt(L))


def iota_breakdown(L: int, alpha0: float, v: float, eta: float = ETA) -> IotaBreakdown:
    """Penalty terms for L sections at section error threshold alpha0 and SNR v.

    The maxima run over integer l. Real-valued range ends are rounded so
    that the boundary integer is always scanned.
    """
    if L < 2:
        raise DomainError(f"need L >= 2, got {L}")
    if not 0 < alpha0 <= 1:
        raise DomainError(f"alpha0 must lie in (0, 1], got {alpha0!r}")
    if not v > 0:
        raise DomainError(f"SNR must be positive, got {v!r}")
    ph = phi_table(L)
    lo = first_section_count(alpha0, L)

    l3 = np.arange(lo, L + 1)
    iota3 = float(np.max(np.exp(ph[l3]) * (1.0 + eta * (1.0 + v) / l3))) - 1.0

    l4 = np.arange(lo, _floor_L_minus_sqrt(L) + 1)
    empty4 = l4.size == 0
    if empty4:
        warnings.warn(f"iota4 range is empty at L={L}, alpha0={alpha0}; using iota4 = 0", stacklevel=2)
        iota4 = 0.0
    else:
        m = L - l4
        iota4 = float(np.max(np.exp(ph[l4] + ph[m]) * (1.0 + eta / l4) * (1.0 + eta / m))) - 1.0

    l5 = np.arange(max(_ceil_L_minus_sqrt(L), 1), L)
    iota5 = float(np.max(np.exp(ph[l5]) * (1.0 + eta / l5))) / math.sqrt(1.0 - 1.0 / math.sqrt(L)) - 1.0

    iota1 = math.log1p(iota3) + math.log1p(max(iota4, iota5))
    iota2 = float(ph[L]) + math.log1p(2.0 * eta / L)
    return IotaBreakdown(
        L=L, alpha0=alpha0, v=v, iota3=iota3, iota4=iota4, iota5=iota5,
        iota1=iota1, iota2=iota2, iota4_range_empty=empty4, eta=eta,
    )


def err_ber(query: ExponentQuery, iotas: IotaBreakdown) -> ErrBound:
    """Bernoulli-dictionary bound on Pr[mistakes = alpha L] at a given slack split t."""
    if query.delta_alpha < -1e-15:
        raise DomainError(f"Delta_alpha = {query.delta_alpha!r} is negative")
    total, a, b = log_err(
        query.alpha, query.v, query.R, query.L, query.n, query.t_alpha, iotas.iota1, iotas.iota2
    )
    return ErrBound(float(total), (float(a), float(b)))


def ber_exponent_bound(alpha0: float, v: float, R: float, L: int, n: int, iotas: IotaBreakdown | None = None):
    """Bernoulli counterpart of :func:`superpose.exponents.gauss_exponent_bound`.

    Returns ``(ExponentBound, IotaBreakdown)``; the exponent is the Gaussian one
    lowered by iota(L).
    """
    C = _check_bound_args(alpha0, v, R)
    if iotas is None:
        iotas = iota_breakdown(L, alpha0, v)
    E = h_fn(alpha0, C - R, v) - math.log(2 * L) / n - iotas.iota

    def make_err_fn(alpha):
        return lambda t: log_err(alpha, v, R, L, n, t, iotas.iota1, iotas.iota2)

    total, rows = summed_bound(alpha0, v, R, L, n, make_err_fn)
    return ExponentBound(E_lower=E, log_prob_bound=-n * E, summed_log_bound=total, per_l=rows), iotas


def with_penalties(iotas: IotaBreakdown, iota1: float, iota2: float) -> IotaBreakdown:
    return replace(iotas, iota1=iota1, iota2=iota2)


def proof_matrix_B(alpha: float, v: float) -> np.ndarray:
    if not 0 < alpha <= 1 or not v > 0:
        raise DomainError(f"need alpha in (0, 1] and v > 0, got alpha={alpha!r}, v={v!r}")
    c = alpha**2 * v / (1.0 + alpha**2 * v)
    off = 1.0 / (alpha * math.sqrt(v))
    return c * np.array([[-1.0, off], [off, 1.0]])


def proof_matrix_Btilde(alpha: float, v: float, sign: int = -1) -> np.ndarray:
    """3x3 matrix for the partial-overlap term; ``sign`` picks the sign of the (2,2) entry.

    With ``sign=-1`` the determinant of I - lam*Btilde is 1 - lam^2 alpha(1-alpha)v/(1+alpha v).
    """
    if not 0 < alpha < 1 or not v > 0:
        raise DomainError(f"need alpha in (0, 1) and v > 0, got alpha={alpha!r}, v={v!r}")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    av, a2v = 1.0 + alpha * v, 1.0 + alpha**2 * v
    sav = math.sqrt(alpha * v)
    b11 = alpha * v / av - alpha**3 * v / a2v
    b12 = -(alpha**2) * math.sqrt(alpha * (1 - alpha)) * v / a2v
    b13 = sav / av - alpha * sav / a2v
    b22 = sign * alpha**2 * (1 - alpha) * v / a2v
    b23 = -alpha * math.sqrt((1 - alpha) * v) / a2v
    b33 = 1.0 / av - 1.0 / a2v
    return np.array([[b11, b12, b13], [b12, b22, b23], [b13, b23, b33]])


def leading_minors(A: np.ndarray) -> list[float]:
    return [float(np.linalg.det(A[:k, :k])) for k in range(1, A.shape[0] + 1)]


def is_positive_definite(A: np.ndarray) -> bool:
    A = np.asarray(A, dtype=float)
    return np.allclose(A, A.T) and all(m > 0 for m in leading_minors(A))


def assemble_A(B: np.ndarray, lam: float, check: bool = True) -> np.ndarray:
    A = np.eye(B.shape[0]) - lam * np.asarray(B, dtype=float)
    if check and not is_positive_definite(A):
        raise FeasibilityError(f"I - {lam}*B is not positive definite; reduce lambda")
    return A


def pd_lambda_limit(B: np.ndarray) -> float:
    """Supremum of lam >= 0 keeping I - lam*B positive definite."""
    top = float(np.linalg.eigvalsh(B).max())
    return math.inf if top <= 0 else 1.0 / top
