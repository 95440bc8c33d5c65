"""Channel and code parameter bookkeeping.

Rates and capacities are carried in nats per transmission everywhere; use
:func:`to_bits` only when presenting numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError

LN2 = math.log(2.0)


def to_bits(nats: float) -> float:
    return nats / LN2


def capacity(v: float) -> float:
    """AWGN capacity 0.5*ln(1+v) in nats for signal-to-noise ratio ``v``."""
    if not v > 0:
        raise DomainError(f"SNR must be positive, got {v!r}")
    return 0.5 * math.log1p(v)


def c_alpha(alpha: float, v: float) -> float:
    """Partial capacity 0.5*ln(1+alpha*v); equals ``capacity(v)`` at alpha=1."""
    if not v > 0:
        raise DomainError(f"SNR must be positive, got {v!r}")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    return 0.5 * math.log1p(alpha * v)


@dataclass(frozen=True)
class ChannelSpec:
    P: float
    sigma2: float
    v: float = field(init=False)

    def __post_init__(self):
        if not self.P > 0:
            raise DomainError(f"power P must be positive, got {self.P!r}")
        if not self.sigma2 > 0:
            raise DomainError(f"noise variance must be positive, got {self.sigma2!r}")
        object.__setattr__(self, "v", self.P / self.sigma2)

    @classmethod
    def from_snr(cls, v: float, P: float = 1.0) -> ChannelSpec:
        if not v > 0:
            raise DomainError(f"SNR must be positive, got {v!r}")
        return cls(P=P, sigma2=P / v)

    @property
    def capacity(self) -> float:
        return capacity(self.v)

    @property
    def capacity_bits(self) -> float:
        return to_bits(self.capacity)


@dataclass(frozen=True)
class CodeSpec:
    """Dimensions of a sectioned code.

    ``R`` is the realized rate ``L*ln(M)/n`` in nats. ``a`` is the section
    size rate ``ln M / ln L`` (the value requested when built from ``(L, a)``).
    """

    L: int
    M: int
    n: int
    a: float
    N: int = field(init=False)
    K: float = field(init=False)
    R: float = field(init=False)

    def __post_init__(self):
        if self.L < 1 or self.M < 1:
            raise DomainError(f"L and M must be positive, got L={self.L}, M={self.M}")
        if self.n < 1:
            raise DomainError(f"code length must be at least 1, got n={self.n}")
        object.__setattr__(self, "N", self.L * self.M)
        object.__setattr__(self, "K", self.L * math.log2(self.M))
        object.__setattr__(self, "R", self.L * math.log(self.M) / self.n)
        # 2^K = M^L, compared as logs
        if abs(self.K * LN2 - self.L * math.log(self.M)) > 1e-9 * max(1.0, self.K):
            raise DomainError("inconsistent K: 2^K != M^L")

    @classmethod
    def from_sizes(cls, L: int, M: int, n: int) -> CodeSpec:
        a = math.log(M) / math.log(L) if L > 1 else float("nan")
        return cls(L=L, M=M, n=n, a=a)

    @property
    def codebook_size(self) -> int:
        return self.M**self.L

    @property
    def R_bits(self) -> float:
        return to_bits(self.R)


def _ceil_power(L: int, a: float) -> int:
    x = L**a
    r = round(x)
    # L**a for integer targets (e.g. 9**2.0) must not ceil past the integer
    if abs(x - r) <= 1e-9 * max(1.0, x):
        return int(r)
    return math.ceil(x)


def derive_code_spec(L: int, a: float, R: float) -> CodeSpec:
    """Build a code from section count ``L``, section size rate ``a`` and target rate ``R`` (nats).

    M = ceil(L**a) and n = round(a*L*ln(L)/R). The stored ``R`` is the
    realized rate for the rounded ``n``.
    """
    if L < 2:
        raise DomainError(f"need L >= 2, got {L}")
    if not a > 0:
        raise DomainError(f"section size rate must be positive, got {a!r}")
    if not R > 0:
        raise DomainError(f"rate must be positive, got {R!r}")
    M = _ceil_power(L, a)
    n = round(a * L * math.log(L) / R)
    if n < 1:
        raise DomainError(f"rate {R!r} too large: derived code length is 0")
    return CodeSpec(L=L, M=M, n=n, a=a)


def code_spec_for_rate(L: int, M: int, R: float) -> CodeSpec:
    """Like :func:`derive_code_spec` but with an explicit section size ``M``."""
    if L < 2:
        raise DomainError(f"need L >= 2, got {L}")
    if not R > 0:
        raise DomainError(f"rate must be positive, got {R!r}")
    n = round(L * math.log(M) / R)
    if n < 1:
        raise DomainError(f"rate {R!r} too large: derived code length is 0")
    return CodeSpec.from_sizes(L, M, n)
