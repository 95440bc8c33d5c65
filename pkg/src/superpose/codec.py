"""Dictionary generation, sectioned encoding, the AWGN channel and exhaustive
least squares decoding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, ResourceError
from .params import ChannelSpec, CodeSpec

DEFAULT_DECODE_CAP = 2**24
DEFAULT_ENTRY_CAP = 2**28
# scores per decode block (prefix rows x suffix columns)
_BLOCK_SCORES = 2**22


class Stream(int, Enum):
    DICTIONARY = 0
    MESSAGE = 1
    NOISE = 2


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Generator for the independent substream ``keys`` of a 64-bit ``seed``."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def derived_seed(seed: int, *keys: int) -> int:
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


class DictKind(str, Enum):
    BERNOULLI = "bernoulli"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True, eq=False)
class Dictionary:
    entries: np.ndarray
    L: int
    M: int
    kind: DictKind
    scale: float
    seed: int

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.entries.shape[1]

    def section(self, ell: int) -> np.ndarray:
        return self.entries[:, ell * self.M : (ell + 1) * self.M]


@dataclass(frozen=True, eq=False)
class SectionMessage:
    indices: np.ndarray
    M: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise DomainError("a message needs a 1-d array of at least one section index")
        if np.any(idx < 0) or np.any(idx >= self.M):
            raise DomainError(f"section index outside [0, {self.M})")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @property
    def L(self) -> int:
        return self.indices.size

    def columns(self) -> np.ndarray:
        """Absolute dictionary column of each section's selection."""
        return np.arange(self.L) * self.M + self.indices

    def to_beta(self) -> np.ndarray:
        beta = np.zeros(self.L * self.M, dtype=np.int8)
        beta[self.columns()] = 1
        return beta

    @classmethod
    def from_beta(cls, beta, M: int) -> SectionMessage:
        beta = np.asarray(beta).reshape(-1, M)
        if not np.all(beta.sum(axis=1) == 1) or not np.all((beta == 0) | (beta == 1)):
            raise DomainError("beta must have exactly one 1 in each section")
        return cls(np.argmax(beta, axis=1), M)

    def __eq__(self, other):
        if not isinstance(other, SectionMessage):
            return NotImplemented
        return self.M == other.M and np.array_equal(self.indices, other.indices)

    def __hash__(self):
        return hash((self.M, self.indices.tobytes()))

    def __repr__(self):
        return f"SectionMessage({self.indices.tolist()}, M={self.M})"


@dataclass(frozen=True, eq=False)
class ReceivedWord:
    y: np.ndarray

    @property
    def n(self) -> int:
        return self.y.size


@dataclass(frozen=True)
class DecodeResult:
    message: SectionMessage
    residual: float
    n_candidates: int = field(default=0)


def generate_dictionary(
    spec: CodeSpec,
    channel: ChannelSpec,
    kind: DictKind | str = DictKind.BERNOULLI,
    seed: int = 0,
    entry_cap: int = DEFAULT_ENTRY_CAP,
) -> Dictionary:
    """Draw an ``n x N`` dictionary with entries of scale sqrt(P/L).

    Bernoulli entries are equiprobable +-sqrt(P/L); Gaussian entries are
    N(0, P/L). The same seed always yields the same matrix.
    """
    kind = DictKind(kind)
    if spec.n * spec.N > entry_cap:
        raise ResourceError(f"dictionary of {spec.n}x{spec.N} entries exceeds cap {entry_cap}")
    scale = math.sqrt(channel.P / spec.L)
    rng = rng_for(seed, Stream.DICTIONARY)
    if kind is DictKind.BERNOULLI:
        signs = rng.integers(0, 2, size=(spec.n, spec.N), dtype=np.int8)
        entries = np.where(signs == 1, scale, -scale)
    else:
        entries = rng.standard_normal((spec.n, spec.N)) * scale
    entries.setflags(write=False)
    return Dictionary(entries=entries, L=spec.L, M=spec.M, kind=kind, scale=scale, seed=seed)


def random_message(L: int, M: int, seed: int) -> SectionMessage:
    return SectionMessage(rng_for(seed, Stream.MESSAGE).integers(0, M, size=L), M)


def encode(msg: SectionMessage, dictionary: Dictionary) -> np.ndarray:
    """Codeword X @ beta: the sum of one selected column per section."""
    if msg.L != dictionary.L or msg.M != dictionary.M:
        raise DomainError(
            f"message shape (L={msg.L}, M={msg.M}) does not match dictionary "
            f"(L={dictionary.L}, M={dictionary.M})"
        )
    return dictionary.entries[:, msg.columns()].sum(axis=1)


def awgn_channel(c: np.ndarray, sigma2: float, seed: int) -> ReceivedWord:
    if sigma2 < 0:
        raise DomainError(f"noise variance must be non-negative, got {sigma2!r}")
    c = np.asarray(c, dtype=float)
    if sigma2 == 0:
        return ReceivedWord(c.copy())
    noise = rng_for(seed, Stream.NOISE).standard_normal(c.shape) * math.sqrt(sigma2)
    return ReceivedWord(c + noise)


def codeword_power(c: np.ndarray) -> float:
    c = np.asarray(c, dtype=float)
    return float(np.dot(c, c) / c.size)


def count_mistakes(decoded: SectionMessage, truth: SectionMessage) -> int:
    if decoded.L != truth.L or decoded.M != truth.M:
        raise DomainError("messages have different section layouts")
    return int(np.count_nonzero(decoded.indices != truth.indices))


def section_error_rate(decoded: SectionMessage, truth: SectionMessage) -> float:
    return count_mistakes(decoded, truth) / truth.L


def _all_codewords(dictionary: Dictionary, sections: range) -> np.ndarray:
    """Every sum of one column per section in ``sections``, rows in mixed-radix order."""
    n = dictionary.n
    acc = np.zeros((1, n))
    for ell in sections:
        acc = (acc[:, None, :] + dictionary.section(ell).T[None, :, :]).reshape(-1, n)
    return acc


def least_squares_decode(
    dictionary: Dictionary,
    y: ReceivedWord | np.ndarray,
    cap: int = DEFAULT_DECODE_CAP,
) -> DecodeResult:
    """Exhaustive minimizer of ||y - X beta||^2 over all M**L section selections.

    Sections are split into a leading and a trailing group. Partial codewords
    of each group are enumerated once, and all M**L scores are formed as
    ||y - p||^2 - 2 (y - p).s + ||s||^2 block by block. Near-minimal
    candidates are rescored exactly; ties go to the lexicographically
    smallest index array.
    """
    yv = y.y if isinstance(y, ReceivedWord) else np.asarray(y, dtype=float)
    L, M = dictionary.L, dictionary.M
    if yv.size != dictionary.n:
        raise DomainError(f"received word length {yv.size} != dictionary rows {dictionary.n}")
    total = M**L
    if total > cap:
        raise ResourceError(f"codebook has M^L = {M}^{L} = {total} words, above decode cap {cap}")

    split = L // 2
    heads = _all_codewords(dictionary, range(split))  # (M**split, n)
    tails = _all_codewords(dictionary, range(split, L))  # (M**(L-split), n)
    tail_sq = np.einsum("ij,ij->i", tails, tails)
    bases = yv[None, :] - heads
    base_sq = np.einsum("ij,ij->i", bases, bases)

    rows_per_block = max(1, _BLOCK_SCORES // tails.shape[0])
    best = math.inf
    block_mins = []
    for start in range(0, bases.shape[0], rows_per_block):
        stop = min(start + rows_per_block, bases.shape[0])
        scores = base_sq[start:stop, None] - 2.0 * (bases[start:stop] @ tails.T) + tail_sq[None, :]
        m = float(scores.min())
        block_mins.append((start, stop, m))
        best = min(best, m)

    scale = float(yv @ yv) + float(tail_sq.max()) + float(np.einsum("ij,ij->i", heads, heads).max())
    tol = 1e-9 * max(scale, 1.0)
    cand = []
    for start, stop, m in block_mins:
        if m > best + tol:
            continue
        scores = base_sq[start:stop, None] - 2.0 * (bases[start:stop] @ tails.T) + tail_sq[None, :]
        r, c = np.nonzero(scores <= best + tol)
        cand.extend(((start + r) * tails.shape[0] + c).tolist())

    cand.sort()
    choice, choice_res = None, math.inf
    for flat in cand:
        idx = np.array(np.unravel_index(flat, (M,) * L), dtype=np.int64)
        msg = SectionMessage(idx, M)
        r = yv - encode(msg, dictionary)
        res = float(r @ r)
        if res < choice_res:
            choice, choice_res = msg, res
    return DecodeResult(message=choice, residual=choice_res, n_candidates=len(cand))


def codebook(dictionary: Dictionary, cap: int = DEFAULT_DECODE_CAP) -> np.ndarray:
    """All M**L codewords as rows, in lexicographic message order."""
    if dictionary.M**dictionary.L > cap:
        raise ResourceError(f"codebook of {dictionary.M}^{dictionary.L} words exceeds cap {cap}")
    return _all_codewords(dictionary, range(dictionary.L))


def has_duplicate_codewords(dictionary: Dictionary, cap: int = DEFAULT_DECODE_CAP) -> bool:
    """Whether two distinct messages map to the same codeword."""
    words = codebook(dictionary, cap)
    if dictionary.kind is DictKind.BERNOULLI:
        # sums of +-scale are exact multiples of scale
        keys = np.rint(words / dictionary.scale).astype(np.int16)
    else:
        keys = np.round(words, 12)
    rows = np.ascontiguousarray(keys).view(np.dtype((np.void, keys.dtype.itemsize * keys.shape[1])))
    return np.unique(rows.ravel()).size < keys.shape[0]
