"""Seeded Monte Carlo estimate of Pr[mistakes >= alpha0 L] under exhaustive decoding."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from ..codec import (
    awgn_channel,
    codeword_power,
    count_mistakes,
    derived_seed,
    encode,
    generate_dictionary,
    has_duplicate_codewords,
    least_squares_decode,
    random_message,
)
from ..exponents import first_section_count
from ..params import CodeSpec
from .config import ExperimentConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    mistakes: int
    alpha: float
    residual: float
    power: float
    duplicate: bool = False


@dataclass
class MonteCarloResult:
    config: ExperimentConfig
    code: CodeSpec
    records: list[TrialRecord] = field(repr=False)
    histogram: np.ndarray
    threshold: int
    events: int
    counted: int
    excluded_duplicates: int
    p_hat: float
    ci_low: float
    ci_high: float

    @property
    def ci_halfwidth(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


def run_trial(config: ExperimentConfig, code: CodeSpec, trial: int) -> TrialRecord:
    seed = derived_seed(config.master_seed, trial)
    dictionary = generate_dictionary(code, config.channel, config.dict_kind, seed)
    msg = random_message(code.L, code.M, seed)
    c = encode(msg, dictionary)
    y = awgn_channel(c, config.noise_variance, seed)
    res = least_squares_decode(dictionary, y, cap=config.decode_cap)
    l = count_mistakes(res.message, msg)
    duplicate = config.noiseless and has_duplicate_codewords(dictionary, cap=config.decode_cap)
    return TrialRecord(
        trial=trial,
        seed=seed,
        mistakes=l,
        alpha=l / code.L,
        residual=res.residual,
        power=codeword_power(c),
        duplicate=bool(duplicate),
    )


def wilson_interval(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    ci = binomtest(k, n).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def run_monte_carlo(config: ExperimentConfig, threads: int | None = None) -> MonteCarloResult:
    """Run ``config.trials`` independent trials; each draws its own dictionary, message and noise.

    Trials use substreams of ``master_seed`` keyed by trial index, and results
    are collected in trial order, so the output does not depend on ``threads``.
    Noiseless runs scan each dictionary for colliding codewords and leave
    those trials out of the estimate.
    """
    code = config.code_spec()
    workers = threads if threads is not None else config.threads
    log.info("running %d trials at L=%d M=%d n=%d with %d thread(s)", config.trials, code.L, code.M, code.n, workers)
    if workers == 1:
        records = [run_trial(config, code, t) for t in range(config.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda t: run_trial(config, code, t), range(config.trials)))

    threshold = first_section_count(config.alpha0, code.L)
    kept = [r for r in records if not r.duplicate]
    hist = np.bincount([r.mistakes for r in kept], minlength=code.L + 1) if kept else np.zeros(code.L + 1, dtype=np.int64)
    events = int(hist[threshold:].sum())
    lo, hi = wilson_interval(events, len(kept))
    return MonteCarloResult(
        config=config,
        code=code,
        records=records,
        histogram=hist,
        threshold=threshold,
        events=events,
        counted=len(kept),
        excluded_duplicates=len(records) - len(kept),
        p_hat=events / len(kept) if kept else float("nan"),
        ci_low=lo,
        ci_high=hi,
    )
