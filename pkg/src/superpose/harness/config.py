"""Experiment configuration: a single JSON document, unknown keys rejected."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

from ..codec import DEFAULT_DECODE_CAP, DictKind
from ..errors import DomainError
from ..params import ChannelSpec, CodeSpec, capacity, code_spec_for_rate, derive_code_spec


class ConfigError(DomainError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    sigma2: float
    L: int
    alpha0: float
    trials: int
    P: float = 1.0
    a: float | None = None
    M: int | None = None
    R: float | None = None
    rate_fraction: float | None = None
    n: int | None = None
    dict_kind: str = DictKind.BERNOULLI.value
    master_seed: int = 0
    decode_cap: int = DEFAULT_DECODE_CAP
    threads: int = 1
    noiseless: bool = False
    out_dir: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if not 0 < self.alpha0 <= 1:
            raise ConfigError(f"alpha0 must lie in (0, 1], got {self.alpha0!r}")
        if (self.a is None) == (self.M is None):
            raise ConfigError("give exactly one of 'a' and 'M'")
        if self.n is None and (self.R is None) == (self.rate_fraction is None):
            raise ConfigError("give the code length 'n' or exactly one of 'R' and 'rate_fraction'")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.dict_kind not in {k.value for k in DictKind}:
            raise ConfigError(f"dict_kind must be one of {[k.value for k in DictKind]}, got {self.dict_kind!r}")
        if self.M is not None and self.M**self.L > self.decode_cap:
            raise ConfigError(f"M^L = {self.M}^{self.L} = {self.M**self.L} exceeds decode cap {self.decode_cap}")

    @property
    def channel(self) -> ChannelSpec:
        return ChannelSpec(P=self.P, sigma2=self.sigma2)

    @property
    def target_rate(self) -> float | None:
        if self.R is not None:
            return self.R
        if self.rate_fraction is not None:
            return self.rate_fraction * capacity(self.channel.v)
        return None

    @property
    def noise_variance(self) -> float:
        return 0.0 if self.noiseless else self.sigma2

    def code_spec(self) -> CodeSpec:
        if self.n is not None:
            M = self.M if self.M is not None else _ceil_M(self.L, self.a)
            spec = CodeSpec.from_sizes(self.L, M, self.n)
        elif self.M is not None:
            spec = code_spec_for_rate(self.L, self.M, self.target_rate)
        else:
            spec = derive_code_spec(self.L, self.a, self.target_rate)
        if spec.codebook_size > self.decode_cap:
            raise ConfigError(f"M^L = {spec.M}^{spec.L} = {spec.codebook_size} exceeds decode cap {self.decode_cap}")
        return spec

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)


def _ceil_M(L: int, a: float) -> int:
    return derive_code_spec(L, a, 1.0).M


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def config_from_dict(data: dict) -> ExperimentConfig:
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return config_from_dict(data)


def parse_override(text: str) -> tuple[str, object]:
    """Parse ``key=value`` where value is JSON (bare words fall back to strings)."""
    key, sep, raw = text.partition("=")
    if not sep or key not in _FIELDS:
        raise ConfigError(f"bad override {text!r}: expected <field>=<value> with a known field")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    if isinstance(value, float) and math.isnan(value):
        raise ConfigError(f"override {key} is NaN")
    return key, value
