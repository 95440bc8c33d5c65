"""Gaussian- and Bernoulli-dictionary bounds side by side for one parameter point."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..bernoulli_bounds import IotaBreakdown, ber_exponent_bound, iota_breakdown, phi_table
from ..errors import DomainError
from ..exponents import ExponentBound, a_vL, gauss_exponent_bound
from ..params import c_alpha, capacity
from .config import ExperimentConfig


@dataclass(frozen=True)
class BoundRow:
    l: int
    alpha: float
    c_alpha: float
    t_gauss: float
    log_err_gauss: float
    t_ber: float
    log_err_ber: float


@dataclass
class BoundReport:
    alpha0: float
    v: float
    R: float
    L: int
    n: int
    C: float
    a_vL: float | None
    phi_L: float
    iotas: IotaBreakdown
    gauss: ExponentBound = field(repr=False)
    ber: ExponentBound = field(repr=False)
    rows: list[BoundRow] = field(repr=False)

    @property
    def vacuous(self) -> dict:
        return {
            "gauss_exponent": self.gauss.log_prob_bound >= 0,
            "ber_exponent": self.ber.log_prob_bound >= 0,
            "gauss_summed": self.gauss.summed_log_bound >= 0,
            "ber_summed": self.ber.summed_log_bound >= 0,
        }

    def to_dict(self) -> dict:
        def summary(tb: ExponentBound) -> dict:
            return {
                "E_lower": tb.E_lower,
                "log_prob_bound": tb.log_prob_bound,
                "prob_bound": tb.prob_bound,
                "summed_log_bound": tb.summed_log_bound,
                "summed_bound": tb.summed_bound,
            }

        ib = self.iotas
        return {
            "query": {"alpha0": self.alpha0, "v": self.v, "R_nats": self.R, "L": self.L, "n": self.n},
            "capacity_nats": self.C,
            "a_vL": self.a_vL,
            "phi_L": self.phi_L,
            "iota": {
                "iota1": ib.iota1, "iota2": ib.iota2, "iota3": ib.iota3, "iota4": ib.iota4,
                "iota5": ib.iota5, "iota": ib.iota, "eta": ib.eta, "iota4_range_empty": ib.iota4_range_empty,
            },
            "gauss": summary(self.gauss),
            "bernoulli": summary(self.ber),
            "vacuous": self.vacuous,
            "per_l": [r.__dict__ for r in self.rows],
        }


def compare_bounds(alpha0: float, v: float, R: float, L: int, n: int) -> BoundReport:
    """Exponent lower bounds and per-l t-minimized bounds for both dictionary laws."""
    C = capacity(v)
    if not R < C:
        raise DomainError(f"rate {R!r} nats is not below capacity C = {C!r} nats")
    gauss = gauss_exponent_bound(alpha0, v, R, L, n)
    ber, iotas = ber_exponent_bound(alpha0, v, R, L, n, iota_breakdown(L, alpha0, v))
    rows = [
        BoundRow(
            l=g.l,
            alpha=g.l / L,
            c_alpha=c_alpha(g.l / L, v),
            t_gauss=g.t,
            log_err_gauss=g.log_bound,
            t_ber=b.t,
            log_err_ber=b.log_bound,
        )
        for g, b in zip(gauss.per_l, ber.per_l)
    ]
    return BoundReport(
        alpha0=alpha0,
        v=v,
        R=R,
        L=L,
        n=n,
        C=C,
        a_vL=a_vL(v, L, R) if L >= 3 else None,
        phi_L=float(phi_table(L)[L]),
        iotas=iotas,
        gauss=gauss,
        ber=ber,
        rows=rows,
    )


def compare_bounds_for(config: ExperimentConfig) -> BoundReport:
    code = config.code_spec()
    return compare_bounds(config.alpha0, config.channel.v, code.R, code.L, code.n)
