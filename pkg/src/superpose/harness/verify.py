"""Sweeps that check the supporting inequalities numerically and report every case."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..bernoulli_bounds import (
    ETA,
    assemble_A,
    log_binom_gauss_ratio,
    pd_lambda_limit,
    phi_table,
    proof_matrix_B,
    proof_matrix_Btilde,
)
from ..quadrature import (
    GaussianBump,
    Lattice,
    PolynomialFn,
    discretized_gauss_1d,
    discretized_gauss_2d,
    discretized_gauss_3d,
    em_bound_constant_check,
    em_classical_rhs_m0,
    extended_em_identity,
    normalized_margin,
)

SUITES = ("phi", "quad1d", "quad2d", "quad3d", "em")

QUAD1D_N = tuple(2**k for k in range(13))
QUAD1D_S = tuple(float(s) for s in np.geomspace(0.1, 4.0, 20))
LAMBDA_FRACTIONS = (0.0, 0.25, 0.5, 0.75, 0.99)
ALPHAS_2D = (0.1, 0.3, 0.5, 0.7, 0.9, 1.0)
ALPHAS_3D = (0.1, 0.3, 0.5, 0.7, 0.9)
SNRS = (0.5, 1.0, 3.0, 15.0)
DUAL_RTOL = 1e-9
EM_TOL = 1e-10


@dataclass
class CheckRecord:
    suite: str
    check: str
    params: dict
    value: float
    limit: float
    passed: bool

    @property
    def margin(self) -> float:
        return self.limit - self.value


@dataclass
class VerificationReport:
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def violations(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, suite, check, params, value, limit, passed=None):
        value, limit = float(value), float(limit)
        ok = value <= limit if passed is None else bool(passed)
        self.records.append(CheckRecord(suite, check, params, value, limit, ok))

    def summary(self) -> dict:
        out = {}
        for r in self.records:
            key = f"{r.suite}/{r.check}"
            s = out.setdefault(key, {"cases": 0, "violations": 0, "worst_margin": math.inf})
            s["cases"] += 1
            s["violations"] += 0 if r.passed else 1
            s["worst_margin"] = min(s["worst_margin"], r.margin)
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "summary": self.summary(),
            "records": [dict(asdict(r), margin=r.margin) for r in self.records],
        }


def check_phi(report: VerificationReport, lmax: int = 2000, claim_ls=None) -> None:
    """Binomial/Gaussian ratio never exceeds e^phi(l); phi(l) <= 5/l from l = 1000 on."""
    if claim_ls is None:
        claim_ls = range(1000, lmax + 1)
    claim_ls = sorted(set(int(l) for l in claim_ls))
    top = max([lmax, *claim_ls]) if claim_ls else lmax
    table = phi_table(top)
    for l in range(1, lmax + 1):
        _, r = log_binom_gauss_ratio(l)
        report.add("phi", "ratio_le_exp_phi", {"l": l}, r.max(), table[l])
    for l in claim_ls:
        report.add("phi", "phi_le_5_over_l", {"l": l}, table[l], 5.0 / l)


def check_quad1d(report: VerificationReport, eta: float = ETA, ns=QUAD1D_N, ss=QUAD1D_S) -> None:
    for n in ns:
        h = Lattice(n).h
        for mu in (0.0, h / 3.0, math.pi / 10.0):
            for s in ss:
                res = discretized_gauss_1d(n, mu, s, eta)
                params = {"n": n, "mu": mu, "s": s}
                report.add("quad1d", "I_d_le_bound", params, res.I_d, res.bound)
                report.add("quad1d", "normalized_margin_le_1", params, normalized_margin(res, n, s, eta), 1.0)


def _lambdas(B: np.ndarray, cap: float = 1.0) -> list[float]:
    lim = pd_lambda_limit(B)
    top = cap if math.isinf(lim) else lim
    return [f * top for f in LAMBDA_FRACTIONS]


def _dual(report, suite, params, closed, quad):
    rel = abs(closed.I_d - quad.I_d) / abs(closed.I_d)
    report.add(suite, "dual_method_rel_diff", params, rel, DUAL_RTOL)


def check_quad2d(report: VerificationReport, eta: float = ETA, ns=(4, 16, 64)) -> None:
    fixtures = []
    for alpha in ALPHAS_2D:
        for v in SNRS:
            B = proof_matrix_B(alpha, v)
            for lam in _lambdas(B):
                fixtures.append(({"alpha": alpha, "v": v, "lam": lam}, assemble_A(B, lam)))
    fixtures.append(({"fixture": "identity"}, np.eye(2)))
    fixtures.append(({"fixture": "diag(4,1)"}, np.diag([4.0, 1.0])))
    for params, A in fixtures:
        for n in ns:
            p = dict(params, n=n)
            closed = discretized_gauss_2d(n, A, eta)
            report.add("quad2d", "I_d_le_bound", p, closed.I_d, closed.bound)
            _dual(report, "quad2d", p, closed, discretized_gauss_2d(n, A, eta, method="quad"))


def check_quad3d(report: VerificationReport, eta: float = ETA, sizes=((4, 9), (16, 16))) -> None:
    fixtures = []
    for sign in (-1, 1):
        for alpha in ALPHAS_3D:
            for v in SNRS:
                B = proof_matrix_Btilde(alpha, v, sign)
                for lam in _lambdas(B)[::2]:
                    fixtures.append(({"sign": sign, "alpha": alpha, "v": v, "lam": lam}, assemble_A(B, lam)))
    fixtures.append(({"fixture": "identity"}, np.eye(3)))
    fixtures.append(({"fixture": "diag(1,2,3)"}, np.diag([1.0, 2.0, 3.0])))
    for params, A in fixtures:
        for n, n2 in sizes:
            p = dict(params, n=n, n2=n2)
            closed = discretized_gauss_3d(n, n2, A, eta)
            report.add("quad3d", "I_d_le_bound", p, closed.I_d, closed.bound)
            _dual(report, "quad3d", p, closed, discretized_gauss_3d(n, n2, A, eta, method="quad"))


def em_cases():
    """(function, a, b, n, b2bar) tuples for the identity check."""
    fns = [GaussianBump(s, mu) for s in (0.5, 1.0, 2.0, 4.0) for mu in (0.0, 0.3)]
    fns += [PolynomialFn([0.0, 1.0]), PolynomialFn([1.0, -2.0, 0.5, 0.25])]
    cases = []
    for fn in fns:
        for a, b in ((-3.0, 3.0), (-1.0, 2.0)):
            for n in (0, 8, 32):
                for b2bar in (0.0, 0.125, 1.0 / 6.0, 0.5):
                    cases.append((fn, a, b, n, b2bar))
    return cases


def check_em(report: VerificationReport) -> None:
    for fn, a, b, n, b2bar in em_cases():
        res = extended_em_identity(fn, a, b, n, b2bar)
        report.add("em", "identity_residual", {"f": repr(fn), "a": a, "b": b, "n": n, "b2bar": b2bar}, res.residual, EM_TOL)
    for fn, a, b, n, b2bar in em_cases():
        if b2bar != 1.0 / 6.0:
            continue
        ext = extended_em_identity(fn, a, b, n, b2bar).rhs
        classic = em_classical_rhs_m0(fn, a, b, n)
        report.add("em", "b2bar_1_6_matches_classic", {"f": repr(fn), "a": a, "b": b, "n": n}, abs(ext - classic), EM_TOL)
    const = em_bound_constant_check()
    report.add("em", "minmax_eq_1_8", {}, abs(const.minmax_value - 0.125), 1e-9)
    for s, val in const.max_abs_derivative.items():
        report.add("em", "max_slope_eq_s_over_sqrt_e", {"s": s}, abs(val - s / math.sqrt(math.e)), 1e-8)
    for s, val in const.derivative_variation.items():
        report.add("em", "slope_variation_eq_4s_over_sqrt_e", {"s": s}, abs(val - 4 * s / math.sqrt(math.e)), 1e-8)
    report.add("em", "eta_reassembled", {}, abs(const.eta - ETA), 1e-9)


def verify_lemmas(suite: str = "all", lmax: int = 2000, eta: float = ETA) -> VerificationReport:
    """Run one suite (or ``"all"``); ``eta`` can be overridden to sanity-check the checker."""
    chosen = SUITES if suite == "all" else (suite,)
    unknown = set(chosen) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite(s): {sorted(unknown)}")
    report = VerificationReport()
    for name in chosen:
        if name == "phi":
            check_phi(report, lmax)
        elif name == "quad1d":
            check_quad1d(report, eta)
        elif name == "quad2d":
            check_quad2d(report, eta)
        elif name == "quad3d":
            check_quad3d(report, eta)
        else:
            check_em(report)
    return report
