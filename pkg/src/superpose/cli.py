"""Command line entry point: ``superpose <subcommand>``.

Exit codes: 0 success, 1 invariant violation, 2 invalid input (config, domain or resource).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bernoulli_bounds import iota_breakdown, phi_many
from .errors import DomainError, ResourceError
from .harness import compare_bounds, load_config, parse_override, run_monte_carlo, verify_lemmas
from .harness.io import IOTA_COLUMNS, PHI_COLUMNS, iota_row, write_bounds_csv, write_csv, write_json, write_run
from .harness.verify import SUITES
from .params import capacity, derive_code_spec

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

log = logging.getLogger("superpose")


def _cmd_bounds(args) -> int:
    R = args.rate_fraction * capacity(args.v)
    code = derive_code_spec(args.L, args.a, R) if args.n is None else None
    n = args.n if args.n is not None else code.n
    # with n given explicitly the target rate is used as is
    rate = code.R if code is not None else R
    report = compare_bounds(args.alpha0, args.v, rate, args.L, n)
    payload = report.to_dict()
    payload["dict"] = args.dict
    payload["headline"] = payload["bernoulli" if args.dict == "bernoulli" else "gauss"]
    out = Path(args.out)
    write_json(out, payload)
    per_l = out.with_name(out.stem + "_per_l.csv")
    write_bounds_csv(per_l, report)
    head = payload["headline"]
    print(f"L={args.L} n={n} R={rate:.6g} nats C={report.C:.6g} nats dict={args.dict}")
    print(f"E_lower={head['E_lower']:.6g} prob_bound={head['prob_bound']:.6g} summed_bound={head['summed_bound']:.6g}")
    print(f"wrote {out} and {per_l}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    changes = dict(parse_override(s) for s in args.set)
    for key, val in (("trials", args.trials), ("master_seed", args.seed), ("threads", args.threads), ("out_dir", args.out)):
        if val is not None:
            changes[key] = val
    if changes:
        config = config.replace(**changes)
    if config.out_dir is None:
        raise DomainError("no output directory: pass --out or set out_dir in the config")
    result = run_monte_carlo(config)
    code = result.code
    bounds = None
    if code.R < config.channel.capacity:
        bounds = compare_bounds(config.alpha0, config.channel.v, code.R, code.L, code.n)
    else:
        log.warning("rate %.6g is not below capacity %.6g; skipping the analytic bounds", code.R, config.channel.capacity)
    paths = write_run(config.out_dir, result, bounds)
    print(f"p_hat={result.p_hat:.6g} CI95=[{result.ci_low:.6g}, {result.ci_high:.6g}] "
          f"events={result.events}/{result.counted} excluded_duplicates={result.excluded_duplicates}")
    if bounds is not None:
        print(f"bernoulli summed bound={bounds.ber.summed_bound:.6g}")
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    if config.noiseless and result.events > 0:
        print("noiseless run produced decoding mistakes", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_verify(args) -> int:
    kwargs = {} if args.eta is None else {"eta": args.eta}
    report = verify_lemmas(args.suite, lmax=args.lmax, **kwargs)
    write_json(args.out, report.to_dict())
    for key, s in report.summary().items():
        status = "ok" if s["violations"] == 0 else "FAIL"
        print(f"{status:4s} {key}: {s['cases']} cases, {s['violations']} violations, worst margin {s['worst_margin']:.3g}")
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _cmd_phi_table(args) -> int:
    if not 1 <= args.lmin <= args.lmax or args.step < 1:
        raise DomainError("need 1 <= lmin <= lmax and step >= 1")
    rows = phi_many(range(args.lmin, args.lmax + 1, args.step))
    write_csv(args.out, PHI_COLUMNS, ((r.l, r.zeta_star, r.phi, r.branch, 5.0 / r.l) for r in rows))
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _cmd_iota_table(args) -> int:
    try:
        Ls = [int(x) for x in args.L_list.split(",") if x.strip()]
    except ValueError as exc:
        raise DomainError(f"bad --L-list {args.L_list!r}") from exc
    rows = [iota_row(iota_breakdown(L, args.alpha0, args.v)) for L in Ls]
    write_csv(args.out, IOTA_COLUMNS, rows)
    for row in rows:
        print(f"L={row[0]} iota={row[8]:.6g} iota*sqrt(L)={row[9]:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="superpose", description="Sparse superposition code bounds and simulations.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="exponent and probability bounds for one parameter point")
    b.add_argument("--v", type=float, required=True, help="signal-to-noise ratio P/sigma^2")
    b.add_argument("--rate-fraction", type=float, required=True, help="rate as a fraction of capacity")
    b.add_argument("--L", type=int, required=True, help="number of sections")
    b.add_argument("--a", type=float, required=True, help="section size exponent, M = ceil(L^a)")
    b.add_argument("--alpha0", type=float, required=True, help="section error rate threshold")
    b.add_argument("--n", type=int, default=None, help="code length (default: derived from L, a and rate)")
    b.add_argument("--dict", choices=("gaussian", "bernoulli"), default="bernoulli")
    b.add_argument("--out", required=True, help="JSON output path; per-l CSV is written next to it")
    b.set_defaults(func=_cmd_bounds)

    s = sub.add_parser("simulate", help="Monte Carlo estimate of the section error event")
    s.add_argument("--config", required=True, help="JSON experiment config")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int, help="master seed")
    s.add_argument("--threads", type=int)
    s.add_argument("--set", action="append", default=[], metavar="FIELD=VALUE", help="override any config field")
    s.add_argument("--out", help="output directory")
    s.set_defaults(func=_cmd_simulate)

    vl = sub.add_parser("verify-lemmas", help="numerical sweeps of the supporting inequalities")
    vl.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    vl.add_argument("--lmax", type=int, default=2000)
    vl.add_argument("--eta", type=float, default=None, help=argparse.SUPPRESS)
    vl.add_argument("--out", required=True, help="JSON report path")
    vl.set_defaults(func=_cmd_verify)

    pt = sub.add_parser("phi-table", help="tabulate phi(l)")
    pt.add_argument("--lmin", type=int, default=1)
    pt.add_argument("--lmax", type=int, required=True)
    pt.add_argument("--step", type=int, default=1)
    pt.add_argument("--out", required=True)
    pt.set_defaults(func=_cmd_phi_table)

    it = sub.add_parser("iota-table", help="tabulate the Bernoulli penalty iota(L)")
    it.add_argument("--L-list", default="100,1000,10000,100000")
    it.add_argument("--alpha0", type=float, required=True)
    it.add_argument("--v", type=float, required=True)
    it.add_argument("--out", required=True)
    it.set_defaults(func=_cmd_iota_table)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DomainError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
