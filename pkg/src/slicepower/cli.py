"""Command-line front end: table building/queries, one-shot allocation,
sweeps and the verification suites.

Every run takes an explicit ``--seed``; two invocations with the same
arguments produce byte-identical output.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import rng as rngmod
from .alloc import BcdOptions, allocate
from .channel import ChannelState, mean_snr_from_distance
from .config import ScenarioConfig, load_config, scheme_f_u_count
from .errors import SlicePowerError
from .grid import spectral_efficiency
from .sweep import run_sweep
from .table import build_table, load_table, min_feasible_power, save_table
from .units import dbm_to_mw, dbm_to_watt, mw_to_dbm, snr_db_to_gain

__all__ = ["main"]

_SUITES = (
    "grid", "channel", "waterfill", "outage", "table",
    "alloc", "config", "sweep", "cli", "acceptance", "all",
)


def _fmt_dbm_vector(values_mw) -> str:
    parts = []
    for v in values_mw:
        parts.append("-inf" if v <= 0.0 else f"{mw_to_dbm(float(v)):.6f}")
    return "[" + ", ".join(parts) + "]"


def _cmd_table_build(args) -> int:
    axis_pe = None
    if args.no_interference_only:
        axis_pe = np.array([-math.inf])
    table = build_table(
        gamma_u=snr_db_to_gain(args.gamma_u_db),
        f_count=args.f_u,
        r_u=args.r_u,
        trials=args.trials,
        seed=args.seed,
        axis_pe_dbm=axis_pe,
        m_u=args.m_u,
    )
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    save_table(table, args.out)
    print(f"wrote {args.out}: {table.values.shape[0]}x{table.values.shape[1]} cells, "
          f"trials={table.trials}, seed={table.seed}")
    return 0


def _cmd_table_query(args) -> int:
    table = load_table(args.table)
    p_e_mw = 0.0 if args.pe.lower() in ("none", "-inf") else dbm_to_mw(float(args.pe))
    power_dbm = min_feasible_power(table, p_e_mw, args.eps)
    print(f"{power_dbm:.6f}")
    return 0


def _cmd_allocate(args) -> int:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    grid = cfg.grid()
    traffic = cfg.traffic()
    geom = cfg.geometry()
    sigma2_w = dbm_to_watt(cfg.noise_dbm)
    scheme, f_u_count = scheme_f_u_count(args.scheme, grid.F)
    m_u = args.m_u if args.m_u is not None else cfg.m_u
    r_u = spectral_efficiency(traffic.N_u, grid, f_u_count, m_u)

    gamma_e_mean = mean_snr_from_distance(args.de, geom, sigma2_w) / 1e3
    gamma_u_mean = mean_snr_from_distance(args.du, geom, sigma2_w) / 1e3
    channel = ChannelState(
        gamma_e=gamma_e_mean * rngmod.substream(args.seed, "drop", 0).standard_exponential(grid.F),
        Gamma_e=gamma_e_mean,
        Gamma_u=gamma_u_mean,
        sigma2=sigma2_w,
    )

    if args.table:
        table = load_table(args.table)
    elif args.auto_table:
        trials = args.table_trials or cfg.table_trials
        table = build_table(gamma_u_mean, f_u_count, r_u, trials, args.seed, m_u=m_u)
    else:
        raise SlicePowerError(
            "pass --table PATH or --auto-table; build one with\n"
            f"  slicepower table build --gamma-u-db {10*math.log10(gamma_u_mean)+30:.4f} "
            f"--f-u {f_u_count} --r-u {r_u:.8g} --trials {cfg.table_trials} "
            f"--seed {args.seed} --out table.npz"
        )

    bcd = BcdOptions(mu0_fraction=cfg.mu0_fraction, tau=cfg.tau, draws=args.crn_draws)
    result = allocate(
        grid, traffic, channel, scheme, args.algo, f_u_count, m_u, args.seed,
        table=table, bcd=bcd, evidence_trials=args.evidence_trials,
    )
    print(f"scheme={args.scheme} algorithm={args.algo} d_u={args.du!r} d_e={args.de!r} "
          f"seed={args.seed}")
    print(f"f_u={list(result.sets.f_u)} f_e={list(result.sets.f_e)} "
          f"m_u={list(result.sets.m_u)}")
    print(f"r_e={result.r_e!r} r_u={result.r_u!r}")
    print(f"p_e_dbm={_fmt_dbm_vector(result.p_e)}")
    print(f"p_u_dbm={_fmt_dbm_vector(result.p_u)}")
    print(f"p_sic_dbm={_fmt_dbm_vector(result.p_u_sic)}")
    print(f"embb_power_dbm={mw_to_dbm(result.embb_power_mw):.6f} "
          f"urllc_power_dbm={mw_to_dbm(result.urllc_power_mw):.6f} "
          f"total_dbm={mw_to_dbm(result.p_total_mw):.6f}")
    print(f"p_u_hat={result.p_u_hat.p_hat!r} ci={result.p_u_hat.ci_halfwidth!r} "
          f"trials={result.p_u_hat.trials}")
    print(f"sic_satisfied={result.sic_satisfied} iterations={result.iterations}")
    return 0


def _cmd_sweep(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.drops is not None:
        overrides["drops"] = args.drops
    if args.auto_build_tables:
        overrides["auto_build_tables"] = True
    cfg = load_config(args.config, overrides=overrides)
    records = run_sweep(cfg, out_dir=args.out)
    print(f"{len(records)} sweep records written to {args.out}"
          if records else "empty sweep: no output files")
    return 0


def _cmd_verify(args) -> int:
    import pytest

    tests_dir = os.path.join(os.getcwd(), "tests")
    if not os.path.isdir(tests_dir):
        print(f"error: no tests/ directory under {os.getcwd()}; "
              "run from the repository root", file=sys.stderr)
        return 2
    if args.suite == "all":
        target = [tests_dir]
    else:
        target = [os.path.join(tests_dir, f"test_{args.suite}.py")]
    return pytest.main(["-q", *target])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slicepower",
        description="Minimum-power spectrum slicing for one eMBB and one URLLC user.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    table = sub.add_parser("table", help="build or query outage tables")
    table_sub = table.add_subparsers(dest="table_command", required=True)
    build = table_sub.add_parser("build", help="estimate a full outage grid")
    build.add_argument("--gamma-u-db", type=float, required=True,
                       help="mean URLLC SNR [dB]")
    build.add_argument("--f-u", type=int, required=True, help="URLLC frequency count")
    build.add_argument("--r-u", type=float, required=True, help="URLLC rate [bit/s/Hz]")
    build.add_argument("--m-u", type=int, default=1,
                       help="window length folded into the rate (metadata)")
    build.add_argument("--trials", type=int, default=10**7)
    build.add_argument("--seed", type=int, required=True)
    build.add_argument("--no-interference-only", action="store_true",
                       help="tabulate only the no-interference row")
    build.add_argument("--out", required=True, help="output path (.json or .npz)")
    build.set_defaults(func=_cmd_table_build)

    query = table_sub.add_parser("query", help="minimum feasible power lookup")
    query.add_argument("--table", required=True)
    query.add_argument("--pe", required=True,
                       help="interference power [dBm], or 'none'")
    query.add_argument("--eps", type=float, required=True, help="outage target")
    query.set_defaults(func=_cmd_table_query)

    alloc = sub.add_parser("allocate", help="allocate one fading drop and print it")
    alloc.add_argument("--scheme", required=True, help="'noma' or 'oma-<k>'")
    alloc.add_argument("--algo", choices=("fea", "bcd"), required=True)
    alloc.add_argument("--du", type=float, required=True, help="URLLC distance [m]")
    alloc.add_argument("--de", type=float, required=True, help="eMBB distance [m]")
    alloc.add_argument("--seed", type=int, required=True)
    alloc.add_argument("--m-u", type=int, default=None, help="URLLC window [mini-slots]")
    alloc.add_argument("--config", default=None, help="scenario config file")
    alloc.add_argument("--table", default=None, help="outage table path")
    alloc.add_argument("--auto-table", action="store_true",
                       help="build the needed table in memory")
    alloc.add_argument("--table-trials", type=int, default=None)
    alloc.add_argument("--crn-draws", type=int, default=10**6)
    alloc.add_argument("--evidence-trials", type=int, default=10**6)
    alloc.set_defaults(func=_cmd_allocate)

    swp = sub.add_parser("sweep", help="run a configured sweep and emit CSVs")
    swp.add_argument("--config", default=None, help="scenario config file")
    swp.add_argument("--out", required=True, help="output directory")
    swp.add_argument("--seed", type=int, default=None, help="override the config seed")
    swp.add_argument("--drops", type=int, default=None)
    swp.add_argument("--auto-build-tables", action="store_true")
    swp.set_defaults(func=_cmd_sweep)

    ver = sub.add_parser("verify", help="run a test suite")
    ver.add_argument("--suite", choices=_SUITES, default="all")
    ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SlicePowerError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
