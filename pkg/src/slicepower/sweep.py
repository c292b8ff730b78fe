"""Experiment sweeps: distance grids, drop averaging and CSV emission.

A sweep evaluates every (eMBB distance, URLLC distance, scheme,
algorithm) combination over a number of fading drops and writes one CSV
per swept axis plus a broadband-power summary.  All randomness is
derived from the config seed, and records are emitted in sorted key
order, so identical configs produce byte-identical files.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .alloc import Algorithm, BcdOptions, allocate
from .channel import ChannelState, distance_from_mean_snr, mean_snr_from_distance
from .config import ScenarioConfig, scheme_f_u_count
from .errors import SlicePowerError
from .grid import Scheme, spectral_efficiency
from .table import OutageTable, build_table, load_table, save_table
from .units import db_to_linear, dbm_to_watt, gain_to_snr_db, mw_to_dbm

__all__ = ["SweepRecord", "table_path", "ensure_table", "run_sweep", "write_records_csv"]

log = logging.getLogger(__name__)

_CSV_FIELDS = (
    "scheme", "algorithm", "d_u_m", "d_e_m",
    "mean_total_dbm", "mean_urllc_dbm", "mean_embb_dbm", "mean_p_hat", "drops",
)


@dataclass(frozen=True)
class SweepRecord:
    """Averages for one (scheme, algorithm, placement) sweep point."""

    scheme: str
    algorithm: str
    d_u_m: float
    d_e_m: float
    mean_total_dbm: float
    mean_urllc_dbm: float
    mean_embb_dbm: float
    mean_p_hat: float
    drops: int

    def row(self) -> dict:
        return {name: repr(getattr(self, name)) if isinstance(getattr(self, name), float)
                else str(getattr(self, name)) for name in _CSV_FIELDS}


def table_path(cfg: ScenarioConfig, gamma_u: float, f_u: int, r_u: float) -> str:
    """Canonical table file name for one (mean SNR, F_u, r_u) need."""
    name = (
        f"table_gu{gain_to_snr_db(gamma_u):.4f}dB_fu{f_u}_ru{r_u:.8g}"
        f"_t{cfg.table_trials}_s{cfg.seed}.npz"
    )
    return os.path.join(cfg.table_dir, name)


def ensure_table(cfg: ScenarioConfig, gamma_u: float, f_u: int, r_u: float) -> OutageTable:
    """Load the table for this need, building it first when allowed."""
    path = table_path(cfg, gamma_u, f_u, r_u)
    if os.path.exists(path):
        table = load_table(path)
        if table.matches(gamma_u, f_u, r_u):
            return table
        raise SlicePowerError(f"existing table {path} does not match the request")
    if not cfg.auto_build_tables:
        raise SlicePowerError(
            f"missing outage table {path}; build it with\n"
            f"  slicepower table build --gamma-u-db {gain_to_snr_db(gamma_u):.6f} "
            f"--f-u {f_u} --r-u {r_u:.8g} --trials {cfg.table_trials} "
            f"--seed {cfg.seed} --out {path}\n"
            "or set auto_build_tables = true"
        )
    log.info("building outage table %s (trials=%d)", path, cfg.table_trials)
    table = build_table(gamma_u, f_u, r_u, cfg.table_trials, cfg.seed, m_u=cfg.m_u)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    save_table(table, path)
    return table


def _mean_dbm(values_mw) -> float:
    mean = float(np.mean(values_mw))
    return mw_to_dbm(mean) if mean > 0.0 else -math.inf


def run_sweep(cfg: ScenarioConfig, out_dir: str | None = None) -> list:
    """Evaluate the whole sweep; returns records and writes CSVs.

    The eMBB fading draw for drop ``i`` is shared across schemes,
    algorithms and placements so comparisons see common channels.
    OMA points run the table algorithm only (the descent cannot improve
    a uniform no-interference optimum by more than the grid step).
    """
    grid = cfg.grid()
    traffic = cfg.traffic()
    geom = cfg.geometry()
    sigma2_w = dbm_to_watt(cfg.noise_dbm)
    records: list[SweepRecord] = []
    d_u_axis = sorted(set(cfg.d_u) | {
        distance_from_mean_snr(db_to_linear(g), geom, sigma2_w) for g in cfg.gamma_u_db
    })
    d_e_axis = sorted(set(cfg.d_e) | {
        distance_from_mean_snr(db_to_linear(g), geom, sigma2_w) for g in cfg.gamma_e_db
    })
    if not d_u_axis or not d_e_axis:
        log.info("empty sweep axis; nothing to do")
        return records

    fading = [
        rngmod.substream(cfg.seed, "drop", i).standard_exponential(grid.F)
        for i in range(cfg.drops)
    ]
    bcd = BcdOptions(mu0_fraction=cfg.mu0_fraction, tau=cfg.tau, draws=cfg.crn_draws)

    for d_e in d_e_axis:
        gamma_e_mean = mean_snr_from_distance(d_e, geom, sigma2_w) / 1e3
        for d_u in d_u_axis:
            gamma_u_mean = mean_snr_from_distance(d_u, geom, sigma2_w) / 1e3
            for scheme_label in cfg.schemes:
                scheme, f_u_count = scheme_f_u_count(scheme_label, grid.F)
                r_u = spectral_efficiency(traffic.N_u, grid, f_u_count, cfg.m_u)
                table = ensure_table(cfg, gamma_u_mean, f_u_count, r_u)
                algos = cfg.algorithms if scheme is Scheme.NOMA else (Algorithm.FEASIBLE,)
                for algo in algos:
                    totals, urllc, embb, p_hats = [], [], [], []
                    for i in range(cfg.drops):
                        channel = ChannelState(
                            gamma_e=gamma_e_mean * fading[i],
                            Gamma_e=gamma_e_mean,
                            Gamma_u=gamma_u_mean,
                            sigma2=sigma2_w,
                        )
                        drop_seed = int(
                            rngmod.derive_seed_sequence(
                                cfg.seed, "alloc", scheme_label, algo,
                                float(d_e), float(d_u), i,
                            ).generate_state(1)[0]
                        )
                        result = allocate(
                            grid, traffic, channel, scheme, algo,
                            f_u_count, cfg.m_u, drop_seed, table=table,
                            bcd=bcd, evidence_trials=cfg.evidence_trials,
                        )
                        totals.append(result.p_total_mw)
                        urllc.append(result.urllc_power_mw)
                        embb.append(result.embb_power_mw)
                        p_hats.append(result.p_u_hat.p_hat)
                    records.append(SweepRecord(
                        scheme=scheme_label, algorithm=algo, d_u_m=d_u, d_e_m=d_e,
                        mean_total_dbm=_mean_dbm(totals),
                        mean_urllc_dbm=_mean_dbm(urllc),
                        mean_embb_dbm=_mean_dbm(embb),
                        mean_p_hat=float(np.mean(p_hats)),
                        drops=cfg.drops,
                    ))
                    log.info("point done: %s", records[-1])

    if out_dir is not None and records:
        _emit_csvs(records, cfg, out_dir)
    return records


def write_records_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_FIELDS)
        writer.writeheader()
        for rec in records:
            writer.writerow(rec.row())


def _emit_csvs(records, cfg: ScenarioConfig, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    write_records_csv(records, os.path.join(out_dir, "records.csv"))
    # one power-vs-URLLC-distance file per eMBB placement
    for d_e in sorted({rec.d_e_m for rec in records}):
        subset = sorted(
            (r for r in records if r.d_e_m == d_e),
            key=lambda r: (r.d_u_m, r.scheme, r.algorithm),
        )
        write_records_csv(subset, os.path.join(out_dir, f"power_vs_du_de{d_e:g}.csv"))
    # one power-vs-eMBB-distance file per URLLC placement, when d_e sweeps
    if len({rec.d_e_m for rec in records}) > 1:
        for d_u in sorted({rec.d_u_m for rec in records}):
            subset = sorted(
                (r for r in records if r.d_u_m == d_u),
                key=lambda r: (r.d_e_m, r.scheme, r.algorithm),
            )
            write_records_csv(subset, os.path.join(out_dir, f"power_vs_de_du{d_u:g}.csv"))
    # broadband-power summary by placement and scheme
    path = os.path.join(out_dir, "table_embb_power.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        schemes = list(cfg.schemes)
        writer.writerow(["d_e_m"] + schemes)
        for d_e in sorted({rec.d_e_m for rec in records}):
            row = [repr(d_e)]
            for scheme in schemes:
                cells = [r.mean_embb_dbm for r in records
                         if r.d_e_m == d_e and r.scheme == scheme]
                row.append(repr(float(np.mean(cells))) if cells else "")
            writer.writerow(row)
