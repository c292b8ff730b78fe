"""Persisted Monte Carlo outage tables and the feasibility query.

A table fixes (mean SNR, frequency count, rate) and stores the estimated
outage probability on a dBm grid of uniform transmit/interference power
pairs.  ``-inf`` on the interference axis is the no-interference row.
Every cell is produced by :func:`slicepower.outage.estimate_outage`
under a sub-seed derived from the cell's coordinates, so any cell can be
reproduced in isolation and cells may be computed in any order or in
parallel without changing the result.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .errors import TableExhaustedError
from .outage import OutageEstimate, estimate_outage
from .units import dbm_to_mw, mw_to_dbm

__all__ = [
    "OutageTable",
    "default_power_axis_dbm",
    "default_interference_axis_dbm",
    "cell_seed",
    "build_table",
    "min_feasible_power",
    "save_table",
    "load_table",
]

_FORMAT_NAME = "slicepower-outage-table"
_FORMAT_VERSION = 1


def default_power_axis_dbm() -> np.ndarray:
    """-30..30 dBm in 1 dB steps."""
    return np.arange(-30.0, 31.0)


def default_interference_axis_dbm() -> np.ndarray:
    """No-interference row followed by -30..30 dBm in 1 dB steps."""
    return np.concatenate(([-math.inf], default_power_axis_dbm()))


@dataclass(frozen=True)
class OutageTable:
    """Tabulated outage probabilities with full reproduction metadata.

    ``values[i, j]`` is the estimate at interference ``axis_pe_dbm[i]``
    and transmit power ``axis_pu_dbm[j]`` (both uniform across the
    ``f_count`` resources at rate ``r_u``).  ``m_u`` records the window
    length already folded into ``r_u``.
    """

    axis_pu_dbm: np.ndarray
    axis_pe_dbm: np.ndarray
    gamma_u: float
    f_count: int
    r_u: float
    m_u: int
    values: np.ndarray
    trials: int
    seed: int
    version: int = _FORMAT_VERSION

    def __post_init__(self):
        object.__setattr__(self, "axis_pu_dbm", np.asarray(self.axis_pu_dbm, dtype=float))
        object.__setattr__(self, "axis_pe_dbm", np.asarray(self.axis_pe_dbm, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.axis_pu_dbm.size == 0 or self.axis_pe_dbm.size == 0:
            raise ValueError("table axes must be non-empty")
        if np.any(np.diff(self.axis_pu_dbm) <= 0) or np.any(np.diff(self.axis_pe_dbm) <= 0):
            raise ValueError("table axes must be strictly increasing")
        if not np.all(np.isfinite(self.axis_pu_dbm)):
            raise ValueError("transmit-power axis must be finite")
        if self.values.shape != (self.axis_pe_dbm.size, self.axis_pu_dbm.size):
            raise ValueError("values shape does not match the axes")
        if np.any(self.values < 0.0) or np.any(self.values > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")

    def matches(self, gamma_u: float, f_count: int, r_u: float, rel_tol: float = 1e-2) -> bool:
        """True when the table serves this (mean SNR, F_u, rate) need.

        The tolerance (~0.04 dB on the mean SNR) absorbs rounded dB/distance
        round trips; setups an entire grid step apart stay distinguishable.
        """
        return (
            self.f_count == f_count
            and math.isclose(self.gamma_u, gamma_u, rel_tol=rel_tol)
            and math.isclose(self.r_u, r_u, rel_tol=rel_tol)
        )


def cell_seed(base_seed: int, pu_dbm: float, pe_dbm: float) -> np.random.SeedSequence:
    """Sub-seed of one table cell, keyed by the grid coordinates."""
    return rngmod.derive_seed_sequence(base_seed, "table-cell", float(pu_dbm), float(pe_dbm))


def _cell_estimate(
    gamma_u: float, f_count: int, r_u: float, pu_dbm: float, pe_dbm: float,
    trials: int, base_seed: int,
) -> OutageEstimate:
    seed = int(cell_seed(base_seed, pu_dbm, pe_dbm).generate_state(1)[0])
    p_u = np.full(f_count, dbm_to_mw(pu_dbm))
    p_e = np.full(f_count, dbm_to_mw(pe_dbm))
    return estimate_outage(p_u, p_e, gamma_u, r_u, trials, seed)


def build_table(
    gamma_u: float,
    f_count: int,
    r_u: float,
    trials: int,
    seed: int,
    axis_pu_dbm=None,
    axis_pe_dbm=None,
    m_u: int = 1,
    workers: int = 1,
) -> OutageTable:
    """Estimate every (interference, power) cell of the grid.

    Each cell is an independent :func:`estimate_outage` run under its
    derived sub-seed, so the table is bit-reproducible regardless of
    ``workers``.
    """
    axis_pu = default_power_axis_dbm() if axis_pu_dbm is None else np.asarray(axis_pu_dbm, float)
    axis_pe = (
        default_interference_axis_dbm() if axis_pe_dbm is None else np.asarray(axis_pe_dbm, float)
    )
    values = np.empty((axis_pe.size, axis_pu.size))

    def fill(idx):
        i, j = idx
        est = _cell_estimate(gamma_u, f_count, r_u, axis_pu[j], axis_pe[i], trials, seed)
        values[i, j] = est.p_hat

    cells = [(i, j) for i in range(axis_pe.size) for j in range(axis_pu.size)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, cells))
    else:
        for idx in cells:
            fill(idx)
    return OutageTable(
        axis_pu_dbm=axis_pu, axis_pe_dbm=axis_pe, gamma_u=gamma_u, f_count=f_count,
        r_u=r_u, m_u=m_u, values=values, trials=trials, seed=seed,
    )


def _interference_row(table: OutageTable, p_e_query_mw: float) -> int:
    """Row index covering the query, rounding the interference up."""
    if p_e_query_mw < 0.0:
        raise ValueError("interference power must be non-negative")
    if p_e_query_mw == 0.0:
        if not np.isneginf(table.axis_pe_dbm[0]):
            raise TableExhaustedError(
                "table has no no-interference row; rebuild with one"
            )
        return 0
    query_dbm = mw_to_dbm(p_e_query_mw)
    # tolerate float fuzz when the query sits exactly on a grid line
    candidates = np.nonzero(table.axis_pe_dbm >= query_dbm - 1e-9)[0]
    if candidates.size == 0:
        raise TableExhaustedError(
            f"interference {query_dbm:.2f} dBm exceeds the table's "
            f"{table.axis_pe_dbm[-1]:.2f} dBm; extend the interference axis"
        )
    return int(candidates[0])


def min_feasible_power(table: OutageTable, p_e_query_mw: float, epsilon_u: float) -> float:
    """Smallest tabulated power meeting the outage target [dBm].

    The interference row is chosen conservatively (next grid point at or
    above the query); the returned power is the first grid point whose
    estimate is at or below ``epsilon_u``.
    """
    if not 0.0 < epsilon_u <= 1.0:
        raise ValueError("epsilon_u must be in (0, 1]")
    row = table.values[_interference_row(table, p_e_query_mw)]
    feasible = np.nonzero(row <= epsilon_u)[0]
    if feasible.size == 0:
        raise TableExhaustedError(
            f"no tabulated power reaches outage {epsilon_u:g}; extend the power axis"
        )
    return float(table.axis_pu_dbm[feasible[0]])


def _meta_dict(table: OutageTable) -> dict:
    return {
        "format": _FORMAT_NAME,
        "version": table.version,
        "gamma_u": table.gamma_u,
        "f_count": table.f_count,
        "r_u": table.r_u,
        "m_u": table.m_u,
        "trials": table.trials,
        "seed": table.seed,
    }


def save_table(table: OutageTable, path) -> None:
    """Persist as JSON (``.json``) or compact binary (``.npz``).

    Both encodings round-trip bit-exactly: JSON stores shortest-repr
    floats (with ``-Infinity`` for the no-interference row) and the
    binary form stores the raw float64 arrays.
    """
    path = str(path)
    if path.endswith(".json"):
        doc = _meta_dict(table)
        doc["axis_pu_dbm"] = table.axis_pu_dbm.tolist()
        doc["axis_pe_dbm"] = table.axis_pe_dbm.tolist()
        doc["values"] = table.values.tolist()
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh)
            fh.write("\n")
    elif path.endswith(".npz"):
        np.savez_compressed(
            path,
            meta=json.dumps(_meta_dict(table)),
            axis_pu_dbm=table.axis_pu_dbm,
            axis_pe_dbm=table.axis_pe_dbm,
            values=table.values,
        )
    else:
        raise ValueError(f"unsupported table format: {path!r} (use .json or .npz)")


def load_table(path) -> OutageTable:
    path = str(path)
    if path.endswith(".json"):
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        meta = doc
        axes = doc
    elif path.endswith(".npz"):
        with np.load(path) as data:
            meta = json.loads(str(data["meta"]))
            axes = {
                "axis_pu_dbm": data["axis_pu_dbm"],
                "axis_pe_dbm": data["axis_pe_dbm"],
                "values": data["values"],
            }
    else:
        raise ValueError(f"unsupported table format: {path!r} (use .json or .npz)")
    if meta.get("format") != _FORMAT_NAME:
        raise ValueError(f"{path!r} is not an outage table file")
    if meta.get("version") != _FORMAT_VERSION:
        raise ValueError(f"unsupported table version {meta.get('version')!r}")
    return OutageTable(
        axis_pu_dbm=np.asarray(axes["axis_pu_dbm"], float),
        axis_pe_dbm=np.asarray(axes["axis_pe_dbm"], float),
        gamma_u=float(meta["gamma_u"]),
        f_count=int(meta["f_count"]),
        r_u=float(meta["r_u"]),
        m_u=int(meta["m_u"]),
        values=np.asarray(axes["values"], float),
        trials=int(meta["trials"]),
        seed=int(meta["seed"]),
        version=int(meta["version"]),
    )
