"""The two URLLC allocation algorithms and the per-slot orchestrator.

The joint minimum-power problem decouples: the broadband powers follow
from water-filling alone, the cancellation floor follows from the
broadband solution, and only the URLLC reliability power needs search.
The table-based allocator picks the uniform power that survives the
worst tabulated interference; the descent allocator starts there and
walks coordinates down toward the cancellation floor while a frozen-draw
outage estimate stays inside the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .channel import ChannelState
from .errors import SlicePowerError
from .grid import (
    ResourceGrid,
    ResourceSets,
    Scheme,
    TrafficSpec,
    build_resource_sets,
    select_urllc_frequencies,
    spectral_efficiency,
)
from .outage import CommonRandomOutage, OutageEstimate, estimate_outage, mutual_info_sic
from .table import OutageTable, min_feasible_power
from .units import dbm_to_mw
from .waterfill import embb_power, sic_power

__all__ = [
    "Algorithm",
    "BcdOptions",
    "AllocationResult",
    "feasible_urllc_power",
    "descend_urllc_power",
    "allocate",
]

_SIC_REL_TOL = 1e-9


class Algorithm:
    FEASIBLE = "fea"
    BCD = "bcd"
    ALL = (FEASIBLE, BCD)


@dataclass(frozen=True)
class BcdOptions:
    """Descent controls.

    ``mu0`` is the initial step [mW]; when ``None`` it defaults to
    ``mu0_fraction`` of the mean starting power.  The step halves after
    any sweep that changes nothing and the loop stops at ``tau``.
    A move is accepted only when the frozen-draw estimate plus its
    confidence half-width stays at or below the outage target, so the
    final point is feasible with margin rather than by luck.
    """

    mu0: float | None = None
    mu0_fraction: float = 0.1
    tau: float = 1e-7
    draws: int = 10**6
    use_margin: bool = True

    def initial_step(self, p_init: np.ndarray) -> float:
        if self.mu0 is not None:
            return self.mu0
        return self.mu0_fraction * float(np.mean(p_init))


@dataclass(frozen=True)
class AllocationResult:
    """Final powers over the full grid plus the feasibility evidence."""

    sets: ResourceSets
    p_e: np.ndarray
    p_u: np.ndarray
    p_u_sic: np.ndarray
    r_e: float
    r_u: float
    p_total_mw: float
    p_u_hat: OutageEstimate
    sic_satisfied: bool
    algorithm: str
    iterations: int = 0

    @property
    def embb_power_mw(self) -> float:
        """Power spent on the broadband stream over the slot."""
        return float(self.sets.grid.M * self.p_e.sum())

    @property
    def urllc_power_mw(self) -> float:
        """Power spent on the URLLC stream over its window."""
        return float(self.sets.M_u * self.p_u.sum())


def feasible_urllc_power(
    p_e_on_fu: np.ndarray,
    p_u_sic_on_fu: np.ndarray,
    table: OutageTable,
    epsilon_u: float,
) -> np.ndarray:
    """Uniform tabulated power against the worst interference, then the
    cancellation floor per resource.

    Assuming every resource suffers the strongest broadband power makes
    the tabulated uniform entry a feasible choice for the true vector;
    raising individual entries to the cancellation floor only helps.
    """
    worst = float(np.max(p_e_on_fu)) if p_e_on_fu.size else 0.0
    level = dbm_to_mw(min_feasible_power(table, worst, epsilon_u))
    return np.maximum(level, p_u_sic_on_fu)


def descend_urllc_power(
    p_u_init: np.ndarray,
    p_u_sic_on_fu: np.ndarray,
    p_e_on_fu: np.ndarray,
    crn: CommonRandomOutage,
    epsilon_u: float,
    options: BcdOptions,
) -> tuple[np.ndarray, int]:
    """Block-coordinate descent from a feasible start.

    Sweeps coordinates in natural order; each move lowers one entry by
    the current step (never below the cancellation floor) and keeps it
    only if the frozen-draw outage estimate stays acceptable.  Entries
    that reach the floor leave the sweep.  Returns the final vector and
    the number of sweeps.
    """
    p = np.asarray(p_u_init, dtype=float).copy()
    floor = np.asarray(p_u_sic_on_fu, dtype=float)
    crn.attach(p, p_e_on_fu)
    active = [f for f in range(p.size) if p[f] > floor[f]]
    mu = options.initial_step(p)
    sweeps = 0
    while mu > options.tau and active:
        changed = False
        for f in list(active):
            candidate = max(floor[f], p[f] - mu)
            est = crn.try_coordinate(f, candidate)
            margin = est.ci_halfwidth if options.use_margin else 0.0
            if est.p_hat + margin <= epsilon_u:
                crn.commit(f, candidate)
                p[f] = candidate
                changed = True
                if p[f] <= floor[f]:
                    active.remove(f)
        sweeps += 1
        if not changed:
            mu /= 2.0
    return p, sweeps


def _as_full(values: np.ndarray, indices, f_total: int) -> np.ndarray:
    full = np.zeros(f_total)
    full[list(indices)] = values
    return full


def allocate(
    grid: ResourceGrid,
    traffic: TrafficSpec,
    channel: ChannelState,
    scheme: Scheme,
    algorithm: str,
    f_u_count: int,
    m_u_count: int,
    seed: int,
    table: OutageTable | None = None,
    bcd: BcdOptions = BcdOptions(),
    evidence_trials: int = 10**6,
) -> AllocationResult:
    """Run the full per-slot pipeline for one channel realization.

    Selection -> resource sets -> broadband water-filling -> cancellation
    floor -> URLLC power by the chosen algorithm, then an independent
    Monte Carlo outage estimate of the final vectors as evidence.
    """
    scheme = Scheme(scheme)
    if algorithm not in Algorithm.ALL:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {Algorithm.ALL}")
    gamma_e = np.asarray(channel.gamma_e, dtype=float)
    if gamma_e.size != grid.F:
        raise ValueError("channel state does not match the grid size")

    sets = build_resource_sets(
        scheme, grid, select_urllc_frequencies(gamma_e, f_u_count), m_u_count, traffic
    )
    r_e = spectral_efficiency(traffic.N_e, grid, sets.F_e, grid.M)
    r_u = spectral_efficiency(traffic.N_u, grid, sets.F_u, sets.M_u)

    fe = list(sets.f_e)
    fu = list(sets.f_u)
    p_e = _as_full(embb_power(gamma_e[fe], r_e), fe, grid.F)
    p_e_on_fu = p_e[fu]
    p_sic_on_fu = sic_power(p_e_on_fu, gamma_e[fu], r_u, scheme)

    if table is None:
        raise SlicePowerError(
            "an outage table is required; build one with "
            "`slicepower table build` for this (mean SNR, F_u, r_u)"
        )
    if not table.matches(channel.Gamma_u, sets.F_u, r_u):
        raise SlicePowerError(
            f"table mismatch: table is for (Gamma_u={table.gamma_u:g}, "
            f"F_u={table.f_count}, r_u={table.r_u:g}) but the run needs "
            f"(Gamma_u={channel.Gamma_u:g}, F_u={sets.F_u}, r_u={r_u:g})"
        )

    p_u_on_fu = feasible_urllc_power(p_e_on_fu, p_sic_on_fu, table, traffic.epsilon_u)
    iterations = 0
    if algorithm == Algorithm.BCD:
        crn = CommonRandomOutage(
            channel.Gamma_u, sets.F_u, r_u, bcd.draws,
            seed=int(rngmod.derive_seed_sequence(seed, "bcd-draws").generate_state(1)[0]),
        )
        p_u_on_fu, iterations = descend_urllc_power(
            p_u_on_fu, p_sic_on_fu, p_e_on_fu, crn, traffic.epsilon_u, bcd
        )

    p_u = _as_full(p_u_on_fu, fu, grid.F)
    p_u_sic = _as_full(p_sic_on_fu, fu, grid.F)
    evidence_seed = int(rngmod.derive_seed_sequence(seed, "evidence").generate_state(1)[0])
    p_u_hat = estimate_outage(
        p_u_on_fu, p_e_on_fu, channel.Gamma_u, r_u, evidence_trials, evidence_seed
    )
    if scheme is Scheme.NOMA:
        sic_ok = mutual_info_sic(p_u_on_fu, p_e_on_fu, gamma_e[fu], scheme) >= r_u * (
            1.0 - _SIC_REL_TOL
        )
    else:
        sic_ok = bool(np.all(p_u * p_e == 0.0))

    total = grid.M * float(p_e.sum()) + sets.M_u * float(p_u.sum())
    return AllocationResult(
        sets=sets, p_e=p_e, p_u=p_u, p_u_sic=p_u_sic, r_e=r_e, r_u=r_u,
        p_total_mw=total, p_u_hat=p_u_hat, sic_satisfied=sic_ok,
        algorithm=algorithm, iterations=iterations,
    )
