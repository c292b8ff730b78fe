"""Mutual-information evaluators and Monte Carlo outage estimation.

The URLLC receiver always sees the broadband signal as interference, so
its per-resource mutual information is ``log2(1 + g Pu / (1 + g Pe))``.
Outage is the event that the sum over the assigned resources falls at or
below ``F_u * r_u``.  Fading is quasi-static: mini-slots repeat the same
draw, so rates fold the window length and a single draw per frequency
suffices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .grid import Scheme
from .waterfill import substitute_zero_interference

__all__ = [
    "OutageEstimate",
    "mutual_info_u",
    "mutual_info_sic",
    "mutual_info_e",
    "mutual_info_il",
    "estimate_outage",
    "single_freq_power",
    "CommonRandomOutage",
]

_LN2 = math.log(2.0)
#: rows drawn per chunk; fixed so results never depend on memory pressure
_CHUNK = 1 << 19


def _sinr_rate_nats(gamma, p_u, p_e):
    """ln(1 + gamma*p_u / (1 + gamma*p_e)), broadcasting over rows."""
    num = gamma * p_u
    den = 1.0 + gamma * p_e
    return np.log1p(num / den)


def mutual_info_u(p_u, p_e, gamma_u) -> float:
    """Rate [bit/s/Hz] of the URLLC stream at its own receiver."""
    p_u, p_e, gamma_u = np.broadcast_arrays(
        np.asarray(p_u, float), np.asarray(p_e, float), np.asarray(gamma_u, float)
    )
    return float(_sinr_rate_nats(gamma_u, p_u, p_e).sum() / (_LN2 * p_u.size))


def mutual_info_sic(p_u, p_e, gamma_e, scheme: Scheme) -> float:
    """Rate of the URLLC stream as seen by the broadband receiver.

    This is what the interference-cancellation step must decode; it is
    identically zero under OMA where no cancellation happens.
    """
    if Scheme(scheme) is Scheme.OMA:
        return 0.0
    return mutual_info_u(p_u, p_e, gamma_e)


def mutual_info_e(p_e, gamma_e) -> float:
    """Rate of the broadband stream after interference cancellation."""
    p_e = np.asarray(p_e, dtype=float)
    gamma_e = np.asarray(gamma_e, dtype=float)
    return float(np.log1p(gamma_e * p_e).sum() / (_LN2 * p_e.size))


def mutual_info_il(p_u, p_e) -> float:
    """Interference-limited lower-bound rate of the URLLC stream.

    Noise is dropped and zero-interference entries take the smallest
    positive broadband power before the ratio is formed.
    """
    p_u = np.asarray(p_u, dtype=float)
    filled = substitute_zero_interference(p_e)
    return float(np.log1p(p_u / filled).sum() / (_LN2 * p_u.size))


@dataclass(frozen=True)
class OutageEstimate:
    """Monte Carlo outage probability with a 3-sigma binomial half-width."""

    p_hat: float
    trials: int
    ci_halfwidth: float

    @classmethod
    def from_counts(cls, outages: int, trials: int) -> "OutageEstimate":
        p = outages / trials
        return cls(p, trials, 3.0 * math.sqrt(p * (1.0 - p) / trials))


def _sure_outage_bound_nats(p_u: np.ndarray, p_e: np.ndarray) -> float:
    """Supremum of the achievable rate over all fading draws, if finite.

    On interfered resources the rate is strictly below ``log(1+Pu/Pe)``
    for every finite draw; resources with power but no interference have
    unbounded rate.
    """
    bound = 0.0
    for pu_f, pe_f in zip(p_u, p_e):
        if pu_f <= 0.0:
            continue
        if pe_f <= 0.0:
            return math.inf
        bound += math.log1p(pu_f / pe_f)
    return bound


def estimate_outage(
    p_u,
    p_e,
    gamma_u_mean: float,
    r_u: float,
    trials: int,
    seed: int,
) -> OutageEstimate:
    """Fraction of fading draws whose accumulated rate misses ``F_u * r_u``.

    ``p_u`` and ``p_e`` are per-frequency power vectors over the URLLC
    set (uniform power is just a constant vector); draws are exponential
    with mean ``gamma_u_mean``, independent per frequency, from a stream
    derived from ``seed``.  When no draw can reach the target the exact
    value 1 is returned without sampling; this equals what any seed would
    estimate.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if gamma_u_mean <= 0.0:
        raise ValueError("mean SNR must be positive")
    p_u = np.atleast_1d(np.asarray(p_u, dtype=float))
    p_e = np.broadcast_to(np.asarray(p_e, dtype=float), p_u.shape).astype(float)
    if np.any(p_u < 0.0) or np.any(p_e < 0.0):
        raise ValueError("powers must be non-negative")
    f_count = p_u.size
    target_nats = f_count * r_u * _LN2

    if _sure_outage_bound_nats(p_u, p_e) <= target_nats:
        return OutageEstimate(1.0, trials, 0.0)

    gen = rngmod.substream(seed, "outage")
    outages = 0
    left = trials
    while left > 0:
        n = min(_CHUNK, left)
        gamma = gen.standard_exponential((n, f_count))
        gamma *= gamma_u_mean
        rate = _sinr_rate_nats(gamma, p_u, p_e).sum(axis=1)
        outages += int((rate <= target_nats).sum())
        left -= n
    return OutageEstimate.from_counts(outages, trials)


def single_freq_power(r_u: float, gamma_u_mean: float, epsilon_u: float, p_e_f: float = 0.0) -> float:
    """Exact minimum power on a single Rayleigh resource.

    With one frequency the outage probability has a closed form, so the
    power solving ``p_u = epsilon_u`` is
    ``(2^r - 1) (P_e - 1 / (Gamma ln(1 - epsilon)))``.
    """
    if not 0.0 < epsilon_u < 1.0:
        raise ValueError("epsilon_u must be in (0, 1)")
    if gamma_u_mean <= 0.0:
        raise ValueError("mean SNR must be positive")
    if r_u == 0.0:
        return 0.0
    return (2.0**r_u - 1.0) * (p_e_f - 1.0 / (gamma_u_mean * math.log1p(-epsilon_u)))


class CommonRandomOutage:
    """Outage estimator over one frozen matrix of fading draws.

    Reusing the same draws across candidate power vectors makes
    comparisons deterministic and exactly monotone: lowering any single
    power coordinate can only grow the outage count.  The coordinate
    update path recomputes one column instead of the full matrix, which
    is what the descent loop needs.
    """

    def __init__(self, gamma_u_mean: float, f_count: int, r_u: float, draws: int, seed: int):
        if draws < 1:
            raise ValueError("draws must be >= 1")
        gen = rngmod.substream(seed, "crn")
        self.gamma = gamma_u_mean * gen.standard_exponential((draws, f_count))
        self.draws = draws
        self.f_count = f_count
        self.target_nats = f_count * r_u * _LN2
        self._p_e = None
        self._p_u = None
        self._total = None

    def estimate(self, p_u, p_e) -> OutageEstimate:
        """Outage estimate at an arbitrary vector pair (full recompute)."""
        p_u = np.broadcast_to(np.asarray(p_u, float), (self.f_count,))
        p_e = np.broadcast_to(np.asarray(p_e, float), (self.f_count,))
        total = _sinr_rate_nats(self.gamma, p_u, p_e).sum(axis=1)
        return OutageEstimate.from_counts(int((total <= self.target_nats).sum()), self.draws)

    # -- coordinate-update session -------------------------------------

    def attach(self, p_u, p_e) -> OutageEstimate:
        """Fix the working vectors and cache per-draw totals."""
        self._p_u = np.array(np.broadcast_to(np.asarray(p_u, float), (self.f_count,)))
        self._p_e = np.array(np.broadcast_to(np.asarray(p_e, float), (self.f_count,)))
        self._total = _sinr_rate_nats(self.gamma, self._p_u, self._p_e).sum(axis=1)
        return OutageEstimate.from_counts(
            int((self._total <= self.target_nats).sum()), self.draws
        )

    def _column(self, f: int, value: float) -> np.ndarray:
        g = self.gamma[:, f]
        return np.log1p(g * value / (1.0 + g * self._p_e[f]))

    def try_coordinate(self, f: int, value: float) -> OutageEstimate:
        """Estimate with coordinate ``f`` set to ``value`` (not committed)."""
        if self._total is None:
            raise RuntimeError("attach() a working vector first")
        total = self._total + (self._column(f, value) - self._column(f, self._p_u[f]))
        return OutageEstimate.from_counts(int((total <= self.target_nats).sum()), self.draws)

    def commit(self, f: int, value: float) -> None:
        """Adopt the coordinate change evaluated by :meth:`try_coordinate`."""
        self._total += self._column(f, value) - self._column(f, self._p_u[f])
        self._p_u[f] = value
