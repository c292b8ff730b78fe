"""Water-filling over parallel channels and its three closed-form uses.

All solvers minimize total power subject to a sum-rate constraint
``sum_f log2(1 + g(f) P(f)) >= rate_target`` and share one structure:
on the positive set the solution is ``P(f) = mu - 1/g(f)`` with the
common level ``mu`` chosen so the constraint is tight.  Channels whose
tentative power would be non-positive are excluded and the level
re-solved; the fixed point of that iteration is computed directly by
scanning channels in gain order.  The level is evaluated in the log
domain so widely spread gains cannot overflow the products.
"""

from __future__ import annotations

import numpy as np

from .errors import RateInfeasibleError, ZeroInterferenceError
from .grid import Scheme

__all__ = ["waterfill", "embb_power", "sic_power", "il_power"]


def waterfill(gains: np.ndarray, rate_target: float) -> np.ndarray:
    """Minimum-power allocation over parallel channels with the given gains.

    Returns the per-channel powers in the input order; excluded channels
    get exactly 0.  Gains must be strictly positive.
    """
    g = np.asarray(gains, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("gains must be a non-empty vector")
    if np.any(g <= 0.0) or not np.all(np.isfinite(g)):
        raise ValueError("waterfill needs strictly positive finite gains")
    if rate_target <= 0.0:
        raise ValueError(f"rate target must be positive, got {rate_target}")

    inv = 1.0 / g
    order = np.argsort(inv, kind="stable")
    inv_sorted = inv[order]
    # level when the k best channels are active, in log2 domain
    ks = np.arange(1, g.size + 1, dtype=float)
    log2_mu = (rate_target + np.cumsum(np.log2(inv_sorted))) / ks
    active = log2_mu > np.log2(inv_sorted)
    k = int(np.nonzero(active)[0].max()) + 1  # k=1 is always admissible

    powers = np.zeros_like(g)
    powers[order[:k]] = 2.0 ** log2_mu[k - 1] - inv_sorted[:k]
    np.clip(powers, 0.0, None, out=powers)
    return powers


def embb_power(gamma_e: np.ndarray, r_e: float) -> np.ndarray:
    """Broadband powers meeting ``sum log2(1 + gamma P) >= F_e * r_e``.

    Zero-gain channels are excluded up front; they cannot carry rate at
    any power.
    """
    gamma_e = np.asarray(gamma_e, dtype=float)
    if gamma_e.size == 0:
        raise ValueError("no channels offered")
    usable = gamma_e > 0.0
    if not usable.any():
        raise RateInfeasibleError("every offered channel has zero gain")
    powers = np.zeros_like(gamma_e)
    powers[usable] = waterfill(gamma_e[usable], r_e * gamma_e.size)
    return powers


def sic_power(
    p_e: np.ndarray,
    gamma_e: np.ndarray,
    r_u: float,
    scheme: Scheme,
) -> np.ndarray:
    """Minimum URLLC power that the broadband receiver can still cancel.

    The broadband receiver decodes the URLLC stream against its own
    signal as interference, so the effective channel of resource ``f`` is
    ``gamma_e(f) / (1 + gamma_e(f) P_e(f))``.  Under OMA there is nothing
    to cancel and the result is identically zero.
    """
    p_e = np.asarray(p_e, dtype=float)
    gamma_e = np.asarray(gamma_e, dtype=float)
    if p_e.shape != gamma_e.shape:
        raise ValueError("power and gain vectors must align")
    if Scheme(scheme) is Scheme.OMA:
        return np.zeros_like(p_e)
    effective = np.zeros_like(gamma_e)
    usable = gamma_e > 0.0
    if not usable.any():
        raise RateInfeasibleError("every shared channel has zero gain")
    effective[usable] = gamma_e[usable] / (1.0 + gamma_e[usable] * p_e[usable])
    powers = np.zeros_like(p_e)
    powers[usable] = waterfill(effective[usable], r_u * p_e.size)
    return powers


def substitute_zero_interference(p_e: np.ndarray) -> np.ndarray:
    """Replace zero-interference entries by the smallest positive one.

    In the interference-limited regime a channel with no broadband power
    behaves (with probability approaching one) at least as well as the
    least-interfered shared channel, so that channel's power stands in.
    """
    p_e = np.asarray(p_e, dtype=float)
    if np.any(p_e < 0.0):
        raise ValueError("interference powers must be non-negative")
    positive = p_e > 0.0
    if not positive.any():
        raise ZeroInterferenceError(
            "no resource sees broadband interference; the interference-limited "
            "approximation does not apply"
        )
    filled = p_e.copy()
    filled[~positive] = p_e[positive].min()
    return filled


def il_power(p_e: np.ndarray, r_u: float) -> np.ndarray:
    """URLLC powers for the interference-limited regime.

    With the URLLC SNR large, noise drops out and each shared resource
    acts as a channel of gain ``1 / P_e(f)``; zero-interference resources
    take the substituted value first.  The usual exclusion applies: for
    widely spread ``P_e`` the unconstrained level would drive some
    entries negative.
    """
    filled = substitute_zero_interference(p_e)
    return waterfill(1.0 / filled, r_u * filled.size)
