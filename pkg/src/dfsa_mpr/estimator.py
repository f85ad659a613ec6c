"""MAP estimation of the contending tag population from one frame's slot tallies.

Given the counts of empty (E), successful (S) and collided (C) slots in an
L-slot frame, the posterior over the population size k is a trinomial in the
per-slot outcome probabilities:

    P(k | E,S,C)  prop.  (e^-x)^E * (e^-x (T_M(x)-1))^S * (e^-x (e^x - T_M(x)))^C

with x = k/L and T_M the order-M Taylor polynomial of e^x. The leading
multinomial coefficient does not depend on k, so it is dropped; the argmax is
unchanged. All evaluation is in log domain (the linear form underflows for
L = 128), and e^x - T_M(x) is computed from the series tail for small x to
dodge cancellation.

The integer argmax is found by an ascending scan from the smallest population
consistent with the observation, stopping once the posterior has fallen below
the running maximum for a fixed window of consecutive candidates (the
posterior is unimodal in every regime exercised by the tests, which guard the
scan against a brute-force oracle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .prob_model import MprOrder

#: candidates the posterior must stay below the running max before the scan stops
DEFAULT_STOP_WINDOW = 50

_SCAN_CHUNK = 256


@dataclass(frozen=True)
class FrameObservation:
    """Slot tallies of one interrogation frame.

    ``identified`` is the total number of tags decoded across the S
    successful slots; it feeds next-frame sizing but not the posterior.
    """

    L: int
    E: int
    S: int
    C: int
    identified: int

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError(f"frame length must be >= 1, got {self.L}")
        if min(self.E, self.S, self.C) < 0:
            raise ValueError("slot tallies must be non-negative")
        if self.E + self.S + self.C != self.L:
            raise ValueError(
                f"tallies E+S+C = {self.E + self.S + self.C} != frame length {self.L}"
            )
        if (self.identified == 0) != (self.S == 0):
            raise ValueError("identified tags and success slots must vanish together")
        if self.identified < self.S:
            raise ValueError("each successful slot holds at least one tag")


@dataclass(frozen=True)
class MapEstimate:
    """Result of the posterior maximization, with the search bounds used."""

    n_hat: int
    k_min: int
    k_max: int
    log_posterior_at_mode: float


def _taylor_minus_one(x: np.ndarray, M: int) -> np.ndarray:
    """T_M(x) - 1 = sum_{j=1..M} x^j/j!, vectorized, no cancellation."""
    term = np.ones_like(x)
    total = np.zeros_like(x)
    for j in range(1, M + 1):
        term = term * x / j
        total = total + term
    return total


def _exp_tail(x: np.ndarray, M: int) -> np.ndarray:
    """e^x - T_M(x), via the series tail for x < 1 where subtraction cancels."""
    direct = np.exp(x) - 1.0 - _taylor_minus_one(x, M)
    term = x ** (M + 1) / math.factorial(M + 1)
    series = term.copy()
    for j in range(M + 2, M + 40):
        term = term * x / j
        series = series + term
    return np.where(x < 1.0, series, direct)


def _log_posterior_array(ks: np.ndarray, obs: FrameObservation, M: int) -> np.ndarray:
    ks = np.asarray(ks, dtype=float)
    x = ks / obs.L
    # the three e^-x factors combine to e^-(E+S+C)x = e^-k
    out = -ks
    if obs.S > 0:
        s_arg = _taylor_minus_one(x, M)
        ok = s_arg > 0.0
        out = out + np.where(ok, obs.S * np.log(np.where(ok, s_arg, 1.0)), -np.inf)
    if obs.C > 0:
        c_arg = _exp_tail(x, M)
        ok = c_arg > 0.0
        out = out + np.where(ok, obs.C * np.log(np.where(ok, c_arg, 1.0)), -np.inf)
    return out


def log_posterior(k: int, obs: FrameObservation, mpr: MprOrder) -> float:
    """Log of the (coefficient-free) posterior at population k; -inf where impossible."""
    if k < 0:
        raise ValueError(f"candidate population must be >= 0, got {k}")
    return float(_log_posterior_array(np.array([k]), obs, mpr.M)[0])


def search_lower_bound(obs: FrameObservation, mpr: MprOrder) -> int:
    """Smallest population consistent with the tallies: identified tags plus M+1 per collision."""
    return max(obs.identified, obs.S) + (mpr.M + 1) * obs.C


def map_estimate(
    obs: FrameObservation, mpr: MprOrder, stop_window: int = DEFAULT_STOP_WINDOW
) -> MapEstimate:
    """Integer argmax of the posterior, by bounded ascending scan.

    Scans k upward from the consistency lower bound; stops after the
    posterior has been strictly below the running maximum for
    ``stop_window`` consecutive candidates, or at a hard cap. Ties break
    toward the smaller k.
    """
    if obs.identified > obs.S * mpr.M:
        raise ValueError(
            f"{obs.identified} tags cannot fit in {obs.S} slots at MPR order {mpr.M}"
        )
    k_min = search_lower_bound(obs, mpr)
    k_max = max(10 * obs.L * mpr.M, k_min + 1000)

    best_k = k_min
    best_val = -math.inf
    below = 0
    k = k_min
    while k <= k_max:
        ks = np.arange(k, min(k + _SCAN_CHUNK, k_max + 1))
        vals = _log_posterior_array(ks, obs, mpr.M)
        for kk, v in zip(ks.tolist(), vals.tolist()):
            if v > best_val:
                best_val = v
                best_k = kk
                below = 0
            elif v < best_val:
                below += 1
                if below >= stop_window:
                    return MapEstimate(int(best_k), k_min, k_max, best_val)
            else:
                below = 0
        k += _SCAN_CHUNK
    return MapEstimate(int(best_k), k_min, k_max, best_val)


def posterior_curve(
    obs: FrameObservation, mpr: MprOrder, k_range: Iterable[int]
) -> list[tuple[int, float]]:
    """Posterior over k_range, normalized to sum to 1 (plot data for the MAP curve).

    Exponentiation is max-shifted for stability; deterministic for a given
    range regardless of evaluation order.
    """
    ks = np.asarray(list(k_range), dtype=int)
    if ks.size == 0:
        raise ValueError("k_range must be non-empty")
    if np.any(ks < 0):
        raise ValueError("candidate populations must be >= 0")
    logp = _log_posterior_array(ks, obs, mpr.M)
    peak = float(np.max(logp))
    if peak == -math.inf:
        raise ValueError("posterior vanishes on the whole range")
    weights = np.exp(logp - peak)
    probs = weights / weights.sum()
    return list(zip(ks.tolist(), probs.tolist()))
