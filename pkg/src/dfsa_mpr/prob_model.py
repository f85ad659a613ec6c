"""Slot-occupancy statistics for framed slotted ALOHA with a multi-packet reader.

Closed forms (Poisson approximation) for the probability that a slot of an
L-slot frame is empty, successful, or collided when n tags each pick one slot
uniformly at random and the reader can decode up to M simultaneous replies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MprOrder:
    """Reader reception capability: up to M simultaneous tag replies decode."""

    M: int

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError(f"MPR order must be a positive integer, got {self.M}")


@dataclass(frozen=True)
class Load:
    """Offered load: n tags contending over a frame of L slots."""

    n: int
    L: int

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError(f"frame length must be >= 1, got {self.L}")
        if self.n < 0:
            raise ValueError(f"tag count must be >= 0, got {self.n}")

    @property
    def rho(self) -> float:
        """Tags per slot, n/L."""
        return self.n / self.L


@dataclass(frozen=True)
class SlotProbabilities:
    """Per-slot outcome probabilities: empty, successful, collided."""

    p_e: float
    p_s: float
    p_c: float


def truncated_exp_sum(x: float, M: int) -> float:
    """x/1! + x^2/2! + ... + x^M/M! (Taylor sum of e^x without the j=0 term)."""
    term = 1.0
    total = 0.0
    for j in range(1, M + 1):
        term *= x / j
        total += term
    return total


def binomial_occupancy(j: int, load: Load) -> float:
    """Probability that exactly j of the n tags land in a given slot.

    Evaluated in log domain so binomial coefficients stay finite for n up
    to ~1e6.
    """
    n, L = load.n, load.L
    if j < 0 or j > n:
        raise ValueError(f"occupancy {j} outside [0, {n}]")
    if L == 1:
        return 1.0 if j == n else 0.0
    log_p = (
        math.lgamma(n + 1)
        - math.lgamma(j + 1)
        - math.lgamma(n - j + 1)
        - j * math.log(L)
        + (n - j) * math.log1p(-1.0 / L)
    )
    return math.exp(log_p)


def slot_probabilities(load: Load, mpr: MprOrder) -> SlotProbabilities:
    """Poisson-approximation probabilities that a slot is empty / successful / collided.

    A slot is successful when 1..M tags pick it, collided when more than M do.
    """
    if load.n == 0:
        return SlotProbabilities(1.0, 0.0, 0.0)
    rho = load.rho
    p_e = math.exp(-rho)
    p_s = p_e * truncated_exp_sum(rho, mpr.M)
    # subtraction residue near rho -> 0 can dip slightly negative
    p_c = min(1.0, max(0.0, 1.0 - p_e - p_s))
    return SlotProbabilities(p_e, p_s, p_c)


def expected_success_slots(load: Load, mpr: MprOrder) -> float:
    """Expected number of successful slots in the frame, L * p_s."""
    return load.L * slot_probabilities(load, mpr).p_s


def channel_efficiency(load: Load, mpr: MprOrder) -> float:
    """Fraction of slots expected to be successful (expected successes over L)."""
    return slot_probabilities(load, mpr).p_s
