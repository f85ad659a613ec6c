"""Shared brute-force oracles for the estimator tests.

Deliberately independent of the library's evaluation path: scalar math,
direct formula, full trinomial including the multinomial coefficient.
"""

import math


def trinomial_log_posterior(k, L, E, S, C, M, include_constant=True):
    x = k / L
    T = sum(x**j / math.factorial(j) for j in range(M + 1))
    log_p = (E + S + C) * (-x)
    if S:
        if T - 1.0 <= 0.0:
            return -math.inf
        log_p += S * math.log(T - 1.0)
    if C:
        tail = math.exp(x) - T
        if tail <= 0.0:
            return -math.inf
        log_p += C * math.log(tail)
    if include_constant:
        log_p += (
            math.lgamma(L + 1)
            - math.lgamma(E + 1)
            - math.lgamma(S + 1)
            - math.lgamma(C + 1)
        )
    return log_p


def brute_force_map(L, E, S, C, M, k_max=500, include_constant=True):
    """Exhaustive argmax over k in [0, k_max], first maximum wins."""
    best_k, best_v = 0, -math.inf
    for k in range(k_max + 1):
        v = trinomial_log_posterior(k, L, E, S, C, M, include_constant)
        if v > best_v:
            best_k, best_v = k, v
    return best_k
