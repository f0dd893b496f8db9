"""Canonical worked instances.

Parity-oblivious multiplexing: four preparations encode two bits
(i = 2*x1 + x2), two binary measurements try to recover bit 1 or bit 2,
and the preparation equivalence (P_00 + P_11)/2 = (P_01 + P_10)/2 hides
the parity.  Classically the per-bit success probability is capped at
3/4; qubit strategies reach (2 + sqrt 2)/4, which is contextual.
"""

from __future__ import annotations

from math import isqrt

from .model import Behavior, Scenario, prep_equivalence, scenario
from .rational import Q


def pom_scenario() -> Scenario:
    alpha = [Q(1, 2), Q(0), Q(0), Q(1, 2)]
    beta = [Q(0), Q(1, 2), Q(1, 2), Q(0)]
    return scenario(4, 2, 2, prep_equivalences=[prep_equivalence(alpha, beta)])


def pom_success_quantum(digits: int = 200):
    """(2 + sqrt 2)/4 truncated to the given number of decimal digits."""
    scale = 10**digits
    sqrt2 = isqrt(2 * scale * scale)
    return Q(2 * scale + sqrt2, 4 * scale)


def pom_behavior(success) -> Behavior:
    """Correct-bit probability `success` for both measurements."""
    q = Q(success) if not hasattr(success, "numerator") else success
    miss = 1 - q
    table = []
    for i in range(4):
        bits = (i >> 1, i & 1)
        per_j = []
        for j in range(2):
            row = [q if k == bits[j] else miss for k in range(2)]
            per_j.append(tuple(row))
        table.append(tuple(per_j))
    return Behavior(pom_scenario(), tuple(table))
