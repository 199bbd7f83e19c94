"""Replacement-only sequencing under explicit dependent joints: a ratio-sort
starting point from marginal priors, adjacent-swap local search to
quiescence, and an exact subset dynamic program.

The DP exploits that the optimal order of the remaining components does not
depend on the order in which the already-repaired ones were fixed:
f(S) = min_{j in S} c_j * (1 - P(all of S ok)) + f(S \\ {j}),  f(empty) = 0.
"""
from __future__ import annotations

import math
from typing import Mapping

from .model import (CostReport, JointTable, LimitExceededError, make_report)
from .flat import expected_cost, is_locally_optimal, replacement_ratio, swap_delta

DP_LIMIT = 20
SWAP_EPS = 1e-12


def independent_start(joint: JointTable, costs: Mapping[str, float]) -> tuple[str, ...]:
    """Ratio-sorted order using the no-evidence marginal priors
    p_i = P(component i broken)."""
    def key(cid: str) -> float:
        p = 1.0 - joint.ok_marginal_mask(joint.mask_of((cid,)))
        return replacement_ratio(costs[cid], p)

    return tuple(sorted(joint.components, key=key))


def dependent_swap_check(order, j: int, joint: JointTable,
                         costs: Mapping[str, float]) -> tuple[bool, bool]:
    """Adjacent-pair optimality at 1-based position j, in conditional form:

    c_j [P(M_j ok | R_ok) - P(M_j ok, M_j+1 ok | R_ok)]
      <= c_j+1 [P(M_j+1 ok | R_ok) - P(M_j+1 ok, M_j ok | R_ok)]

    with R_ok = everything after position j+1 ok.  Returns (holds, vacuous);
    vacuous is True when P(R_ok) = 0, in which case the condition holds by
    convention.
    """
    n = len(order)
    if not 1 <= j < n:
        raise ValueError(f"swap position {j} out of range 1..{n - 1}")
    cj, cj1 = order[j - 1], order[j]
    rest_mask = joint.mask_of(order[j + 1:])
    p_rest = joint.ok_marginal_mask(rest_mask)
    if p_rest <= 0.0:
        return True, True
    bj = joint.mask_of((cj,))
    bj1 = joint.mask_of((cj1,))
    both = joint.ok_marginal_mask(rest_mask | bj | bj1) / p_rest
    lhs = costs[cj] * (joint.ok_marginal_mask(rest_mask | bj) / p_rest - both)
    rhs = costs[cj1] * (joint.ok_marginal_mask(rest_mask | bj1) / p_rest - both)
    return lhs <= rhs + 1e-9, False


def local_search(joint: JointTable, costs: Mapping[str, float],
                 start=None) -> tuple[tuple[str, ...], int]:
    """Repeatedly transpose the first adjacent pair whose swap strictly
    lowers the expected cost, until quiescence.  Returns (order, swaps)."""
    order = list(start if start is not None else independent_start(joint, costs))
    swaps = 0
    improved = True
    while improved:
        improved = False
        for j in range(1, len(order)):
            # positive delta: the transposed order is strictly cheaper
            if swap_delta(tuple(order), j, joint, costs) > SWAP_EPS:
                order[j - 1], order[j] = order[j], order[j - 1]
                swaps += 1
                improved = True
                break
    return tuple(order), swaps


def exact_dp(joint: JointTable, costs: Mapping[str, float],
             limit: int = DP_LIMIT) -> tuple[tuple[str, ...], CostReport]:
    """Globally optimal replacement order by subset dynamic programming."""
    ids = joint.components
    n = len(ids)
    if n > limit:
        raise LimitExceededError(
            f"{n} components exceeds the DP limit {limit}; use local_search")
    c = [costs[cid] for cid in ids]
    # P(all of subset ok) for every subset, via a subset-sum (zeta) transform
    # of the world probabilities over the complement.
    full = (1 << n) - 1
    acc = [0.0] * (1 << n)
    for mask, prob in joint._worlds:
        acc[mask] += prob
    for i in range(n):
        bit = 1 << i
        for s in range(1 << n):
            if s & bit:
                acc[s] += acc[s ^ bit]
    okm = [acc[full ^ s] for s in range(1 << n)]

    f = [0.0] * (1 << n)
    first = [0] * (1 << n)
    for s in range(1, 1 << n):
        p_broken = 1.0 - okm[s]
        best = math.inf
        arg = -1
        rest = s
        while rest:
            bit = rest & -rest
            j = bit.bit_length() - 1
            cost = c[j] * p_broken + f[s ^ bit]
            if cost < best:
                best, arg = cost, j
            rest ^= bit
        f[s] = best
        first[s] = arg

    order = []
    s = full
    while s:
        j = first[s]
        order.append(ids[j])
        s ^= 1 << j
    return tuple(order), expected_cost(tuple(order), joint, costs)
