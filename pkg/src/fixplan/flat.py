"""Expected-cost evaluation and optimal replacement-only sequencing for flat
systems, for both explicit joints and the independent product form.

Cost of an order <C_1..C_n> is sum_k c_k * (1 - P(all of C_k..C_n ok)):
the k-th replacement is paid exactly when some not-yet-repaired component
is broken.  Under independence the optimal order sorts ascending by
c_i * (1 - p_i) / p_i.
"""
from __future__ import annotations

import math
from typing import Mapping

from .model import (ATOL, CostReport, FlatSystem, JointTable, make_report,
                    ok_marginal)

Sequence = tuple  # an order over component ids


def _check_cover(order, ids) -> None:
    if sorted(order) != sorted(ids):
        raise ValueError("sequence is not a permutation of the model's components")


def expected_cost(order, joint: JointTable, costs: Mapping[str, float]) -> CostReport:
    """Expected cost of a replacement-only order under an explicit joint."""
    _check_cover(order, joint.components)
    ec = 0.0
    suffix_mask = joint.mask_of(order)
    p_faulty = 1.0 - joint.ok_marginal_mask(suffix_mask)
    for cid in order:
        ec += costs[cid] * (1.0 - joint.ok_marginal_mask(suffix_mask))
        suffix_mask &= ~joint.mask_of((cid,))
    return make_report(ec, p_faulty)


def expected_cost_independent(order, flat: FlatSystem) -> CostReport:
    """Expected cost of an order under independent faults (suffix products)."""
    if not flat.independent:
        raise ValueError("system carries an explicit joint; use expected_cost")
    _check_cover(order, flat.ids)
    by_id = flat.by_id
    # ok_suffix[k] = P(all of order[k:] ok)
    ok = 1.0
    ok_suffix = [1.0] * (len(order) + 1)
    for k in range(len(order) - 1, -1, -1):
        ok *= 1.0 - by_id[order[k]].p
        ok_suffix[k] = ok
    ec = sum(by_id[cid].c * (1.0 - ok_suffix[k]) for k, cid in enumerate(order))
    return make_report(ec, 1.0 - ok_suffix[0])


def replacement_ratio(c: float, p: float) -> float:
    """Sort key c * (1 - p) / p; p = 0 sorts last (infinite ratio)."""
    if p <= 0.0:
        return math.inf
    return c * (1.0 - p) / p


def optimal_sequence(flat: FlatSystem) -> Sequence:
    """Globally optimal replacement order for an independent flat system:
    ascending c_i (1 - p_i) / p_i, stable on ties."""
    if not flat.independent:
        raise ValueError("optimal_sequence requires independent faults")
    return tuple(sorted(flat.ids, key=lambda cid: replacement_ratio(
        flat.by_id[cid].c, flat.by_id[cid].p)))


def swap_delta(order, j: int, joint: JointTable, costs: Mapping[str, float]) -> float:
    """EC(order) - EC(order with positions j, j+1 transposed); j is 1-based."""
    n = len(order)
    if not 1 <= j < n:
        raise ValueError(f"swap position {j} out of range 1..{n - 1}")
    cj, cj1 = order[j - 1], order[j]
    rest = order[j + 1:]
    rest_mask = joint.mask_of(rest)
    bj = joint.mask_of((cj,))
    bj1 = joint.mask_of((cj1,))
    p_from_j = 1.0 - joint.ok_marginal_mask(rest_mask | bj | bj1)
    p_from_j1 = 1.0 - joint.ok_marginal_mask(rest_mask | bj1)
    p_from_j_swapped = 1.0 - joint.ok_marginal_mask(rest_mask | bj)
    return (costs[cj] * p_from_j + costs[cj1] * p_from_j1
            - costs[cj1] * p_from_j - costs[cj] * p_from_j_swapped)


def is_locally_optimal(order, joint: JointTable, costs: Mapping[str, float],
                       atol: float = ATOL) -> tuple[bool, int | None]:
    """True iff no adjacent transposition lowers the cost.  Returns the
    verdict and the first violating 1-based position (or None).

    The pairwise condition checked is
    c_j [P(M_j ok, R_ok) - P(M_j ok, M_j+1 ok, R_ok)]
      <= c_j+1 [P(M_j+1 ok, R_ok) - P(M_j+1 ok, M_j ok, R_ok)]
    with R_ok = everything after position j+1 ok.
    """
    for j in range(1, len(order)):
        cj, cj1 = order[j - 1], order[j]
        rest_mask = joint.mask_of(order[j + 1:])
        bj = joint.mask_of((cj,))
        bj1 = joint.mask_of((cj1,))
        both = joint.ok_marginal_mask(rest_mask | bj | bj1)
        lhs = costs[cj] * (joint.ok_marginal_mask(rest_mask | bj) - both)
        rhs = costs[cj1] * (joint.ok_marginal_mask(rest_mask | bj1) - both)
        if lhs > rhs + atol:
            return False, j
    return True, None


def single_fault_sequence(joint: JointTable, costs: Mapping[str, float]) -> Sequence:
    """Optimal order when exactly one component is broken in every
    positive-probability world: ascending c_i / p_i.  Globally optimal."""
    priors = {cid: 0.0 for cid in joint.components}
    for broken, prob in joint.entries:
        if prob <= 0.0:
            continue
        if len(broken) != 1:
            raise ValueError(
                f"joint is not single-fault: world {sorted(broken)} has probability {prob}")
        priors[next(iter(broken))] += prob

    def ratio(cid: str) -> float:
        p = priors[cid]
        return costs[cid] / p if p > 0.0 else math.inf

    return tuple(sorted(joint.components, key=ratio))
