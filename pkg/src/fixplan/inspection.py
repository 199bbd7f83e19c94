"""Strategies mixing replacement and inspection.

An inspected component pays its inspection cost d in place of the
replacement cost c, plus a position-independent trailing term
h * P(component broken) for the repair that follows a broken finding.
For a fixed inspection set the optimal order sorts ascending by
cd_i * (1 - p_i) / p_i with cd_i = d_i if inspected else c_i; the globally
optimal strategy is found by enumerating all inspection subsets.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping

from .model import (ATOL, CostReport, FlatSystem, JointTable,
                    LimitExceededError, make_report)
from .flat import replacement_ratio

SUBSET_LIMIT = 20


@dataclass(frozen=True)
class Strategy:
    """An ordered repair sequence plus the subset of components inspected
    before repair."""

    order: tuple[str, ...]
    inspect: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.inspect <= set(self.order):
            raise ValueError("inspected components must appear in the order")


def _repair_cost(cid: str, specs: Mapping, h_override: Mapping[str, float] | None) -> float:
    if h_override is not None and cid in h_override:
        return h_override[cid]
    h = specs[cid].h
    if h is None:
        raise ValueError(f"{cid}: inspected component has no repair cost h")
    return h


def _inspection_cost(cid: str, specs: Mapping) -> float:
    d = specs[cid].d
    if d is None:
        raise ValueError(f"{cid}: inspected component has no inspection cost d")
    return d


def expected_cost_with_inspections(strat: Strategy, joint: JointTable,
                                   specs: Mapping, h_override: Mapping[str, float] | None = None,
                                   ) -> CostReport:
    """Expected cost of a strategy under an arbitrary joint."""
    ec = 0.0
    suffix_mask = joint.mask_of(strat.order)
    p_faulty = 1.0 - joint.ok_marginal_mask(suffix_mask)
    for cid in strat.order:
        cd = _inspection_cost(cid, specs) if cid in strat.inspect else specs[cid].c
        ec += cd * (1.0 - joint.ok_marginal_mask(suffix_mask))
        suffix_mask &= ~joint.mask_of((cid,))
    for cid in strat.inspect:
        p_broken = 1.0 - joint.ok_marginal_mask(joint.mask_of((cid,)))
        ec += _repair_cost(cid, specs, h_override) * p_broken
    return make_report(ec, p_faulty)


def _independent_cost(order, inspect, flat: FlatSystem,
                      h_override: Mapping[str, float] | None) -> tuple[float, float]:
    """(ec, p_faulty) for an independent system, suffix-product form."""
    by_id = flat.by_id
    ok = 1.0
    ok_suffix = [1.0] * (len(order) + 1)
    for k in range(len(order) - 1, -1, -1):
        ok *= 1.0 - by_id[order[k]].p
        ok_suffix[k] = ok
    ec = 0.0
    for k, cid in enumerate(order):
        spec = by_id[cid]
        cd = _inspection_cost(cid, by_id) if cid in inspect else spec.c
        ec += cd * (1.0 - ok_suffix[k])
    for cid in inspect:
        ec += _repair_cost(cid, by_id, h_override) * by_id[cid].p
    return ec, 1.0 - ok_suffix[0]


def optimal_sequence_for_inspection_set(P, flat: FlatSystem) -> Strategy:
    """Best order for a fixed inspection set: ascending cd_i (1-p_i)/p_i."""
    if not flat.independent:
        raise ValueError("requires independent faults")
    inspect = frozenset(P)
    by_id = flat.by_id

    def key(cid: str) -> float:
        spec = by_id[cid]
        cd = _inspection_cost(cid, by_id) if cid in inspect else spec.c
        return replacement_ratio(cd, spec.p)

    return Strategy(order=tuple(sorted(flat.ids, key=key)), inspect=inspect)


def optimal_strategy(flat: FlatSystem, h_override: Mapping[str, float] | None = None,
                     limit: int = SUBSET_LIMIT, inspectable=None,
                     ) -> tuple[Strategy, CostReport]:
    """Globally optimal strategy for an independent system: enumerate every
    inspection subset, order each by the cd-ratio rule, keep the cheapest.

    Subsets are visited in ascending size then input order, and a new
    incumbent must be strictly cheaper, so ties resolve to not inspecting.
    """
    if not flat.independent:
        raise ValueError("requires independent faults")
    if inspectable is None:
        candidates = [s.id for s in flat.components if s.d is not None]
    else:
        candidates = [cid for cid in flat.ids if cid in set(inspectable)]
    if len(flat.components) > limit:
        raise LimitExceededError(
            f"{len(flat.components)} components exceeds the subset-enumeration "
            f"limit {limit}; decompose the system hierarchically")
    best: Strategy | None = None
    best_ec = math.inf
    best_pf = 0.0
    for size in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            strat = optimal_sequence_for_inspection_set(combo, flat)
            ec, p_faulty = _independent_cost(strat.order, strat.inspect, flat, h_override)
            if ec < best_ec:
                best, best_ec, best_pf = strat, ec, p_faulty
    assert best is not None
    return best, make_report(best_ec, best_pf)


def remaining_expected_cost(strat: Strategy, completed: int, flat: FlatSystem,
                            h_override: Mapping[str, float] | None = None) -> CostReport:
    """Cost of the suffix after ``completed`` actions, treated as a
    standalone strategy conditioned on the system still being faulty."""
    if not flat.independent:
        raise ValueError("requires independent faults")
    if not 0 <= completed < len(strat.order):
        raise ValueError(f"prefix length {completed} out of range")
    order = strat.order[completed:]
    inspect = strat.inspect & set(order)
    ec, p_faulty = _independent_cost(order, inspect, flat, h_override)
    return make_report(ec, p_faulty)
