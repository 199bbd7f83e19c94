"""Bottom-up computation of optimal hierarchical repair plans.

Each node's plan is the cheaper of (a) replacing the node outright and
(b) the best inspect/replace strategy over its children, where an
inspected child's repair cost is the conditional cost of its own plan.
Working leaves-up makes the whole computation linear in the number of
nodes for a bounded branching factor.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Mapping

from .model import (ATOL, AtomicSpec, CostReport, FlatSystem, HierNode,
                    LimitExceededError, ModelWarning, make_report,
                    validate_model)
from .inspection import SUBSET_LIMIT, Strategy, optimal_strategy

REPLACE = "replace"
STRATEGY = "strategy"


@dataclass(frozen=True)
class HierPlan:
    """Repair plan for one node, given the node is known broken.

    ``h`` is the plan's conditional cost (== c for a Replace action),
    ``p`` the node's failure probability, ``ec`` the unconditional cost
    h * p.  ``children`` maps each inspected child to its nested plan.
    """

    node: str
    action: str  # REPLACE or STRATEGY
    h: float
    p: float
    ec: float
    order: tuple[str, ...] | None = None
    inspect: frozenset[str] = frozenset()
    children: Mapping[str, "HierPlan"] = field(default_factory=dict)


def plan_component(node: HierNode, child_plans: Mapping[str, HierPlan],
                   limit: int = SUBSET_LIMIT) -> HierPlan:
    """Plan one node from its children's plans (leaf: always Replace)."""
    if node.is_leaf:
        p = float(node.leaf_p)
        return HierPlan(node=node.id, action=REPLACE, h=node.c, p=p, ec=node.c * p)
    plans = [child_plans[ch.id] for ch in node.children]
    p_node = 1.0
    for plan in plans:
        p_node *= 1.0 - plan.p
    p_node = 1.0 - p_node
    if p_node <= 0.0:
        warnings.warn(f"{node.id}: no child can fail; plan is vacuous",
                      ModelWarning, stacklevel=2)
        return HierPlan(node=node.id, action=REPLACE, h=node.c, p=0.0, ec=0.0)
    # Children become a flat system: prior from the child plan, replacement
    # and inspection costs from the model, repair-after-inspection cost from
    # the child plan's conditional cost.
    specs = tuple(AtomicSpec(id=ch.id, p=child_plans[ch.id].p, c=ch.c, d=ch.d)
                  for ch in node.children)
    flat = FlatSystem(components=specs)
    h_override = {plan.node: plan.h for plan in plans}
    inspectable = [ch.id for ch in node.children if ch.d is not None]
    strat, report = optimal_strategy(flat, h_override=h_override, limit=limit,
                                     inspectable=inspectable)
    ecf = report.ec / p_node
    if node.c <= ecf:  # exact tie goes to the simpler Replace
        return HierPlan(node=node.id, action=REPLACE, h=node.c, p=p_node,
                        ec=node.c * p_node)
    nested = {cid: child_plans[cid] for cid in strat.order if cid in strat.inspect}
    return HierPlan(node=node.id, action=STRATEGY, h=ecf, p=p_node, ec=report.ec,
                    order=strat.order, inspect=strat.inspect, children=nested)


def plan_system(root: HierNode, limit: int = SUBSET_LIMIT) -> HierPlan:
    """Optimal plan for the whole tree via a post-order traversal."""
    validate_model(root)
    for node in root.walk():
        if len(node.children) > limit:
            raise LimitExceededError(
                f"{node.id}: branching factor {len(node.children)} exceeds limit {limit}")

    def plan(node: HierNode) -> HierPlan:
        child_plans = {ch.id: plan(ch) for ch in node.children}
        return plan_component(node, child_plans, limit=limit)

    return plan(root)


# ---------------------------------------------------------------------------
# plan file I/O

def plan_to_dict(plan: HierPlan) -> dict:
    out: dict = {"node": plan.node, "action": plan.action}
    if plan.action == STRATEGY:
        out["order"] = list(plan.order)
        out["inspect"] = [cid for cid in plan.order if cid in plan.inspect]
        out["children"] = [plan_to_dict(plan.children[cid])
                           for cid in plan.order if cid in plan.inspect]
    out["h"] = plan.h
    out["p"] = plan.p
    out["ec"] = plan.ec
    return out


def plan_from_dict(obj: dict) -> HierPlan:
    action = obj["action"]
    if action == REPLACE:
        return HierPlan(node=obj["node"], action=REPLACE, h=float(obj["h"]),
                        p=float(obj["p"]), ec=float(obj["ec"]))
    if action != STRATEGY:
        raise ValueError(f"unknown plan action {action!r}")
    inspect = tuple(obj.get("inspect", []))
    nested = {child["node"]: plan_from_dict(child) for child in obj.get("children", [])}
    if set(nested) != set(inspect):
        raise ValueError("plan children do not match the inspect set")
    return HierPlan(node=obj["node"], action=STRATEGY, h=float(obj["h"]),
                    p=float(obj["p"]), ec=float(obj["ec"]),
                    order=tuple(obj["order"]), inspect=frozenset(inspect),
                    children=nested)


def load_plan(path) -> HierPlan:
    with open(path, encoding="utf-8") as fh:
        return plan_from_dict(json.load(fh))


def save_plan(plan: HierPlan, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan_to_dict(plan), fh, indent=2)
        fh.write("\n")
