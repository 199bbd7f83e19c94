"""Ground-truth machinery: a deterministic protocol executor, exact
world-enumeration expected costs, exhaustive strategy/plan search, and
seeded Monte Carlo estimation.

Everything here evaluates plans by literally running the repair protocol
(observe status; while broken, take the next action), independently of the
planners' closed-form cost expressions.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .model import (CostReport, FlatSystem, HierNode, JointTable,
                    LimitExceededError, ObservationHistory,
                    SystemNeverFaultyError, make_report)
from .hierarchy import REPLACE, STRATEGY, HierPlan
from .inspection import Strategy

WORLD_LIMIT = 1 << 20


@dataclass(frozen=True)
class ExecutionTrace:
    history: ObservationHistory
    total_cost: float
    actions_taken: int


def _flat_trace(broken: set[str], strat: Strategy, flat: FlatSystem,
                h_override: Mapping[str, float] | None = None) -> ExecutionTrace:
    by_id = flat.by_id
    steps: list[tuple] = []
    cost = 0.0
    actions = 0
    steps.append(("status", "system", "b" if broken else "ok"))
    if broken:
        for cid in strat.order:
            spec = by_id[cid]
            if cid in strat.inspect:
                outcome = "b" if cid in broken else "ok"
                cost += spec.d
                actions += 1
                steps.append(("inspect", cid, outcome, spec.d))
                if outcome == "ok":
                    continue  # nothing changed; no status re-observation
                h = h_override[cid] if h_override and cid in h_override else spec.h
                cost += h
                actions += 1
                steps.append(("fix", cid, h))
                broken.discard(cid)
            else:
                cost += spec.c
                actions += 1
                steps.append(("fix", cid, spec.c))
                broken.discard(cid)
            steps.append(("status", "system", "b" if broken else "ok"))
            if not broken:
                break
        assert not broken, "plan did not cover a broken component"
    return ExecutionTrace(ObservationHistory(tuple(steps)), cost, actions)


def _hier_trace(broken: set[str], plan: HierPlan, root: HierNode) -> ExecutionTrace:
    nodes = {n.id: n for n in root.walk()}
    under = {n.id: frozenset(leaf.id for leaf in n.leaves()) for n in root.walk()}
    steps: list[tuple] = []
    cost = 0.0
    actions = 0

    def is_broken(nid: str) -> bool:
        return bool(broken & under[nid])

    def observe(nid: str) -> bool:
        b = is_broken(nid)
        steps.append(("status", nid, "b" if b else "ok"))
        return b

    def repair(plan: HierPlan) -> None:
        # invoked only when plan.node is known broken; leaves it ok
        nonlocal cost, actions
        node = nodes[plan.node]
        if plan.action == REPLACE:
            cost += node.c
            actions += 1
            steps.append(("fix", node.id, node.c))
            broken.difference_update(under[node.id])
            return
        for cid in plan.order:
            if cid in plan.inspect:
                outcome = "b" if is_broken(cid) else "ok"
                d = nodes[cid].d
                cost += d
                actions += 1
                steps.append(("inspect", cid, outcome, d))
                if outcome == "ok":
                    continue  # no status re-observation
                repair(plan.children[cid])
            else:
                child = nodes[cid]
                cost += child.c
                actions += 1
                steps.append(("fix", cid, child.c))
                broken.difference_update(under[cid])
            if not observe(plan.node):
                return
        assert not is_broken(plan.node), "plan did not cover a broken component"

    if observe(root.id):
        repair(plan)
    return ExecutionTrace(ObservationHistory(tuple(steps)), cost, actions)


def execute(world, plan, model, h_override: Mapping[str, float] | None = None,
            ) -> ExecutionTrace:
    """Run the repair protocol deterministically in the given world.

    ``world`` is the set of broken leaf components; ``plan`` is a flat
    Strategy (model: FlatSystem) or a HierPlan (model: HierNode root).
    """
    broken = set(world.broken if hasattr(world, "broken") else world)
    if isinstance(plan, Strategy):
        return _flat_trace(broken, plan, model, h_override)
    if isinstance(plan, HierPlan):
        return _hier_trace(broken, plan, model)
    raise TypeError(f"cannot execute plan of type {type(plan).__name__}")


def _flat_worlds(model: FlatSystem, joint: JointTable | None) -> list[tuple[frozenset, float]]:
    table = joint if joint is not None else model.effective_joint()
    return [(broken, prob) for broken, prob in table.entries if prob > 0.0]


def _hier_worlds(root: HierNode) -> list[tuple[frozenset, float]]:
    leaves = list(root.leaves())
    if 1 << len(leaves) > WORLD_LIMIT:
        raise LimitExceededError(f"{len(leaves)} leaves is too many to enumerate")
    worlds = []
    for mask in range(1 << len(leaves)):
        prob = 1.0
        broken = []
        for i, leaf in enumerate(leaves):
            if mask >> i & 1:
                prob *= leaf.leaf_p
                broken.append(leaf.id)
            else:
                prob *= 1.0 - leaf.leaf_p
        if prob > 0.0:
            worlds.append((frozenset(broken), prob))
    return worlds


def exact_expected_cost(plan, model, joint: JointTable | None = None,
                        h_override: Mapping[str, float] | None = None) -> CostReport:
    """Expected cost by total expectation over all worlds, each run through
    the protocol executor."""
    if isinstance(model, HierNode):
        worlds = _hier_worlds(model)
    else:
        worlds = _flat_worlds(model, joint)
    ec = 0.0
    p_faulty = 0.0
    for broken, prob in worlds:
        if broken:
            p_faulty += prob
            ec += prob * execute(broken, plan, model, h_override).total_cost
    return make_report(ec, p_faulty)


def brute_force_flat(model: FlatSystem, allow_inspections: bool = False,
                     joint: JointTable | None = None,
                     h_override: Mapping[str, float] | None = None,
                     order_limit: int = 7, inspect_limit: int = 5,
                     ) -> tuple[Strategy, CostReport]:
    """Exhaustive minimum over all orders (and inspection subsets, when
    allowed), scored by the protocol executor.  Ties keep the first
    candidate in lexicographic (order, subset-size, subset) enumeration."""
    n = len(model.components)
    cap = inspect_limit if allow_inspections else order_limit
    if n > cap:
        raise LimitExceededError(f"{n} components exceeds the brute-force limit {cap}")
    worlds = _flat_worlds(model, joint)
    faulty_worlds = [(broken, prob) for broken, prob in worlds if broken]
    p_faulty = sum(prob for _, prob in faulty_worlds)
    inspectable = [s.id for s in model.components
                   if s.d is not None and (s.h is not None or (h_override and s.id in h_override))]
    best = None
    best_ec = math.inf
    for order in itertools.permutations(sorted(model.ids)):
        subsets: Iterable = [()]
        if allow_inspections:
            subsets = itertools.chain.from_iterable(
                itertools.combinations(sorted(inspectable), k)
                for k in range(len(inspectable) + 1))
        for subset in subsets:
            strat = Strategy(order=order, inspect=frozenset(subset))
            ec = sum(prob * execute(broken, strat, model, h_override).total_cost
                     for broken, prob in faulty_worlds)
            if ec < best_ec:
                best, best_ec = strat, ec
    assert best is not None
    return best, make_report(best_ec, p_faulty)


def brute_force_hier(root: HierNode, leaf_limit: int = 9, depth_limit: int = 3,
                     branch_limit: int = 3) -> tuple[HierPlan, float]:
    """Reference optimum over the hierarchical plan space, scored by running
    the executor over every leaf world conditioned on the node being broken.

    For each node, every (child order, inspection subset) pair is tried;
    inspected children use their own brute-force-optimal nested plan, which
    is cost-optimal independently of the surrounding strategy because an
    inspected child's repair contributes h * P(child broken) regardless of
    its position.  Returns (plan, conditional cost of the root plan).
    """
    leaves = list(root.leaves())
    if len(leaves) > leaf_limit:
        raise LimitExceededError(f"{len(leaves)} leaves exceeds the limit {leaf_limit}")

    def depth(node: HierNode) -> int:
        return 1 if node.is_leaf else 1 + max(depth(ch) for ch in node.children)

    if depth(root) > depth_limit:
        raise LimitExceededError(f"tree depth exceeds the limit {depth_limit}")
    for node in root.walk():
        if len(node.children) > branch_limit:
            raise LimitExceededError(
                f"{node.id}: branching factor {len(node.children)} exceeds {branch_limit}")

    def conditional_cost(plan: HierPlan, node: HierNode, worlds) -> float:
        ec = 0.0
        p_broken = 0.0
        for broken, prob in worlds:
            if broken:
                p_broken += prob
                ec += prob * execute(broken, plan, node).total_cost
        return ec / p_broken if p_broken > 0.0 else math.inf

    def best_plan(node: HierNode) -> HierPlan:
        from .model import derived_failure_probability
        p = derived_failure_probability(node)
        replace = HierPlan(node=node.id, action=REPLACE, h=node.c, p=p, ec=node.c * p)
        if node.is_leaf or p <= 0.0:
            return replace
        worlds = _hier_worlds(node)
        child_best = {ch.id: best_plan(ch) for ch in node.children}
        inspectable = [ch.id for ch in node.children if ch.d is not None]
        best, best_h = replace, node.c
        for order in itertools.permutations([ch.id for ch in node.children]):
            for k in range(len(inspectable) + 1):
                for subset in itertools.combinations(inspectable, k):
                    nested = {cid: child_best[cid] for cid in subset}
                    cand = HierPlan(node=node.id, action=STRATEGY, h=0.0, p=p,
                                    ec=0.0, order=order,
                                    inspect=frozenset(subset), children=nested)
                    h = conditional_cost(cand, node, worlds)
                    if h < best_h:
                        best_h = h
                        best = HierPlan(node=node.id, action=STRATEGY, h=h, p=p,
                                        ec=h * p, order=order,
                                        inspect=frozenset(subset), children=nested)
        return best

    plan = best_plan(root)
    return plan, plan.h


@dataclass(frozen=True)
class MonteCarloResult:
    mean: float
    stderr: float
    samples: int
    seed: int


def monte_carlo(plan, model, samples: int, seed: int,
                conditional: bool = False) -> MonteCarloResult:
    """Seeded Monte Carlo estimate of a plan's expected cost.

    Worlds are sampled from the leaf Bernoullis (conditional mode rejects
    all-ok worlds).  Each rejection round draws from its own counter-keyed
    stream, so the estimate depends only on (seed, samples).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if isinstance(model, HierNode):
        leaf_ids = [leaf.id for leaf in model.leaves()]
        ps = np.array([leaf.leaf_p for leaf in model.leaves()])
    else:
        if not model.independent:
            raise ValueError("Monte Carlo sampling requires independent leaf faults")
        leaf_ids = list(model.ids)
        ps = np.array([s.p for s in model.components])
    if conditional and not np.any(ps > 0.0):
        raise SystemNeverFaultyError("all failure probabilities are zero; "
                                     "conditional sampling cannot terminate")
    rows = np.empty((samples, len(ps)), dtype=bool)
    filled = 0
    for attempt in range(10_000):
        need = samples - filled
        gen = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, attempt]))
        draw = gen.random((need, len(ps))) < ps
        if conditional:
            draw = draw[draw.any(axis=1)]
        take = min(len(draw), need)
        rows[filled:filled + take] = draw[:take]
        filled += take
        if filled == samples:
            break
    assert filled == samples

    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    costs = np.array([
        execute(frozenset(cid for cid, b in zip(leaf_ids, row) if b), plan, model).total_cost
        for row in uniq])
    mean = float(np.dot(costs, counts) / samples)
    if samples > 1:
        var = float(np.dot(counts, (costs - mean) ** 2) / (samples - 1))
        stderr = math.sqrt(var / samples)
    else:
        stderr = 0.0
    return MonteCarloResult(mean=mean, stderr=stderr, samples=samples, seed=seed)
