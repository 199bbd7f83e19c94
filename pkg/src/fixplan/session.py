"""Interactive walk-through of a hierarchical repair plan.

A session starts from the knowledge "the system is faulty" and prompts one
action at a time.  The client reports each outcome (inspection result, or
the unit's status after a repair); the session applies the same transition
rules as the protocol executor and reports accumulated cost plus the
expected cost of what remains.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .hierarchy import REPLACE, STRATEGY, HierPlan
from .model import HierNode, derived_failure_probability

OK = "ok"
BROKEN = "broken"
STATUS_RESULT = "status_result"
INSPECT_RESULT = "inspect_result"


class IllegalEvent(ValueError):
    """The submitted event is not legal for the session's cursor; the
    session state is unchanged."""


@dataclass
class _Frame:
    """One active child strategy: the unit being repaired and the per-child
    quantities needed for remaining-cost arithmetic."""

    plan: HierPlan
    idx: int = 0
    # parallel to plan.order:
    ps: list[float] = field(default_factory=list)
    cds: list[float] = field(default_factory=list)
    hs: list[float | None] = field(default_factory=list)  # inspected only

    def suffix_ec(self, start: int) -> float:
        """Unconditional expected cost of executing actions start.. ."""
        ok = 1.0
        ok_suffix = [1.0] * (len(self.ps) + 1)
        for k in range(len(self.ps) - 1, start - 1, -1):
            ok *= 1.0 - self.ps[k]
            ok_suffix[k] = ok
        ec = 0.0
        for k in range(start, len(self.ps)):
            ec += self.cds[k] * (1.0 - ok_suffix[k])
            if self.hs[k] is not None:
                ec += self.hs[k] * self.ps[k]
        return ec

    def suffix_ecf(self, start: int) -> float:
        """Same, conditioned on the unit still being broken."""
        p_any = 1.0
        for k in range(start, len(self.ps)):
            p_any *= 1.0 - self.ps[k]
        p_any = 1.0 - p_any
        return self.suffix_ec(start) / p_any if p_any > 0.0 else 0.0


class Session:
    def __init__(self, session_id: str, plan_id: str, plan: HierPlan, root: HierNode):
        self.session_id = session_id
        self.plan_id = plan_id
        self.plan = plan
        self.root = root
        self.nodes = {n.id: n for n in root.walk()}
        self.fail_p = {n.id: derived_failure_probability(n) for n in root.walk()}
        self.accumulated_cost = 0.0
        self.actions_taken = 0
        self.done = False
        self.events: list[dict] = []
        self.frames: list[_Frame] = []
        # pending: what the client was asked to do and what event resolves it
        self.pending: dict | None = None
        if plan.action == REPLACE:
            self.pending = {"kind": STATUS_RESULT, "mode": "replace_unit",
                            "action": "replace", "component": plan.node,
                            "charge": self.nodes[plan.node].c}
        else:
            self.frames.append(self._make_frame(plan))
            self._arm_action()

    def _make_frame(self, plan: HierPlan) -> _Frame:
        frame = _Frame(plan=plan)
        for cid in plan.order:
            node = self.nodes[cid]
            if cid in plan.inspect:
                child_plan = plan.children[cid]
                frame.ps.append(child_plan.p)
                frame.cds.append(node.d)
                frame.hs.append(child_plan.h)
            else:
                frame.ps.append(self.fail_p[cid])
                frame.cds.append(node.c)
                frame.hs.append(None)
        return frame

    # -- state transitions ------------------------------------------------

    def _arm_action(self) -> None:
        frame = self.frames[-1]
        cid = frame.plan.order[frame.idx]
        if cid in frame.plan.inspect:
            self.pending = {"kind": INSPECT_RESULT, "mode": "inspect",
                            "action": "inspect", "component": cid,
                            "charge": self.nodes[cid].d}
        else:
            self.pending = {"kind": STATUS_RESULT, "mode": "replace_child",
                            "action": "replace", "component": cid,
                            "charge": self.nodes[cid].c}

    def _arm_status_check(self) -> None:
        frame = self.frames[-1]
        self.pending = {"kind": STATUS_RESULT, "mode": "status_check",
                        "action": "check", "component": frame.plan.node,
                        "charge": 0.0}

    def _unit_repaired(self) -> None:
        self.frames.pop()
        if not self.frames:
            self.done = True
            self.pending = None
        else:
            self._arm_status_check()

    def apply(self, kind: str, outcome: str) -> None:
        if self.done or self.pending is None:
            raise IllegalEvent("session is complete")
        if outcome not in (OK, BROKEN):
            raise IllegalEvent(f"unknown outcome {outcome!r}")
        if kind != self.pending["kind"]:
            raise IllegalEvent(
                f"expected a {self.pending['kind']} event, got {kind}")
        mode = self.pending["mode"]
        frame = self.frames[-1] if self.frames else None

        # validate before mutating so rejected events leave state unchanged
        if mode == "replace_unit" and outcome == BROKEN:
            raise IllegalEvent("the whole unit was replaced; it cannot still be broken")
        if mode in ("replace_child", "status_check") and outcome == BROKEN \
                and frame.idx + 1 >= len(frame.plan.order):
            raise IllegalEvent("all subcomponents are repaired; the unit cannot still be broken")
        if mode == "inspect" and outcome == OK and frame.idx + 1 >= len(frame.plan.order):
            raise IllegalEvent("no component left that could explain the fault")

        charge = self.pending["charge"]
        self.accumulated_cost += charge
        if charge > 0.0:
            self.actions_taken += 1
        self.events.append({"kind": kind, "outcome": outcome})

        if mode == "replace_unit":
            self.done = True
            self.pending = None
        elif mode == "inspect":
            if outcome == OK:
                frame.idx += 1
                self._arm_action()
            else:
                cid = self.pending["component"]
                child_plan = frame.plan.children[cid]
                if child_plan.action == REPLACE:
                    self.pending = {"kind": STATUS_RESULT, "mode": "replace_child",
                                    "action": "replace", "component": cid,
                                    "charge": self.nodes[cid].c,
                                    "known_broken": True}
                else:
                    self.frames.append(self._make_frame(child_plan))
                    self._arm_action()
        elif mode in ("replace_child", "status_check"):
            if outcome == OK:
                self._unit_repaired()
            else:
                frame.idx += 1
                self._arm_action()
        else:  # pragma: no cover
            raise AssertionError(f"unknown pending mode {mode}")

    # -- reporting ---------------------------------------------------------

    def expected_remaining_cost(self) -> float:
        if self.done or self.pending is None:
            return 0.0
        mode = self.pending["mode"]
        if mode == "replace_unit":
            return self.pending["charge"]
        total = 0.0
        for f in self.frames[:-1]:
            total += f.suffix_ec(f.idx + 1)
        frame = self.frames[-1]
        if mode == "status_check":
            total += frame.suffix_ec(frame.idx + 1)
        elif mode == "replace_child" and self.pending.get("known_broken"):
            total += self.pending["charge"] + frame.suffix_ec(frame.idx + 1)
        else:  # next action pending while the unit is known broken
            total += frame.suffix_ecf(frame.idx)
        return total

    def breadcrumb(self) -> list[str]:
        path = [self.root.id] if not self.frames else []
        for f in self.frames:
            path.append(f.plan.node)
        return path

    def view(self) -> dict:
        if self.done:
            return {"done": True,
                    "accumulated_cost": self.accumulated_cost,
                    "actions_taken": self.actions_taken}
        return {"done": False,
                "prompt": {
                    "action": self.pending["action"],
                    "component": self.pending["component"],
                    "pending": self.pending["kind"],
                    "path": self.breadcrumb(),
                },
                "accumulated_cost": self.accumulated_cost,
                "expected_remaining_cost": self.expected_remaining_cost()}

    def transcript(self) -> dict:
        return {"session_id": self.session_id,
                "plan_id": self.plan_id,
                "events": list(self.events),
                "accumulated_cost": self.accumulated_cost,
                "actions_taken": self.actions_taken,
                "done": self.done}

    @classmethod
    def replay(cls, session_id: str, plan_id: str, plan: HierPlan,
               root: HierNode, events: list[dict]) -> "Session":
        session = cls(session_id, plan_id, plan, root)
        for ev in events:
            session.apply(ev["kind"], ev["outcome"])
        return session
