"""Domain types, validation, and probability primitives shared by the planners.

A model is either a flat system (a list of components, optionally with an
explicit joint distribution over their fault states) or a hierarchical tree
whose leaves carry failure probabilities.  All types are immutable after
validation; every function here is pure.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

ATOL = 1e-9
JOINT_TOL = 1e-6
ENUM_LIMIT = 20


class ModelError(ValueError):
    """Model failed validation.  ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = [str(e) for e in errors]
        super().__init__("; ".join(self.errors))


class ModelWarning(UserWarning):
    """Non-fatal modelling oddity (e.g. inspection dearer than replacement)."""


class LimitExceededError(ValueError):
    """An enumeration limit (components, subsets, worlds) was exceeded."""


class SystemNeverFaultyError(ValueError):
    """The model assigns probability 0 to every fault, so conditional
    expected costs are undefined."""


@dataclass(frozen=True)
class AtomicSpec:
    """One repairable component: failure prior and action costs.

    ``d`` (inspection) and ``h`` (repair after a failed inspection) are
    either both present or both absent.
    """

    id: str
    p: float
    c: float
    d: float | None = None
    h: float | None = None

    @property
    def inspectable(self) -> bool:
        return self.d is not None


@dataclass(frozen=True)
class World:
    """A complete fault assignment: the named components are broken, all
    others ok.  The all-ok world is the empty set."""

    broken: frozenset[str]

    @staticmethod
    def of(*ids: str) -> "World":
        return World(frozenset(ids))


@dataclass(frozen=True)
class JointTable:
    """Explicit distribution over worlds.  Worlds not listed have
    probability 0."""

    components: tuple[str, ...]
    entries: tuple[tuple[frozenset[str], float], ...]

    @cached_property
    def _bit(self) -> dict[str, int]:
        return {cid: 1 << i for i, cid in enumerate(self.components)}

    @cached_property
    def _worlds(self) -> list[tuple[int, float]]:
        bit = self._bit
        out = []
        for broken, prob in self.entries:
            mask = 0
            for cid in broken:
                mask |= bit[cid]
            out.append((mask, prob))
        return out

    def mask_of(self, subset) -> int:
        bit = self._bit
        mask = 0
        for cid in subset:
            if cid not in bit:
                raise KeyError(f"unknown component id {cid!r}")
            mask |= bit[cid]
        return mask

    def ok_marginal_mask(self, mask: int) -> float:
        return sum(p for w, p in self._worlds if w & mask == 0)


@dataclass(frozen=True)
class FlatSystem:
    """A flat multi-component system.  ``joint is None`` means faults are
    independent with the per-component priors."""

    components: tuple[AtomicSpec, ...]
    joint: JointTable | None = None

    @property
    def independent(self) -> bool:
        return self.joint is None

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.components)

    @cached_property
    def by_id(self) -> dict[str, AtomicSpec]:
        return {s.id: s for s in self.components}

    @cached_property
    def costs(self) -> dict[str, float]:
        return {s.id: s.c for s in self.components}

    def effective_joint(self, limit: int = ENUM_LIMIT) -> JointTable:
        return self.joint if self.joint is not None else independent_joint(self, limit)


@dataclass(frozen=True)
class HierNode:
    """A node of a hierarchical model.  Leaves carry ``leaf_p``; internal
    nodes derive their failure probability from their children."""

    id: str
    c: float
    d: float | None = None
    children: tuple["HierNode", ...] = ()
    leaf_p: float | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> Iterator["HierNode"]:
        if self.is_leaf:
            yield self
        else:
            for ch in self.children:
                yield from ch.leaves()

    def walk(self) -> Iterator["HierNode"]:
        yield self
        for ch in self.children:
            yield from ch.walk()


@dataclass(frozen=True)
class ModeEvent:
    """An assertion about component states: these ok, those broken."""

    ok_set: frozenset[str] = frozenset()
    broken_set: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.ok_set & self.broken_set:
            raise ModelError([f"contradictory mode event: {sorted(self.ok_set & self.broken_set)}"])


@dataclass(frozen=True)
class ObservationHistory:
    """Ordered protocol events.  Steps are tuples:
    ("status", unit_id, "ok"|"b"), ("fix", component_id, cost) or
    ("inspect", component_id, "ok"|"b", cost).  The first step is always a
    status observation."""

    steps: tuple[tuple, ...]


@dataclass(frozen=True)
class CostReport:
    """Unconditional expected cost and expected cost given the system is
    faulty."""

    ec: float
    ecf: float


def make_report(ec: float, p_faulty: float) -> CostReport:
    if p_faulty <= 0.0:
        raise SystemNeverFaultyError(
            "system cannot fail; conditional expected cost is undefined")
    return CostReport(ec=ec, ecf=ec / p_faulty)


# ---------------------------------------------------------------------------
# validation

def _check_atomic(spec: AtomicSpec, errors: list[str], warn: list[str]) -> None:
    if not spec.id:
        errors.append("component id must be a non-empty string")
    if not 0.0 <= spec.p <= 1.0:
        errors.append(f"{spec.id}: probability {spec.p} outside [0, 1]")
    if spec.c < 0:
        errors.append(f"{spec.id}: negative replacement cost {spec.c}")
    if (spec.d is None) != (spec.h is None):
        errors.append(f"{spec.id}: inspection spec incomplete (d and h must both be given)")
    if spec.d is not None and spec.d < 0:
        errors.append(f"{spec.id}: negative inspection cost {spec.d}")
    if spec.h is not None and spec.h < 0:
        errors.append(f"{spec.id}: negative repair cost {spec.h}")
    if spec.d is not None and spec.c >= 0 and spec.d > spec.c:
        warn.append(f"{spec.id}: inspection cost d={spec.d} exceeds replacement cost c={spec.c}")
    if spec.h is not None and spec.c >= 0 and spec.h > spec.c:
        warn.append(f"{spec.id}: repair cost h={spec.h} exceeds replacement cost c={spec.c}")


def _check_joint(joint: JointTable, ids: tuple[str, ...], errors: list[str]) -> None:
    if tuple(joint.components) != ids:
        errors.append("joint table does not cover exactly the system's components")
        return
    known = set(ids)
    seen = set()
    total = 0.0
    for broken, prob in joint.entries:
        if not broken <= known:
            errors.append(f"joint world mentions unknown components {sorted(broken - known)}")
        if broken in seen:
            errors.append(f"duplicate world {sorted(broken)} in joint table")
        seen.add(broken)
        if prob < 0:
            errors.append(f"world {sorted(broken)} has negative probability {prob}")
        total += prob
    if abs(total - 1.0) > JOINT_TOL:
        errors.append(f"distribution not normalized: probabilities sum to {total}")


def validate_model(model):
    """Check every invariant of a FlatSystem or HierNode.

    Returns the model unchanged when valid; raises ModelError listing all
    problems otherwise.  Economically odd costs (d > c or h > c) produce a
    ModelWarning, not an error.
    """
    errors: list[str] = []
    warn: list[str] = []
    if isinstance(model, FlatSystem):
        if not model.components:
            errors.append("system must have at least one component")
        seen = set()
        for spec in model.components:
            if spec.id in seen:
                errors.append(f"duplicate component id {spec.id!r}")
            seen.add(spec.id)
            _check_atomic(spec, errors, warn)
        if model.joint is not None and not errors:
            _check_joint(model.joint, model.ids, errors)
    elif isinstance(model, HierNode):
        seen = set()
        for node in model.walk():
            if node.id in seen:
                errors.append(f"duplicate node id {node.id!r}")
            seen.add(node.id)
            if node.c < 0:
                errors.append(f"{node.id}: negative replacement cost {node.c}")
            if node.d is not None and node.d < 0:
                errors.append(f"{node.id}: negative inspection cost {node.d}")
            if node.d is not None and node.d > node.c:
                warn.append(f"{node.id}: inspection cost d={node.d} exceeds replacement cost c={node.c}")
            if node.is_leaf:
                if node.leaf_p is None:
                    errors.append(f"{node.id}: leaf without failure probability")
                elif not 0.0 <= node.leaf_p <= 1.0:
                    errors.append(f"{node.id}: probability {node.leaf_p} outside [0, 1]")
            elif node.leaf_p is not None:
                errors.append(f"{node.id}: internal node must not carry a leaf probability")
    else:
        errors.append(f"not a model: {type(model).__name__}")
    if errors:
        raise ModelError(errors)
    for message in warn:
        warnings.warn(message, ModelWarning, stacklevel=2)
    return model


# ---------------------------------------------------------------------------
# probability primitives

def ok_marginal(joint: JointTable, subset) -> float:
    """P(all components in ``subset`` are ok): total probability of worlds
    whose broken set is disjoint from the subset."""
    return joint.ok_marginal_mask(joint.mask_of(subset))


def broken_marginal(joint: JointTable, cid: str) -> float:
    """Prior P(component broken) under the joint."""
    return 1.0 - ok_marginal(joint, (cid,))


def derived_failure_probability(node: HierNode) -> float:
    """Failure probability of a node: a leaf's prior, or the complement of
    the product of its children's ok-probabilities."""
    if node.is_leaf:
        return float(node.leaf_p)
    ok = 1.0
    for child in node.children:
        ok *= 1.0 - derived_failure_probability(child)
    return 1.0 - ok


def independent_joint(flat: FlatSystem, limit: int = ENUM_LIMIT) -> JointTable:
    """Materialize the product-form joint of an independent flat system."""
    if not flat.independent:
        raise ModelError(["system carries an explicit joint; cannot build an independent one"])
    n = len(flat.components)
    if n > limit:
        raise LimitExceededError(f"{n} components exceeds the enumeration limit {limit}")
    ids = flat.ids
    ps = [s.p for s in flat.components]
    entries = []
    for mask in range(1 << n):
        prob = 1.0
        broken = []
        for i in range(n):
            if mask >> i & 1:
                prob *= ps[i]
                broken.append(ids[i])
            else:
                prob *= 1.0 - ps[i]
        entries.append((frozenset(broken), prob))
    return JointTable(components=ids, entries=tuple(entries))


# ---------------------------------------------------------------------------
# model file I/O (JSON)

_FLAT_COMPONENT_FIELDS = {"id", "p", "c", "d", "h"}
_HIER_FIELDS = {"id", "c", "d", "children", "p"}


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise ModelError([f"{where}: unknown fields {sorted(extra)}"])


def _component_from_dict(obj: dict) -> AtomicSpec:
    _reject_unknown(obj, _FLAT_COMPONENT_FIELDS, f"component {obj.get('id')!r}")
    for key in ("id", "p", "c"):
        if key not in obj:
            raise ModelError([f"component missing required field {key!r}"])
    return AtomicSpec(id=obj["id"], p=float(obj["p"]), c=float(obj["c"]),
                      d=None if obj.get("d") is None else float(obj["d"]),
                      h=None if obj.get("h") is None else float(obj["h"]))


def _hier_from_dict(obj: dict) -> HierNode:
    _reject_unknown(obj, _HIER_FIELDS, f"node {obj.get('id')!r}")
    if "id" not in obj or "c" not in obj:
        raise ModelError([f"node missing required field (id, c): {obj}"])
    children = tuple(_hier_from_dict(ch) for ch in obj.get("children", []))
    leaf_p = obj.get("p")
    return HierNode(id=obj["id"], c=float(obj["c"]),
                    d=None if obj.get("d") is None else float(obj["d"]),
                    children=children,
                    leaf_p=None if leaf_p is None else float(leaf_p))


def model_from_dict(obj: dict):
    if not isinstance(obj, dict) or "type" not in obj:
        raise ModelError(["model must be an object with a 'type' field"])
    if obj["type"] == "flat":
        _reject_unknown(obj, {"type", "components", "joint"}, "flat model")
        comps = tuple(_component_from_dict(c) for c in obj.get("components", []))
        joint = None
        if "joint" in obj and obj["joint"] is not None:
            _reject_unknown(obj["joint"], {"worlds"}, "joint")
            entries = []
            for w in obj["joint"].get("worlds", []):
                _reject_unknown(w, {"broken", "prob"}, "world")
                entries.append((frozenset(w["broken"]), float(w["prob"])))
            joint = JointTable(components=tuple(c.id for c in comps), entries=tuple(entries))
        return validate_model(FlatSystem(components=comps, joint=joint))
    if obj["type"] == "hier":
        _reject_unknown(obj, {"type", "root"}, "hier model")
        if "root" not in obj:
            raise ModelError(["hier model missing 'root'"])
        return validate_model(_hier_from_dict(obj["root"]))
    raise ModelError([f"unknown model type {obj['type']!r}"])


def model_to_dict(model) -> dict:
    if isinstance(model, FlatSystem):
        comps = []
        for s in model.components:
            c = {"id": s.id, "p": s.p, "c": s.c}
            if s.d is not None:
                c["d"] = s.d
            if s.h is not None:
                c["h"] = s.h
            comps.append(c)
        out = {"type": "flat", "components": comps}
        if model.joint is not None:
            out["joint"] = {"worlds": [
                {"broken": sorted(broken), "prob": prob}
                for broken, prob in model.joint.entries]}
        return out
    if isinstance(model, HierNode):
        def node_dict(n: HierNode) -> dict:
            d = {"id": n.id, "c": n.c}
            if n.d is not None:
                d["d"] = n.d
            if n.is_leaf:
                d["p"] = n.leaf_p
            else:
                d["children"] = [node_dict(ch) for ch in n.children]
            return d
        return {"type": "hier", "root": node_dict(model)}
    raise ModelError([f"not a model: {type(model).__name__}"])


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")
