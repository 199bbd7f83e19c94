import random

import pytest

from fixplan.model import (AtomicSpec, FlatSystem, HierNode, JointTable)


@pytest.fixture
def fix1() -> FlatSystem:
    """Two independent components: A p=0.5 c=1, B p=0.5 c=2."""
    return FlatSystem(components=(AtomicSpec("A", 0.5, 1.0),
                                  AtomicSpec("B", 0.5, 2.0)))


@pytest.fixture
def fix2() -> FlatSystem:
    """Three independent components: A p=0.1 c=5, B p=0.5 c=4, C p=0.9 c=9."""
    return FlatSystem(components=(AtomicSpec("A", 0.1, 5.0),
                                  AtomicSpec("B", 0.5, 4.0),
                                  AtomicSpec("C", 0.9, 9.0)))


@pytest.fixture
def fix3() -> FlatSystem:
    """Two inspectable components: A p=0.5 c=4 d=1 h=2, B p=0.2 c=3 d=3 h=3."""
    return FlatSystem(components=(AtomicSpec("A", 0.5, 4.0, 1.0, 2.0),
                                  AtomicSpec("B", 0.2, 3.0, 3.0, 3.0)))


@pytest.fixture
def fix4() -> tuple[JointTable, dict]:
    """Dependent two-component joint with costs c_A=1, c_B=2."""
    joint = JointTable(components=("A", "B"), entries=(
        (frozenset(), 0.4),
        (frozenset({"A"}), 0.3),
        (frozenset({"B"}), 0.2),
        (frozenset({"A", "B"}), 0.1)))
    return joint, {"A": 1.0, "B": 2.0}


@pytest.fixture
def fix4_system(fix4) -> FlatSystem:
    joint, _ = fix4
    return FlatSystem(components=(AtomicSpec("A", 0.4, 1.0),
                                  AtomicSpec("B", 0.3, 2.0)), joint=joint)


@pytest.fixture
def fix5() -> HierNode:
    """Root c=20 over leaves L1 (p=0.5 c=4 d=1) and L2 (p=0.2 c=3 d=3)."""
    return HierNode("R", c=20.0, children=(
        HierNode("L1", c=4.0, d=1.0, leaf_p=0.5),
        HierNode("L2", c=3.0, d=3.0, leaf_p=0.2)))


@pytest.fixture
def fix6() -> FlatSystem:
    """Single inspectable component: p=0.5 c=10 d=2 h=3."""
    return FlatSystem(components=(AtomicSpec("C", 0.5, 10.0, 2.0, 3.0),))


def random_flat(rng: random.Random, n: int, inspectable: bool = False,
                p_floor: float = 0.01) -> FlatSystem:
    comps = []
    for i in range(n):
        p = rng.uniform(p_floor, 0.99)
        c = rng.uniform(0.0, 100.0)
        if inspectable:
            d = c * rng.uniform(0.0, 1.0)
            h = c * rng.uniform(0.0, 1.0)
            comps.append(AtomicSpec(f"c{i}", p, c, d, h))
        else:
            comps.append(AtomicSpec(f"c{i}", p, c))
    return FlatSystem(components=tuple(comps))


def random_joint(rng: random.Random, n: int) -> tuple[JointTable, dict]:
    ids = tuple(f"c{i}" for i in range(n))
    weights = [rng.random() for _ in range(1 << n)]
    total = sum(weights)
    entries = []
    for mask in range(1 << n):
        broken = frozenset(ids[i] for i in range(n) if mask >> i & 1)
        entries.append((broken, weights[mask] / total))
    costs = {cid: rng.uniform(0.1, 100.0) for cid in ids}
    return JointTable(components=ids, entries=tuple(entries)), costs


def random_single_fault_joint(rng: random.Random, n: int) -> tuple[JointTable, dict]:
    ids = tuple(f"c{i}" for i in range(n))
    weights = [rng.random() + 0.01 for _ in range(n)]
    total = sum(weights)
    entries = tuple((frozenset({cid}), w / total) for cid, w in zip(ids, weights))
    costs = {cid: rng.uniform(0.1, 100.0) for cid in ids}
    return JointTable(components=ids, entries=entries), costs


def random_hier(rng: random.Random, max_leaves: int = 9, max_depth: int = 3,
                max_branch: int = 3) -> HierNode:
    counter = [0]

    def build(depth: int, budget: int) -> tuple[HierNode, int]:
        counter[0] += 1
        name = f"n{counter[0]}"
        c = rng.uniform(1.0, 100.0)
        d = c * rng.uniform(0.05, 0.5) if rng.random() < 0.8 else None
        if depth >= max_depth or budget <= 1 or rng.random() < 0.3:
            return HierNode(name, c=c, d=d, leaf_p=rng.uniform(0.05, 0.9)), 1
        k = rng.randint(2, min(max_branch, budget))
        children = []
        used = 0
        for i in range(k):
            child, leaves = build(depth + 1, (budget - used) - (k - 1 - i))
            children.append(child)
            used += leaves
        return HierNode(name, c=c, d=d, children=tuple(children)), used

    while True:
        counter[0] = 0
        root, leaves = build(1, max_leaves)
        if not root.is_leaf:
            return root
