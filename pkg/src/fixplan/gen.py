"""Seeded random hierarchical model generator and planner benchmark."""
from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .hierarchy import plan_system
from .model import HierNode


def random_tree(branching: int, depth: int, seed: int,
                p_range: tuple[float, float] = (0.01, 0.2),
                c_range: tuple[float, float] = (1.0, 100.0),
                d_frac_range: tuple[float, float] = (0.05, 0.5)) -> HierNode:
    """Full ``branching``-ary tree of the given depth (leaves at the deepest
    level).  Probabilities and costs are drawn uniformly from the ranges;
    inspection cost is a fraction of the node's replacement cost."""
    if branching < 1 or depth < 1:
        raise ValueError("branching and depth must be >= 1")
    rng = random.Random(seed)

    def build(name: str, level: int) -> HierNode:
        c = rng.uniform(*c_range)
        d = c * rng.uniform(*d_frac_range)
        if level == depth:
            return HierNode(id=name, c=c, d=d, leaf_p=rng.uniform(*p_range))
        children = tuple(build(f"{name}.{i + 1}", level + 1)
                         for i in range(branching))
        return HierNode(id=name, c=c, d=d, children=children)

    return build("root", 0)


@dataclass(frozen=True)
class BenchCell:
    branching: int
    depth: int
    leaves: int
    median_ms: float
    runs_ms: tuple[float, ...]


@dataclass(frozen=True)
class BenchFit:
    branching: int
    slope_ms_per_leaf: float
    intercept_ms: float
    r_squared: float


def bench_grid(branchings, depths, repetitions: int = 3, seed: int = 0,
               ) -> tuple[list[BenchCell], list[BenchFit]]:
    """Time plan_system over a (branching x depth) grid and fit runtime
    against leaf count for each fixed branching factor."""
    cells = []
    for k in branchings:
        for depth in depths:
            tree = random_tree(k, depth, seed=seed + 1000 * k + depth)
            runs = []
            for _ in range(max(1, repetitions)):
                start = time.perf_counter()
                plan_system(tree)
                runs.append((time.perf_counter() - start) * 1000.0)
            cells.append(BenchCell(branching=k, depth=depth, leaves=k ** depth,
                                   median_ms=statistics.median(runs),
                                   runs_ms=tuple(runs)))
    fits = []
    for k in branchings:
        pts = [(c.leaves, c.median_ms) for c in cells if c.branching == k]
        if len(pts) < 2:
            continue
        x = np.array([p[0] for p in pts], dtype=float)
        y = np.array([p[1] for p in pts], dtype=float)
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
        fits.append(BenchFit(branching=k, slope_ms_per_leaf=float(slope),
                             intercept_ms=float(intercept), r_squared=r2))
    return cells, fits
