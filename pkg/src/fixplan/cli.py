"""Command-line surface: plan, cost, check, simulate, gen, bench, serve.

Exit codes: 0 ok, 1 validation failure, 2 resource limits exceeded,
3 optimality check failed.
"""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import dependent, flat, gen, hierarchy, inspection, oracle
from .model import (FlatSystem, HierNode, LimitExceededError, ModelError,
                    SystemNeverFaultyError, load_model, model_to_dict,
                    save_model)

EXIT_VALIDATION = 1
EXIT_LIMITS = 2
EXIT_CHECK_FAILED = 3


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ModelError as exc:
            for err in exc.errors:
                click.echo(f"error: {err}", err=True)
            sys.exit(EXIT_VALIDATION)
        except (SystemNeverFaultyError, ValueError) as exc:
            if isinstance(exc, LimitExceededError):
                click.echo(f"error: {exc}", err=True)
                sys.exit(EXIT_LIMITS)
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
    return wrapper


def _write_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _load_strategy(path: str) -> inspection.Strategy:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    extra = set(obj) - {"order", "inspect", "ec", "ecf", "method"}
    if extra:
        raise ModelError([f"strategy file: unknown fields {sorted(extra)}"])
    return inspection.Strategy(order=tuple(obj["order"]),
                               inspect=frozenset(obj.get("inspect", [])))


@click.group()
def main() -> None:
    """Minimum-expected-cost repair planning."""


@main.command("plan")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["sort", "local", "dp"]), default="dp",
              show_default=True, help="Sequencing method for dependent models.")
@click.option("--out", type=click.Path(), default=None)
@click.option("--verbose", is_flag=True)
@_guarded
def cmd_plan(model_path, method, out, verbose):
    """Compute the optimal plan/strategy for a model."""
    model = load_model(model_path)
    if isinstance(model, HierNode):
        plan = hierarchy.plan_system(model)
        _write_json(hierarchy.plan_to_dict(plan), out)
        click.echo(f"method: hierarchical bottom-up  ec={plan.ec:.6g} "
                   f"ecf={plan.h:.6g}", err=True)
        if verbose:
            click.echo("note: when replacing a node and repairing its children "
                       "cost exactly the same, the plan replaces (the simpler "
                       "action); minimum-cost selection throughout.", err=True)
        return
    assert isinstance(model, FlatSystem)
    if model.independent:
        strat, report = inspection.optimal_strategy(model)
        payload = {"order": list(strat.order),
                   "inspect": [c for c in strat.order if c in strat.inspect],
                   "ec": report.ec, "ecf": report.ecf}
        _write_json(payload, out)
        click.echo(f"method: ratio sort + inspection-subset search  "
                   f"ec={report.ec:.6g} ecf={report.ecf:.6g}", err=True)
        return
    joint = model.joint
    costs = model.costs
    extras = {}
    if method == "sort":
        order = dependent.independent_start(joint, costs)
        report = flat.expected_cost(order, joint, costs)
    elif method == "local":
        order, swaps = dependent.local_search(joint, costs)
        report = flat.expected_cost(order, joint, costs)
        extras["swaps"] = swaps
    else:
        order, report = dependent.exact_dp(joint, costs)
        extras["dp_table_size"] = 1 << len(joint.components)
    payload = {"order": list(order), "inspect": [],
               "ec": report.ec, "ecf": report.ecf, "method": method, **extras}
    _write_json(payload, out)
    click.echo(f"method: {method}  ec={report.ec:.6g} ecf={report.ecf:.6g}", err=True)


@main.command("cost")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--strategy", "strategy_path", type=click.Path(exists=True))
@click.option("--plan", "plan_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None)
@_guarded
def cmd_cost(model_path, strategy_path, plan_path, out):
    """Evaluate the expected cost of a strategy or plan."""
    model = load_model(model_path)
    if isinstance(model, HierNode):
        if not plan_path:
            raise click.UsageError("hierarchical models need --plan")
        plan = hierarchy.load_plan(plan_path)
        report = oracle.exact_expected_cost(plan, model)
    else:
        if not strategy_path:
            raise click.UsageError("flat models need --strategy")
        strat = _load_strategy(strategy_path)
        report = inspection.expected_cost_with_inspections(
            strat, model.effective_joint(), model.by_id)
    _write_json({"ec": report.ec, "ecf": report.ecf}, out)


@main.command("check")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--strategy", "strategy_path", required=True, type=click.Path(exists=True))
@_guarded
def cmd_check(model_path, strategy_path):
    """Check a replacement order for local optimality (adjacent swaps)."""
    model = load_model(model_path)
    if not isinstance(model, FlatSystem):
        raise click.UsageError("check applies to flat models")
    strat = _load_strategy(strategy_path)
    if sorted(strat.order) != sorted(model.ids):
        raise ModelError(["strategy does not cover the model's components"])
    joint = model.effective_joint()
    ok, position = flat.is_locally_optimal(strat.order, joint, model.costs)
    for j in range(1, len(strat.order)):
        verdict = "ok" if position is None or j < position else (
            "VIOLATION" if j == position else "(not checked)")
        click.echo(f"pair {j}: {strat.order[j - 1]} <-> {strat.order[j]}: {verdict}")
    if ok:
        click.echo("locally optimal")
    else:
        click.echo(f"not locally optimal: first violation at pair {position}")
        sys.exit(EXIT_CHECK_FAILED)


@main.command("simulate")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--strategy", "strategy_path", type=click.Path(exists=True))
@click.option("--plan", "plan_path", type=click.Path(exists=True))
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--conditional", is_flag=True,
              help="Condition on the system being faulty.")
@click.option("--out", type=click.Path(), default=None)
@_guarded
def cmd_simulate(model_path, strategy_path, plan_path, samples, seed, conditional, out):
    """Monte Carlo estimate of a plan's expected cost."""
    model = load_model(model_path)
    analytic = None
    if isinstance(model, HierNode):
        plan = hierarchy.load_plan(plan_path) if plan_path else hierarchy.plan_system(model)
        analytic = plan.h if conditional else plan.ec
    else:
        if strategy_path:
            plan = _load_strategy(strategy_path)
        elif model.independent:
            plan, _ = inspection.optimal_strategy(model)
        else:
            order, _ = dependent.exact_dp(model.joint, model.costs)
            plan = inspection.Strategy(order=order)
        if model.independent:
            report = inspection.expected_cost_with_inspections(
                plan, model.effective_joint(), model.by_id)
            analytic = report.ecf if conditional else report.ec
    result = oracle.monte_carlo(plan, model, samples=samples, seed=seed,
                                conditional=conditional)
    payload = {"mean": result.mean, "stderr": result.stderr,
               "samples": result.samples, "seed": result.seed}
    if analytic is not None:
        payload["analytic"] = analytic
    _write_json(payload, out)


@main.command("gen")
@click.option("--branching", "-k", type=int, required=True)
@click.option("--depth", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--p-range", nargs=2, type=float, default=(0.01, 0.2), show_default=True)
@click.option("--c-range", nargs=2, type=float, default=(1.0, 100.0), show_default=True)
@click.option("--d-frac-range", nargs=2, type=float, default=(0.05, 0.5), show_default=True)
@click.option("--out", type=click.Path(), default=None)
@_guarded
def cmd_gen(branching, depth, seed, p_range, c_range, d_frac_range, out):
    """Generate a random hierarchical model (deterministic per seed)."""
    tree = gen.random_tree(branching, depth, seed=seed, p_range=tuple(p_range),
                           c_range=tuple(c_range), d_frac_range=tuple(d_frac_range))
    _write_json(model_to_dict(tree), out)


@main.command("bench")
@click.option("--branching", "-k", "branchings", type=str, default="3,4,5",
              show_default=True, help="Comma-separated branching factors.")
@click.option("--depth", "depths", type=str, default="3,4,5", show_default=True,
              help="Comma-separated tree depths.")
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@_guarded
def cmd_bench(branchings, depths, reps, seed, as_json):
    """Time the hierarchical planner over a grid of generated models."""
    ks = [int(x) for x in branchings.split(",")]
    ds = [int(x) for x in depths.split(",")]
    cells, fits = gen.bench_grid(ks, ds, repetitions=reps, seed=seed)
    if as_json:
        payload = {"cells": [vars(c) | {"runs_ms": list(c.runs_ms)} for c in cells],
                   "fits": [vars(f) for f in fits]}
        click.echo(json.dumps(payload, indent=2))
        return
    click.echo(f"{'k':>3} {'depth':>5} {'leaves':>8} {'median ms':>10}")
    for c in cells:
        flag = "  (single run; noisy)" if reps <= 1 else ""
        click.echo(f"{c.branching:>3} {c.depth:>5} {c.leaves:>8} {c.median_ms:>10.2f}{flag}")
    for f in fits:
        click.echo(f"k={f.branching}: time ~ {f.slope_ms_per_leaf:.4f} ms/leaf "
                   f"+ {f.intercept_ms:.2f} ms  (R^2 = {f.r_squared:.4f})")


@main.command("serve")
@click.option("--model", "model_paths", multiple=True, required=True,
              type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--ui", "ui_path", type=click.Path(exists=True), default=None,
              help="HTML file to serve at /.")
@_guarded
def cmd_serve(model_paths, host, port, ui_path):
    """Serve interactive troubleshooting sessions over the given models."""
    import uvicorn

    from .server import PlanEntry, create_app
    plans = {}
    for path in model_paths:
        model = load_model(path)
        if not isinstance(model, HierNode):
            raise ModelError([f"{path}: serve requires hierarchical models"])
        plan_id = Path(path).stem
        plans[plan_id] = PlanEntry(plan_id=plan_id,
                                   plan=hierarchy.plan_system(model), root=model)
    html = Path(ui_path).read_text(encoding="utf-8") if ui_path else None
    app = create_app(plans, static_html=html)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
