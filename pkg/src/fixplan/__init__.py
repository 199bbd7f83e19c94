"""Minimum-expected-cost repair planning for multi-component systems."""

from .model import (AtomicSpec, CostReport, FlatSystem, HierNode, JointTable,
                    LimitExceededError, ModelError, ModelWarning,
                    SystemNeverFaultyError, World, derived_failure_probability,
                    independent_joint, load_model, ok_marginal, save_model,
                    validate_model)
from .flat import (expected_cost, expected_cost_independent,
                   is_locally_optimal, optimal_sequence, single_fault_sequence,
                   swap_delta)
from .inspection import (Strategy, expected_cost_with_inspections,
                         optimal_sequence_for_inspection_set, optimal_strategy,
                         remaining_expected_cost)
from .hierarchy import HierPlan, load_plan, plan_component, plan_system, save_plan
from .dependent import dependent_swap_check, exact_dp, independent_start, local_search
from .oracle import (ExecutionTrace, MonteCarloResult, brute_force_flat,
                     brute_force_hier, exact_expected_cost, execute,
                     monte_carlo)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
