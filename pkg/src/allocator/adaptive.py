"""Exact solving with a per-game demotion to the greedy heuristic."""

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional

from src.allocator.exact import NodeClock, WallClock, solve_exact
from src.allocator.greedy import solve_greedy
from src.allocator.problem import AllocationProblem, AllocationSolution, Status
from src.errors import SolverTimeout

logger = logging.getLogger(__name__)

# Final allocations have no time pressure; the cap only guards pathological inputs.
FINAL_BUDGET_FACTOR = 10


@dataclass
class AdaptiveState:
    """Whether the exact solver has been demoted in the current game.

    `clock_factory` builds the timer for each exact call; tests swap in a clock
    that is already past the budget to force a demotion.
    """

    demotion_seconds: float = 6.0
    greedy_orderings: int = 100
    seed: int = 0
    clock_factory: Callable[[], object] = field(default=NodeClock)
    demoted: bool = False
    demotions: int = 0

    @classmethod
    def from_strategy(cls, strategy, seed: int = 0) -> "AdaptiveState":
        if strategy.use_wall_clock:
            factory = WallClock
        else:
            factory = partial(NodeClock, strategy.seconds_per_node)
        return cls(strategy.demotion_seconds, strategy.greedy_orderings, seed, factory)

    def reset(self, seed: Optional[int] = None) -> None:
        self.demoted = False
        if seed is not None:
            self.seed = seed


def solve_adaptive(problem: AllocationProblem, state: AdaptiveState) -> AllocationSolution:
    if not state.demoted:
        try:
            return solve_exact(problem, state.demotion_seconds, state.clock_factory())
        except SolverTimeout as exc:
            state.demoted = True
            state.demotions += 1
            logger.info({"event": "solver_demoted", "elapsed": exc.elapsed, "budget": exc.budget})
    return solve_greedy(problem, state.greedy_orderings, state.seed)


def final_allocation(problem: AllocationProblem, state: Optional[AdaptiveState] = None) -> AllocationSolution:
    """Allocate owned goods only (nothing can be bought any more)."""
    state = state or AdaptiveState()
    owned_only = problem.without_purchases()
    try:
        return solve_exact(owned_only, state.demotion_seconds * FINAL_BUDGET_FACTOR, state.clock_factory())
    except SolverTimeout as exc:
        logger.warning({"event": "final_allocation_timeout", "elapsed": exc.elapsed})
        greedy = solve_greedy(owned_only, state.greedy_orderings, state.seed)
        incumbent = exc.incumbent
        if incumbent is not None and incumbent.value > greedy.value:
            return AllocationSolution(incumbent.P, incumbent.E, incumbent.B, incumbent.value, Status.HEURISTIC)
        return greedy
