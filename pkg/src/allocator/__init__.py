from src.allocator.adaptive import AdaptiveState, final_allocation, solve_adaptive
from src.allocator.build import build_problem, current_prices
from src.allocator.exact import NodeClock, WallClock, solve_exact
from src.allocator.greedy import solve_greedy
from src.allocator.problem import (
    UNPURCHASABLE,
    AllocationProblem,
    AllocationSolution,
    Status,
    constraint_violations,
)
