"""Greedy allocation over random client orderings."""

import itertools
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.allocator.problem import (
    COVERS,
    N_PACKAGES,
    TICKET_DAYS,
    TICKET_TYPES,
    USAGE,
    AllocationProblem,
    AllocationSolution,
    Status,
    minimal_purchases,
    objective_value,
)
from src.utils.seeding import substream

PACKAGE_RESOURCES: List[List[int]] = [[int(r) for r in np.flatnonzero(USAGE[f])] for f in range(N_PACKAGES)]
# Per package, per ticket type: the ticket indices whose day falls in the stay.
PACKAGE_TICKETS: List[List[List[int]]] = [
    [[int(e) for e in np.flatnonzero(COVERS[f] & (TICKET_TYPES == kind))] for kind in range(3)]
    for f in range(N_PACKAGES)
]


def _best_tickets(values: np.ndarray, package: int, remaining: np.ndarray) -> Tuple[int, Tuple[int, ...]]:
    """Highest-value ticket set for one client in one package: one per type, distinct days."""
    options = [
        [None] + [e for e in PACKAGE_TICKETS[package][kind] if remaining[e] > 0 and values[e] > 0]
        for kind in range(3)
    ]
    best_value, best = 0, ()
    for combo in itertools.product(*options):
        chosen = [e for e in combo if e is not None]
        days = [TICKET_DAYS[e] for e in chosen]
        if len(set(days)) != len(days):
            continue
        value = int(sum(values[e] for e in chosen))
        if value > best_value:
            best_value, best = value, tuple(chosen)
    return best_value, best


def _best_choice(
    problem: AllocationProblem,
    client: int,
    owned: np.ndarray,
    tickets: np.ndarray,
) -> Optional[Tuple[int, Tuple[int, ...]]]:
    best_value, best = 0, None
    for f in range(N_PACKAGES):
        if problem.barred[client, f]:
            continue
        cost = 0.0
        for r in PACKAGE_RESOURCES[f]:
            if owned[r] <= 0:
                cost += problem.prices[r]
        if math.isinf(cost):
            continue
        fun, chosen = _best_tickets(problem.u_e[client], f, tickets)
        value = problem.u_p[client, f] - cost + fun
        if value > best_value:
            best_value, best = value, (f, chosen)
    return best


def greedy_pass(problem: AllocationProblem, order: Iterable[int]) -> AllocationSolution:
    """Assign clients one at a time in `order`, each taking its best remaining option.

    Owned units are used before bought ones; a client is left out when no
    option has positive value.
    """
    P = np.zeros_like(problem.u_p)
    E = np.zeros_like(problem.u_e)
    owned = problem.owned.copy()
    tickets = problem.owned_tickets.copy()
    for c in order:
        choice = _best_choice(problem, c, owned, tickets)
        if choice is None:
            continue
        f, chosen = choice
        P[c, f] = 1
        for r in PACKAGE_RESOURCES[f]:
            owned[r] -= 1
        for e in chosen:
            E[c, e] = 1
            tickets[e] -= 1
    B = minimal_purchases(problem, P)
    return AllocationSolution(P, E, B, objective_value(problem, P, E, B), Status.HEURISTIC)


def solve_greedy(problem: AllocationProblem, orderings: int = 100, seed: int = 0) -> AllocationSolution:
    """Best of `orderings` greedy passes over seeded random client permutations."""
    rng = substream(seed, "greedy")
    best: Optional[AllocationSolution] = None
    for _ in range(orderings):
        order: Sequence[int] = rng.permutation(problem.n_clients)
        candidate = greedy_pass(problem, (int(c) for c in order))
        if best is None or candidate.value > best.value:
            best = candidate
    if best is None:
        best = greedy_pass(problem, range(problem.n_clients))
    best.nodes = orderings
    return best
