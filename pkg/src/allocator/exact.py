"""Exact solver: best-bound-first branch-and-bound over LP relaxations.

Relaxations are solved with HiGHS through scipy. Branching fixes variable
bounds on P and E only; once those are integral the cheapest B is implied.
"""

import heapq
import itertools
import logging
import math
import time
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from src.allocator.greedy import solve_greedy
from src.allocator.problem import (
    COVERS,
    N_PACKAGES,
    N_RESOURCES,
    N_TICKETS,
    TICKET_DAYS,
    TICKET_TYPES,
    USAGE,
    AllocationProblem,
    AllocationSolution,
    Status,
    empty_solution,
    minimal_purchases,
    objective_value,
)
from src.errors import SolverTimeout

logger = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6
# Absorbs HiGHS round-off before a bound is floored to whole cents.
BOUND_TOL = 1e-3
WARM_START_ORDERINGS = 5


class NodeClock:
    """Simulated solve time: a fixed charge per relaxation solved."""

    def __init__(self, seconds_per_node: float = 0.02) -> None:
        self.seconds_per_node = seconds_per_node
        self.nodes = 0

    def charge(self) -> None:
        self.nodes += 1

    def elapsed(self) -> float:
        return self.nodes * self.seconds_per_node


class WallClock:
    def __init__(self) -> None:
        self.started = time.perf_counter()
        self.nodes = 0

    def charge(self) -> None:
        self.nodes += 1

    def elapsed(self) -> float:
        return time.perf_counter() - self.started


def n_variables(n_clients: int) -> int:
    return n_clients * (N_PACKAGES + N_TICKETS) + N_RESOURCES


@lru_cache(maxsize=16)
def constraint_matrix(n_clients: int) -> sparse.csr_matrix:
    """A_ub of the program for `n_clients`, rows grouped by constraint family.

    Row order: one package per client (C), resources (16), tickets owned (12),
    ticket inside stay (C x 12), one ticket per day (C x 4), one ticket per
    type (C x 3).
    """
    C = n_clients
    e_base = C * N_PACKAGES
    b_base = e_base + C * N_TICKETS
    rows: List[int] = []
    cols: List[int] = []
    vals: List[float] = []
    row = 0

    def add(r: int, c: int, v: float) -> None:
        rows.append(r)
        cols.append(c)
        vals.append(v)

    for c in range(C):
        for f in range(N_PACKAGES):
            add(row, c * N_PACKAGES + f, 1.0)
        row += 1
    for r in range(N_RESOURCES):
        for c in range(C):
            for f in np.flatnonzero(USAGE[:, r]):
                add(row, c * N_PACKAGES + int(f), 1.0)
        add(row, b_base + r, -1.0)
        row += 1
    for e in range(N_TICKETS):
        for c in range(C):
            add(row, e_base + c * N_TICKETS + e, 1.0)
        row += 1
    for c in range(C):
        for e in range(N_TICKETS):
            add(row, e_base + c * N_TICKETS + e, 1.0)
            for f in np.flatnonzero(COVERS[:, e]):
                add(row, c * N_PACKAGES + int(f), -1.0)
            row += 1
    for c in range(C):
        for day in range(1, 5):
            for e in np.flatnonzero(TICKET_DAYS == day):
                add(row, e_base + c * N_TICKETS + int(e), 1.0)
            row += 1
    for c in range(C):
        for kind in range(3):
            for e in np.flatnonzero(TICKET_TYPES == kind):
                add(row, e_base + c * N_TICKETS + int(e), 1.0)
            row += 1
    return sparse.csr_matrix((vals, (rows, cols)), shape=(row, n_variables(C)))


def _rhs(problem: AllocationProblem) -> np.ndarray:
    C = problem.n_clients
    return np.concatenate(
        [
            np.ones(C),
            problem.owned.astype(float),
            problem.owned_tickets.astype(float),
            np.zeros(C * N_TICKETS),
            np.ones(C * 4),
            np.ones(C * 3),
        ]
    )


def _costs(problem: AllocationProblem) -> np.ndarray:
    finite = np.where(np.isinf(problem.prices), 0.0, problem.prices)
    return np.concatenate([-problem.u_p.ravel().astype(float), -problem.u_e.ravel().astype(float), finite])


def _initial_bounds(problem: AllocationProblem) -> np.ndarray:
    C = problem.n_clients
    p_upper = np.where(problem.barred, 0.0, 1.0).ravel()
    e_upper = np.tile(np.where(problem.owned_tickets > 0, 1.0, 0.0), C)
    b_upper = np.where(np.isinf(problem.prices), 0.0, float(C))
    lower = np.zeros(n_variables(C))
    return np.column_stack([lower, np.concatenate([p_upper, e_upper, b_upper])])


def _split(problem: AllocationProblem, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    C = problem.n_clients
    P = np.rint(x[: C * N_PACKAGES]).astype(np.int64).reshape(C, N_PACKAGES)
    E = np.rint(x[C * N_PACKAGES : C * (N_PACKAGES + N_TICKETS)]).astype(np.int64).reshape(C, N_TICKETS)
    return P, E


def _improves(bound, best_value: int):
    """Whether a relaxation bound still admits an integer value above `best_value`.

    Objective values are whole cents.
    """
    return np.floor(np.asarray(bound) + BOUND_TOL) > best_value


def _branch_variable(x: np.ndarray, n_binary: int) -> Optional[int]:
    """Most fractional P or E variable, lowest index on ties; None if integral."""
    frac = np.abs(x[:n_binary] - np.rint(x[:n_binary]))
    if frac.max(initial=0.0) <= INTEGRALITY_TOL:
        return None
    return int(np.argmin(np.abs(x[:n_binary] - 0.5)))


def _fix_by_reduced_cost(result, bounds: np.ndarray, bound: float, best_value: int, n_binary: int) -> int:
    """Fix binaries whose flip would cost more than the node can spare.

    The bound marginals of the relaxation price a move of each variable off
    its bound; when even the optimistic value after the move cannot beat the
    incumbent the variable keeps its relaxation value in every descendant.
    Returns how many variables were fixed.
    """
    free = bounds[:n_binary, 0] < bounds[:n_binary, 1]
    raise_cost = np.maximum(np.asarray(result.lower.marginals[:n_binary]), 0.0)
    lower_cost = np.maximum(-np.asarray(result.upper.marginals[:n_binary]), 0.0)
    to_zero = free & (raise_cost > 0) & ~_improves(bound - raise_cost, best_value)
    to_one = free & (lower_cost > 0) & ~_improves(bound - lower_cost, best_value)
    bounds[:n_binary, 1][to_zero] = 0.0
    bounds[:n_binary, 0][to_one] = 1.0
    return int(to_zero.sum() + to_one.sum())


def solve_exact(
    problem: AllocationProblem,
    budget: float = 6.0,
    clock=None,
    warm_start: int = WARM_START_ORDERINGS,
) -> AllocationSolution:
    """Provably optimal allocation, or SolverTimeout once `clock` passes `budget`.

    The incumbent starts as the best of `warm_start` greedy orderings and nodes
    are expanded best bound first. An integral leaf replaces the incumbent only
    when it is worth strictly more, so equal-valued optima resolve to whichever
    was found first; both the warm start and the expansion order are fixed, so
    the result is a deterministic function of the problem.
    """
    clock = clock or NodeClock()
    C = problem.n_clients
    if C == 0:
        return empty_solution(problem)
    incumbent = solve_greedy(problem, warm_start)

    A = constraint_matrix(C)
    b = _rhs(problem)
    c = _costs(problem)
    n_binary = C * (N_PACKAGES + N_TICKETS)
    best_value = incumbent.value
    best: AllocationSolution = incumbent
    fixed = 0
    order = itertools.count()
    # Entries are (-parent bound, insertion order, variable bounds).
    heap = [(-math.inf, next(order), _initial_bounds(problem))]
    while heap:
        parent_bound, _, bounds = heapq.heappop(heap)
        if not _improves(-parent_bound, best_value):
            continue
        if clock.elapsed() > budget:
            raise SolverTimeout(clock.elapsed(), budget, best)
        clock.charge()
        result = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
        if result.status != 0:
            continue
        bound = -result.fun
        if not _improves(bound, best_value):
            continue
        j = _branch_variable(result.x, n_binary)
        if j is None:
            P, E = _split(problem, result.x)
            B = minimal_purchases(problem, P)
            value = objective_value(problem, P, E, B)
            if value > best_value:
                best_value = value
                best = AllocationSolution(P, E, B, value, Status.OPTIMAL)
            continue
        fixed += _fix_by_reduced_cost(result, bounds, bound, best_value, n_binary)
        down = bounds.copy()
        down[j, 1] = 0.0
        up = bounds.copy()
        up[j, 0] = 1.0
        heapq.heappush(heap, (-bound, next(order), up))
        heapq.heappush(heap, (-bound, next(order), down))

    nodes = getattr(clock, "nodes", 0)
    logger.debug({"event": "exact_solved", "clients": C, "value": best_value, "nodes": nodes, "fixed": fixed})
    return AllocationSolution(best.P, best.E, best.B, best.value, Status.OPTIMAL, nodes)
