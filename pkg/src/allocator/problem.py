"""The allocation integer program: data, solutions, objective and validator.

Variables for C clients: P(c, f) over the 20 packages, E(c, e) over the 12
tickets, and B(r) over the 16 travel resources. All money is cents.
"""

import math
from dataclasses import dataclass, field, replace
from typing import List, Mapping, Optional, Sequence

import numpy as np

from src.game.preferences import (
    PACKAGES,
    ClientAssignment,
    ClientPreference,
    package_utility,
)
from src.market.goods import TICKET_GOODS, TRAVEL_GOODS, TRAVEL_INDEX, GoodId

N_PACKAGES = len(PACKAGES)
N_TICKETS = len(TICKET_GOODS)
N_RESOURCES = len(TRAVEL_GOODS)
UNPURCHASABLE = math.inf

# USAGE[f, r] = 1 when package f consumes one unit of resource r.
USAGE = np.zeros((N_PACKAGES, N_RESOURCES), dtype=np.int64)
# COVERS[f, e] = 1 when ticket e's day falls inside package f's stay.
COVERS = np.zeros((N_PACKAGES, N_TICKETS), dtype=np.int64)
for _f, _package in enumerate(PACKAGES):
    for _good in _package.goods:
        USAGE[_f, TRAVEL_INDEX[_good]] = 1
    for _e, _ticket in enumerate(TICKET_GOODS):
        if _ticket.day in _package.nights:
            COVERS[_f, _e] = 1

TICKET_DAYS = np.array([t.day for t in TICKET_GOODS])
TICKET_TYPES = np.array([i // 4 for i in range(N_TICKETS)])


class Status:
    OPTIMAL = "Optimal"
    HEURISTIC = "Heuristic"


@dataclass
class AllocationProblem:
    u_p: np.ndarray  # (C, 20) package utility, cents, >= 0
    u_e: np.ndarray  # (C, 12) ticket utility, cents
    owned: np.ndarray  # (16,) travel resources owned
    owned_tickets: np.ndarray  # (12,)
    prices: np.ndarray  # (16,) cents; inf = cannot be bought
    barred: np.ndarray = field(default=None)  # (C, 20) bool, packages a client may not take

    def __post_init__(self) -> None:
        self.u_p = np.maximum(np.asarray(self.u_p, dtype=np.int64), 0)
        self.u_e = np.asarray(self.u_e, dtype=np.int64)
        self.owned = np.asarray(self.owned, dtype=np.int64)
        self.owned_tickets = np.asarray(self.owned_tickets, dtype=np.int64)
        prices = np.asarray(self.prices, dtype=float)
        self.prices = np.where(np.isinf(prices), UNPURCHASABLE, np.round(prices))
        if self.barred is None:
            self.barred = np.zeros(self.u_p.shape, dtype=bool)
        self.barred = np.asarray(self.barred, dtype=bool)
        if self.u_p.shape != (self.n_clients, N_PACKAGES) or self.u_e.shape != (self.n_clients, N_TICKETS):
            raise ValueError("utility tables do not match the client count")
        if self.owned.shape != (N_RESOURCES,) or self.prices.shape != (N_RESOURCES,):
            raise ValueError("resource vectors must have 16 entries")
        if self.owned_tickets.shape != (N_TICKETS,):
            raise ValueError("ticket vector must have 12 entries")
        if (self.owned < 0).any() or (self.owned_tickets < 0).any() or (self.prices < 0).any():
            raise ValueError("owned quantities and prices must be non-negative")

    @property
    def n_clients(self) -> int:
        return self.u_p.shape[0]

    @classmethod
    def for_clients(
        cls,
        clients: Sequence[ClientPreference],
        holdings: Mapping[GoodId, int],
        prices: Mapping[GoodId, float],
    ) -> "AllocationProblem":
        u_p = np.array([[package_utility(c, p) * 100 for p in PACKAGES] for c in clients], dtype=np.int64)
        u_e = np.array([[c.ev_for(t.kind) * 100 for t in TICKET_GOODS] for c in clients], dtype=np.int64)
        owned = np.array([holdings.get(g, 0) for g in TRAVEL_GOODS])
        owned_tickets = np.array([holdings.get(g, 0) for g in TICKET_GOODS])
        price_vector = np.array([prices.get(g, UNPURCHASABLE) for g in TRAVEL_GOODS], dtype=float)
        return cls(
            u_p.reshape(len(clients), N_PACKAGES),
            u_e.reshape(len(clients), N_TICKETS),
            owned,
            owned_tickets,
            price_vector,
        )

    def without_purchases(self) -> "AllocationProblem":
        return replace(self, prices=np.full(N_RESOURCES, UNPURCHASABLE))

    def with_extra_ticket(self, ticket: int) -> "AllocationProblem":
        tickets = self.owned_tickets.copy()
        tickets[ticket] += 1
        return replace(self, owned_tickets=tickets)

    def with_barred(self, client: int, packages: Sequence[int]) -> "AllocationProblem":
        barred = self.barred.copy()
        barred[client, list(packages)] = True
        return replace(self, barred=barred)

    def with_owned(self, resource: int, extra: int = 1) -> "AllocationProblem":
        owned = self.owned.copy()
        owned[resource] += extra
        return replace(self, owned=owned)


@dataclass
class AllocationSolution:
    P: np.ndarray  # (C, 20) 0/1
    E: np.ndarray  # (C, 12) 0/1
    B: np.ndarray  # (16,) units to buy
    value: int  # cents
    status: str
    nodes: int = 0

    def package_of(self, client: int) -> Optional[int]:
        chosen = np.flatnonzero(self.P[client])
        return int(chosen[0]) if len(chosen) else None

    def tickets_of(self, client: int) -> List[int]:
        return [int(e) for e in np.flatnonzero(self.E[client])]

    def demand(self) -> np.ndarray:
        """Units of each travel resource the chosen packages consume."""
        return self.P.sum(axis=0) @ USAGE

    def ticket_use(self) -> np.ndarray:
        return self.E.sum(axis=0)

    def assignments(self) -> List[ClientAssignment]:
        result = []
        for c in range(self.P.shape[0]):
            f = self.package_of(c)
            if f is None:
                result.append(ClientAssignment(c + 1))
            else:
                tickets = frozenset(TICKET_GOODS[e] for e in self.tickets_of(c))
                result.append(ClientAssignment(c + 1, PACKAGES[f], tickets))
        return result


def minimal_purchases(problem: AllocationProblem, P: np.ndarray) -> np.ndarray:
    demand = P.sum(axis=0) @ USAGE
    return np.maximum(demand - problem.owned, 0).astype(np.int64)


def objective_value(problem: AllocationProblem, P: np.ndarray, E: np.ndarray, B: np.ndarray) -> int:
    """Utility minus purchase cost, in cents, recomputed from scratch."""
    bought = np.asarray(B, dtype=np.int64)
    if (bought[np.isinf(problem.prices)] > 0).any():
        raise ValueError("solution buys an unpurchasable resource")
    finite = np.where(np.isinf(problem.prices), 0, problem.prices).astype(np.int64)
    return int((problem.u_p * P).sum() + (problem.u_e * E).sum() - (finite * bought).sum())


def constraint_violations(problem: AllocationProblem, solution: AllocationSolution) -> List[str]:
    """Every constraint family of the program, checked directly."""
    P, E, B = solution.P, solution.E, solution.B
    found = []
    if P.shape != problem.u_p.shape or E.shape != problem.u_e.shape or B.shape != (N_RESOURCES,):
        return ["shape mismatch"]
    if not np.isin(P, (0, 1)).all() or not np.isin(E, (0, 1)).all() or (B < 0).any():
        found.append("non-integral or negative variables")
    if (P.sum(axis=1) > 1).any():
        found.append("client with more than one package")
    if (P & problem.barred).any():
        found.append("barred package used")
    if (P.sum(axis=0) @ USAGE > problem.owned + B).any():
        found.append("resource demand exceeds owned plus bought")
    if (B[np.isinf(problem.prices)] > 0).any():
        found.append("unpurchasable resource bought")
    if (E.sum(axis=0) > problem.owned_tickets).any():
        found.append("tickets allocated beyond ownership")
    if (E > P @ COVERS).any():
        found.append("ticket outside the package stay")
    for day in range(1, 5):
        if (E[:, TICKET_DAYS == day].sum(axis=1) > 1).any():
            found.append(f"two tickets on day {day}")
    for kind in range(3):
        if (E[:, TICKET_TYPES == kind].sum(axis=1) > 1).any():
            found.append(f"two tickets of type {kind}")
    if objective_value(problem, P, E, B) != solution.value:
        found.append("reported value differs from objective")
    return found


def empty_solution(problem: AllocationProblem, status: str = Status.OPTIMAL) -> AllocationSolution:
    return AllocationSolution(
        np.zeros_like(problem.u_p),
        np.zeros_like(problem.u_e),
        np.zeros(N_RESOURCES, dtype=np.int64),
        0,
        status,
    )
