import itertools
import math

import numpy as np
import pytest

from src.allocator import (
    UNPURCHASABLE,
    AdaptiveState,
    AllocationProblem,
    NodeClock,
    Status,
    constraint_violations,
    final_allocation,
    solve_adaptive,
    solve_exact,
    solve_greedy,
)
from src.allocator.dump import load_problems, problem_to_record, solution_to_record
from src.allocator.greedy import greedy_pass
from src.allocator.problem import COVERS, TICKET_DAYS, TICKET_TYPES, minimal_purchases
from src.errors import SolverTimeout
from src.game.preferences import PACKAGES, ClientPreference, TravelPackage, generate_clients, generate_endowment
from src.market.goods import TICKET_GOODS, TRAVEL_GOODS, TRAVEL_INDEX, GoodId, GoodKind
from src.utils.data_processing import write_records

SMALL_PACKAGES = [f for f, package in enumerate(PACKAGES) if package.departure <= 3]
SMALL_TICKETS = [e for e, ticket in enumerate(TICKET_GOODS) if ticket.day <= 2]


class ExpiredClock:
    """A clock that is always past any budget."""

    created = 0

    def __init__(self):
        ExpiredClock.created += 1
        self.nodes = 0

    def charge(self):
        self.nodes += 1

    def elapsed(self):
        return math.inf


def random_small_problem(seed):
    """At most three clients whose stays fit inside days 1-3."""
    rng = np.random.default_rng(seed)
    n_clients = 1 + seed % 3
    owned_tickets = np.zeros(12, dtype=np.int64)
    for e in rng.choice(SMALL_TICKETS, size=3 if n_clients < 3 else 2):
        owned_tickets[e] += 1
    barred = np.ones((n_clients, 20), dtype=bool)
    barred[:, SMALL_PACKAGES] = False
    return AllocationProblem(
        u_p=rng.integers(0, 1300, size=(n_clients, 20)) * 100,
        u_e=rng.integers(0, 201, size=(n_clients, 12)) * 100,
        owned=rng.integers(0, 2, size=16),
        owned_tickets=owned_tickets,
        prices=np.where(rng.random(16) < 0.3, UNPURCHASABLE, rng.integers(0, 500, size=16) * 100.0),
        barred=barred,
    )


def random_full_problem(seed):
    """Eight generated clients, a few owned goods, current-looking prices."""
    rng = np.random.default_rng(seed)
    clients = generate_clients(rng)
    holdings = generate_endowment(rng, 12)
    for good in TRAVEL_GOODS:
        holdings[good] += int(rng.integers(0, 3))
    prices = {}
    for good in TRAVEL_GOODS:
        if good.is_flight:
            prices[good] = int(rng.integers(250, 401)) * 100
        else:
            prices[good] = int(rng.integers(0, 200)) * 100
    return AllocationProblem.for_clients(clients, holdings, prices)


def oracle_value(problem):
    """Exhaustive search over packages (from SMALL_PACKAGES) and ticket owners."""
    C = problem.n_clients
    units = [e for e in range(12) for _ in range(int(problem.owned_tickets[e]))]
    finite = np.where(np.isinf(problem.prices), 0, problem.prices).astype(np.int64)
    best = 0
    for packages in itertools.product([None] + SMALL_PACKAGES, repeat=C):
        P = np.zeros((C, 20), dtype=np.int64)
        for c, f in enumerate(packages):
            if f is not None:
                P[c, f] = 1
        B = minimal_purchases(problem, P)
        if (B[np.isinf(problem.prices)] > 0).any():
            continue
        travel = int((problem.u_p * P).sum() - (finite * B).sum())
        stays = P @ COVERS
        fun = 0
        for owners in itertools.product(range(-1, C), repeat=len(units)):
            E = np.zeros((C, 12), dtype=np.int64)
            for e, owner in zip(units, owners):
                if owner >= 0:
                    E[owner, e] += 1
            if (E > stays).any():
                continue
            if any((E[:, TICKET_DAYS == d].sum(axis=1) > 1).any() for d in range(1, 5)):
                continue
            if any((E[:, TICKET_TYPES == k].sum(axis=1) > 1).any() for k in range(3)):
                continue
            fun = max(fun, int((problem.u_e * E).sum()))
        best = max(best, travel + fun)
    return best


def test_table_goods_reproduce_the_table_allocation(table_clients, table_holdings):
    problem = AllocationProblem.for_clients(table_clients, table_holdings, {})
    solution = solve_exact(problem)
    assert solution.value == 944300
    assert solution.status == Status.OPTIMAL
    assert constraint_violations(problem, solution) == []
    assert solution.B.sum() == 0


def test_owning_nothing_allocates_nothing(table_clients):
    problem = AllocationProblem.for_clients(table_clients, {}, {})
    solution = solve_exact(problem)
    assert solution.value == 0
    assert solution.P.sum() == 0


def test_cheaper_hotel_wins_unless_the_bonus_covers_the_gap():
    client = [ClientPreference(1, 2, 100, (0, 0, 0))]
    holdings = {GoodId.parse("in1"): 1, GoodId.parse("out2"): 1}
    prices = {GoodId.parse("LFI1"): 5000, GoodId.parse("BGH1"): 20000}

    solution = solve_exact(AllocationProblem.for_clients(client, holdings, prices))
    assert solution.value == 100000 - 5000
    assert solution.B[TRAVEL_INDEX[GoodId.parse("LFI1")]] == 1

    prices[GoodId.parse("BGH1")] = 0
    solution = solve_exact(AllocationProblem.for_clients(client, holdings, prices))
    assert solution.value == 110000
    assert solution.B[TRAVEL_INDEX[GoodId.parse("BGH1")]] == 1


@pytest.mark.parametrize("seed", range(200))
def test_exact_matches_exhaustive_search(seed):
    problem = random_small_problem(seed)
    solution = solve_exact(problem, budget=math.inf)
    assert constraint_violations(problem, solution) == []
    assert solution.value == oracle_value(problem)


@pytest.mark.parametrize("seed", range(10))
def test_greedy_is_valid_and_never_beats_exact(seed):
    problem = random_full_problem(seed)
    exact = solve_exact(problem, budget=math.inf)
    greedy = solve_greedy(problem, orderings=20, seed=seed)
    assert constraint_violations(problem, exact) == []
    assert constraint_violations(problem, greedy) == []
    assert greedy.status == Status.HEURISTIC
    assert greedy.value <= exact.value


@pytest.mark.slow
def test_greedy_is_close_to_optimal_on_average():
    ratios = []
    for seed in range(50):
        problem = random_full_problem(1000 + seed)
        exact = solve_exact(problem, budget=math.inf)
        if exact.value > 0:
            ratios.append(solve_greedy(problem, seed=seed).value / exact.value)
    assert np.mean(ratios) >= 0.99


def test_greedy_is_deterministic_per_seed():
    problem = random_full_problem(3)
    first = solve_greedy(problem, orderings=10, seed=42)
    second = solve_greedy(problem, orderings=10, seed=42)
    assert first.value == second.value
    assert (first.P == second.P).all()


@pytest.mark.parametrize("seed", range(5))
def test_owning_more_never_lowers_the_value(seed):
    problem = random_small_problem(seed)
    base = solve_exact(problem, budget=math.inf).value
    for resource in range(16):
        assert solve_exact(problem.with_owned(resource), budget=math.inf).value >= base


def test_timeout_carries_the_incumbent():
    problem = random_full_problem(0)
    with pytest.raises(SolverTimeout) as info:
        solve_exact(problem, budget=1.0, clock=ExpiredClock())
    assert info.value.incumbent is not None
    assert constraint_violations(problem, info.value.incumbent) == []


def test_adaptive_demotes_for_the_rest_of_the_game():
    problem = random_full_problem(1)
    state = AdaptiveState(greedy_orderings=5, clock_factory=ExpiredClock)
    ExpiredClock.created = 0

    first = solve_adaptive(problem, state)
    assert first.status == Status.HEURISTIC
    assert state.demoted and state.demotions == 1

    solve_adaptive(problem, state)
    assert ExpiredClock.created == 1

    state.reset(seed=9)
    assert not state.demoted
    assert state.seed == 9


def test_final_allocation_buys_nothing(table_clients, table_holdings):
    prices = {good: 100 for good in table_holdings if not good.is_entertainment}
    problem = AllocationProblem.for_clients(table_clients, table_holdings, prices)
    solution = final_allocation(problem)
    assert solution.B.sum() == 0
    assert solution.value == 944300


def test_validator_catches_broken_solutions(table_clients, table_holdings):
    problem = AllocationProblem.for_clients(table_clients, table_holdings, {})
    solution = solve_exact(problem)
    solution.E[0, :] = 1
    found = constraint_violations(problem, solution)
    assert "two tickets on day 1" in found
    assert "reported value differs from objective" in found


def test_dumped_problems_solve_the_same(tmp_path, table_clients, table_holdings):
    problem = AllocationProblem.for_clients(table_clients, table_holdings, {GoodId.parse("in1"): 25000})
    path = tmp_path / "problems.jsonl"
    write_records(str(path), [problem_to_record(problem)])
    [loaded] = load_problems(str(path))
    assert solution_to_record(solve_exact(loaded))["value"] == solve_exact(problem).value


def test_optimal_beats_first_come_greedy_on_the_better_hotel():
    # A and B differ only in what the good hotel is worth to them.
    clients = [ClientPreference(1, 2, 50, (0, 0, 0)), ClientPreference(1, 2, 150, (0, 0, 0))]
    holdings = {GoodId.parse(g): n for g, n in [("in1", 2), ("out2", 2), ("BGH1", 1), ("LFI1", 1)]}
    problem = AllocationProblem.for_clients(clients, holdings, {})

    exact = solve_exact(problem)
    a_first = greedy_pass(problem, [0, 1])
    assert exact.value == 215000
    assert exact.value - a_first.value == 10000
    assert exact.P[1, PACKAGES.index(TravelPackage(1, 2, GoodKind.HOTEL_BGH))] == 1
    assert solve_greedy(problem, orderings=100).value == exact.value


def test_no_clients_is_trivially_optimal():
    problem = AllocationProblem(np.zeros((0, 20)), np.zeros((0, 12)), np.zeros(16), np.zeros(12), np.zeros(16))
    solution = solve_exact(problem)
    assert solution.status == Status.OPTIMAL
    assert solution.value == 0


@pytest.mark.slow
def test_full_size_instances_finish_within_the_default_budget():
    timeouts = []
    for seed in range(60):
        try:
            solution = solve_exact(random_full_problem(seed), clock=NodeClock(0.02))
        except SolverTimeout:
            timeouts.append(seed)
            continue
        assert solution.status == Status.OPTIMAL
    assert len(timeouts) <= 3, timeouts
