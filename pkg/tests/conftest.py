from collections import Counter

import pytest

from src.game.messages import AgentView
from src.game.preferences import ClientAssignment, ClientPreference, TravelPackage
from src.market.goods import ALL_GOODS, GoodId
from src.market.records import Quote
from src.utils.config import AgentDescriptor, default_game_config

# Eight clients of one agent and the allocation it ended a game with.
TABLE_CLIENTS = [
    ClientPreference(2, 5, 73, (175, 34, 24)),
    ClientPreference(1, 3, 125, (113, 124, 57)),
    ClientPreference(4, 5, 73, (157, 12, 177)),
    ClientPreference(1, 2, 102, (50, 67, 49)),
    ClientPreference(1, 3, 75, (12, 135, 110)),
    ClientPreference(2, 4, 86, (197, 8, 59)),
    ClientPreference(1, 5, 90, (56, 197, 162)),
    ClientPreference(1, 3, 50, (79, 92, 136)),
]
TABLE_ALLOCATION = [
    ("2-5-LFI", ["B4"], 1175),
    ("1-2-BGH", ["B1"], 1138),
    ("3-5-LFI", ["T3", "B4"], 1234),
    ("1-2-BGH", [], 1102),
    ("1-2-BGH", ["S1"], 1110),
    ("2-3-BGH", ["B2"], 1183),
    ("1-5-LFI", ["S2", "B3", "T4"], 1415),
    ("1-2-BGH", ["T1"], 1086),
]


def table_assignments():
    return [
        ClientAssignment(c, TravelPackage.parse(package), frozenset(GoodId.parse(t) for t in tickets))
        for c, (package, tickets, _) in enumerate(TABLE_ALLOCATION, start=1)
    ]


@pytest.fixture
def table_clients():
    return list(TABLE_CLIENTS)


@pytest.fixture
def assignments():
    return table_assignments()


@pytest.fixture
def table_holdings():
    """Exactly the goods the table allocation uses."""
    holdings = Counter()
    for assignment in table_assignments():
        holdings.update(assignment.goods())
    return holdings


@pytest.fixture
def null_roster():
    return [AgentDescriptor(name=f"null-{i}", variant="null") for i in range(1, 9)]


@pytest.fixture
def short_config(null_roster):
    """A 30-tick game between null agents."""
    return default_game_config(null_roster, seed=7, ticks_per_game=30)


@pytest.fixture
def make_view():
    """Build an AgentView; every good is quoted, asks in cents (default: flights $300, everything else 0)."""

    def build(
        clients,
        holdings=None,
        asks=None,
        closed=(),
        bids=None,
        tick=0,
        ticks_per_game=180,
        hotel_winning=None,
        roster=("attac",),
        own_orders=(),
    ):
        asks = asks or {}
        bids = bids or {}
        quotes = {}
        for good in ALL_GOODS:
            default = 30000 if good.is_flight else 0
            ask = asks.get(good, default)
            if good.is_entertainment and good not in asks:
                ask = None
            quotes[good] = Quote(good, bids.get(good), ask, good in closed, tick)
        return AgentView(
            agent="attac",
            tick=tick,
            ticks_per_game=ticks_per_game,
            seconds_per_tick=5.0,
            clients=tuple(clients),
            holdings=Counter(holdings or {}),
            quotes=quotes,
            hotel_winning=dict(hotel_winning or {}),
            own_orders=tuple(own_orders),
            roster=tuple(roster),
            rng_seed=0,
        )

    return build
