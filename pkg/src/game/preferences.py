"""Clients, travel packages, endowments and the utility function."""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import numpy as np

from src.market.goods import (
    ENT_KINDS,
    HOTEL_KINDS,
    TICKET_GOODS,
    GoodId,
    GoodKind,
)

# Per-good quantities owned by one agent.
Holdings = Counter

TRAVEL_PENALTY = 100
BASE_UTILITY = 1000
CLIENTS_PER_AGENT = 8

DAY_PAIRS: List[Tuple[int, int]] = [(a, d) for a in range(1, 5) for d in range(a + 1, 6)]


@dataclass(frozen=True)
class ClientPreference:
    """Ideal days, Grand Hotel value and entertainment values (whole dollars).

    `ev` is ordered baseball, symphony, theater.
    """

    iad: int
    idd: int
    ghv: int
    ev: Tuple[int, int, int]

    def __post_init__(self) -> None:
        if not (1 <= self.iad <= 4 and 2 <= self.idd <= 5 and self.iad < self.idd):
            raise ValueError(f"bad ideal days ({self.iad}, {self.idd})")
        if not 50 <= self.ghv <= 150:
            raise ValueError(f"GHV {self.ghv} outside [50, 150]")
        if len(self.ev) != 3 or any(not 0 <= v <= 200 for v in self.ev):
            raise ValueError(f"EVs {self.ev} outside [0, 200]")

    def ev_for(self, kind: GoodKind) -> int:
        return self.ev[ENT_KINDS.index(kind)]

    def to_record(self) -> Dict[str, object]:
        return {"iad": self.iad, "idd": self.idd, "ghv": self.ghv, "ev": list(self.ev)}

    @classmethod
    def from_record(cls, record: Mapping[str, object]) -> "ClientPreference":
        return cls(int(record["iad"]), int(record["idd"]), int(record["ghv"]), tuple(int(v) for v in record["ev"]))


@dataclass(frozen=True)
class TravelPackage:
    arrival: int
    departure: int
    hotel: GoodKind

    def __post_init__(self) -> None:
        if not 1 <= self.arrival < self.departure <= 5:
            raise ValueError(f"bad travel days ({self.arrival}, {self.departure})")
        if self.hotel not in HOTEL_KINDS:
            raise ValueError(f"{self.hotel} is not a hotel")

    @property
    def nights(self) -> range:
        return range(self.arrival, self.departure)

    @property
    def goods(self) -> List[GoodId]:
        """Every travel good the package consumes, one unit each."""
        return (
            [GoodId(GoodKind.INFLIGHT, self.arrival), GoodId(GoodKind.OUTFLIGHT, self.departure)]
            + [GoodId(self.hotel, night) for night in self.nights]
        )

    @property
    def label(self) -> str:
        return f"{self.arrival}-{self.departure}-{self.hotel.value}"

    @classmethod
    def parse(cls, label: str) -> "TravelPackage":
        arrival, departure, hotel = label.split("-")
        return cls(int(arrival), int(departure), GoodKind(hotel))


PACKAGES: List[TravelPackage] = [
    TravelPackage(a, d, hotel) for (a, d) in DAY_PAIRS for hotel in HOTEL_KINDS
]
PACKAGE_INDEX: Dict[TravelPackage, int] = {p: i for i, p in enumerate(PACKAGES)}


@dataclass(frozen=True)
class ClientAssignment:
    """What one client receives at game end. `client` is 1-based."""

    client: int
    package: Optional[TravelPackage] = None
    tickets: FrozenSet[GoodId] = field(default_factory=frozenset)

    def problems(self) -> List[str]:
        found = []
        if self.package is None and self.tickets:
            found.append("tickets without a package")
        days = [t.day for t in self.tickets]
        kinds = [t.kind for t in self.tickets]
        if any(not t.is_entertainment for t in self.tickets):
            found.append("non-ticket good in tickets")
        if len(set(days)) != len(days):
            found.append("two tickets on one day")
        if len(set(kinds)) != len(kinds):
            found.append("two tickets of one type")
        if self.package is not None and any(d not in self.package.nights for d in days):
            found.append("ticket outside the stay")
        return found

    def goods(self) -> Counter:
        used: Counter = Counter(self.package.goods if self.package else [])
        used.update(self.tickets)
        return used

    def to_record(self) -> Dict[str, object]:
        return {
            "client": self.client,
            "package": self.package.label if self.package else None,
            "tickets": sorted(str(t) for t in self.tickets),
        }

    @classmethod
    def from_record(cls, record: Mapping[str, object]) -> "ClientAssignment":
        package = record.get("package")
        return cls(
            int(record["client"]),
            TravelPackage.parse(package) if package else None,
            frozenset(GoodId.parse(t) for t in record.get("tickets", [])),
        )


def generate_clients(rng: np.random.Generator, n: int = CLIENTS_PER_AGENT) -> List[ClientPreference]:
    clients = []
    for _ in range(n):
        iad, idd = DAY_PAIRS[int(rng.integers(len(DAY_PAIRS)))]
        ghv = int(rng.integers(50, 151))
        ev = tuple(int(v) for v in rng.integers(0, 201, size=3))
        clients.append(ClientPreference(iad, idd, ghv, ev))
    return clients


def generate_endowment(rng: np.random.Generator, size: int = 12) -> Holdings:
    """`size` tickets drawn uniformly, with replacement, over the 12 ticket goods."""
    draws = rng.integers(0, len(TICKET_GOODS), size=size)
    return Counter(TICKET_GOODS[int(i)] for i in draws)


def package_utility(pref: ClientPreference, package: TravelPackage) -> int:
    penalty = TRAVEL_PENALTY * (abs(package.arrival - pref.iad) + abs(package.departure - pref.idd))
    bonus = pref.ghv if package.hotel is GoodKind.HOTEL_BGH else 0
    return BASE_UTILITY - penalty + bonus


def utility(pref: ClientPreference, assignment: ClientAssignment) -> int:
    """Client utility in dollars: 1000 - travel penalty + hotel bonus + fun bonus."""
    if assignment.package is None:
        return 0
    return package_utility(pref, assignment.package) + sum(pref.ev_for(t.kind) for t in assignment.tickets)


def feasible(assignment: ClientAssignment, holdings: Mapping[GoodId, int]) -> bool:
    """True when the holdings cover every good the assignment uses."""
    if assignment.problems():
        return False
    return all(holdings.get(good, 0) >= qty for good, qty in assignment.goods().items())
