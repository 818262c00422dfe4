"""What agents see and what they send back."""

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

from src.game.preferences import ClientPreference
from src.market.entertainment import Side
from src.market.goods import GoodId
from src.market.records import Quote


@dataclass(frozen=True)
class OrderView:
    """One of the agent's own resting CDA orders."""

    order_id: int
    good: GoodId
    side: Side
    price: int
    qty: int


@dataclass(frozen=True)
class AgentView:
    """Everything one agent may legally see at one tick."""

    agent: str
    tick: int
    ticks_per_game: int
    seconds_per_tick: float
    clients: Tuple[ClientPreference, ...]
    holdings: Mapping[GoodId, int]
    quotes: Mapping[GoodId, Quote]
    hotel_winning: Mapping[GoodId, int]
    own_orders: Tuple[OrderView, ...]
    roster: Tuple[str, ...]
    rng_seed: int
    balance: int = 0

    @property
    def seconds_left(self) -> float:
        return max(0, self.ticks_per_game - self.tick) * self.seconds_per_tick

    @property
    def total_seconds(self) -> float:
        return self.ticks_per_game * self.seconds_per_tick


@dataclass(frozen=True)
class FlightBid:
    good: GoodId
    price: int
    qty: int


@dataclass(frozen=True)
class HotelBid:
    good: GoodId
    price: int
    qty: int


@dataclass(frozen=True)
class EntOrder:
    good: GoodId
    side: Side
    price: int
    qty: int


@dataclass
class BidBatch:
    """One iteration's worth of market messages, applied in field order."""

    withdrawals: List[int] = field(default_factory=list)
    flights: List[FlightBid] = field(default_factory=list)
    hotels: List[HotelBid] = field(default_factory=list)
    entertainment: List[EntOrder] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.withdrawals or self.flights or self.hotels or self.entertainment)


@dataclass(frozen=True)
class GameSummary:
    """Public after-game data every agent receives."""

    seed: int
    roster: Tuple[str, ...]
    hotel_closes: Dict[GoodId, int]
    max_hotel_bids: Dict[str, int]
    scores: Dict[str, int]
