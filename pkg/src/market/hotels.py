"""16th-price ascending hotel auctions."""

import bisect
from dataclasses import dataclass
from typing import List, Optional, Tuple

from src.errors import AuctionClosed, BidTooLow
from src.market.goods import MARKET, GoodId
from src.market.records import Quote, Transaction

HOTEL_ROOMS = 16


@dataclass(frozen=True)
class UnitBid:
    agent: str
    price: int
    seq: int


class HotelAuction:
    """Multi-unit English auction for one hotel night.

    Every unit bid stays until close. The ask is the 16th-highest unit price
    (0 while fewer than 16 units stand); the 16 highest units win at that price,
    earlier arrivals first among equal prices.
    """

    def __init__(self, good: GoodId, rooms: int = HOTEL_ROOMS) -> None:
        if not good.is_hotel:
            raise ValueError(f"{good} is not a hotel")
        self.good = good
        self.rooms = rooms
        self.bids: List[UnitBid] = []
        # (-price, seq) keys kept sorted alongside self._ranked
        self._keys: List[Tuple[int, int]] = []
        self._ranked: List[UnitBid] = []
        self._seq = 0
        self.last_activity = 0
        self.closed = False
        self.close_price: Optional[int] = None

    @property
    def ask(self) -> int:
        if self.closed:
            return self.close_price or 0
        if len(self._ranked) < self.rooms:
            return 0
        return self._ranked[self.rooms - 1].price

    def submit(self, agent: str, price: int, qty: int, tick: int) -> bool:
        if self.closed:
            raise AuctionClosed(f"{self.good} closed")
        if qty < 1:
            raise ValueError(f"quantity must be at least 1, got {qty}")
        ask = self.ask
        if price <= ask:
            raise BidTooLow(self.good, price, ask)
        for _ in range(qty):
            self._seq += 1
            unit = UnitBid(agent, int(price), self._seq)
            key = (-unit.price, unit.seq)
            at = bisect.bisect(self._keys, key)
            self._keys.insert(at, key)
            self._ranked.insert(at, unit)
            self.bids.append(unit)
        self.last_activity = tick
        return True

    def winning_units(self, agent: str) -> int:
        """Units of `agent` that would win if the auction closed now."""
        return sum(1 for unit in self._ranked[: self.rooms] if unit.agent == agent)

    def max_bid(self, agent: str) -> int:
        return max((unit.price for unit in self.bids if unit.agent == agent), default=0)

    def close(self, tick: int) -> List[Transaction]:
        if self.closed:
            raise AuctionClosed(f"{self.good} already closed")
        winners = self._ranked[: self.rooms]
        self.close_price = self._ranked[self.rooms - 1].price if len(self._ranked) >= self.rooms else 0
        self.closed = True
        return [Transaction(self.good, unit.agent, MARKET, self.close_price, 1, tick) for unit in winners]

    def quote(self, tick: int) -> Quote:
        return Quote(self.good, None, self.ask, self.closed, tick)
