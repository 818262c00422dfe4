"""Flight auctions: unlimited supply, randomly walking ask, immediate clearing."""

from typing import List

import numpy as np

from src.market.goods import MARKET, GoodId
from src.market.records import Quote, Transaction

FLIGHT_MIN_PRICE = 15000
FLIGHT_MAX_PRICE = 60000
FLIGHT_MAX_STEP = 1000


class FlightAuction:
    """One flight auction.

    Args:
        good: The inflight or outflight this auction sells.
        ask: Starting ask in cents.
        rng: The auction's own seeded stream; only perturbations draw from it.
        perturb_period: Clock ticks between perturbations.
        step: "cents" draws the change uniformly over [-1000, +1000] cents,
            "dollars" over whole dollars in [-10, +10].
    """

    def __init__(
        self,
        good: GoodId,
        ask: int,
        rng: np.random.Generator,
        perturb_period: int = 10,
        step: str = "cents",
    ) -> None:
        if not good.is_flight:
            raise ValueError(f"{good} is not a flight")
        if step not in ("cents", "dollars"):
            raise ValueError(f"unknown flight step mode {step!r}")
        self.good = good
        self.ask = min(FLIGHT_MAX_PRICE, max(FLIGHT_MIN_PRICE, int(ask)))
        self.rng = rng
        self.perturb_period = perturb_period
        self.step = step
        self.closed = False

    def draw_step(self) -> int:
        if self.step == "dollars":
            return int(self.rng.integers(-10, 11)) * 100
        return int(self.rng.integers(-FLIGHT_MAX_STEP, FLIGHT_MAX_STEP + 1))

    def tick(self) -> "FlightAuction":
        """Apply one random perturbation, clamped to the $150-$600 band."""
        self.ask = min(FLIGHT_MAX_PRICE, max(FLIGHT_MIN_PRICE, self.ask + self.draw_step()))
        return self

    def buy(self, buyer: str, bid_price: int, qty: int, tick: int) -> List[Transaction]:
        """Clear at the ask when the bid is at or above it; otherwise discard the bid."""
        if qty < 1:
            raise ValueError(f"quantity must be at least 1, got {qty}")
        if self.closed or bid_price < self.ask:
            return []
        return [Transaction(self.good, buyer, MARKET, self.ask, 1, tick) for _ in range(qty)]

    def quote(self, tick: int) -> Quote:
        return Quote(self.good, None, self.ask, self.closed, tick)
