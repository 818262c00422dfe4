"""Continuous double auctions for entertainment tickets."""

import enum
import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional

from src.errors import AuctionClosed, InsufficientHoldings, UnknownOrder
from src.market.goods import GoodId
from src.market.records import Quote, Transaction

logger = logging.getLogger(__name__)


class Side(str, enum.Enum):
    BUY = "buy"
    SELL = "sell"


@dataclass
class RestingOrder:
    order_id: int
    agent: str
    side: Side
    price: int
    qty: int
    seq: int


class EntOrderBook:
    """Order book for one (day, event) ticket.

    Crossing orders trade at the standing order's price, best price first and
    earliest arrival among equal prices. An agent's incoming order skips its own
    resting orders; if the residual would then rest across one of them it is
    dropped instead, so the book never crosses.

    Args:
        good: The ticket this book trades.
        order_ids: Shared counter so order references are unique across books.
    """

    def __init__(self, good: GoodId, order_ids: Optional[Iterator[int]] = None) -> None:
        if not good.is_entertainment:
            raise ValueError(f"{good} is not an entertainment ticket")
        self.good = good
        self.buy_orders: List[RestingOrder] = []
        self.sell_orders: List[RestingOrder] = []
        self._order_ids = order_ids if order_ids is not None else itertools.count(1)
        self._seq = itertools.count(1)
        self.closed = False

    @property
    def best_bid(self) -> Optional[int]:
        return self.buy_orders[0].price if self.buy_orders else None

    @property
    def best_ask(self) -> Optional[int]:
        return self.sell_orders[0].price if self.sell_orders else None

    def standing_sells(self, agent: str) -> int:
        return sum(order.qty for order in self.sell_orders if order.agent == agent)

    def orders_of(self, agent: str) -> List[RestingOrder]:
        return [o for o in self.buy_orders + self.sell_orders if o.agent == agent]

    def submit(
        self,
        agent: str,
        side: Side,
        price: int,
        qty: int,
        tick: int,
        holdings: int = 0,
    ) -> List[Transaction]:
        """Match an incoming order, resting any residual.

        `holdings` is the agent's current ticket count; a sell must fit inside
        it net of the agent's other standing sells.
        """
        if self.closed:
            raise AuctionClosed(f"{self.good} closed")
        if qty < 1:
            raise ValueError(f"quantity must be at least 1, got {qty}")
        if price < 0:
            raise ValueError(f"negative price {price}")
        side = Side(side)
        if side is Side.SELL and qty > holdings - self.standing_sells(agent):
            raise InsufficientHoldings(
                f"{agent} cannot sell {qty} x {self.good}: holds {holdings}, "
                f"{self.standing_sells(agent)} already offered"
            )

        opposite = self.sell_orders if side is Side.BUY else self.buy_orders

        def crosses(resting_price: int) -> bool:
            return resting_price <= price if side is Side.BUY else resting_price >= price

        trades: List[Transaction] = []
        i = 0
        while qty > 0 and i < len(opposite):
            resting = opposite[i]
            if not crosses(resting.price):
                break
            if resting.agent == agent:
                i += 1
                continue
            fill = min(qty, resting.qty)
            buyer, seller = (agent, resting.agent) if side is Side.BUY else (resting.agent, agent)
            trades.append(Transaction(self.good, buyer, seller, resting.price, fill, tick))
            resting.qty -= fill
            qty -= fill
            if resting.qty == 0:
                opposite.pop(i)

        if qty > 0:
            if opposite and crosses(opposite[0].price):
                logger.debug(
                    {"event": "self_cross_dropped", "good": str(self.good), "agent": agent, "qty": qty}
                )
            else:
                self._rest(RestingOrder(next(self._order_ids), agent, side, int(price), qty, next(self._seq)))
        return trades

    def _rest(self, order: RestingOrder) -> None:
        if order.side is Side.BUY:
            self.buy_orders.append(order)
            self.buy_orders.sort(key=lambda o: (-o.price, o.seq))
        else:
            self.sell_orders.append(order)
            self.sell_orders.sort(key=lambda o: (o.price, o.seq))

    def withdraw(self, agent: str, order_id: int) -> RestingOrder:
        for orders in (self.buy_orders, self.sell_orders):
            for i, order in enumerate(orders):
                if order.order_id == order_id and order.agent == agent:
                    return orders.pop(i)
        raise UnknownOrder(f"{agent} has no resting order {order_id} on {self.good}")

    def close(self) -> None:
        self.buy_orders.clear()
        self.sell_orders.clear()
        self.closed = True

    def quote(self, tick: int) -> Quote:
        return Quote(self.good, self.best_bid, self.best_ask, self.closed, tick)
