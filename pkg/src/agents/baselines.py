"""Controlled-experiment opponents and a do-nothing agent for engine tests."""

from src.agents.attac import AttacAgent
from src.agents.base import TradingAgent
from src.game.messages import AgentView, BidBatch
from src.market.goods import GoodId, to_cents


class HighBidderAgent(AttacAgent):
    """ATTac with hotel price prediction removed: G* always uses the current asks."""

    def effective_hotel_price(self, good: GoodId, ask: int) -> int:
        return ask


class LowBidderAgent(HighBidderAgent):
    """Like HighBidderAgent, but every hotel bid is exactly the ask plus a fixed increment."""

    def hotel_bid_price(self, good: GoodId, price: int, ask: int) -> int:
        return ask + to_cents(self.strategy.low_bid_increment)


class NullAgent(TradingAgent):
    def iterate(self, view: AgentView) -> BidBatch:
        return BidBatch()
