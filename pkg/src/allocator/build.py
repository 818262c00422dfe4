from typing import Mapping, Optional

from src.allocator.problem import UNPURCHASABLE, AllocationProblem
from src.game.messages import AgentView
from src.market.goods import TRAVEL_GOODS, GoodId


def current_prices(view: AgentView, effective_prices: Optional[Mapping[GoodId, int]] = None) -> dict:
    """Purchase price per travel good in cents; closed auctions cannot be bought from."""
    effective_prices = effective_prices or {}
    prices = {}
    for good in TRAVEL_GOODS:
        quote = view.quotes.get(good)
        if quote is None or quote.closed or quote.ask is None:
            prices[good] = UNPURCHASABLE
        elif good.is_hotel and good in effective_prices:
            prices[good] = effective_prices[good]
        else:
            prices[good] = quote.ask
    return prices


def build_problem(view: AgentView, effective_prices: Optional[Mapping[GoodId, int]] = None) -> AllocationProblem:
    """The allocation program for what `view` owns at the prices it sees.

    `effective_prices` replaces the ask of open hotel auctions (predicted
    closing prices); flights always use the current ask.
    """
    return AllocationProblem.for_clients(view.clients, view.holdings, current_prices(view, effective_prices))
