import logging
from collections import Counter
from typing import Dict, List, Optional

from src.agents.base import TradingAgent
from src.agents.predictor import (
    HighBidderDB,
    HotelPricePredictor,
    classify_high_bidders,
    save_state,
)
from src.agents.strategy import AgentMode, EntValueSchedule, TimingState, decide_mode, passive_hotel_target
from src.allocator import AdaptiveState, AllocationProblem, AllocationSolution, build_problem, final_allocation, solve_adaptive
from src.allocator.problem import TICKET_TYPES
from src.game.messages import AgentView, BidBatch, EntOrder, FlightBid, GameSummary, HotelBid
from src.game.preferences import PACKAGES, ClientAssignment
from src.market.entertainment import Side
from src.market.goods import FLIGHT_GOODS, HOTEL_GOODS, TICKET_GOODS, TRAVEL_INDEX, GoodId, to_cents
from src.utils.config import StrategyConfig

logger = logging.getLogger(__name__)


class AttacAgent(TradingAgent):
    """
    The two-mode ATTac bidder.

    Each iteration it solves for G*, the best allocation of owned plus
    purchasable goods, and bids from it: passively (cheap hotel rooms, ticket
    trades, no flights) until the time left fits only two more iterations, then
    actively (all needed flights, marginal-utility hotel bids).

    Args:
        name (str): Agent name in the roster.
        strategy (StrategyConfig): Thresholds, margins and solver settings.
        predictor (HotelPricePredictor): Closing-price model kept across games.
        db (HighBidderDB): Opponent hotel-bid history kept across games.
        state_path (str, optional): File the predictor and database are saved
            to after every game.
    """

    def __init__(
        self,
        name: str,
        strategy: Optional[StrategyConfig] = None,
        predictor: Optional[HotelPricePredictor] = None,
        db: Optional[HighBidderDB] = None,
        state_path: Optional[str] = None,
    ) -> None:
        super().__init__(name)
        self.strategy = strategy or StrategyConfig()
        self.predictor = predictor or HotelPricePredictor.from_strategy(self.strategy)
        self.db = db or HighBidderDB.from_strategy(self.strategy)
        self.state_path = state_path
        self.schedule = EntValueSchedule.from_strategy(self.strategy)
        self.adaptive = AdaptiveState.from_strategy(self.strategy)
        self.reset_game(0)

    def reset_game(self, seed: int) -> None:
        self.mode = AgentMode.PASSIVE
        self.timing = TimingState()
        self.adaptive.reset(seed)
        self.high_bidders: Optional[set] = None
        self.n_high = 0
        self.effective_prices: Dict[GoodId, int] = {}

    # Price hooks overridden by the baseline variants.

    def effective_hotel_price(self, good: GoodId, ask: int) -> int:
        """Price the allocator sees for an open hotel, in cents."""
        if not self.strategy.use_predictor or self.n_high < self.strategy.min_high_bidders:
            return ask
        predicted = self.predictor.predict_cents(good)
        return predicted if ask < predicted else ask

    def hotel_bid_price(self, good: GoodId, price: int, ask: int) -> int:
        return price

    # Iteration

    def iterate(self, view: AgentView) -> BidBatch:
        self.timing.observe(view.tick, view.seconds_per_tick)
        if self.high_bidders is None:
            self.n_high, self.high_bidders = classify_high_bidders(self.db, view.roster, exclude=self.name)
        mode = decide_mode(view.seconds_left, self.timing.mean_iteration, self.mode)
        if self.timing.should_skip(mode, view.seconds_left):
            return BidBatch()
        if mode is not self.mode:
            logger.info({"event": "mode_switch", "agent": self.name, "tick": view.tick, "mode": mode.value})
        self.mode = mode
        if mode is AgentMode.ACTIVE:
            self.timing.active_iterations += 1

        self.effective_prices = {
            good: self.effective_hotel_price(good, view.quotes[good].ask)
            for good in HOTEL_GOODS
            if self._open(view, good)
        }
        problem = build_problem(view, self.effective_prices)
        solution = solve_adaptive(problem, self.adaptive)
        return BidBatch(
            withdrawals=[order.order_id for order in view.own_orders],
            flights=self.flight_bids(view, solution),
            hotels=self.hotel_bids(view, problem, solution),
            entertainment=self.entertainment_bids(view, problem, solution),
        )

    def final_allocation(self, view: AgentView) -> List[ClientAssignment]:
        return final_allocation(build_problem(view), self.adaptive).assignments()

    def observe_game_result(self, summary: GameSummary) -> None:
        self.predictor.update(summary.hotel_closes)
        self.db.record_game({a: b for a, b in summary.max_hotel_bids.items() if a != self.name})
        if self.state_path:
            save_state(self.state_path, self.predictor, self.db)

    # Bid generation

    @staticmethod
    def _open(view: AgentView, good: GoodId) -> bool:
        quote = view.quotes.get(good)
        return quote is not None and not quote.closed

    def flight_bids(self, view: AgentView, solution: AllocationSolution) -> List[FlightBid]:
        if self.mode is AgentMode.PASSIVE:
            return []
        price = to_cents(self.strategy.flight_bid_price)
        bids = []
        for good in FLIGHT_GOODS:
            qty = int(solution.B[TRAVEL_INDEX[good]])
            if qty > 0 and self._open(view, good):
                bids.append(FlightBid(good, price, qty))
        return bids

    def hotel_bids(self, view: AgentView, problem: AllocationProblem, solution: AllocationSolution) -> List[HotelBid]:
        if self.mode is AgentMode.PASSIVE:
            return self._passive_hotel_bids(view, solution)
        return self._active_hotel_bids(view, problem, solution)

    def _passive_hotel_bids(self, view: AgentView, solution: AllocationSolution) -> List[HotelBid]:
        demand = solution.demand()
        increment = to_cents(self.strategy.hotel_increment)
        bids = []
        for good in HOTEL_GOODS:
            if not self._open(view, good):
                continue
            ask = view.quotes[good].ask
            needed = max(0, int(demand[TRAVEL_INDEX[good]]) - view.holdings.get(good, 0))
            target = passive_hotel_target(
                ask / 100.0, needed, self.strategy.passive_tiers, self.strategy.passive_zero_rooms
            )
            shortfall = target - view.hotel_winning.get(good, 0)
            if shortfall > 0:
                bids.append(HotelBid(good, self.hotel_bid_price(good, ask + increment, ask), shortfall))
        return bids

    def marginal_values(self, view: AgentView, problem: AllocationProblem, solution: AllocationSolution) -> Dict[GoodId, List[int]]:
        """Per open hotel, one price per room G* still needs: V(G*) - V(G* without that client's rooms)."""
        unit_prices: Dict[GoodId, List[int]] = {}
        for c in range(problem.n_clients):
            f = solution.package_of(c)
            if f is None:
                continue
            package = PACKAGES[f]
            rooms = [GoodId(package.hotel, night) for night in package.nights]
            rooms = [room for room in rooms if self._open(view, room)]
            if not rooms:
                continue
            nights = {room.day for room in rooms}
            barred = [
                g for g, other in enumerate(PACKAGES) if other.hotel is package.hotel and nights & set(other.nights)
            ]
            without = solve_adaptive(problem.with_barred(c, barred), self.adaptive)
            price = max(0, solution.value - without.value)
            for room in rooms:
                unit_prices.setdefault(room, []).append(price)
        return unit_prices

    def _active_hotel_bids(self, view: AgentView, problem: AllocationProblem, solution: AllocationSolution) -> List[HotelBid]:
        increment = to_cents(self.strategy.hotel_increment)
        bids = []
        for good, prices in self.marginal_values(view, problem, solution).items():
            ask = view.quotes[good].ask
            shortfall = len(prices) - view.hotel_winning.get(good, 0)
            if shortfall <= 0:
                continue
            units = Counter()
            for price in sorted(prices, reverse=True)[:shortfall]:
                price = price if price > ask else ask + increment
                units[self.hotel_bid_price(good, price, ask)] += 1
            # Ascending, so no unit raises the ask past a later unit of this batch.
            bids.extend(HotelBid(good, price, qty) for price, qty in sorted(units.items()))
        return bids

    def _others_best_bid(self, view: AgentView, good: GoodId) -> Optional[int]:
        bid = view.quotes[good].bid
        if bid is None:
            return None
        own = [o.price for o in view.own_orders if o.good == good and o.side is Side.BUY]
        if own and max(own) >= bid:
            return None
        return bid

    def _sell_price(self, dollars: float, standing_bid: Optional[int]) -> int:
        price = to_cents(dollars)
        if standing_bid is not None and standing_bid > price:
            price = standing_bid - to_cents(self.strategy.standing_bid_undercut)
        return min(to_cents(self.strategy.sell_cap), max(to_cents(self.strategy.sell_floor), price))

    def entertainment_bids(self, view: AgentView, problem: AllocationProblem, solution: AllocationSolution) -> List[EntOrder]:
        fraction_left = view.seconds_left / view.total_seconds if view.total_seconds else 0.0
        sell_alloc, sell_unalloc, buy_margin = self.schedule.deltas(fraction_left)
        sells: List[EntOrder] = []
        buys: List[EntOrder] = []
        for e, good in enumerate(TICKET_GOODS):
            if not self._open(view, good):
                continue
            standing_bid = self._others_best_bid(view, good)
            prices: Counter = Counter()
            allocated = [c for c in range(problem.n_clients) if solution.E[c, e]]
            for c in allocated:
                value = view.clients[c].ev[TICKET_TYPES[e]]
                prices[self._sell_price(min(self.strategy.sell_cap, value + sell_alloc), standing_bid)] += 1
            spare = view.holdings.get(good, 0) - len(allocated)
            if spare > 0:
                if self.mode is AgentMode.ACTIVE:
                    dollars = self.strategy.active_unneeded_price
                else:
                    best = max((client.ev[TICKET_TYPES[e]] for client in view.clients), default=0)
                    dollars = max(self.strategy.unalloc_floor, best - sell_unalloc)
                prices[self._sell_price(dollars, standing_bid)] += spare
            sells.extend(EntOrder(good, Side.SELL, price, qty) for price, qty in sorted(prices.items()))

            margin = to_cents(buy_margin)
            if problem.n_clients == 0 or int(problem.u_e[:, e].max()) <= margin:
                continue
            extra = solve_adaptive(problem.with_extra_ticket(e), self.adaptive)
            price = extra.value - solution.value - margin
            if price > 0:
                buys.append(EntOrder(good, Side.BUY, int(price), 1))
        return sells + buys
