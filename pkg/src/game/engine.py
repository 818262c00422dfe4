import heapq
import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from src.errors import AuctionClosed, BidTooLow, InsufficientHoldings, UnknownOrder
from src.game.messages import AgentView, BidBatch, GameSummary, OrderView
from src.game.preferences import ClientAssignment, generate_clients, generate_endowment, utility
from src.game.scoring import cash_flow, final_score, validate_allocation
from src.game.transcript import Transcript
from src.market import (
    ALL_GOODS,
    FLIGHT_GOODS,
    HOTEL_GOODS,
    MARKET,
    TICKET_GOODS,
    EntOrderBook,
    FlightAuction,
    GoodId,
    HotelAuction,
    Quote,
    Transaction,
)
from src.utils.config import GameConfig
from src.utils.seeding import derive_seed, substream

logger = logging.getLogger(__name__)

_MARKET_ERRORS = (AuctionClosed, BidTooLow, InsufficientHoldings, UnknownOrder, ValueError)


@dataclass
class GameResult:
    transcript: Transcript
    scores: Dict[str, int]  # cents
    utilities: Dict[str, int]  # dollars
    allocations: Dict[str, Dict[int, ClientAssignment]]
    summary: GameSummary


class TacGame:
    """
    One seeded game between eight agents over the 28 auctions.

    Every tick runs the same phases: flight perturbation, delivery of the bid
    batches due now, closing of idle hotels, then prompting the agents whose
    previous batch has just landed. A batch lands `latency` ticks after its
    prompt; one that would land at or after the end of the game is dropped.

    Args:
        config (GameConfig): Seed, clock, roster and market parameters.
        agents: One TradingAgent per roster name, as a mapping or a list.

    Methods:
        run(): Plays the game to the end and returns a GameResult.
        view_for(agent): What one agent may legally see at the current tick.
    """

    def __init__(self, config: GameConfig, agents: Union[Mapping[str, object], Iterable[object]]) -> None:
        self.config = config
        self.names: List[str] = [descriptor.name for descriptor in config.roster]
        self.agents = dict(agents) if isinstance(agents, Mapping) else {a.name: a for a in agents}
        if set(self.agents) != set(self.names):
            raise ValueError(f"agents {sorted(self.agents)} do not match roster {sorted(self.names)}")
        self.tick = 0
        seed = config.seed
        market = config.market

        self.flights: Dict[GoodId, FlightAuction] = {}
        for good in FLIGHT_GOODS:
            rng = substream(seed, f"flight:{good}")
            initial = int(rng.integers(market.flight_initial_min, market.flight_initial_max + 1)) * 100
            self.flights[good] = FlightAuction(good, initial, rng, market.flight_perturb_period, market.flight_step)
        self.hotels: Dict[GoodId, HotelAuction] = {good: HotelAuction(good) for good in HOTEL_GOODS}
        self.hotel_windows: Dict[GoodId, int] = {}
        for good in HOTEL_GOODS:
            jitter = 0
            if market.hotel_close_jitter:
                jitter = int(substream(seed, f"hotel_jitter:{good}").integers(0, market.hotel_close_jitter + 1))
            self.hotel_windows[good] = market.hotel_inactivity_ticks + jitter
        order_ids = itertools.count(1)
        self.books: Dict[GoodId, EntOrderBook] = {good: EntOrderBook(good, order_ids) for good in TICKET_GOODS}

        self.clients = {}
        self.holdings: Dict[str, Counter] = {}
        self.latency: Dict[str, int] = {}
        self.agent_seeds: Dict[str, int] = {}
        for slot, descriptor in enumerate(config.roster):
            name = descriptor.name
            self.clients[name] = tuple(generate_clients(substream(seed, f"clients:{slot}")))
            self.holdings[name] = generate_endowment(substream(seed, f"endowment:{slot}"), config.endowment_size)
            self.latency[name] = descriptor.latency or int(
                substream(seed, f"latency:{slot}").integers(config.latency_min, config.latency_max + 1)
            )
            self.agent_seeds[name] = derive_seed(seed, f"agent:{slot}")

        self.transactions: List[Transaction] = []
        self.cash: Dict[str, int] = {name: 0 for name in self.names}
        self.transcript = Transcript()
        self._tiebreak = substream(seed, "tiebreak")
        self._arrivals = itertools.count()
        self._pending: List[Tuple[int, float, int, str, BidBatch]] = []
        self._next_prompt: Dict[str, Optional[int]] = {name: 0 for name in self.names}
        self._quoted: Dict[GoodId, dict] = {}

    # Quotes and views

    def quote(self, good: GoodId) -> Quote:
        if good.is_flight:
            return self.flights[good].quote(self.tick)
        if good.is_hotel:
            return self.hotels[good].quote(self.tick)
        return self.books[good].quote(self.tick)

    def view_for(self, agent: str) -> AgentView:
        own_orders = tuple(
            OrderView(order.order_id, good, order.side, order.price, order.qty)
            for good, book in self.books.items()
            for order in book.orders_of(agent)
        )
        return AgentView(
            agent=agent,
            tick=self.tick,
            ticks_per_game=self.config.ticks_per_game,
            seconds_per_tick=self.config.seconds_per_tick,
            clients=self.clients[agent],
            holdings=Counter({g: q for g, q in self.holdings[agent].items() if q > 0}),
            quotes={good: self.quote(good) for good in ALL_GOODS},
            hotel_winning={
                good: auction.winning_units(agent) for good, auction in self.hotels.items() if not auction.closed
            },
            own_orders=own_orders,
            roster=tuple(self.names),
            rng_seed=self.agent_seeds[agent],
            balance=self.cash[agent],
        )

    def _record_quotes(self) -> None:
        for good in ALL_GOODS:
            record = self.quote(good).to_record()
            if self._quoted.get(good) != record:
                self._quoted[good] = record
                self.transcript.append("quote", self.tick, **record)

    # Market operations

    def _settle(self, trade: Transaction) -> None:
        self.transactions.append(trade)
        if trade.buyer != MARKET:
            self.holdings[trade.buyer][trade.good] += trade.qty
            self.cash[trade.buyer] -= trade.price * trade.qty
        if trade.seller != MARKET:
            self.holdings[trade.seller][trade.good] -= trade.qty
            self.cash[trade.seller] += trade.price * trade.qty
        self.transcript.append("trade", self.tick, **trade.to_record())

    def _reject(self, agent: str, good: Optional[GoodId], reason: str, price: Optional[int], qty: Optional[int]) -> None:
        logger.debug({"event": "bid_rejected", "agent": agent, "good": str(good), "reason": reason})
        self.transcript.append(
            "reject", self.tick, agent=agent, good=str(good) if good else None, reason=reason, price=price, qty=qty
        )

    def _withdraw(self, agent: str, order_id: int) -> None:
        self.transcript.append("withdraw", self.tick, agent=agent, order_id=order_id)
        for book in self.books.values():
            if any(order.order_id == order_id for order in book.orders_of(agent)):
                book.withdraw(agent, order_id)
                return
        self._reject(agent, None, UnknownOrder.__name__, None, None)

    def apply_batch(self, agent: str, batch: BidBatch) -> None:
        t = self.tick
        for order_id in batch.withdrawals:
            self._withdraw(agent, order_id)
        for bid in batch.flights:
            self.transcript.append("flight_bid", t, agent=agent, good=str(bid.good), price=bid.price, qty=bid.qty)
            try:
                trades = self.flights[bid.good].buy(agent, bid.price, bid.qty, t)
            except _MARKET_ERRORS as exc:
                self._reject(agent, bid.good, type(exc).__name__, bid.price, bid.qty)
                continue
            if not trades:
                self._reject(agent, bid.good, "BelowAsk", bid.price, bid.qty)
            for trade in trades:
                self._settle(trade)
        for bid in batch.hotels:
            self.transcript.append("hotel_bid", t, agent=agent, good=str(bid.good), price=bid.price, qty=bid.qty)
            try:
                self.hotels[bid.good].submit(agent, bid.price, bid.qty, t)
            except _MARKET_ERRORS as exc:
                self._reject(agent, bid.good, type(exc).__name__, bid.price, bid.qty)
        for order in batch.entertainment:
            self.transcript.append(
                "cda_order", t, agent=agent, good=str(order.good), side=order.side.value, price=order.price, qty=order.qty
            )
            try:
                trades = self.books[order.good].submit(
                    agent, order.side, order.price, order.qty, t, self.holdings[agent][order.good]
                )
            except _MARKET_ERRORS as exc:
                self._reject(agent, order.good, type(exc).__name__, order.price, order.qty)
                continue
            for trade in trades:
                self._settle(trade)

    def _close_hotel(self, good: GoodId) -> None:
        auction = self.hotels[good]
        for trade in auction.close(self.tick):
            self._settle(trade)
        self.transcript.append("close", self.tick, good=str(good), price=auction.close_price)
        logger.debug({"event": "hotel_closed", "good": str(good), "tick": self.tick, "price": auction.close_price})

    # Clock

    def _deliver(self) -> None:
        while self._pending and self._pending[0][0] == self.tick:
            _, _, _, agent, batch = heapq.heappop(self._pending)
            self.apply_batch(agent, batch)

    def _close_idle_hotels(self) -> None:
        for good, auction in self.hotels.items():
            if not auction.closed and self.tick - auction.last_activity >= self.hotel_windows[good]:
                self._close_hotel(good)

    def _prompt_agents(self) -> None:
        for name in self.names:
            if self._next_prompt[name] != self.tick:
                continue
            try:
                batch = self.agents[name].iterate(self.view_for(name))
            except Exception as exc:
                logger.warning({"event": "agent_failed", "agent": name, "tick": self.tick, "error": repr(exc)})
                batch = BidBatch()
            due = self.tick + self.latency[name]
            if due >= self.config.ticks_per_game:
                self.transcript.append("late", self.tick, agent=name, due=due)
                self._next_prompt[name] = None
                continue
            heapq.heappush(self._pending, (due, float(self._tiebreak.random()), next(self._arrivals), name, batch))
            self._next_prompt[name] = due

    def _close_all(self) -> None:
        for good, auction in self.hotels.items():
            if not auction.closed:
                self._close_hotel(good)
        for good, flight in self.flights.items():
            flight.closed = True
            self.transcript.append("close", self.tick, good=str(good), price=flight.ask)
        for good, book in self.books.items():
            book.close()
            self.transcript.append("close", self.tick, good=str(good), price=None)

    # Lifecycle

    def _record_start(self) -> None:
        self.transcript.append(
            "game_start",
            0,
            seed=self.config.seed,
            ticks_per_game=self.config.ticks_per_game,
            seconds_per_tick=self.config.seconds_per_tick,
            agents=self.names,
            latency=self.latency,
            clients={name: [c.to_record() for c in self.clients[name]] for name in self.names},
            endowments={
                name: {str(g): q for g, q in sorted(self.holdings[name].items(), key=lambda kv: str(kv[0]))}
                for name in self.names
            },
        )

    def _score(self) -> GameResult:
        scores: Dict[str, int] = {}
        utilities: Dict[str, int] = {}
        allocations: Dict[str, Dict[int, ClientAssignment]] = {}
        for name in self.names:
            try:
                submitted = self.agents[name].final_allocation(self.view_for(name))
            except Exception as exc:
                logger.warning({"event": "allocation_failed", "agent": name, "error": repr(exc)})
                submitted = []
            clients = self.clients[name]
            accepted, problems = validate_allocation(clients, submitted, self.holdings[name])
            if problems:
                logger.warning({"event": "invalid_allocation", "agent": name, "problems": problems})
            allocations[name] = accepted
            utilities[name] = sum(utility(clients[c - 1], a) for c, a in accepted.items())
            spent, earned = cash_flow(self.transactions, name)
            scores[name] = final_score(utilities[name], self.transactions, name)
            for c in range(1, len(clients) + 1):
                record = accepted.get(c, ClientAssignment(c)).to_record()
                self.transcript.append("allocation", self.tick, agent=name, **record)
            self.transcript.append(
                "score", self.tick, agent=name, utility=utilities[name], spent=spent, earned=earned, score=scores[name]
            )
        self.transcript.append("game_end", self.tick, scores=scores)
        summary = GameSummary(
            seed=self.config.seed,
            roster=tuple(self.names),
            hotel_closes={good: auction.close_price or 0 for good, auction in self.hotels.items()},
            max_hotel_bids={name: max(a.max_bid(name) for a in self.hotels.values()) for name in self.names},
            scores=dict(scores),
        )
        return GameResult(self.transcript, scores, utilities, allocations, summary)

    def run(self) -> GameResult:
        logger.info({"event": "game_start", "seed": self.config.seed, "roster": self.names})
        for name in self.names:
            self.agents[name].reset_game(self.agent_seeds[name])
        self._record_start()
        self._record_quotes()
        period = self.config.market.flight_perturb_period
        for t in range(self.config.ticks_per_game):
            self.tick = t
            if t > 0 and t % period == 0:
                for flight in self.flights.values():
                    flight.tick()
            self._deliver()
            self._close_idle_hotels()
            self._record_quotes()
            self._prompt_agents()
        self.tick = self.config.ticks_per_game
        self._close_all()
        self._record_quotes()
        result = self._score()
        for name in self.names:
            try:
                self.agents[name].observe_game_result(result.summary)
            except Exception as exc:
                logger.warning({"event": "observe_failed", "agent": name, "error": repr(exc)})
        logger.info({"event": "game_end", "seed": self.config.seed, "scores": result.scores})
        return result


def run_game(config: GameConfig, agents) -> GameResult:
    return TacGame(config, agents).run()
