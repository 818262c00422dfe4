import pytest

from src.agents import NullAgent
from src.agents.base import TradingAgent
from src.game.engine import TacGame, run_game
from src.game.messages import BidBatch, EntOrder, FlightBid, HotelBid
from src.game.preferences import ClientAssignment, TravelPackage
from src.market import Side
from src.market.goods import HOTEL_GOODS, GoodId
from src.utils.config import AgentDescriptor, default_game_config

IN1, OUT2, LFI1 = GoodId.parse("in1"), GoodId.parse("out2"), GoodId.parse("LFI1")


class ScriptedAgent(TradingAgent):
    """Plays `script(view, iteration)` and remembers every view it was shown."""

    def __init__(self, name, script=None, allocation=None):
        super().__init__(name)
        self.script = script or (lambda view, n: BidBatch())
        self.allocation = allocation or []
        self.views = []

    def iterate(self, view):
        self.views.append(view)
        return self.script(view, len(self.views) - 1)

    def final_allocation(self, view):
        return self.allocation


def roster(latencies=None, ticks=30, seed=7):
    latencies = latencies or {}
    descriptors = [
        AgentDescriptor(name=f"agent-{i}", variant="null", latency=latencies.get(f"agent-{i}", 2)) for i in range(1, 9)
    ]
    return default_game_config(descriptors, seed=seed, ticks_per_game=ticks)


def null_agents(config):
    return {d.name: NullAgent(d.name) for d in config.roster}


def test_null_agents_score_zero(short_config):
    result = run_game(short_config, null_agents(short_config))
    assert set(result.scores.values()) == {0}
    assert result.transcript.records[0]["type"] == "game_start"
    assert result.transcript.records[-1]["type"] == "game_end"
    assert result.summary.hotel_closes == {good: 0 for good in HOTEL_GOODS}


def test_same_seed_same_transcript(short_config):
    first = run_game(short_config, null_agents(short_config))
    second = run_game(short_config, null_agents(short_config))
    assert first.transcript.text() == second.transcript.text()


def test_different_seeds_draw_different_games(short_config):
    first = run_game(short_config, null_agents(short_config))
    other = short_config.with_seed(8)
    second = run_game(other, null_agents(other))
    assert first.transcript.records[0]["clients"] != second.transcript.records[0]["clients"]


def test_idle_hotels_close_after_the_inactivity_window(short_config):
    result = run_game(short_config, null_agents(short_config))
    closes = [r for r in result.transcript.of_type("close") if GoodId.parse(r["good"]).is_hotel]
    assert len(closes) == 8
    assert {r["tick"] for r in closes} == {12}


def test_scripted_travel_purchases_are_settled_and_scored():
    config = roster()

    def buy(view, n):
        if n:
            return BidBatch()
        return BidBatch(flights=[FlightBid(IN1, 60000, 1), FlightBid(OUT2, 60000, 1)], hotels=[HotelBid(LFI1, 10000, 1)])

    package = ClientAssignment(1, TravelPackage.parse("1-2-LFI"))
    agents = null_agents(config)
    agents["agent-1"] = ScriptedAgent("agent-1", buy, [package])
    game = TacGame(config, agents)
    result = game.run()

    assert game.holdings["agent-1"][IN1] == 1
    assert game.holdings["agent-1"][LFI1] == 1
    paid = [t for t in game.transactions if t.buyer == "agent-1"]
    assert {t.good for t in paid} == {IN1, OUT2, LFI1}
    # Too few bids for sixteen rooms: the room is free.
    assert [t.price for t in paid if t.good == LFI1] == [0]
    assert result.allocations["agent-1"] == {1: package}
    assert result.scores["agent-1"] == result.utilities["agent-1"] * 100 - sum(t.price for t in paid)


def test_tickets_change_hands_at_the_resting_price():
    config = roster()
    agents = null_agents(config)

    def sell(view, n):
        if n:
            return BidBatch()
        ticket = min((g for g in view.holdings if g.is_entertainment), key=str)
        return BidBatch(entertainment=[EntOrder(ticket, Side.SELL, 5000, 1)])

    def buy(view, n):
        offered = [g for g, q in view.quotes.items() if g.is_entertainment and q.ask is not None]
        if not offered:
            return BidBatch()
        return BidBatch(entertainment=[EntOrder(offered[0], Side.BUY, 20000, 1)])

    agents["agent-1"] = ScriptedAgent("agent-1", sell)
    agents["agent-2"] = ScriptedAgent("agent-2", buy)
    game = TacGame(config, agents)
    result = game.run()

    [trade] = [t for t in game.transactions if t.seller == "agent-1"]
    assert (trade.buyer, trade.price, trade.qty) == ("agent-2", 5000, 1)
    assert result.scores["agent-1"] == 5000
    assert result.scores["agent-2"] == -5000
    assert sum(game.cash.values()) == 0


def test_batches_landing_after_the_end_are_dropped():
    config = roster(latencies={"agent-1": 13}, ticks=12)
    agents = null_agents(config)
    scripted = ScriptedAgent("agent-1", lambda view, n: BidBatch(flights=[FlightBid(IN1, 60000, 1)]))
    agents["agent-1"] = scripted
    game = TacGame(config, agents)
    result = game.run()

    [late] = result.transcript.of_type("late")
    assert (late["agent"], late["due"]) == ("agent-1", 13)
    assert len(scripted.views) == 1
    assert game.holdings["agent-1"][IN1] == 0


def test_failing_agent_does_not_stop_the_game():
    class Broken(TradingAgent):
        def iterate(self, view):
            raise RuntimeError("boom")

        def final_allocation(self, view):
            raise RuntimeError("boom")

    config = roster()
    agents = null_agents(config)
    agents["agent-3"] = Broken("agent-3")
    result = run_game(config, agents)
    assert result.scores["agent-3"] == 0
    assert result.transcript.records[-1]["type"] == "game_end"


def test_rejected_bids_are_recorded():
    config = roster()
    agents = null_agents(config)
    agents["agent-1"] = ScriptedAgent("agent-1", lambda view, n: BidBatch(flights=[FlightBid(IN1, 100, 1)]))
    result = run_game(config, agents)
    rejects = result.transcript.of_type("reject")
    assert rejects and all(r["reason"] == "BelowAsk" and r["agent"] == "agent-1" for r in rejects)


def test_agents_only_see_their_own_clients_and_goods():
    config = roster()
    agents = {d.name: ScriptedAgent(d.name) for d in config.roster}
    result = run_game(config, agents)
    start = result.transcript.records[0]
    for name, agent in agents.items():
        first = agent.views[0]
        assert first.agent == name
        assert [c.to_record() for c in first.clients] == start["clients"][name]
        assert {str(g): q for g, q in first.holdings.items()} == {g: q for g, q in start["endowments"][name].items() if q > 0}
        assert first.roster == tuple(start["agents"])


def test_engine_refuses_agents_missing_from_the_roster(short_config):
    agents = null_agents(short_config)
    agents.pop("null-1")
    with pytest.raises(ValueError):
        TacGame(short_config, agents)
