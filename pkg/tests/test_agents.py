import pytest

from src.agents import AttacAgent, HighBidderAgent, LowBidderAgent, NullAgent, create_agent
from src.agents.strategy import AgentMode
from src.game.messages import EntOrder, FlightBid, GameSummary, HotelBid, OrderView
from src.game.preferences import ClientPreference
from src.market import HotelAuction
from src.market.entertainment import Side
from src.market.goods import HOTEL_GOODS, TRAVEL_GOODS, TRAVEL_INDEX, GoodId
from src.utils.config import AgentDescriptor, StrategyConfig, default_game_config
from src.utils.game_utils import build_agents, play_game

B1 = GoodId.parse("B1")
BGH1 = GoodId.parse("BGH1")
STRATEGY = StrategyConfig(greedy_orderings=5)


@pytest.fixture
def attac():
    return AttacAgent("attac", STRATEGY)


def test_passive_iteration_holds_cheap_rooms_and_buys_no_flights(attac, make_view):
    clients = [ClientPreference(1, 3, 80, (10, 20, 30)), ClientPreference(2, 4, 120, (40, 50, 60))]
    batch = attac.iterate(make_view(clients))

    assert attac.mode is AgentMode.PASSIVE
    assert batch.flights == []
    assert batch.hotels == [HotelBid(good, 100, 8) for good in HOTEL_GOODS]
    assert batch.entertainment == []


def test_passive_bids_only_for_the_rooms_not_already_winning(attac, make_view):
    clients = [ClientPreference(1, 3, 80, (10, 20, 30))]
    winning = {good: 8 for good in HOTEL_GOODS}
    winning[BGH1] = 5
    batch = attac.iterate(make_view(clients, hotel_winning=winning))
    assert batch.hotels == [HotelBid(BGH1, 100, 3)]


def test_active_iteration_buys_flights_and_bids_marginal_values(attac, make_view):
    attac.mode = AgentMode.ACTIVE
    client = [ClientPreference(1, 2, 100, (0, 0, 0))]
    batch = attac.iterate(make_view(client))

    assert batch.flights == [FlightBid(GoodId.parse("in1"), 60000, 1), FlightBid(GoodId.parse("out2"), 60000, 1)]
    # Losing BGH1 leaves the LFI stay, $100 less valuable.
    assert batch.hotels == [HotelBid(BGH1, 10000, 1)]


def test_marginal_bid_never_drops_below_the_ask(attac, make_view):
    attac.mode = AgentMode.ACTIVE
    client = [ClientPreference(1, 2, 100, (0, 0, 0))]
    asks = {BGH1: 20000, GoodId.parse("LFI1"): 15000}
    batch = attac.iterate(make_view(client, asks=asks))
    for bid in batch.hotels:
        assert bid.price > asks.get(bid.good, 0)


def _ticket_view(make_view, **kwargs):
    client = [ClientPreference(1, 2, 100, (100, 0, 0))]
    return make_view(client, holdings={B1: 1}, closed=set(TRAVEL_GOODS), **kwargs)


def test_spare_tickets_sell_near_their_best_value_while_passive(attac, make_view):
    batch = attac.iterate(_ticket_view(make_view))
    assert batch.entertainment == [EntOrder(B1, Side.SELL, 10000, 1)]
    assert batch.hotels == [] and batch.flights == []


def test_spare_tickets_are_dumped_when_active(attac, make_view):
    attac.mode = AgentMode.ACTIVE
    batch = attac.iterate(_ticket_view(make_view))
    assert batch.entertainment == [EntOrder(B1, Side.SELL, 3000, 1)]


def test_sells_undercut_a_higher_standing_bid(attac, make_view):
    batch = attac.iterate(_ticket_view(make_view, bids={B1: 15000}))
    assert batch.entertainment == [EntOrder(B1, Side.SELL, 14999, 1)]


def test_buys_when_a_ticket_is_worth_more_than_the_margin(attac, make_view):
    client = [ClientPreference(1, 2, 100, (180, 0, 0))]
    view = make_view(client, holdings={GoodId.parse("in1"): 1, GoodId.parse("out2"): 1, GoodId.parse("LFI1"): 1})
    buys = [o for o in attac.iterate(view).entertainment if o.side is Side.BUY]
    # Only baseball on day 1 fits the stay: $180 of fun minus the $100 margin.
    assert buys == [EntOrder(B1, Side.BUY, 8000, 1)]


def test_withdraws_its_standing_orders_every_iteration(attac, make_view):
    orders = (OrderView(7, B1, Side.SELL, 9000, 1),)
    batch = attac.iterate(_ticket_view(make_view, own_orders=orders))
    assert batch.withdrawals == [7]


def test_predicted_prices_replace_low_asks_only_among_many_high_bidders(attac):
    attac.n_high = 3
    assert attac.effective_hotel_price(BGH1, 1000) == 15000
    assert attac.effective_hotel_price(BGH1, 20000) == 20000
    attac.n_high = 2
    assert attac.effective_hotel_price(BGH1, 1000) == 1000


def test_high_bidder_ignores_predictions():
    agent = HighBidderAgent("high-1", STRATEGY)
    agent.n_high = 7
    assert agent.effective_hotel_price(BGH1, 1000) == 1000
    assert agent.hotel_bid_price(BGH1, 90000, 1000) == 90000


def test_low_bidder_bids_the_ask_plus_its_increment(make_view):
    agent = LowBidderAgent("low-1", STRATEGY)
    assert agent.hotel_bid_price(BGH1, 90000, 1000) == 6000
    clients = [ClientPreference(1, 3, 80, (10, 20, 30))]
    batch = agent.iterate(make_view(clients))
    assert batch.hotels == [HotelBid(good, 5000, 8) for good in HOTEL_GOODS]


def test_game_results_update_predictor_and_opponent_history(attac):
    summary = GameSummary(
        seed=1,
        roster=("attac", "high-1"),
        hotel_closes={good: 50000 for good in HOTEL_GOODS},
        max_hotel_bids={"attac": 90000, "high-1": 100000},
        scores={"attac": 0, "high-1": 0},
    )
    attac.observe_game_result(summary)
    assert attac.predictor.predict(BGH1) == pytest.approx(0.7 * 150 + 0.3 * 500)
    assert "attac" not in attac.db.max_bids
    assert attac.db.max_bids["high-1"] == [100000]


def test_reset_restores_passive_mode(attac):
    attac.mode = AgentMode.ACTIVE
    attac.reset_game(3)
    assert attac.mode is AgentMode.PASSIVE
    assert attac.adaptive.seed == 3


@pytest.mark.parametrize(
    "variant, cls", [("attac", AttacAgent), ("high", HighBidderAgent), ("low", LowBidderAgent), ("null", NullAgent)]
)
def test_factory_builds_each_variant(variant, cls):
    agent = create_agent(AgentDescriptor(name="x", variant=variant), STRATEGY)
    assert type(agent) is cls
    assert agent.name == "x"


def test_factory_refuses_remote_slots():
    with pytest.raises(ValueError):
        create_agent(AgentDescriptor(name="x", variant="remote"))


def test_sunk_flights_push_high_bidder_hotel_prices_past_1000(make_view):
    client = [ClientPreference(1, 2, 100, (0, 0, 0))]
    holdings = {GoodId.parse("in1"): 1, GoodId.parse("out2"): 1}
    # Flights are bought and the other hotel is gone: no substitute stay is left.
    closed = {good for good in TRAVEL_GOODS if good.is_flight} | {GoodId.parse("LFI1")}
    auction = HotelAuction(BGH1)
    for i in range(16):
        agent = HighBidderAgent(f"high-{i}", STRATEGY)
        agent.mode = AgentMode.ACTIVE
        view = make_view(client, holdings=holdings, closed=closed, asks={BGH1: auction.ask})
        assert agent.iterate(view).hotels == [HotelBid(BGH1, 110000, 1)]
        auction.submit(agent.name, 110000, 1, tick=i)
    assert {t.price for t in auction.close(tick=16)} == {110000}


FAST_STRATEGY = StrategyConfig(greedy_orderings=3, demotion_seconds=0.1)
GAME_TICKS = 48
ROSTER = [AgentDescriptor(name="attac", latency=3)] + [
    AgentDescriptor(name=f"low-{i}", variant="low", latency=3 + i) for i in range(1, 8)
]


def _record_iterations(agent):
    """Keep (view, mode after the call, batch, rooms G* still needs) for every iteration."""
    log = []
    needs = {}
    iterate, hotel_bids = agent.iterate, agent.hotel_bids

    def recording_hotel_bids(view, problem, solution):
        demand = solution.demand()
        needs[view.tick] = {
            good: max(0, int(demand[TRAVEL_INDEX[good]]) - view.holdings.get(good, 0)) for good in HOTEL_GOODS
        }
        return hotel_bids(view, problem, solution)

    def recording_iterate(view):
        batch = iterate(view)
        log.append((view, agent.mode, batch, needs.get(view.tick)))
        return batch

    agent.hotel_bids = recording_hotel_bids
    agent.iterate = recording_iterate
    return log


@pytest.fixture(scope="module")
def low_bidder_game():
    """ATTac against seven LowBidders, every iteration recorded."""
    agents = build_agents(ROSTER, FAST_STRATEGY)
    logs = {agent.name: _record_iterations(agent) for agent in agents}
    result = play_game(default_game_config(ROSTER, seed=4, ticks_per_game=GAME_TICKS), agents)
    return result, logs


def _landed(log, latency):
    return [entry for entry in log if entry[0].tick + latency < GAME_TICKS]


@pytest.mark.slow
def test_attac_goes_active_once_and_never_back(low_bidder_game):
    _, logs = low_bidder_game
    modes = [mode for _, mode, _, _ in logs["attac"]]
    switch = modes.index(AgentMode.ACTIVE)
    assert switch > 0
    assert all(mode is AgentMode.ACTIVE for mode in modes[switch:])


@pytest.mark.slow
def test_attac_buys_no_flights_while_passive(low_bidder_game):
    result, logs = low_bidder_game
    for _, mode, batch, _ in logs["attac"]:
        if mode is AgentMode.PASSIVE:
            assert batch.flights == []
    switch_tick = next(view.tick for view, mode, _, _ in logs["attac"] if mode is AgentMode.ACTIVE)
    records = result.transcript.records
    flight_bids = [r for r in records if r["type"] == "flight_bid" and r["agent"] == "attac"]
    flight_buys = [
        r for r in records if r["type"] == "trade" and r["buyer"] == "attac" and GoodId.parse(r["good"]).is_flight
    ]
    assert all(r["tick"] >= switch_tick for r in flight_bids + flight_buys)


@pytest.mark.slow
def test_passive_rooms_beyond_need_risk_at_most_50_per_hotel(low_bidder_game):
    _, logs = low_bidder_game
    checked = 0
    for view, mode, batch, needs in logs["attac"]:
        if mode is not AgentMode.PASSIVE or needs is None:
            continue
        for bid in batch.hotels:
            ask = view.quotes[bid.good].ask
            assert bid.price == ask + 100
            extra = max(0, view.hotel_winning.get(bid.good, 0) + bid.qty - needs[bid.good])
            assert extra * ask <= 5000
            checked += 1
    assert checked > 0


@pytest.mark.slow
def test_low_bidder_hotel_bids_are_the_ask_plus_50(low_bidder_game):
    result, logs = low_bidder_game
    for descriptor in ROSTER[1:]:
        sent = []
        for view, _, batch, _ in _landed(logs[descriptor.name], descriptor.latency):
            for bid in batch.hotels:
                assert bid.price == view.quotes[bid.good].ask + 5000
                sent.append((str(bid.good), bid.price, bid.qty))
        recorded = [
            (r["good"], r["price"], r["qty"])
            for r in result.transcript.of_type("hotel_bid")
            if r["agent"] == descriptor.name
        ]
        assert recorded == sent


@pytest.mark.slow
def test_ticket_sell_prices_stay_between_30_and_200(low_bidder_game):
    result, _ = low_bidder_game
    sells = [r for r in result.transcript.of_type("cda_order") if r["side"] == "sell"]
    assert sells
    assert all(3000 <= r["price"] <= 20000 for r in sells)


@pytest.mark.slow
def test_high_bidder_matches_attac_without_prediction(low_bidder_game):
    _, logs = low_bidder_game
    strategy = FAST_STRATEGY.model_copy(update={"use_predictor": False})
    attac = AttacAgent("attac", strategy)
    high = HighBidderAgent("attac", strategy)
    for view, _, _, _ in logs["attac"]:
        assert high.iterate(view) == attac.iterate(view)
