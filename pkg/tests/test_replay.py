import json

import pytest

from src.agents import NullAgent
from src.agents.base import TradingAgent
from src.errors import CorruptTranscript
from src.game.engine import run_game
from src.game.messages import BidBatch, EntOrder, FlightBid, HotelBid
from src.game.preferences import ClientAssignment, TravelPackage
from src.harness import replay
from src.market import Side
from src.market.goods import GoodId
from src.utils.config import AgentDescriptor, default_game_config


class Trader(TradingAgent):
    """Buys a 1-2 LFI trip for client 1 and offers its first ticket at $40; buys any offered ticket."""

    def iterate(self, view):
        if view.tick == 0:
            ticket = min((g for g in view.holdings if g.is_entertainment), key=str)
            return BidBatch(
                flights=[FlightBid(GoodId.parse("in1"), 60000, 1), FlightBid(GoodId.parse("out2"), 60000, 1)],
                hotels=[HotelBid(GoodId.parse("LFI1"), 5000, 1)],
                entertainment=[EntOrder(ticket, Side.SELL, 4000, 1)],
            )
        offered = [
            g for g, q in view.quotes.items() if g.is_entertainment and q.ask is not None and g not in view.holdings
        ]
        return BidBatch(entertainment=[EntOrder(g, Side.BUY, 4000, 1) for g in offered[:1]])

    def final_allocation(self, view):
        return [ClientAssignment(1, TravelPackage.parse("1-2-LFI"))]


@pytest.fixture
def transcript_path(tmp_path):
    config = default_game_config(
        [AgentDescriptor(name=f"null-{i}", variant="null", latency=2) for i in range(1, 9)], seed=7, ticks_per_game=30
    )
    agents = {d.name: NullAgent(d.name) for d in config.roster}
    agents["null-1"] = Trader("null-1")
    agents["null-2"] = Trader("null-2")
    result = run_game(config, agents)
    path = tmp_path / "game.jsonl"
    result.transcript.write(str(path))
    return path, result


def _rewrite(path, edit):
    records = [json.loads(line) for line in path.read_text().splitlines()]
    records = edit(records)
    path.write_text("".join(json.dumps(r) + "\n" for r in records))


def test_fresh_transcript_replays_without_divergence(transcript_path):
    path, result = transcript_path
    report = replay(str(path))
    assert report.ok, report.divergences
    assert report.scores == result.scores
    assert report.utilities == result.utilities
    assert report.entertainment_balance == 0
    assert report.holdings["null-1"][GoodId.parse("LFI1")] == 1


def test_edited_score_footer_is_reported(transcript_path):
    path, _ = transcript_path

    def edit(records):
        records[-1]["scores"]["null-1"] += 100
        return records

    _rewrite(path, edit)
    report = replay(str(path))
    assert not report.ok
    assert any(d.startswith("null-1: game_end score") for d in report.divergences)


def test_edited_trade_price_is_reported(transcript_path):
    path, _ = transcript_path

    def edit(records):
        trade = next(r for r in records if r["type"] == "trade" and r["buyer"] == "null-1")
        trade["price"] += 100
        return records

    _rewrite(path, edit)
    report = replay(str(path))
    assert any("recorded spent" in d for d in report.divergences)


def test_truncated_transcript_is_corrupt(transcript_path):
    path, _ = transcript_path
    _rewrite(path, lambda records: records[:-1])
    with pytest.raises(CorruptTranscript):
        replay(str(path))


def test_missing_record_breaks_the_sequence(transcript_path):
    path, _ = transcript_path
    _rewrite(path, lambda records: records[:5] + records[6:])
    with pytest.raises(CorruptTranscript):
        replay(str(path))


def test_unparseable_line_is_corrupt(tmp_path):
    path = tmp_path / "broken.jsonl"
    path.write_text('{"seq": 1, "tick": 0, "type": "game_start"}\nnot json\n')
    with pytest.raises(CorruptTranscript):
        replay(str(path))
