"""Re-derive a game's outcome from its transcript alone."""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List

from src.errors import CorruptTranscript
from src.game.preferences import ClientAssignment, ClientPreference, utility
from src.game.scoring import cash_flow, final_score, validate_allocation
from src.game.transcript import Transcript
from src.market.goods import GoodId
from src.market.records import Transaction

logger = logging.getLogger(__name__)


@dataclass
class ReplayReport:
    path: str
    scores: Dict[str, int] = field(default_factory=dict)  # cents
    utilities: Dict[str, int] = field(default_factory=dict)  # dollars
    holdings: Dict[str, Counter] = field(default_factory=dict)
    entertainment_balance: int = 0
    divergences: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.divergences


def replay(path: str) -> ReplayReport:
    """
    Replays a transcript and compares the result with its recorded footer.

    Holdings are endowments plus trades, allocations are re-validated against
    them and scores recomputed from the trades. Every mismatch with the
    `allocation`, `score` and `game_end` records is reported as a divergence.

    Raises:
        CorruptTranscript: If the file is unreadable, mis-sequenced or truncated.
    """
    transcript = Transcript.load(path)
    try:
        return _replay(transcript, path)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptTranscript(f"{path}: {exc!r}") from exc


def _replay(transcript: Transcript, path: str) -> ReplayReport:
    start = transcript.records[0]
    report = ReplayReport(path)
    agents: List[str] = list(start["agents"])
    clients = {name: [ClientPreference.from_record(c) for c in start["clients"][name]] for name in agents}
    report.holdings = {
        name: Counter({GoodId.parse(g): int(q) for g, q in start["endowments"][name].items()}) for name in agents
    }

    trades: List[Transaction] = []
    for record in transcript.of_type("trade"):
        trade = Transaction.from_record(record, record["tick"])
        trades.append(trade)
        for party, sign in ((trade.buyer, 1), (trade.seller, -1)):
            if party in report.holdings:
                report.holdings[party][trade.good] += sign * trade.qty
    for name, holdings in report.holdings.items():
        negative = sorted(str(g) for g, q in holdings.items() if q < 0)
        if negative:
            report.divergences.append(f"{name}: negative holdings of {', '.join(negative)}")

    recorded_allocations: Dict[str, List[ClientAssignment]] = defaultdict(list)
    for record in transcript.of_type("allocation"):
        fields = {k: v for k, v in record.items() if k not in ("seq", "tick", "type", "agent")}
        recorded_allocations[record["agent"]].append(ClientAssignment.from_record(fields))
    recorded_scores = {r["agent"]: r for r in transcript.of_type("score")}

    for name in agents:
        accepted, problems = validate_allocation(clients[name], recorded_allocations[name], report.holdings[name])
        for problem in problems:
            report.divergences.append(f"{name}: allocation {problem}")
        report.utilities[name] = sum(utility(clients[name][c - 1], a) for c, a in accepted.items())
        report.scores[name] = final_score(report.utilities[name], trades, name)
        spent, earned = cash_flow(trades, name)
        expected = {"utility": report.utilities[name], "spent": spent, "earned": earned, "score": report.scores[name]}
        recorded = recorded_scores.get(name)
        if recorded is None:
            report.divergences.append(f"{name}: no score record")
            continue
        for key, value in expected.items():
            if recorded.get(key) != value:
                report.divergences.append(f"{name}: recorded {key} {recorded.get(key)} != replayed {value}")

    footer = transcript.records[-1]["scores"]
    for name in agents:
        if footer.get(name) != report.scores[name]:
            report.divergences.append(f"{name}: game_end score {footer.get(name)} != replayed {report.scores[name]}")

    # Tickets only change hands between agents, so their cash nets out.
    ticket_trades = [t for t in trades if t.good.is_entertainment]
    report.entertainment_balance = sum(
        earned - spent for spent, earned in (cash_flow(ticket_trades, name) for name in agents)
    )
    if report.entertainment_balance != 0:
        report.divergences.append(f"entertainment cash does not balance: {report.entertainment_balance}")

    if report.divergences:
        logger.warning({"event": "replay_divergence", "path": path, "divergences": report.divergences})
    return report
