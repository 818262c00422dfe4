"""Append-only game transcript.

One canonical JSON object per line. Every record carries `seq` (strictly
increasing from 1), `tick` and `type`. Record types:

    game_start  seed, ticks_per_game, seconds_per_tick, agents, clients, endowments
    quote       good, bid, ask, closed            (emitted on change only)
    flight_bid  agent, good, price, qty
    hotel_bid   agent, good, price, qty
    cda_order   agent, good, side, price, qty
    withdraw    agent, order_id
    reject      agent, good, reason, price, qty
    late        agent, due                        (batch landed after game end)
    trade       good, buyer, seller, price, qty
    close       good, price                       (hotel close; flights/CDA at end)
    allocation  agent, client, package, tickets   (footer)
    score       agent, utility, spent, earned, score   (footer)
    game_end    scores                            (footer, last line)
"""

from typing import Any, Dict, List

from src.errors import CorruptTranscript
from src.utils.data_processing import dump_record, read_records, write_lines


class Transcript:
    def __init__(self) -> None:
        self.records: List[Dict[str, Any]] = []

    def append(self, record_type: str, tick: int, **fields: Any) -> Dict[str, Any]:
        record = {"seq": len(self.records) + 1, "tick": tick, "type": record_type}
        record.update(fields)
        self.records.append(record)
        return record

    def lines(self) -> List[str]:
        return [dump_record(r) for r in self.records]

    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    def of_type(self, record_type: str) -> List[Dict[str, Any]]:
        return [r for r in self.records if r["type"] == record_type]

    def write(self, path: str) -> None:
        write_lines(path, self.lines())

    @classmethod
    def load(cls, path: str) -> "Transcript":
        try:
            records = read_records(path)
        except (OSError, ValueError) as exc:
            raise CorruptTranscript(str(exc)) from exc
        transcript = cls()
        for expected, record in enumerate(records, start=1):
            if record.get("seq") != expected or "type" not in record or "tick" not in record:
                raise CorruptTranscript(f"{path}: bad record at position {expected}")
            transcript.records.append(record)
        if not transcript.records or transcript.records[0]["type"] != "game_start":
            raise CorruptTranscript(f"{path}: missing game_start")
        if transcript.records[-1]["type"] != "game_end":
            raise CorruptTranscript(f"{path}: truncated (no game_end)")
        return transcript
