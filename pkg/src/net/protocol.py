"""Wire frames between the market server and remote agents.

A frame is the decimal byte length of a canonical JSON object, one space,
the object itself, and a newline:

    51 {"kind":"Hello","payload":{"name":"attac"},"seq":1}\\n

The object has exactly `seq` (per direction per connection, strictly
increasing from 1), `kind` and `payload`. Kinds and payloads:

    Hello              client -> server   {"name"}
    Ack                both               {"ack": seq of the acknowledged frame}
    Error              both               {"code", "message", "ack": seq or null}
    GameEvent          server -> client   {"event": "reset", "seed"}
                                          {"event": "final", "view"}
                                          {"event": "result", "summary"}
                                          {"event": "end"}
    QuoteSnapshot      server -> client   {"view"}  (a prompt to bid)
    TransactionNotice  server -> client   {"tick", "trades": [trade records]}
    Withdraw           client -> server   {"order_ids": [...]}
    SubmitBid          client -> server   {"flights", "hotels", "entertainment"}
    FinalAllocation    client -> server   {"assignments": [allocation records]}

Every Withdraw and SubmitBid is answered by one Ack or Error carrying its seq.
Error codes: NameTaken, SlotExhausted, ConnectionRefused, ProtocolViolation.
Money is integer cents and goods are written as in the transcript ("BGH2").
"""

import itertools
import json
import socket
import threading
from collections import Counter
from typing import Any, BinaryIO, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, ValidationError

from src.errors import ProtocolViolation
from src.game.messages import AgentView, BidBatch, EntOrder, FlightBid, GameSummary, HotelBid, OrderView
from src.game.preferences import ClientAssignment, ClientPreference
from src.market.entertainment import Side
from src.market.goods import GoodId
from src.market.records import Quote
from src.utils.data_processing import dump_record

MAX_FRAME_BYTES = 1 << 22

Kind = Literal[
    "Hello",
    "QuoteSnapshot",
    "SubmitBid",
    "Withdraw",
    "TransactionNotice",
    "GameEvent",
    "FinalAllocation",
    "Ack",
    "Error",
]


class WireMessage(BaseModel):
    seq: int = Field(ge=1)
    kind: Kind
    payload: Dict[str, Any] = Field(default_factory=dict)


def encode_frame(message: WireMessage) -> bytes:
    body = dump_record(message.model_dump()).encode("utf-8")
    return str(len(body)).encode("ascii") + b" " + body + b"\n"


def read_frame(stream: BinaryIO) -> Optional[WireMessage]:
    """Next frame from `stream`, or None at a clean end of stream."""
    header = bytearray()
    while True:
        char = stream.read(1)
        if not char:
            if header:
                raise ProtocolViolation("connection closed inside a frame header")
            return None
        if char == b" ":
            break
        if not char.isdigit() or len(header) > 8:
            raise ProtocolViolation(f"bad frame header {bytes(header + char)!r}")
        header += char
    if not header:
        raise ProtocolViolation("empty frame length")
    length = int(header)
    if length > MAX_FRAME_BYTES:
        raise ProtocolViolation(f"frame of {length} bytes exceeds the limit")
    body = stream.read(length)
    if len(body) != length or stream.read(1) != b"\n":
        raise ProtocolViolation("truncated frame")
    try:
        return WireMessage.model_validate(json.loads(body))
    except (ValueError, ValidationError) as exc:
        raise ProtocolViolation(f"malformed frame: {exc}") from exc


# Payload codecs


def _goods(mapping: Dict[GoodId, int]) -> Dict[str, int]:
    return {str(good): int(qty) for good, qty in mapping.items()}


def _parse_goods(mapping: Dict[str, int]) -> Dict[GoodId, int]:
    return {GoodId.parse(good): int(qty) for good, qty in mapping.items()}


def view_to_payload(view: AgentView) -> Dict[str, Any]:
    return {
        "agent": view.agent,
        "tick": view.tick,
        "ticks_per_game": view.ticks_per_game,
        "seconds_per_tick": view.seconds_per_tick,
        "clients": [c.to_record() for c in view.clients],
        "holdings": _goods(view.holdings),
        "quotes": [q.to_record() for q in view.quotes.values()],
        "hotel_winning": _goods(view.hotel_winning),
        "own_orders": [
            {"order_id": o.order_id, "good": str(o.good), "side": o.side.value, "price": o.price, "qty": o.qty}
            for o in view.own_orders
        ],
        "roster": list(view.roster),
        "rng_seed": view.rng_seed,
        "balance": view.balance,
    }


def view_from_payload(payload: Dict[str, Any]) -> AgentView:
    tick = int(payload["tick"])
    quotes = [Quote.from_record(q, tick) for q in payload["quotes"]]
    return AgentView(
        agent=payload["agent"],
        tick=tick,
        ticks_per_game=int(payload["ticks_per_game"]),
        seconds_per_tick=float(payload["seconds_per_tick"]),
        clients=tuple(ClientPreference.from_record(c) for c in payload["clients"]),
        holdings=Counter(_parse_goods(payload["holdings"])),
        quotes={q.good: q for q in quotes},
        hotel_winning=_parse_goods(payload["hotel_winning"]),
        own_orders=tuple(
            OrderView(int(o["order_id"]), GoodId.parse(o["good"]), Side(o["side"]), int(o["price"]), int(o["qty"]))
            for o in payload["own_orders"]
        ),
        roster=tuple(payload["roster"]),
        rng_seed=int(payload["rng_seed"]),
        balance=int(payload.get("balance", 0)),
    )


def batch_to_payload(batch: BidBatch) -> Dict[str, Any]:
    return {
        "flights": [{"good": str(b.good), "price": b.price, "qty": b.qty} for b in batch.flights],
        "hotels": [{"good": str(b.good), "price": b.price, "qty": b.qty} for b in batch.hotels],
        "entertainment": [
            {"good": str(o.good), "side": o.side.value, "price": o.price, "qty": o.qty} for o in batch.entertainment
        ],
    }


def batch_from_payload(payload: Dict[str, Any], withdrawals: Optional[List[int]] = None) -> BidBatch:
    try:
        return BidBatch(
            withdrawals=[int(i) for i in (withdrawals or [])],
            flights=[FlightBid(GoodId.parse(b["good"]), int(b["price"]), int(b["qty"])) for b in payload.get("flights", [])],
            hotels=[HotelBid(GoodId.parse(b["good"]), int(b["price"]), int(b["qty"])) for b in payload.get("hotels", [])],
            entertainment=[
                EntOrder(GoodId.parse(o["good"]), Side(o["side"]), int(o["price"]), int(o["qty"]))
                for o in payload.get("entertainment", [])
            ],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolViolation(f"bad bid payload: {exc}") from exc


def assignments_to_payload(assignments: List[ClientAssignment]) -> Dict[str, Any]:
    return {"assignments": [a.to_record() for a in assignments]}


def assignments_from_payload(payload: Dict[str, Any]) -> List[ClientAssignment]:
    try:
        return [ClientAssignment.from_record(r) for r in payload.get("assignments", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolViolation(f"bad allocation payload: {exc}") from exc


def summary_to_payload(summary: GameSummary) -> Dict[str, Any]:
    return {
        "seed": summary.seed,
        "roster": list(summary.roster),
        "hotel_closes": _goods(summary.hotel_closes),
        "max_hotel_bids": dict(summary.max_hotel_bids),
        "scores": dict(summary.scores),
    }


def summary_from_payload(payload: Dict[str, Any]) -> GameSummary:
    return GameSummary(
        seed=int(payload["seed"]),
        roster=tuple(payload["roster"]),
        hotel_closes=_parse_goods(payload["hotel_closes"]),
        max_hotel_bids={k: int(v) for k, v in payload["max_hotel_bids"].items()},
        scores={k: int(v) for k, v in payload["scores"].items()},
    )


class Channel:
    """One end of a connection: numbered outbound frames, checked inbound frames."""

    def __init__(self, sock: socket.socket) -> None:
        self.sock = sock
        self.reader = sock.makefile("rb")
        self._seq = itertools.count(1)
        self._lock = threading.Lock()
        self._last_in = 0
        self.closed = False

    def send(self, kind: str, **payload: Any) -> int:
        with self._lock:
            seq = next(self._seq)
            self.sock.sendall(encode_frame(WireMessage(seq=seq, kind=kind, payload=payload)))
        return seq

    def receive(self) -> Optional[WireMessage]:
        message = read_frame(self.reader)
        if message is not None:
            if message.seq <= self._last_in:
                raise ProtocolViolation(f"sequence went from {self._last_in} to {message.seq}")
            self._last_in = message.seq
        return message

    def error(self, code: str, message: str, ack: Optional[int] = None) -> None:
        try:
            self.send("Error", code=code, message=message, ack=ack)
        except OSError:
            pass

    def close(self) -> None:
        if self.closed:
            return
        self.closed = True
        for closer in (self.reader.close, lambda: self.sock.shutdown(socket.SHUT_RDWR), self.sock.close):
            try:
                closer()
            except OSError:
                pass
