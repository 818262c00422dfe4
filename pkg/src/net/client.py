import logging
import socket
from typing import Dict, List, Optional, Type

from src.agents.base import TradingAgent
from src.errors import ConnectionRefused, NameTaken, ProtocolViolation, SlotExhausted, TacError
from src.game.messages import GameSummary
from src.market.records import Transaction
from src.net.protocol import (
    Channel,
    assignments_to_payload,
    batch_to_payload,
    summary_from_payload,
    view_from_payload,
)
from src.utils.config import get_endpoint

logger = logging.getLogger(__name__)

_REFUSALS: Dict[str, Type[TacError]] = {
    "NameTaken": NameTaken,
    "SlotExhausted": SlotExhausted,
    "ConnectionRefused": ConnectionRefused,
    "ProtocolViolation": ProtocolViolation,
}


class ClientSession:
    """
    A seat at a remote market, driving any TradingAgent from server frames.

    The agent sees exactly the calls it would see in process: reset_game,
    iterate, final_allocation and observe_game_result.
    """

    def __init__(self, channel: Channel, name: str) -> None:
        self.channel = channel
        self.name = name
        self.trades: List[Transaction] = []
        self.summaries: List[GameSummary] = []
        self.errors: List[Dict[str, object]] = []

    def play(self, agent: TradingAgent) -> List[GameSummary]:
        """Serve the agent until the server ends the session; returns every game summary."""
        try:
            while True:
                message = self.channel.receive()
                if message is None:
                    break
                payload = message.payload
                if message.kind == "QuoteSnapshot":
                    batch = agent.iterate(view_from_payload(payload["view"]))
                    if batch.withdrawals:
                        self.channel.send("Withdraw", order_ids=list(batch.withdrawals))
                    self.channel.send("SubmitBid", **batch_to_payload(batch))
                elif message.kind == "TransactionNotice":
                    tick = int(payload.get("tick", 0))
                    self.trades.extend(Transaction.from_record(t, tick) for t in payload.get("trades", []))
                elif message.kind == "GameEvent":
                    if not self._game_event(agent, payload):
                        break
                elif message.kind == "Error":
                    logger.warning({"event": "server_error", "agent": self.name, **payload})
                    self.errors.append(payload)
        finally:
            self.channel.close()
        return self.summaries

    def _game_event(self, agent: TradingAgent, payload: dict) -> bool:
        event = payload.get("event")
        if event == "reset":
            self.trades.clear()
            agent.reset_game(int(payload["seed"]))
        elif event == "final":
            assignments = agent.final_allocation(view_from_payload(payload["view"]))
            self.channel.send("FinalAllocation", **assignments_to_payload(assignments))
        elif event == "result":
            summary = summary_from_payload(payload["summary"])
            self.summaries.append(summary)
            agent.observe_game_result(summary)
        elif event == "end":
            return False
        return True


def connect(name: str, host: Optional[str] = None, port: Optional[int] = None, timeout: float = 10.0) -> ClientSession:
    """
    Opens a connection to the market server and claims the roster slot `name`.

    Args:
        name (str): Roster name to play.
        host (str, optional): Server host. Defaults to TAC_HOST.
        port (int, optional): Server port. Defaults to TAC_PORT.
        timeout (float): Seconds allowed for connecting and the handshake.

    Returns:
        ClientSession: The seated session; call play(agent) on it.

    Raises:
        ConnectionRefused: If the server is unreachable or refuses the seat.
        NameTaken: If another connection already plays `name`.
        SlotExhausted: If every remote slot is taken.
    """
    default_host, default_port = get_endpoint()
    address = (host or default_host, port or default_port)
    try:
        sock = socket.create_connection(address, timeout=timeout)
    except OSError as exc:
        raise ConnectionRefused(f"cannot reach {address[0]}:{address[1]}: {exc}") from exc
    channel = Channel(sock)
    try:
        channel.send("Hello", name=name)
        reply = channel.receive()
    except (OSError, ProtocolViolation) as exc:
        channel.close()
        raise ConnectionRefused(f"handshake failed: {exc}") from exc
    if reply is None or reply.kind not in ("Ack", "Error"):
        channel.close()
        raise ConnectionRefused("server closed the connection during the handshake")
    if reply.kind == "Error":
        channel.close()
        error = _REFUSALS.get(reply.payload.get("code"), ConnectionRefused)
        raise error(reply.payload.get("message", "refused"))
    sock.settimeout(None)
    logger.info({"event": "connected", "agent": name, "address": list(address)})
    return ClientSession(channel, name)
