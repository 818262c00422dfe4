import logging
import queue
import socket
import threading
from typing import Dict, Iterable, List, Mapping, Optional, Set

from src.agents.base import TradingAgent
from src.agents.baselines import NullAgent
from src.errors import ProtocolViolation
from src.game.engine import GameResult, TacGame
from src.game.messages import AgentView, BidBatch, GameSummary
from src.game.preferences import ClientAssignment
from src.net.protocol import (
    Channel,
    WireMessage,
    assignments_from_payload,
    batch_from_payload,
    summary_to_payload,
    view_to_payload,
)
from src.utils.config import GameConfig

logger = logging.getLogger(__name__)

# Put on an inbox when its connection is gone.
_DISCONNECTED = None


class RemoteAgent(TradingAgent):
    """
    Stands in for an agent connected over the wire.

    Every engine call becomes a synchronous round trip on the connection. A
    lost connection, a timeout or a malformed reply leaves the agent silent for
    the rest of the session: empty bid batches and an empty allocation.
    """

    def __init__(self, name: str, channel: Channel, response_timeout: float = 60.0) -> None:
        super().__init__(name)
        self.channel = channel
        self.response_timeout = response_timeout
        self.inbox: "queue.Queue[Optional[WireMessage]]" = queue.Queue()
        self.silent = False
        self._game: Optional[TacGame] = None
        self._notified = 0

    def attach(self, game: TacGame) -> None:
        self._game = game
        self._notified = 0

    def go_silent(self, reason: str) -> None:
        if not self.silent:
            logger.warning({"event": "connection_lost", "agent": self.name, "reason": reason})
        self.silent = True
        self.channel.close()

    def send(self, kind: str, **payload) -> bool:
        if self.silent:
            return False
        try:
            self.channel.send(kind, **payload)
            return True
        except OSError as exc:
            self.go_silent(repr(exc))
            return False

    def _await(self, kinds: Set[str]) -> Optional[WireMessage]:
        while not self.silent:
            try:
                message = self.inbox.get(timeout=self.response_timeout)
            except queue.Empty:
                self.go_silent("timeout")
                return None
            if message is _DISCONNECTED:
                self.go_silent("disconnected")
                return None
            if message.kind in kinds:
                return message
            self.channel.error("ProtocolViolation", f"unexpected {message.kind}", message.seq)
        return None

    def _notify_trades(self) -> None:
        if self._game is None:
            return
        trades = self._game.transactions[self._notified :]
        self._notified = len(self._game.transactions)
        mine = [t.to_record() for t in trades if self.name in (t.buyer, t.seller)]
        if mine:
            self.send("TransactionNotice", tick=self._game.tick, trades=mine)

    def reset_game(self, seed: int) -> None:
        self.send("GameEvent", event="reset", seed=seed)

    def iterate(self, view: AgentView) -> BidBatch:
        self._notify_trades()
        if not self.send("QuoteSnapshot", view=view_to_payload(view)):
            return BidBatch()
        withdrawals: List[int] = []
        while True:
            message = self._await({"Withdraw", "SubmitBid"})
            if message is None:
                return BidBatch()
            if message.kind == "Withdraw":
                withdrawals.extend(int(i) for i in message.payload.get("order_ids", []))
                self.send("Ack", ack=message.seq)
                continue
            try:
                batch = batch_from_payload(message.payload, withdrawals)
            except ProtocolViolation as exc:
                self.channel.error("ProtocolViolation", str(exc), message.seq)
                return BidBatch()
            self.send("Ack", ack=message.seq)
            return batch

    def final_allocation(self, view: AgentView) -> List[ClientAssignment]:
        self._notify_trades()
        if not self.send("GameEvent", event="final", view=view_to_payload(view)):
            return []
        message = self._await({"FinalAllocation"})
        if message is None:
            return []
        try:
            assignments = assignments_from_payload(message.payload)
        except ProtocolViolation as exc:
            self.channel.error("ProtocolViolation", str(exc), message.seq)
            return []
        self.send("Ack", ack=message.seq)
        return assignments

    def observe_game_result(self, summary: GameSummary) -> None:
        self.send("GameEvent", event="result", summary=summary_to_payload(summary))


class MarketServer:
    """
    Hosts games whose remote roster slots are filled by network connections.

    Connections authenticate with a Hello naming a roster slot that is not
    played in process. All game-state mutation stays on the thread calling
    play(); per-connection reader threads only queue incoming frames.

    Args:
        config (GameConfig): Roster and game parameters.
        local_agents (Mapping[str, TradingAgent]): Agents for the in-process slots.
        host (str): Interface to listen on.
        port (int): Port to listen on; 0 picks a free one (see `address`).
        response_timeout (float): Seconds to wait for a remote reply.
    """

    def __init__(
        self,
        config: GameConfig,
        local_agents: Optional[Mapping[str, TradingAgent]] = None,
        host: str = "127.0.0.1",
        port: int = 0,
        response_timeout: float = 60.0,
    ) -> None:
        self.config = config
        self.local_agents: Dict[str, TradingAgent] = dict(local_agents or {})
        self.remote_names = [d.name for d in config.roster if d.name not in self.local_agents]
        self.host = host
        self.port = port
        self.response_timeout = response_timeout
        self.remotes: Dict[str, RemoteAgent] = {}
        self.started = False
        self._lock = threading.Lock()
        self._all_connected = threading.Event()
        self._sock: Optional[socket.socket] = None
        self.address = (host, port)
        if not self.remote_names:
            self._all_connected.set()

    def start(self) -> "MarketServer":
        self._sock = socket.create_server((self.host, self.port))
        self.address = self._sock.getsockname()[:2]
        threading.Thread(target=self._accept_loop, name="tac-accept", daemon=True).start()
        logger.info({"event": "server_listening", "address": list(self.address), "slots": self.remote_names})
        return self

    def _accept_loop(self) -> None:
        sock = self._sock
        while sock is not None:
            try:
                conn, _ = sock.accept()
            except OSError:
                return
            threading.Thread(target=self._handshake, args=(conn,), daemon=True).start()

    def _refusal(self, name: object) -> Optional[str]:
        if self.started:
            return "ConnectionRefused"
        if name in self.remotes:
            return "NameTaken"
        if len(self.remotes) >= len(self.remote_names):
            return "SlotExhausted"
        if name not in self.remote_names:
            return "ConnectionRefused"
        return None

    def _handshake(self, conn: socket.socket) -> None:
        channel = Channel(conn)
        try:
            hello = channel.receive()
        except (ProtocolViolation, OSError) as exc:
            channel.error("ProtocolViolation", str(exc))
            channel.close()
            return
        if hello is None or hello.kind != "Hello":
            channel.error("ProtocolViolation", "expected Hello")
            channel.close()
            return
        name = hello.payload.get("name")
        with self._lock:
            code = self._refusal(name)
            if code is None:
                remote = RemoteAgent(name, channel, self.response_timeout)
                self.remotes[name] = remote
                if len(self.remotes) == len(self.remote_names):
                    self._all_connected.set()
                # play() takes this lock, so the Ack precedes every game message.
                channel.send("Ack", ack=hello.seq)
        if code is not None:
            logger.info({"event": "connection_refused", "name": name, "code": code})
            channel.error(code, f"cannot seat {name!r}", hello.seq)
            channel.close()
            return
        logger.info({"event": "agent_connected", "agent": name})
        self._read_loop(remote)

    def _read_loop(self, remote: RemoteAgent) -> None:
        while True:
            try:
                message = remote.channel.receive()
            except ProtocolViolation as exc:
                remote.channel.error("ProtocolViolation", str(exc))
                message = _DISCONNECTED
            except OSError:
                message = _DISCONNECTED
            remote.inbox.put(message)
            if message is _DISCONNECTED:
                remote.channel.close()
                return

    def wait_for_agents(self, timeout: Optional[float] = None) -> bool:
        return self._all_connected.wait(timeout)

    def play(self, config: Optional[GameConfig] = None) -> GameResult:
        """Run one game; remote slots nobody claimed are played by silent agents."""
        config = config or self.config
        with self._lock:
            self.started = True
        agents: Dict[str, TradingAgent] = dict(self.local_agents)
        for name in self.remote_names:
            if name in self.remotes:
                agents[name] = self.remotes[name]
            else:
                logger.warning({"event": "slot_unfilled", "agent": name})
                agents[name] = NullAgent(name)
        game = TacGame(config, agents)
        for remote in self.remotes.values():
            remote.attach(game)
        return game.run()

    def play_many(self, configs: Iterable[GameConfig]) -> List[GameResult]:
        return [self.play(config) for config in configs]

    def close(self) -> None:
        for remote in self.remotes.values():
            remote.send("GameEvent", event="end")
            remote.channel.close()
        if self._sock is not None:
            self._sock.close()
            self._sock = None


def serve(
    config: GameConfig,
    local_agents: Optional[Mapping[str, TradingAgent]] = None,
    host: str = "127.0.0.1",
    port: int = 0,
    response_timeout: float = 60.0,
) -> MarketServer:
    """Start listening and return the running server."""
    return MarketServer(config, local_agents, host, port, response_timeout).start()
