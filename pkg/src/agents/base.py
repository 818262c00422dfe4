from abc import ABC, abstractmethod
from typing import List

from src.game.messages import AgentView, BidBatch, GameSummary
from src.game.preferences import ClientAssignment


class TradingAgent(ABC):
    """
    The interface the game engine drives, in process or over the wire.

    Methods:
        reset_game(seed): Called once before each game with the agent's own seed.
        iterate(view): One bidding iteration; returns the messages to send.
        final_allocation(view): Client assignments submitted for scoring.
        observe_game_result(summary): Public results of the finished game.
    """

    def __init__(self, name: str) -> None:
        self.name = name

    def reset_game(self, seed: int) -> None:
        pass

    @abstractmethod
    def iterate(self, view: AgentView) -> BidBatch:
        ...

    def final_allocation(self, view: AgentView) -> List[ClientAssignment]:
        return []

    def observe_game_result(self, summary: GameSummary) -> None:
        pass
