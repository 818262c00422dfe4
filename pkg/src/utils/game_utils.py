import logging
import os
from statistics import mean
from typing import Dict, Iterable, List, Optional

from src.agents.base import TradingAgent
from src.agents.factory import create_agent
from src.game.engine import GameResult, run_game
from src.market.goods import to_dollars
from src.utils.config import AgentDescriptor, GameConfig, StrategyConfig

logger = logging.getLogger(__name__)

STATE_FILE = "attac_state.jsonl"


def build_agents(
    roster: Iterable[AgentDescriptor],
    strategy: Optional[StrategyConfig] = None,
    state_dir: Optional[str] = None,
) -> List[TradingAgent]:
    """
    Creates one in-process agent per roster entry.

    ATTac agents persist their predictor and high-bidder state under
    `state_dir` (one file per agent name) when it is given.
    """
    agents = []
    for descriptor in roster:
        state_path = None
        if state_dir and descriptor.variant == "attac":
            state_path = os.path.join(state_dir, f"{descriptor.name}-{STATE_FILE}")
        agents.append(create_agent(descriptor, strategy, state_path))
    return agents


def log_game_data(result: GameResult) -> None:
    """Log one finished game: seed, scores in dollars and hotel closing prices."""
    log_entry = {
        "event": "game_result",
        "seed": result.summary.seed,
        "scores": {name: to_dollars(score) for name, score in result.scores.items()},
        "utilities": dict(result.utilities),
        "hotel_closes": {str(g): to_dollars(p) for g, p in result.summary.hotel_closes.items()},
    }
    logger.info(log_entry)


def play_game(config: GameConfig, agents: List[TradingAgent], transcript_path: Optional[str] = None) -> GameResult:
    """
    Plays one game and optionally writes its transcript.

    Args:
        config: Seeded game configuration.
        agents: One agent per roster name.
        transcript_path: Where to write the JSONL transcript, if anywhere.

    Returns:
        The finished GameResult.
    """
    result = run_game(config, agents)
    if transcript_path:
        result.transcript.write(transcript_path)
    log_game_data(result)
    return result


def bulk_test_game(config: GameConfig, agents: List[TradingAgent], num_games: int = 10) -> Dict[str, object]:
    """
    Plays `num_games` games on seeds config.seed, config.seed + 1, ...

    Returns:
        Dictionary with the per-game scores (dollars), each agent's mean score
        and the name of the best agent on average.
    """
    results = []
    for i in range(num_games):
        result = play_game(config.with_seed(config.seed + i), agents)
        results.append({name: to_dollars(score) for name, score in result.scores.items()})

    mean_scores = {name: mean(r[name] for r in results) for name in results[0]} if results else {}
    return {
        "detailed_results": results,
        "mean_scores": mean_scores,
        "best_agent": max(mean_scores, key=mean_scores.get) if mean_scores else None,
    }
