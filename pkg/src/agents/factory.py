from typing import Optional

from src.agents.attac import AttacAgent
from src.agents.base import TradingAgent
from src.agents.baselines import HighBidderAgent, LowBidderAgent, NullAgent
from src.agents.predictor import load_state
from src.utils.config import AgentDescriptor, StrategyConfig


def create_agent(
    descriptor: AgentDescriptor,
    strategy: Optional[StrategyConfig] = None,
    state_path: Optional[str] = None,
) -> TradingAgent:
    """
    Initializes and returns an in-process agent for one roster entry.

    Args:
        descriptor (AgentDescriptor): Roster entry naming the agent and its variant.
        strategy (StrategyConfig, optional): Shared strategy thresholds. Defaults to StrategyConfig().
        state_path (str, optional): Predictor/high-bidder state file; only the
            'attac' variant reads and writes it.

    Returns:
        TradingAgent: The agent for the descriptor's variant.

    Raises:
        ValueError: If the variant cannot run in process.
    """
    strategy = strategy or StrategyConfig()

    if descriptor.variant == "attac":
        if state_path:
            predictor, db = load_state(state_path, strategy)
            return AttacAgent(descriptor.name, strategy, predictor, db, state_path)
        return AttacAgent(descriptor.name, strategy)

    elif descriptor.variant == "high":
        return HighBidderAgent(descriptor.name, strategy)

    elif descriptor.variant == "low":
        return LowBidderAgent(descriptor.name, strategy)

    elif descriptor.variant == "null":
        return NullAgent(descriptor.name)

    # Remote slots are filled by connections to the market server
    else:
        raise ValueError(f"Unsupported agent variant for in-process play: {descriptor.variant}")
