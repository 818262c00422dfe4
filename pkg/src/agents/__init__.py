from src.agents.attac import AttacAgent
from src.agents.base import TradingAgent
from src.agents.baselines import HighBidderAgent, LowBidderAgent, NullAgent
from src.agents.factory import create_agent
