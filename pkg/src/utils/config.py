"""Configuration: dotenv-style KEY=VALUE files validated into pydantic models.

Game file keys: SEED, TICKS_PER_GAME, SECONDS_PER_TICK, ROSTER
(`name:variant,...`, 8 entries), AGENT_LATENCY (`name=ticks,...`),
LATENCY_MIN, LATENCY_MAX, ENDOWMENT_SIZE, FLIGHT_INITIAL_MIN,
FLIGHT_INITIAL_MAX, FLIGHT_PERTURB_PERIOD, FLIGHT_STEP, HOTEL_INACTIVITY_TICKS,
HOTEL_CLOSE_JITTER.

Strategy file keys are the upper-cased StrategyConfig field names, with
PASSIVE_TIERS written as `max_price:rooms,...`.

Experiment file keys are the upper-cased ExperimentSpec field names.
"""

import os
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Type, TypeVar

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, Field, ValidationError, model_validator

from src.errors import ConfigError

AGENTS_PER_GAME = 8
Variant = Literal["attac", "high", "low", "null", "remote"]

M = TypeVar("M", bound=BaseModel)


def load_env_variables():
    load_dotenv()


def get_endpoint() -> Tuple[str, int]:
    """Market server address from TAC_HOST / TAC_PORT."""
    host = os.getenv("TAC_HOST", "127.0.0.1")
    port = int(os.getenv("TAC_PORT", "6500"))
    return host, port


class AgentDescriptor(BaseModel):
    name: str = Field(min_length=1)
    variant: Variant = "attac"
    latency: Optional[int] = Field(default=None, ge=1)


class MarketParams(BaseModel):
    flight_initial_min: int = 250
    flight_initial_max: int = 400
    flight_perturb_period: int = Field(default=10, ge=1)
    flight_step: Literal["cents", "dollars"] = "cents"
    hotel_inactivity_ticks: int = Field(default=12, ge=1)
    hotel_close_jitter: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _flight_band(self) -> "MarketParams":
        if not 150 <= self.flight_initial_min <= self.flight_initial_max <= 600:
            raise ValueError("flight initial prices must satisfy 150 <= min <= max <= 600")
        return self


class GameConfig(BaseModel):
    seed: int = 0
    ticks_per_game: int = Field(default=180, ge=1)
    seconds_per_tick: float = Field(default=5.0, gt=0)
    roster: List[AgentDescriptor]
    market: MarketParams = Field(default_factory=MarketParams)
    endowment_size: int = Field(default=12, ge=0)
    latency_min: int = Field(default=2, ge=1)
    latency_max: int = Field(default=13, ge=1)

    @model_validator(mode="after")
    def _roster(self) -> "GameConfig":
        if len(self.roster) != AGENTS_PER_GAME:
            raise ValueError(f"a game needs exactly {AGENTS_PER_GAME} agents, got {len(self.roster)}")
        names = [a.name for a in self.roster]
        if len(set(names)) != len(names):
            raise ValueError(f"agent names must be unique: {names}")
        if self.latency_min > self.latency_max:
            raise ValueError("latency_min exceeds latency_max")
        return self

    def with_seed(self, seed: int) -> "GameConfig":
        return self.model_copy(update={"seed": seed})


class StrategyConfig(BaseModel):
    """ATTac thresholds. Prices are dollars; the agent converts to cents."""

    passive_zero_rooms: int = 8
    passive_tiers: List[Tuple[float, int]] = [(10.0, 4), (20.0, 2), (50.0, 1)]
    hotel_increment: float = 1.0
    sell_alloc_delta_start: float = 100.0
    sell_alloc_delta_end: float = 20.0
    sell_unalloc_delta_start: float = 0.0
    sell_unalloc_delta_end: float = 50.0
    buy_delta_start: float = 100.0
    buy_delta_end: float = 20.0
    sell_cap: float = 200.0
    sell_floor: float = 30.0
    unalloc_floor: float = 50.0
    active_unneeded_price: float = 30.0
    standing_bid_undercut: float = 0.01
    flight_bid_price: float = 600.0
    use_predictor: bool = True
    predictor_alpha: float = Field(default=0.3, gt=0, le=1)
    prior_bgh_edge: float = 150.0
    prior_bgh_mid: float = 300.0
    prior_lfi_edge: float = 80.0
    prior_lfi_mid: float = 150.0
    high_bid_threshold: float = 800.0
    high_game_fraction: float = Field(default=0.5, gt=0, le=1)
    unknown_is_high: bool = False
    min_high_bidders: int = 3
    low_bid_increment: float = Field(default=50.0, gt=0)
    greedy_orderings: int = Field(default=100, ge=1)
    demotion_seconds: float = Field(default=6.0, gt=0)
    seconds_per_node: float = Field(default=0.02, gt=0)
    use_wall_clock: bool = False


class ExperimentSpec(BaseModel):
    n_high: int = Field(ge=0, le=AGENTS_PER_GAME - 1)
    n_games: int = Field(default=20, ge=1)
    base_seed: int = 0
    game_config: Optional[str] = None
    strategy_config: Optional[str] = None
    ticks_per_game: Optional[int] = Field(default=None, ge=1)
    pooled: bool = False
    alpha: float = Field(default=0.01, gt=0, lt=1)
    transport: Literal["inprocess", "wire"] = "inprocess"
    out_dir: str = "results"

    def roster(self) -> List[AgentDescriptor]:
        n_low = AGENTS_PER_GAME - 1 - self.n_high
        return (
            [AgentDescriptor(name="attac", variant="attac")]
            + [AgentDescriptor(name=f"high-{i}", variant="high") for i in range(1, self.n_high + 1)]
            + [AgentDescriptor(name=f"low-{i}", variant="low") for i in range(1, n_low + 1)]
        )


def _read_values(file_path: str) -> Dict[str, str]:
    if not os.path.exists(file_path):
        raise ConfigError(f"config file not found: {file_path}")
    return {k.lower(): v for k, v in dotenv_values(file_path).items() if v is not None}


def _validate(model: Type[M], values: Mapping[str, Any], source: str) -> M:
    try:
        return model.model_validate(values)
    except ValidationError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def parse_roster(text: str) -> List[Dict[str, Any]]:
    roster = []
    for entry in filter(None, (e.strip() for e in text.split(","))):
        name, _, variant = entry.partition(":")
        roster.append({"name": name.strip(), "variant": (variant or "attac").strip()})
    return roster


def parse_pairs(text: str, sep: str) -> Dict[str, str]:
    pairs = {}
    for entry in filter(None, (e.strip() for e in text.split(","))):
        key, _, value = entry.partition(sep)
        pairs[key.strip()] = value.strip()
    return pairs


def game_config_from_values(values: Mapping[str, str], source: str = "<values>") -> GameConfig:
    values = {k.lower(): v for k, v in values.items()}
    market_fields = set(MarketParams.model_fields)
    data: Dict[str, Any] = {k: v for k, v in values.items() if k in GameConfig.model_fields and k != "roster"}
    data["market"] = {k: v for k, v in values.items() if k in market_fields}
    roster = parse_roster(values.get("roster", ""))
    latencies = parse_pairs(values.get("agent_latency", ""), "=")
    for entry in roster:
        if entry["name"] in latencies:
            entry["latency"] = latencies[entry["name"]]
    data["roster"] = roster
    return _validate(GameConfig, data, source)


def load_game_config(file_path: str) -> GameConfig:
    return game_config_from_values(_read_values(file_path), file_path)


def strategy_config_from_values(values: Mapping[str, str], source: str = "<values>") -> StrategyConfig:
    data: Dict[str, Any] = {k.lower(): v for k, v in values.items() if k.lower() in StrategyConfig.model_fields}
    if isinstance(data.get("passive_tiers"), str):
        tiers = parse_pairs(data["passive_tiers"], ":")
        data["passive_tiers"] = [(float(price), int(rooms)) for price, rooms in tiers.items()]
    return _validate(StrategyConfig, data, source)


def load_strategy_config(file_path: Optional[str]) -> StrategyConfig:
    if not file_path:
        return StrategyConfig()
    return strategy_config_from_values(_read_values(file_path), file_path)


def load_experiment_spec(file_path: str) -> ExperimentSpec:
    values = _read_values(file_path)
    data = {k: v for k, v in values.items() if k in ExperimentSpec.model_fields}
    return _validate(ExperimentSpec, data, file_path)


def default_game_config(roster: List[AgentDescriptor], seed: int = 0, **overrides: Any) -> GameConfig:
    return _validate(GameConfig, {"seed": seed, "roster": roster, **overrides}, "<defaults>")
