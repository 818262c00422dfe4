"""Controlled batches: ATTac against n_high HighBidders and 7 - n_high LowBidders.

Outputs under spec.out_dir:

    games/game-<seed>.jsonl   one transcript per game
    results.csv               n_high,seed,agent,variant,score (dollars)
    results.jsonl             one "game" record per game, then one "summary"
"""

import logging
import os
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from statistics import mean
from typing import Callable, Dict, List, Optional

from src.agents.base import TradingAgent
from src.agents.predictor import hotel_classes
from src.errors import ConnectionRefused, TacError
from src.game.engine import GameResult
from src.harness.stats import OpponentStats, summarize
from src.market.goods import to_dollars
from src.net.client import connect
from src.net.server import MarketServer
from src.utils.config import ExperimentSpec, GameConfig, default_game_config, load_game_config, load_strategy_config
from src.utils.data_processing import write_lines, write_records
from src.utils.game_utils import STATE_FILE, build_agents, play_game

logger = logging.getLogger(__name__)

ATTAC = "attac"
OPPONENT_TYPES = ("high", "low")


@dataclass
class GameRecord:
    seed: int
    scores: Dict[str, float]  # dollars
    variants: Dict[str, str]
    hotel_closes: Dict[str, float]  # dollars
    transcript: str

    def differences(self, pooled: bool = False) -> Dict[str, List[float]]:
        """ATTac's score minus each opponent type's: the type mean, or one entry per agent when pooled."""
        by_type: Dict[str, List[float]] = defaultdict(list)
        for name, variant in self.variants.items():
            if variant != ATTAC:
                by_type[variant].append(self.scores[name])
        attac = self.scores[ATTAC]
        if pooled:
            return {variant: [attac - s for s in scores] for variant, scores in by_type.items()}
        return {variant: [attac - mean(scores)] for variant, scores in by_type.items()}

    def to_record(self, n_high: int) -> Dict[str, object]:
        return {
            "type": "game",
            "n_high": n_high,
            "seed": self.seed,
            "scores": self.scores,
            "variants": self.variants,
            "hotel_closes": self.hotel_closes,
            "transcript": self.transcript,
        }


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    games: List[GameRecord] = field(default_factory=list)
    differences: Dict[str, List[float]] = field(default_factory=dict)
    stats: Dict[str, OpponentStats] = field(default_factory=dict)

    def summary_record(self) -> Dict[str, object]:
        return {
            "type": "summary",
            "n_high": self.spec.n_high,
            "n_games": len(self.games),
            "pooled": self.spec.pooled,
            "alpha": self.spec.alpha,
            "opponents": {variant: s.to_record() for variant, s in self.stats.items()},
            "differences": self.differences,
        }

    def class_close_means(self) -> Dict[str, float]:
        """Mean closing price (dollars) of each hotel class over the batch."""
        classes = hotel_classes()
        return {
            name: mean(game.hotel_closes[str(good)] for game in self.games for good in goods)
            for name, goods in classes.items()
        } if self.games else {}


def compute_statistics(games: List[GameRecord], pooled: bool, alpha: float):
    differences: Dict[str, List[float]] = defaultdict(list)
    for game in games:
        for variant, diffs in game.differences(pooled).items():
            differences[variant].extend(diffs)
    ordered = {v: differences[v] for v in OPPONENT_TYPES if v in differences}
    return ordered, {variant: summarize(diffs, alpha) for variant, diffs in ordered.items()}


def _game_config(spec: ExperimentSpec) -> GameConfig:
    roster = spec.roster()
    if not spec.game_config:
        overrides = {"ticks_per_game": spec.ticks_per_game} if spec.ticks_per_game else {}
        return default_game_config(roster, spec.base_seed, **overrides)
    base = load_game_config(spec.game_config)
    latencies = {d.name: d.latency for d in base.roster}
    roster = [d.model_copy(update={"latency": latencies.get(d.name)}) for d in roster]
    update = {"roster": roster, "seed": spec.base_seed}
    if spec.ticks_per_game:
        update["ticks_per_game"] = spec.ticks_per_game
    return base.model_copy(update=update)


def _record(config: GameConfig, result: GameResult, transcript: str) -> GameRecord:
    return GameRecord(
        seed=config.seed,
        scores={name: to_dollars(score) for name, score in result.scores.items()},
        variants={d.name: d.variant for d in config.roster},
        hotel_closes={str(good): to_dollars(price) for good, price in result.summary.hotel_closes.items()},
        transcript=transcript,
    )


def _play_wire(configs: List[GameConfig], agents: List[TradingAgent], connect_timeout: float = 30.0) -> List[GameResult]:
    """Same games with every agent seated over a local socket."""
    server = MarketServer(configs[0]).start()
    host, port = server.address
    threads = []
    try:
        for agent in agents:
            session = connect(agent.name, host, port)
            thread = threading.Thread(target=session.play, args=(agent,), name=f"tac-{agent.name}", daemon=True)
            thread.start()
            threads.append(thread)
        if not server.wait_for_agents(connect_timeout):
            raise ConnectionRefused("not every agent connected in time")
        return server.play_many(configs)
    finally:
        server.close()
        for thread in threads:
            thread.join(connect_timeout)


def run_experiment(spec: ExperimentSpec, progress: Optional[Callable[[int, GameRecord], None]] = None) -> ExperimentResult:
    """
    Runs spec.n_games seeded games (seeds base_seed + i) and their paired t-tests.

    Args:
        spec: The batch to run.
        progress: Called with (index, record) after each in-process game.

    Returns:
        ExperimentResult with per-game scores and per-opponent-type statistics.

    Raises:
        TacError: If a game fails; the message names its seed.
    """
    base = _game_config(spec)
    strategy = load_strategy_config(spec.strategy_config)
    state_dir = os.path.join(spec.out_dir, "state")
    # Learned state starts fresh every run so reruns are identical.
    stale = os.path.join(state_dir, f"{ATTAC}-{STATE_FILE}")
    if os.path.exists(stale):
        os.remove(stale)
    agents = build_agents(base.roster, strategy, state_dir)
    configs = [base.with_seed(spec.base_seed + i) for i in range(spec.n_games)]
    logger.info({"event": "experiment_start", "n_high": spec.n_high, "n_games": spec.n_games, "transport": spec.transport})

    result = ExperimentResult(spec)
    paths = [os.path.join(spec.out_dir, "games", f"game-{config.seed}.jsonl") for config in configs]
    if spec.transport == "wire":
        try:
            outcomes = _play_wire(configs, agents)
        except OSError as exc:
            raise TacError(f"wire batch starting at seed {spec.base_seed} failed: {exc!r}") from exc
        for config, outcome, path in zip(configs, outcomes, paths):
            outcome.transcript.write(path)
            result.games.append(_record(config, outcome, path))
    else:
        for i, (config, path) in enumerate(zip(configs, paths)):
            try:
                outcome = play_game(config, agents, path)
            except Exception as exc:
                raise TacError(f"game with seed {config.seed} failed: {exc!r}") from exc
            record = _record(config, outcome, path)
            result.games.append(record)
            if progress:
                progress(i, record)

    result.differences, result.stats = compute_statistics(result.games, spec.pooled, spec.alpha)
    write_results(result)
    logger.info(
        {"event": "experiment_end", "n_high": spec.n_high, "stats": {v: s.to_record() for v, s in result.stats.items()}}
    )
    return result


def write_results(result: ExperimentResult) -> None:
    out_dir = result.spec.out_dir
    lines = ["n_high,seed,agent,variant,score"]
    for game in result.games:
        for name, score in game.scores.items():
            lines.append(f"{result.spec.n_high},{game.seed},{name},{game.variants[name]},{score!r}")
    write_lines(os.path.join(out_dir, "results.csv"), lines)
    records = [game.to_record(result.spec.n_high) for game in result.games]
    records.append(result.summary_record())
    write_records(os.path.join(out_dir, "results.jsonl"), records)
