"""Hotel closing-price prediction and the high-bidder database.

Both persist across games through a line-delimited state file:

    {"type": "predictor", "alpha": 0.3, "predicted": {"BGH-edge": 150.0, ...},
     "history": {"BGH-edge": [142.0, ...], ...}}
    {"type": "bidder", "agent": "high-1", "max_bids": [104100, 98000]}

`max_bids` holds each recorded game's highest hotel bid in cents.
"""

import logging
import os
from collections import defaultdict
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

from src.market.goods import HOTEL_GOODS, GoodId, GoodKind, to_cents
from src.utils.config import StrategyConfig
from src.utils.data_processing import read_records, write_records

logger = logging.getLogger(__name__)

HOTEL_CLASSES = ("BGH-edge", "BGH-mid", "LFI-edge", "LFI-mid")


def class_of(good: GoodId) -> str:
    if not good.is_hotel:
        raise ValueError(f"{good} is not a hotel")
    hotel = "BGH" if good.kind is GoodKind.HOTEL_BGH else "LFI"
    return f"{hotel}-{'edge' if good.day in (1, 4) else 'mid'}"


class HotelPricePredictor:
    """Predicted closing price per hotel class, updated by exponential averaging."""

    def __init__(self, priors: Mapping[str, float], alpha: float = 0.3) -> None:
        missing = set(HOTEL_CLASSES) - set(priors)
        if missing:
            raise ValueError(f"no prior for {sorted(missing)}")
        if any(p < 0 for p in priors.values()):
            raise ValueError("priors must be non-negative")
        self.alpha = alpha
        self.predicted: Dict[str, float] = {c: float(priors[c]) for c in HOTEL_CLASSES}
        self.history: Dict[str, List[float]] = {c: [] for c in HOTEL_CLASSES}

    @classmethod
    def from_strategy(cls, strategy: StrategyConfig) -> "HotelPricePredictor":
        priors = {
            "BGH-edge": strategy.prior_bgh_edge,
            "BGH-mid": strategy.prior_bgh_mid,
            "LFI-edge": strategy.prior_lfi_edge,
            "LFI-mid": strategy.prior_lfi_mid,
        }
        return cls(priors, strategy.predictor_alpha)

    def predict(self, good: GoodId) -> float:
        """Predicted closing price in dollars."""
        return self.predicted[class_of(good)]

    def predict_cents(self, good: GoodId) -> int:
        return to_cents(self.predict(good))

    def update(self, closes: Mapping[GoodId, int]) -> None:
        """Fold one game's closing prices (cents) into the class predictions."""
        observed: Dict[str, List[float]] = defaultdict(list)
        for good, price in closes.items():
            observed[class_of(good)].append(price / 100.0)
        for hotel_class, prices in observed.items():
            mean = sum(prices) / len(prices)
            self.history[hotel_class].append(mean)
            self.predicted[hotel_class] = (1 - self.alpha) * self.predicted[hotel_class] + self.alpha * mean
        logger.debug({"event": "predictor_updated", "predicted": dict(self.predicted)})

    def to_record(self) -> Dict[str, object]:
        return {"type": "predictor", "alpha": self.alpha, "predicted": self.predicted, "history": self.history}

    @classmethod
    def from_record(cls, record: Mapping[str, object]) -> "HotelPricePredictor":
        predictor = cls(record["predicted"], float(record["alpha"]))
        for hotel_class, values in record.get("history", {}).items():
            predictor.history[hotel_class] = [float(v) for v in values]
        return predictor


class HighBidderDB:
    """Per-agent history of the highest hotel bid placed in each game."""

    def __init__(self, bid_threshold: float = 800.0, game_fraction: float = 0.5, unknown_is_high: bool = False) -> None:
        self.bid_threshold = bid_threshold
        self.game_fraction = game_fraction
        self.unknown_is_high = unknown_is_high
        self.max_bids: Dict[str, List[int]] = defaultdict(list)

    @classmethod
    def from_strategy(cls, strategy: StrategyConfig) -> "HighBidderDB":
        return cls(strategy.high_bid_threshold, strategy.high_game_fraction, strategy.unknown_is_high)

    def record_game(self, max_hotel_bids: Mapping[str, int]) -> None:
        for agent, cents in max_hotel_bids.items():
            self.max_bids[agent].append(int(cents))

    def is_high(self, agent: str) -> bool:
        games = self.max_bids.get(agent)
        if not games:
            return self.unknown_is_high
        high_games = sum(1 for cents in games if cents >= to_cents(self.bid_threshold))
        return high_games >= self.game_fraction * len(games)

    def records(self) -> Iterable[Dict[str, object]]:
        for agent in sorted(self.max_bids):
            yield {"type": "bidder", "agent": agent, "max_bids": self.max_bids[agent]}


def classify_high_bidders(db: HighBidderDB, roster: Iterable[str], exclude: Optional[str] = None) -> Tuple[int, Set[str]]:
    high = {agent for agent in roster if agent != exclude and db.is_high(agent)}
    return len(high), high


def save_state(file_path: str, predictor: HotelPricePredictor, db: HighBidderDB) -> None:
    write_records(file_path, [predictor.to_record(), *db.records()])


def load_state(file_path: str, strategy: StrategyConfig) -> Tuple[HotelPricePredictor, HighBidderDB]:
    """Predictor and database from `file_path`, or fresh ones when it does not exist."""
    predictor = HotelPricePredictor.from_strategy(strategy)
    db = HighBidderDB.from_strategy(strategy)
    if not os.path.exists(file_path):
        return predictor, db
    for record in read_records(file_path):
        if record.get("type") == "predictor":
            predictor = HotelPricePredictor.from_record(record)
        elif record.get("type") == "bidder":
            db.max_bids[record["agent"]] = [int(c) for c in record["max_bids"]]
    return predictor, db


def hotel_classes() -> Dict[str, List[GoodId]]:
    grouped: Dict[str, List[GoodId]] = defaultdict(list)
    for good in HOTEL_GOODS:
        grouped[class_of(good)].append(good)
    return dict(grouped)
