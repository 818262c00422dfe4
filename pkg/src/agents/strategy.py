"""Mode switching, timing and the price schedules of the ATTac strategy.

Times are simulated seconds; prices are dollars unless a name says cents.
"""

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from src.utils.config import StrategyConfig


class AgentMode(str, enum.Enum):
    PASSIVE = "passive"
    ACTIVE = "active"


def decide_mode(seconds_left: float, mean_iteration: Optional[float], current: AgentMode = AgentMode.PASSIVE) -> AgentMode:
    """Active once the time left fits at most two more bidding iterations.

    Without a measured iteration time the agent stays passive, and an active
    agent never goes back.
    """
    if current is AgentMode.ACTIVE:
        return AgentMode.ACTIVE
    if mean_iteration is None:
        return AgentMode.PASSIVE
    return AgentMode.ACTIVE if seconds_left <= 2 * mean_iteration else AgentMode.PASSIVE


@dataclass
class TimingState:
    """Running mean of iteration durations, measured between prompts."""

    durations: List[float] = field(default_factory=list)
    last_tick: Optional[int] = None
    iterations: int = 0
    active_iterations: int = 0

    @property
    def mean_iteration(self) -> Optional[float]:
        if not self.durations:
            return None
        return sum(self.durations) / len(self.durations)

    def observe(self, tick: int, seconds_per_tick: float) -> None:
        if self.last_tick is not None and tick > self.last_tick:
            self.durations.append((tick - self.last_tick) * seconds_per_tick)
        self.last_tick = tick
        self.iterations += 1

    def should_skip(self, mode: AgentMode, seconds_left: float) -> bool:
        """A further active iteration that cannot land before the end is skipped."""
        mean = self.mean_iteration
        return (
            mode is AgentMode.ACTIVE
            and self.active_iterations >= 1
            and mean is not None
            and seconds_left < mean
        )


def passive_hotel_target(ask: float, needed: int, tiers: Sequence[Tuple[float, int]], zero_rooms: int = 8) -> int:
    """Rooms to hold in one hotel auction while passive.

    At a zero ask the agent takes `zero_rooms`; otherwise the first tier whose
    price bound covers the ask sets a floor on top of what G* needs.
    """
    if ask <= 0:
        return zero_rooms
    for max_price, rooms in sorted(tiers):
        if ask <= max_price:
            return max(needed, rooms)
    return needed


@dataclass(frozen=True)
class EntValueSchedule:
    """The three entertainment margins, linear in the fraction of time left."""

    sell_alloc: Tuple[float, float]
    sell_unalloc: Tuple[float, float]
    buy: Tuple[float, float]

    @classmethod
    def from_strategy(cls, strategy: StrategyConfig) -> "EntValueSchedule":
        return cls(
            (strategy.sell_alloc_delta_start, strategy.sell_alloc_delta_end),
            (strategy.sell_unalloc_delta_start, strategy.sell_unalloc_delta_end),
            (strategy.buy_delta_start, strategy.buy_delta_end),
        )

    @staticmethod
    def _at(endpoints: Tuple[float, float], fraction_left: float) -> float:
        start, end = endpoints
        fraction_left = min(1.0, max(0.0, fraction_left))
        return end + (start - end) * fraction_left

    def deltas(self, fraction_left: float) -> Tuple[float, float, float]:
        """(sell allocated, sell unallocated, buy) margins in dollars."""
        return (
            self._at(self.sell_alloc, fraction_left),
            self._at(self.sell_unalloc, fraction_left),
            self._at(self.buy, fraction_left),
        )
