"""Goods traded in a TAC game, plus money helpers.

Market money is integer cents. Client preferences (GHV, EV) are whole dollars.
"""

import enum
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Union

MARKET = "MARKET"


class GoodKind(str, enum.Enum):
    INFLIGHT = "in"
    OUTFLIGHT = "out"
    HOTEL_BGH = "BGH"
    HOTEL_LFI = "LFI"
    ENT_BASEBALL = "B"
    ENT_SYMPHONY = "S"
    ENT_THEATER = "T"


FLIGHT_KINDS = (GoodKind.INFLIGHT, GoodKind.OUTFLIGHT)
HOTEL_KINDS = (GoodKind.HOTEL_BGH, GoodKind.HOTEL_LFI)
ENT_KINDS = (GoodKind.ENT_BASEBALL, GoodKind.ENT_SYMPHONY, GoodKind.ENT_THEATER)

_DAYS = {
    GoodKind.INFLIGHT: range(1, 5),
    GoodKind.OUTFLIGHT: range(2, 6),
}
_GOOD_PATTERN = re.compile(r"^(in|out|BGH|LFI|B|S|T)([1-5])$")


@dataclass(frozen=True)
class GoodId:
    kind: GoodKind
    day: int

    def __post_init__(self) -> None:
        if self.day not in _DAYS.get(self.kind, range(1, 5)):
            raise ValueError(f"day {self.day} is out of range for {self.kind.name}")

    @property
    def is_flight(self) -> bool:
        return self.kind in FLIGHT_KINDS

    @property
    def is_hotel(self) -> bool:
        return self.kind in HOTEL_KINDS

    @property
    def is_entertainment(self) -> bool:
        return self.kind in ENT_KINDS

    def __str__(self) -> str:
        return f"{self.kind.value}{self.day}"

    @classmethod
    def parse(cls, text: str) -> "GoodId":
        match = _GOOD_PATTERN.match(text.strip())
        if not match:
            raise ValueError(f"not a good: {text!r}")
        return cls(GoodKind(match.group(1)), int(match.group(2)))


def _goods(kind: GoodKind) -> List[GoodId]:
    return [GoodId(kind, day) for day in _DAYS.get(kind, range(1, 5))]


FLIGHT_GOODS: List[GoodId] = _goods(GoodKind.INFLIGHT) + _goods(GoodKind.OUTFLIGHT)
HOTEL_GOODS: List[GoodId] = _goods(GoodKind.HOTEL_BGH) + _goods(GoodKind.HOTEL_LFI)
# Allocator resource order: in1-4, out2-5, BGH1-4, LFI1-4.
TRAVEL_GOODS: List[GoodId] = FLIGHT_GOODS + HOTEL_GOODS
TICKET_GOODS: List[GoodId] = [g for kind in ENT_KINDS for g in _goods(kind)]
ALL_GOODS: List[GoodId] = TRAVEL_GOODS + TICKET_GOODS

GOOD_INDEX: Dict[GoodId, int] = {good: i for i, good in enumerate(ALL_GOODS)}
TRAVEL_INDEX: Dict[GoodId, int] = {good: i for i, good in enumerate(TRAVEL_GOODS)}
TICKET_INDEX: Dict[GoodId, int] = {good: i for i, good in enumerate(TICKET_GOODS)}


def to_cents(dollars: Union[int, float]) -> int:
    return int(round(dollars * 100))


def to_dollars(cents: Optional[Union[int, float]]) -> Optional[float]:
    if cents is None:
        return None
    return cents / 100.0
