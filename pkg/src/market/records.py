from dataclasses import dataclass
from typing import Any, Dict, Optional

from src.market.goods import GoodId


@dataclass(frozen=True)
class Quote:
    """Public price information for one auction at one tick (cents)."""

    good: GoodId
    bid: Optional[int]
    ask: Optional[int]
    closed: bool
    tick: int

    def to_record(self) -> Dict[str, Any]:
        return {
            "good": str(self.good),
            "bid": self.bid,
            "ask": self.ask,
            "closed": self.closed,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any], tick: int) -> "Quote":
        return cls(
            GoodId.parse(record["good"]),
            record.get("bid"),
            record.get("ask"),
            bool(record.get("closed", False)),
            tick,
        )


@dataclass(frozen=True)
class Transaction:
    good: GoodId
    buyer: str
    seller: str
    price: int
    qty: int
    tick: int

    def __post_init__(self) -> None:
        if self.price < 0:
            raise ValueError(f"negative price {self.price}")
        if self.qty < 1:
            raise ValueError(f"quantity must be at least 1, got {self.qty}")

    def to_record(self) -> Dict[str, Any]:
        return {
            "good": str(self.good),
            "buyer": self.buyer,
            "seller": self.seller,
            "price": self.price,
            "qty": self.qty,
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any], tick: int) -> "Transaction":
        return cls(
            GoodId.parse(record["good"]),
            record["buyer"],
            record["seller"],
            int(record["price"]),
            int(record["qty"]),
            tick,
        )
