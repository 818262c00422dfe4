"""Exceptions raised across the market, allocator, harness and wire transport."""

from typing import Any, Optional


class TacError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(TacError):
    """A configuration file or value failed validation."""


class BidTooLow(TacError):
    """A hotel bid did not beat the current ask."""

    def __init__(self, good: Any, price: int, ask: int) -> None:
        super().__init__(f"bid {price} on {good} does not beat ask {ask}")
        self.good = good
        self.price = price
        self.ask = ask


class AuctionClosed(TacError):
    """An operation targeted an auction that has already closed."""


class InsufficientHoldings(TacError):
    """A sell order exceeds the seller's holdings net of its standing sells."""


class UnknownOrder(TacError):
    """Withdrawal of an order that does not exist or belongs to someone else."""


class InvalidAllocation(TacError):
    """A final allocation claims goods the agent does not own."""


class SolverTimeout(TacError):
    """The exact allocator ran out of its budget.

    Carries the best incumbent found so far (may be None).
    """

    def __init__(self, elapsed: float, budget: float, incumbent: Optional[Any] = None) -> None:
        super().__init__(f"exact solve exceeded budget ({elapsed:.2f}s > {budget:.2f}s)")
        self.elapsed = elapsed
        self.budget = budget
        self.incumbent = incumbent


class DegenerateSample(TacError):
    """All paired differences are identical, so the t statistic is undefined or infinite."""

    def __init__(self, mean: float, n: int) -> None:
        super().__init__(f"zero variance over {n} differences (mean {mean})")
        self.mean = mean
        self.n = n


class CorruptTranscript(TacError):
    """A transcript file cannot be parsed or is truncated."""


class SlotExhausted(TacError):
    """No free agent slot is left on the market server."""


class ProtocolViolation(TacError):
    """A malformed or out-of-sequence frame was received."""


class NameTaken(TacError):
    """Another connection already claimed this agent name."""


class ConnectionRefused(TacError):
    """The market server refused the connection."""
