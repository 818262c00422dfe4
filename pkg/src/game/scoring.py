"""Final-allocation validation and score accounting.

The live engine and transcript replay both score through these functions, so a
replayed game can only diverge if the transcript itself changed.
"""

import logging
from collections import Counter
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from src.errors import InvalidAllocation
from src.game.preferences import ClientAssignment, ClientPreference, utility
from src.market.goods import GoodId
from src.market.records import Transaction

logger = logging.getLogger(__name__)


def validate_allocation(
    clients: Sequence[ClientPreference],
    assignments: Iterable[ClientAssignment],
    holdings: Mapping[GoodId, int],
) -> Tuple[Dict[int, ClientAssignment], List[str]]:
    """Keep the assignments the holdings can cover, in client order.

    A client whose assignment is malformed, duplicated, out of range, or needs
    goods already used up by earlier clients is dropped (utility 0). Returns
    the accepted assignments keyed by 1-based client and the list of problems.
    """
    accepted: Dict[int, ClientAssignment] = {}
    problems: List[str] = []
    remaining = Counter({g: q for g, q in holdings.items() if q > 0})
    for assignment in sorted(assignments, key=lambda a: a.client):
        c = assignment.client
        if not 1 <= c <= len(clients):
            problems.append(f"client {c} out of range")
            continue
        if c in accepted:
            problems.append(f"client {c} assigned twice")
            continue
        faults = assignment.problems()
        if faults:
            problems.append(f"client {c}: {', '.join(faults)}")
            continue
        needed = assignment.goods()
        short = [str(g) for g, q in needed.items() if remaining.get(g, 0) < q]
        if short:
            problems.append(f"client {c}: not owned {', '.join(sorted(short))}")
            continue
        remaining.subtract(needed)
        accepted[c] = assignment
    return accepted, problems


def allocation_utility(
    clients: Sequence[ClientPreference],
    assignments: Iterable[ClientAssignment],
    holdings: Mapping[GoodId, int],
    agent: str = "",
    strict: bool = False,
) -> int:
    """Total client utility in dollars of the valid part of an allocation.

    With strict=True an allocation claiming unowned goods raises
    InvalidAllocation instead of being scored with the offending clients at 0.
    """
    accepted, problems = validate_allocation(clients, assignments, holdings)
    if problems:
        if strict:
            raise InvalidAllocation(f"{agent}: {'; '.join(problems)}")
        logger.warning({"event": "invalid_allocation", "agent": agent, "problems": problems})
    return sum(utility(clients[c - 1], a) for c, a in accepted.items())


def cash_flow(transactions: Iterable[Transaction], agent: str) -> Tuple[int, int]:
    """(purchase outlays, sale revenues) of one agent, in cents."""
    spent = earned = 0
    for t in transactions:
        if t.buyer == agent:
            spent += t.price * t.qty
        if t.seller == agent:
            earned += t.price * t.qty
    return spent, earned


def final_score(utility_dollars: int, transactions: Iterable[Transaction], agent: str) -> int:
    """Score in cents: client utility minus purchases plus sales."""
    spent, earned = cash_flow(transactions, agent)
    return utility_dollars * 100 - spent + earned
