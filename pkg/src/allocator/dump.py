"""Line-delimited dumps of allocation problems and solutions.

A problem line:

    {"type": "problem", "u_p": [[...20] x C], "u_e": [[...12] x C],
     "owned": [...16], "owned_tickets": [...12], "prices": [...16],
     "barred": [[...20] x C]}

Money is cents. Resources are ordered in1-4, out2-5, BGH1-4, LFI1-4 and
tickets B1-4, S1-4, T1-4. An unpurchasable resource has price null.
`barred` may be omitted.

A solution line:

    {"type": "solution", "status": "Optimal", "value": 944300, "nodes": 17,
     "assignments": [{"client": 1, "package": "2-5-LFI", "tickets": ["B4"]}, ...],
     "buy": {"in2": 1, ...}}
"""

import math
from typing import Any, Dict, List

import numpy as np

from src.allocator.problem import UNPURCHASABLE, AllocationProblem, AllocationSolution
from src.market.goods import TRAVEL_GOODS
from src.utils.data_processing import read_records


def problem_to_record(problem: AllocationProblem) -> Dict[str, Any]:
    return {
        "type": "problem",
        "u_p": problem.u_p.tolist(),
        "u_e": problem.u_e.tolist(),
        "owned": problem.owned.tolist(),
        "owned_tickets": problem.owned_tickets.tolist(),
        "prices": [None if math.isinf(p) else int(p) for p in problem.prices],
        "barred": problem.barred.astype(int).tolist(),
    }


def problem_from_record(record: Dict[str, Any]) -> AllocationProblem:
    if record.get("type") != "problem":
        raise ValueError(f"not a problem record: {record.get('type')!r}")
    n_clients = len(record["u_p"])
    return AllocationProblem(
        np.array(record["u_p"], dtype=np.int64).reshape(n_clients, -1),
        np.array(record["u_e"], dtype=np.int64).reshape(n_clients, -1),
        np.array(record["owned"]),
        np.array(record["owned_tickets"]),
        np.array([UNPURCHASABLE if p is None else p for p in record["prices"]], dtype=float),
        np.array(record["barred"], dtype=bool).reshape(n_clients, -1) if record.get("barred") else None,
    )


def solution_to_record(solution: AllocationSolution) -> Dict[str, Any]:
    return {
        "type": "solution",
        "status": solution.status,
        "value": int(solution.value),
        "nodes": int(solution.nodes),
        "assignments": [a.to_record() for a in solution.assignments()],
        "buy": {str(TRAVEL_GOODS[r]): int(q) for r, q in enumerate(solution.B) if q > 0},
    }


def load_problems(file_path: str) -> List[AllocationProblem]:
    return [problem_from_record(r) for r in read_records(file_path) if r.get("type") == "problem"]
