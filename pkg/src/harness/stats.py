import math
from dataclasses import asdict, dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy.special import betainc

from src.errors import DegenerateSample


def paired_t(differences: Sequence[float]) -> Tuple[float, float]:
    """
    Paired t-test on per-game score differences.

    Args:
        differences: One difference per game (at least two).

    Returns:
        (t, p): The t statistic and its two-sided p-value with n - 1 degrees of freedom.

    Raises:
        ValueError: If fewer than two differences are given.
        DegenerateSample: If every difference is identical.
    """
    d = np.asarray(differences, dtype=float)
    n = len(d)
    if n < 2:
        raise ValueError(f"paired t-test needs at least 2 differences, got {n}")
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0:
        raise DegenerateSample(mean, n)
    t = mean / (sd / math.sqrt(n))
    df = n - 1
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return t, p


@dataclass(frozen=True)
class OpponentStats:
    """Mean score difference (ATTac minus opponent, dollars) and its test."""

    n: int
    mean: float
    t: float
    p: float
    significant: bool

    def to_record(self) -> Dict[str, object]:
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(self).items()}

    @classmethod
    def from_record(cls, record: Dict[str, object]) -> "OpponentStats":
        def number(key: str) -> float:
            value = record.get(key)
            return math.nan if value is None else float(value)

        return cls(int(record["n"]), number("mean"), number("t"), number("p"), bool(record["significant"]))


def summarize(differences: Sequence[float], alpha: float = 0.01) -> OpponentStats:
    """Paired-t summary; a zero-variance sample reads as t = +/-inf, p = 0 when its mean is non-zero."""
    n = len(differences)
    mean = float(np.mean(differences)) if n else math.nan
    try:
        t, p = paired_t(differences)
    except DegenerateSample as exc:
        if exc.mean == 0:
            t, p = math.nan, math.nan
        else:
            t, p = math.copysign(math.inf, exc.mean), 0.0
    except ValueError:
        t, p = math.nan, math.nan
    return OpponentStats(n, mean, t, p, bool(p < alpha) if not math.isnan(p) else False)
