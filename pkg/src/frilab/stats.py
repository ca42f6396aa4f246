"""Binomial estimates with Wilson score intervals."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

Z95 = 1.959963984540054


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n <= 0:
        return 0.0, 1.0
    p = k / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo, hi = max(0.0, centre - half), min(1.0, centre + half)
    # keep the point estimate inside the interval despite rounding
    return min(lo, p), max(hi, p)


@dataclass(frozen=True)
class EstimateCI:
    n_success: int
    n_total: int
    estimate: float
    ci_lo: float
    ci_hi: float

    @classmethod
    def from_counts(cls, k: int, n: int) -> "EstimateCI":
        k, n = int(k), int(n)
        if not 0 <= k <= n:
            raise ValueError("need 0 <= successes <= trials")
        lo, hi = wilson_interval(k, n)
        return cls(k, n, k / n if n else 0.0, lo, hi)

    @property
    def stderr(self) -> float:
        if self.n_total == 0:
            return math.inf
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.n_total)

    def overlaps(self, other: "EstimateCI") -> bool:
        return self.ci_lo <= other.ci_hi and other.ci_lo <= self.ci_hi

    def to_dict(self) -> dict:
        return asdict(self)
