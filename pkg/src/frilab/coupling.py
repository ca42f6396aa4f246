"""Monotone coupling of FRI at two fiber parameters T1 < T2 with T1*T2 <= 1.

Per directed edge three independent Poisson counts are drawn. The first
``N1 + N2`` indices carry a pair of fibers that share one walk: the T1 fiber
stops after ``Y1`` edges, the T2 fiber after ``Y2 >= Y1``. The remaining
``N3`` indices carry a T2 fiber only. The low edge set is therefore contained
in the high one in every realisation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import _pykernels as pk
from ._backend import kernels
from .fri import FriSample, PaddingPolicy, padding_radius
from .lattice import Box, EdgeSet, check_dim
from .randomness import SeedSpec, _check_T, survival_probability


@dataclass(frozen=True)
class CouplingIntensities:
    """Poisson rates per directed edge of the three fiber classes."""

    lambda1: float
    lambda2: float
    lambda3: float

    @property
    def low_total(self) -> float:
        return self.lambda1 + self.lambda2

    @property
    def high_total(self) -> float:
        return self.lambda1 + self.lambda2 + self.lambda3


def raw_intensities(u: float, T1: float, T2: float) -> CouplingIntensities:
    """The three rates without the admissibility check (``lambda3`` may be negative)."""
    a, b = T1 + 1.0, T2 + 1.0
    return CouplingIntensities(
        u * T1 / (a * b),
        u * T1 * (T2 - T1) / (a * a * b),
        u * (T2 - T1) * (1.0 - T1 * T2) / (a * a * b * b),
    )


def coupling_intensities(u: float, T1: float, T2: float) -> CouplingIntensities:
    T1, T2 = _check_T(T1), _check_T(T2)
    if not (u >= 0.0) or not math.isfinite(u):
        raise ValueError("intensity u must be finite and non-negative")
    if T1 >= T2:
        raise ValueError("monotone coupling requires T1 < T2")
    if T1 * T2 > 1.0:
        raise ValueError("monotone coupling requires T1*T2 ≤ 1")
    lam = raw_intensities(u, T1, T2)
    # T1*T2 == 1 up to rounding gives a tiny negative third rate
    return CouplingIntensities(lam.lambda1, lam.lambda2, max(lam.lambda3, 0.0))


@dataclass
class CoupledPair:
    low: FriSample
    high: FriSample

    @property
    def dominated(self) -> bool:
        return self.low.open_edges.issubset(self.high.open_edges)


def coupled_params(d: int, lam: CouplingIntensities, T1: float, T2: float) -> tuple:
    return (2 * d * lam.lambda1, 2 * d * lam.lambda2, 2 * d * lam.lambda3,
            math.log(survival_probability(T1)), math.log(survival_probability(T2)))


def coupled_pad(window: Box, u: float, T1: float, T2: float, policy: PaddingPolicy) -> int:
    return max(padding_radius(window, u, T1, policy), padding_radius(window, u, T2, policy))


def sample_coupled(
    window: Box,
    u: float,
    T1: float,
    T2: float,
    policy: PaddingPolicy,
    stream: SeedSpec,
    *,
    pad: int | None = None,
    record: bool = True,
    allow_unsupported: bool = False,
) -> CoupledPair:
    """Draw FRI at T1 and T2 from shared randomness; low ⊆ high always."""
    check_dim(window.d, allow_unsupported)
    lam = coupling_intensities(u, T1, T2)
    if pad is None:
        pad = coupled_pad(window, u, T1, T2, policy)
    low, high, fl, fh = kernels.sample_fri(
        pk.MODE_COUPLED, window.d, window.corner, window.side, int(pad),
        coupled_params(window.d, lam, T1, T2), stream.key, bool(record), False)
    fl = fl if record else (None, None)
    fh = fh if record else (None, None)
    lo = FriSample(u, T1, window.d, window, pad, EdgeSet(window, low), "coupled",
                   stream, policy.epsilon, fl[0], fl[1])
    hi = FriSample(u, T2, window.d, window, pad, EdgeSet(window, high), "coupled",
                   stream, policy.epsilon, fh[0], fh[1])
    return CoupledPair(lo, hi)
