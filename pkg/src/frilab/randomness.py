"""Deterministic, order-independent random streams and the exact laws FRI needs.

A stream is addressed by ``SeedSpec(master_seed, stream_path)``. Its key is a
hash chain over the path, and the i-th 64-bit output is a hash of
``(key, i)``, so streams can be drawn in any order or in parallel.

Every sampler below accepts either a :class:`SeedSpec` (a fresh stream is
opened) or a live :class:`Stream` (draws continue from its counter). With
``size=n`` a sampler returns ``n`` draws, draw ``i`` taken from the child
stream ``path + (i,)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _pykernels as pk
from ._backend import kernels
from ._pykernels import Stream, derive, mix64, root_key

__all__ = [
    "SeedSpec",
    "Stream",
    "mix64",
    "poisson",
    "fiber_length",
    "coupled_fiber_lengths",
    "killing_survives",
    "survival_probability",
]


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_path: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "stream_path", tuple(int(i) for i in self.stream_path))

    @property
    def key(self) -> int:
        key = root_key(self.master_seed)
        for element in self.stream_path:
            key = derive(key, element)
        return key

    def child(self, *path: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream_path + tuple(path))

    def stream(self) -> Stream:
        return Stream(self.key)


StreamLike = Union[SeedSpec, Stream]


def _open(stream: StreamLike) -> Stream:
    if isinstance(stream, SeedSpec):
        return stream.stream()
    if isinstance(stream, Stream):
        return stream
    raise TypeError(f"expected SeedSpec or Stream, got {type(stream).__name__}")


def _batch_key(stream: StreamLike) -> int:
    if not isinstance(stream, SeedSpec):
        raise TypeError("batched draws need a SeedSpec")
    return stream.key


def survival_probability(T: float) -> float:
    return T / (T + 1.0)


def _check_T(T: float) -> float:
    T = float(T)
    if not (T > 0.0) or not math.isfinite(T):
        raise ValueError(f"fiber parameter T must be positive and finite, got {T}")
    return T


def poisson(lam: float, stream: StreamLike, size: int | None = None):
    """Exact Poisson(lam): inversion below 30, PTRS rejection above."""
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0.0:
        raise ValueError(f"Poisson mean must be finite and non-negative, got {lam}")
    if size is not None:
        return kernels.draw_batch(pk.DRAW_POISSON, (lam,), _batch_key(stream), int(size))
    return pk.poisson(_open(stream), lam)


def fiber_length(T: float, stream: StreamLike, size: int | None = None):
    """Total edge count of a fiber of length >= 1: P(Y=k) = (1/(T+1)) (T/(T+1))^(k-1)."""
    logq = math.log(survival_probability(_check_T(T)))
    if size is not None:
        return kernels.draw_batch(pk.DRAW_FIBER_LENGTH, (logq,), _batch_key(stream), int(size))
    return pk.fiber_length(_open(stream), logq)


def coupled_fiber_lengths(T1: float, T2: float, stream: StreamLike, size: int | None = None):
    """Monotone pair (Y1, Y2), Y1 <= Y2, from one shared uniform through both inverse CDFs."""
    T1, T2 = _check_T(T1), _check_T(T2)
    if T1 >= T2:
        raise ValueError("coupled fiber lengths need T1 < T2")
    logq1 = math.log(survival_probability(T1))
    logq2 = math.log(survival_probability(T2))
    if size is not None:
        return kernels.draw_batch(pk.DRAW_COUPLED_LENGTHS, (logq1, logq2), _batch_key(stream), int(size))
    return pk.coupled_lengths(_open(stream), logq1, logq2)


def killing_survives(T: float, stream: StreamLike, size: int | None = None):
    """One killing check: survive with probability T/(T+1)."""
    q = survival_probability(_check_T(T))
    if size is not None:
        out = kernels.draw_batch(pk.DRAW_SURVIVES, (q,), _batch_key(stream), int(size))
        return out.astype(bool)
    return _open(stream).uniform() < q


def fiber_length_pmf(T: float, k: Sequence[int] | np.ndarray) -> np.ndarray:
    q = survival_probability(_check_T(T))
    k = np.asarray(k)
    return np.where(k >= 1, (1.0 - q) * q ** (k - 1.0), 0.0)
