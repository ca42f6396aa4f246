"""Experiment driver: crossing curves, threshold bisection and the phase checks.

The criticality proxy is the crossing event of a cubic window: the centred box
of side ``L // 3`` joined by open edges to the window's inner boundary. With
``L = 3 L_1`` this is the level-one crossing event of the box hierarchy.

Replica ``r`` of every grid point uses the stream ``SeedSpec(seed, (r,))``, so
estimates at different T, u or p are driven by common random numbers. This
keeps bisection paths stable and makes outputs reproducible regardless of how
replicas are split over worker processes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing as mp
import warnings
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from . import _pykernels as pk
from ._backend import kernels
from .fri import PaddingPolicy, edgewise_params, padding_radius, sitewise_params
from .lattice import Box, check_dim
from .percolation import central_box
from .randomness import SeedSpec, _check_T
from .stats import EstimateCI

CSV_COLUMNS = ("u", "T", "L", "replicas", "successes", "estimate", "ci_lo", "ci_hi", "seed")
MAX_SAMPLED_SITES = 60_000_000


@dataclass
class ExperimentConfig:
    d: int = 3
    u: list = field(default_factory=lambda: [1.0])
    T: list = field(default_factory=lambda: [1.0])
    p: list = field(default_factory=list)
    L: int = 16
    l0: int = 4
    L0: int = 2
    levels: int = 1
    replicas: int = 200
    seed: int = 0
    epsilon: float = 1e-6
    tol: float = 0.01
    threshold: float = 0.5
    T_lo: float | None = None
    T_hi: float | None = None
    jobs: int = 1
    sampler: str = "edgewise"

    def __post_init__(self):
        self.u = _as_list(self.u)
        self.T = _as_list(self.T)
        self.p = _as_list(self.p)
        check_dim(self.d)
        if self.L < 3:
            raise ValueError("window side L must be at least 3")
        if self.replicas < 1:
            raise ValueError("replicas must be positive")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")

    @property
    def window(self) -> Box:
        return Box.cube(self.d, self.L)

    @property
    def policy(self) -> PaddingPolicy:
        return PaddingPolicy(self.epsilon)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _as_list(v) -> list:
    if v is None:
        return []
    if isinstance(v, (int, float)):
        return [float(v)]
    return [float(x) for x in v]


# ---------------------------------------------------------------------------
# replica execution


def _count_crossings(task) -> int:
    mode, d, L, pad, params, seed, first_only, start, stop = task
    inner = Box.cube(d, L).box_mask(central_box(Box.cube(d, L)))
    bnd = Box.cube(d, L).boundary_mask()
    corner = (0,) * d
    base = SeedSpec(seed)
    hits = 0
    for r in range(start, stop):
        bits = kernels.sample_fri(mode, d, corner, L, pad, params, base.child(r).key,
                                  False, first_only)[0]
        hits += bool(kernels.reach(bits, d, L, inner, bnd))
    return hits


class ReplicaRunner:
    """Runs replica ranges inline or on a process pool; results are summed in order."""

    def __init__(self, jobs: int = 1):
        self.jobs = jobs
        self._pool = None

    def __enter__(self):
        if self.jobs > 1:
            self._pool = mp.get_context("fork").Pool(self.jobs)
        return self

    def __exit__(self, *exc):
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None

    def count(self, mode, d, L, pad, params, seed, first_only, replicas) -> int:
        if self._pool is None:
            return _count_crossings((mode, d, L, pad, params, seed, first_only, 0, replicas))
        bounds = np.linspace(0, replicas, self.jobs + 1).astype(int)
        tasks = [(mode, d, L, pad, params, seed, first_only, int(a), int(b))
                 for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        return sum(self._pool.map(_count_crossings, tasks))


@dataclass
class PointResult:
    """One grid point: parameters, estimate and provenance."""

    u: float | None
    T: float | None
    L: int
    estimate: EstimateCI
    seed: int
    pad: int = 0
    p: float | None = None

    def row(self) -> dict:
        e = self.estimate
        out = {"u": self.u, "T": self.T, "L": self.L, "replicas": e.n_total,
               "successes": e.n_success, "estimate": e.estimate, "ci_lo": e.ci_lo,
               "ci_hi": e.ci_hi, "seed": self.seed, "pad": self.pad}
        if self.p is not None:
            out["p"] = self.p
        return out


class CrossingEstimator:
    """Crossing-probability estimates on the configured window."""

    def __init__(self, cfg: ExperimentConfig, runner: ReplicaRunner | None = None,
                 replicas: int | None = None, L: int | None = None):
        self.cfg = cfg
        self.runner = runner or ReplicaRunner(1)
        self.replicas = replicas or cfg.replicas
        self.L = L or cfg.L
        self.window = Box.cube(cfg.d, self.L)

    def _check_budget(self, pad: int) -> None:
        if (self.L + 2 * pad) ** self.cfg.d > MAX_SAMPLED_SITES:
            raise ValueError(
                f"window {self.L} with pad {pad} exceeds the sampling budget; "
                "lower L, T or raise epsilon")

    def _run(self, mode, pad, params, first_only=False) -> EstimateCI:
        k = self.runner.count(mode, self.cfg.d, self.L, pad, tuple(params), self.cfg.seed,
                              first_only, self.replicas)
        return EstimateCI.from_counts(k, self.replicas)

    def fri(self, u: float, T: float) -> PointResult:
        _check_T(T)
        if u == 0:
            return PointResult(u, T, self.L, EstimateCI.from_counts(0, self.replicas),
                               self.cfg.seed)
        pad = padding_radius(self.window, u, T, self.cfg.policy)
        self._check_budget(pad)
        if self.cfg.sampler == "sitewise":
            est = self._run(pk.MODE_SITEWISE, pad, sitewise_params(self.cfg.d, u, T))
        elif self.cfg.sampler == "edgewise":
            est = self._run(pk.MODE_EDGEWISE, pad, edgewise_params(self.cfg.d, u, T))
        else:
            raise ValueError(f"unknown sampler {self.cfg.sampler!r}")
        return PointResult(u, T, self.L, est, self.cfg.seed, pad)

    def first_step(self, u: float, T: float) -> PointResult:
        """Crossing of the first-step edges of a site-wise sample.

        A first edge inside the window starts inside it, so no padding is needed.
        """
        _check_T(T)
        est = self._run(pk.MODE_SITEWISE, 0, sitewise_params(self.cfg.d, u, T), True)
        return PointResult(u, T, self.L, est, self.cfg.seed, 0)

    def bernoulli(self, p: float) -> PointResult:
        if not 0.0 <= p <= 1.0:
            raise ValueError("edge probability must lie in [0, 1]")
        est = self._run(pk.MODE_BERNOULLI, 0, (p,))
        return PointResult(None, None, self.L, est, self.cfg.seed, 0, p)


def first_step_probability(u: float, T: float) -> float:
    """Open probability of an edge in the first-step process (both directions superposed)."""
    return -math.expm1(-2.0 * u * T / (T + 1.0) ** 2)


# ---------------------------------------------------------------------------
# curves


def crossing_curve(cfg: ExperimentConfig, runner: ReplicaRunner | None = None) -> list[PointResult]:
    """Crossing estimates over ``cfg.T`` (ascending) at ``cfg.u[0]``."""
    if list(cfg.T) != sorted(cfg.T):
        raise ValueError("T-grid must be sorted ascending")
    est = CrossingEstimator(cfg, runner)
    return [est.fri(cfg.u[0], T) for T in cfg.T]


def bernoulli_mode_curve(p_grid: Sequence[float], cfg: ExperimentConfig,
                         runner: ReplicaRunner | None = None) -> list[PointResult]:
    if any(not 0.0 <= p <= 1.0 for p in p_grid):
        raise ValueError("p-grid must lie in [0, 1]")
    est = CrossingEstimator(cfg, runner)
    return [est.bernoulli(p) for p in p_grid]


def first_step_curve(cfg: ExperimentConfig, runner: ReplicaRunner | None = None
                     ) -> list[tuple[PointResult, PointResult]]:
    """Pairs (first-step FRI crossing, Bernoulli crossing at the matching p) over ``cfg.T``."""
    est = CrossingEstimator(cfg, runner)
    u = cfg.u[0]
    return [(est.first_step(u, T), est.bernoulli(first_step_probability(u, T))) for T in cfg.T]


def u_phase_curve(T: float, u_grid: Sequence[float], cfg: ExperimentConfig,
                  runner: ReplicaRunner | None = None) -> list[PointResult]:
    if list(u_grid) != sorted(u_grid):
        raise ValueError("u-grid must be sorted ascending")
    est = CrossingEstimator(cfg, runner)
    return [est.fri(u, T) for u in u_grid]


def nondecreasing_up_to_ci(points: Sequence[EstimateCI]) -> bool:
    """No later estimate lies entirely below an earlier one."""
    return all(points[j].ci_hi >= points[i].ci_lo
               for i in range(len(points)) for j in range(i + 1, len(points)))


# ---------------------------------------------------------------------------
# threshold bisection


@dataclass
class PhasePoint:
    u: float | None
    estimate: float
    bracket: tuple
    ci: tuple
    L: int
    threshold: float
    validity: str
    evaluations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "u": self.u, "estimate": self.estimate, "bracket": list(self.bracket),
            "ci": list(self.ci), "L": self.L, "threshold": self.threshold,
            "validity": self.validity,
            "evaluations": [r.row() for r in self.evaluations],
        }


def bisect_threshold(f: Callable[[float], PointResult], lo: float, hi: float,
                     threshold: float, tol: float, log_scale: bool = False):
    """Bisection for the point where ``f`` crosses ``threshold``.

    ``tol`` is absolute, or relative (on the log scale) when ``log_scale``.
    Returns ``(lo, hi, evaluations)`` with the final bracket.
    """
    if not lo < hi:
        raise ValueError("bracket invalid: need lo < hi")
    if tol <= 0:
        raise ValueError("tol must be positive")
    flo, fhi = f(lo), f(hi)
    evals = [flo, fhi]
    if not (flo.estimate.ci_hi < threshold < fhi.estimate.ci_lo):
        raise ValueError(
            f"bracket invalid: estimates {flo.estimate.estimate:.3f} at {lo} and "
            f"{fhi.estimate.estimate:.3f} at {hi} do not straddle {threshold}")
    while True:
        width = math.log(hi / lo) if log_scale else hi - lo
        if width <= tol:
            break
        mid = math.sqrt(lo * hi) if log_scale else 0.5 * (lo + hi)
        fm = f(mid)
        evals.append(fm)
        if fm.estimate.estimate >= threshold:
            hi = mid
        else:
            lo = mid
    return lo, hi, evals


def _statistical_interval(evals, key, threshold) -> tuple[float, float]:
    """Outermost evaluated parameters still statistically below / above the threshold."""
    below = [key(r) for r in evals if r.estimate.ci_hi < threshold]
    above = [key(r) for r in evals if r.estimate.ci_lo > threshold]
    return (max(below) if below else -math.inf, min(above) if above else math.inf)


def _validity(evals, hi: float) -> str:
    if hi <= 1.0:
        return "proven-monotone"
    pts = [r.estimate for r in sorted(evals, key=lambda r: r.T)]
    return "heuristic" if nondecreasing_up_to_ci(pts) else "unverified"


def default_bracket(u: float) -> tuple[float, float]:
    """A wide starting bracket: u T near 0.02 and 2 at large u, generous at small u."""
    if u >= 1.0:
        return 0.02 / u, 1.0 / u
    return 0.3, 400.0


def estimate_tc(cfg: ExperimentConfig, threshold: float | None = None, tol: float | None = None,
                *, u: float | None = None, bracket: tuple | None = None,
                estimator: Callable[[float], PointResult] | None = None,
                log_scale: bool = False, runner: ReplicaRunner | None = None) -> PhasePoint:
    """Finite-size pseudo-critical T by bisection on the crossing estimate.

    ``estimator`` maps T to a :class:`PointResult`; the default samples FRI.
    Monotonicity in T is proven for brackets inside (0, 1] (coupling); beyond
    that the result is ``heuristic`` when the evaluated curve is monotone up to
    its CIs and ``unverified`` otherwise.
    """
    threshold = cfg.threshold if threshold is None else threshold
    tol = cfg.tol if tol is None else tol
    u = cfg.u[0] if u is None else u
    if bracket is None:
        if cfg.T_lo is not None and cfg.T_hi is not None:
            bracket = (cfg.T_lo, cfg.T_hi)
        else:
            bracket = default_bracket(u)
    if estimator is None:
        ce = CrossingEstimator(cfg, runner)
        estimator = lambda T: ce.fri(u, T)
    lo, hi, evals = bisect_threshold(estimator, bracket[0], bracket[1], threshold, tol, log_scale)
    mid = math.sqrt(lo * hi) if log_scale else 0.5 * (lo + hi)
    ci = _statistical_interval(evals, lambda r: r.T, threshold)
    return PhasePoint(u, mid, (lo, hi), ci, cfg.L, threshold, _validity(evals, hi), evals)


def estimate_pc(cfg: ExperimentConfig, threshold: float | None = None, tol: float = 0.001,
                *, bracket: tuple = (0.1, 0.5), replicas: int | None = None,
                runner: ReplicaRunner | None = None) -> PhasePoint:
    """Pseudo-critical Bernoulli edge probability on the configured window."""
    threshold = cfg.threshold if threshold is None else threshold
    ce = CrossingEstimator(cfg, runner, replicas=replicas)
    lo, hi, evals = bisect_threshold(ce.bernoulli, bracket[0], bracket[1], threshold, tol)
    ci = _statistical_interval(evals, lambda r: r.p, threshold)
    # Bernoulli crossing is monotone in p under the shared uniforms
    return PhasePoint(None, 0.5 * (lo + hi), (lo, hi), ci, cfg.L, threshold,
                      "proven-monotone", evals)


def asymptotic_target(p_c: float) -> float:
    """Limit of u T_c as u grows, in terms of the Bernoulli critical value."""
    return -math.log1p(-p_c) / 2.0


@dataclass
class HighUResult:
    p_c: PhasePoint
    target: float
    rows: list
    approaching: bool

    def to_dict(self) -> dict:
        return {"p_c": self.p_c.to_dict(), "target": self.target,
                "approaching": self.approaching, "rows": self.rows}


def high_u_asymptotic(u_list: Sequence[float], cfg: ExperimentConfig, *,
                      calib_replicas: int | None = None, pc_tol: float = 0.001,
                      surrogate: bool = False, runner: ReplicaRunner | None = None) -> HighUResult:
    """u T_c over ascending u against the target from the self-calibrated p_c.

    ``cfg.tol`` is the bisection tolerance on the product u T. With
    ``surrogate`` the FRI sampler is replaced by Bernoulli edges at the
    first-step probability, whose threshold is known in closed form.
    """
    if list(u_list) != sorted(u_list) or min(u_list) <= 0:
        raise ValueError("u_list must be ascending and positive")
    pc = estimate_pc(cfg, tol=pc_tol, replicas=calib_replicas, runner=runner)
    target = asymptotic_target(pc.estimate)
    ce = CrossingEstimator(cfg, runner)
    rows = []
    for u in u_list:
        if surrogate:
            est = lambda T, u=u: _relabel(ce.bernoulli(first_step_probability(u, T)), u, T)
        else:
            est = lambda T, u=u: ce.fri(u, T)
        pp = estimate_tc(cfg, u=u, tol=cfg.tol / u, bracket=default_bracket(u), estimator=est)
        rows.append({
            "u": u, "Tc": pp.estimate, "uTc": u * pp.estimate,
            "bracket": [u * pp.bracket[0], u * pp.bracket[1]],
            "ci": [u * pp.ci[0], u * pp.ci[1]],
            "validity": pp.validity, "relative_error": u * pp.estimate / target - 1.0,
            "evaluations": [r.row() for r in pp.evaluations],
        })
    dist = [abs(r["uTc"] - target) for r in rows]
    approaching = len(dist) < 2 or dist[-1] <= dist[-2]
    return HighUResult(pc, target, rows, approaching)


def _relabel(r: PointResult, u: float, T: float) -> PointResult:
    return PointResult(u, T, r.L, r.estimate, r.seed, r.pad, r.p)


@dataclass
class SlopeResult:
    slope: float
    ci: tuple
    points: list
    dropped: list

    def to_dict(self) -> dict:
        return {"slope": self.slope, "ci": list(self.ci), "points": self.points,
                "dropped": self.dropped}


def fit_slope(u: Sequence[float], Tc: Sequence[float]) -> float:
    """Least-squares slope of log Tc against -log u."""
    return float(np.polyfit(-np.log(u), np.log(Tc), 1)[0])


def low_u_slope(u_list: Sequence[float], cfg: ExperimentConfig, *,
                estimator_for: Callable[[float], Callable[[float], PointResult]] | None = None,
                bracket: tuple | None = None, n_boot: int = 2000,
                runner: ReplicaRunner | None = None) -> SlopeResult:
    """Log-log slope of T_c against 1/u, with a parametric bootstrap CI.

    Bisection runs on log T with relative tolerance ``cfg.tol``. Each T_c is
    resampled log-uniformly over its final bracket (widened to the statistical
    interval when that is finite) and the slope refitted.
    """
    u_list = list(u_list)
    if max(u_list) / min(u_list) < 8:
        raise ValueError("u_list must span at least a factor 8")
    bracket = bracket or (cfg.T_lo or 0.3, cfg.T_hi or 400.0)
    points, dropped = [], []
    for u in u_list:
        est = estimator_for(u) if estimator_for else None
        try:
            pp = estimate_tc(cfg, u=u, bracket=bracket, estimator=est, log_scale=True,
                             runner=runner)
        except ValueError as exc:
            warnings.warn(f"u={u}: T_c unresolved ({exc}); dropped")
            dropped.append(u)
            continue
        lo, hi = pp.bracket
        if math.isfinite(pp.ci[0]) and math.isfinite(pp.ci[1]):
            lo, hi = min(lo, pp.ci[0]), max(hi, pp.ci[1])
        points.append({"u": u, "Tc": pp.estimate, "lo": lo, "hi": hi,
                       "validity": pp.validity})
    if len(points) < 2:
        raise ValueError("fewer than two resolved T_c values")
    us = np.array([p["u"] for p in points])
    slope = fit_slope(us, [p["Tc"] for p in points])
    rng = np.random.default_rng(cfg.seed)
    lo = np.log([p["lo"] for p in points])
    hi = np.log([p["hi"] for p in points])
    boot = np.empty(n_boot)
    for b in range(n_boot):
        boot[b] = fit_slope(us, np.exp(rng.uniform(lo, hi)))
    ci = (float(np.percentile(boot, 2.5)), float(np.percentile(boot, 97.5)))
    return SlopeResult(slope, ci, points, dropped)


# ---------------------------------------------------------------------------
# output


def provenance(cfg: ExperimentConfig, kind: str) -> dict:
    return {"experiment": kind, "config": cfg.to_dict(), "seed": cfg.seed,
            "code_version": __version__, "padding_epsilon": cfg.epsilon}


def to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def to_csv(rows: Iterable[dict]) -> str:
    rows = list(rows)
    extra = sorted({k for r in rows for k in r} - set(CSV_COLUMNS))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(CSV_COLUMNS) + extra
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r.get(c) is None else r.get(c) for c in cols])
    return buf.getvalue()
